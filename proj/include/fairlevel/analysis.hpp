#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fairlevel/fairbayes.hpp"

namespace fairlevel {

// Blind-regime cell partition by the sign of lambda* nu(x), with the normalized
// margin zeta(x) = (eta(x) - c) / nu(x) and its extrema. Extrema over empty sets
// use the order-preserving sentinels: a_max/b_max = -inf, a_min/b_min = +inf.
// a_* range over {nu > 0}, b_* over {nu < 0}, independent of lambda*'s sign.
struct RegionPartition {
    std::set<CellId> q_high;    // lambda* nu(x) > 0: advantaged-like
    std::set<CellId> q_low;     // lambda* nu(x) < 0: disadvantaged-like
    std::set<CellId> q_neutral; // lambda* nu(x) = 0
    std::map<CellId, double> zeta; // only where nu != 0
    double a_max = 0.0, a_min = 0.0, b_max = 0.0, b_min = 0.0;

    Notion notion = Notion::dp;
    double cost = 0.5;
    double lambda_star = 0.0;

    bool separation_high_le_low() const; // a_max <= b_min
    bool separation_low_lt_high() const; // b_max < a_min
};

// Blind regime only; throws UsageError on aware solve results.
RegionPartition partition(const PopulationSpec& pop, double c, Notion notion,
                          const FairSolveResult& solved);

enum class Pattern { both_down, both_up, opposite, no_change, mixed };
enum class SeparationCase { high_le_low, low_lt_high, both, neither };

const char* to_string(Pattern p);
const char* to_string(SeparationCase s);

// How the two groups' notion-target rates moved between the unconstrained and
// the fair classifier. Sign classification uses tolerance 1e-12 on the deltas:
//   (0,0) -> no-change; strictly (-,-) -> both-down; strictly (+,+) -> both-up;
//   advantaged weakly down / disadvantaged weakly up (not both flat) -> opposite;
//   anything else -> mixed.
struct PatternVerdict {
    Pattern pattern = Pattern::no_change;
    std::array<double, 2> ntr_delta{0.0, 0.0}; // fair - unconstrained, indexed by s
    SeparationCase separation = SeparationCase::neither; // blind only; neither for aware
    GroupRoles roles;       // from the unconstrained classifier
    double lambda_star = 0.0;
    // Directional assertions (aware opposite-direction; blind separation cases).
    // Empty on every valid population; populated entries are reportable defects.
    std::vector<std::string> assertion_failures;
};

PatternVerdict classify_pattern(const PopulationSpec& pop, double c, Notion notion,
                                Regime regime, double delta, const SolveOptions& opt = {});

// Group-by-region joint mass and the masked share: the fraction of each
// region's mass whose true group opposes the region's apparent group (the group
// the region's nu sign points to, given lambda*'s sign).
struct MaskedMassReport {
    struct RegionMass {
        std::array<double, 2> group_mass{0.0, 0.0}; // P(S=s, X in region)
        double total = 0.0;
        int apparent_group = 1;
        std::optional<double> masked_fraction; // nullopt when the region is empty
    };
    RegionMass q_high;
    RegionMass q_low;
};

MaskedMassReport masked_mass(const PopulationSpec& pop, const RegionPartition& part);

// Order alignment: true iff for all x, x' in region, g(x) <= g(x') implies
// h(x) <= h(x'), checked pairwise with comparison tolerance tol.
// Throws UsageError when a region cell is missing from either map.
bool order_aligned(const std::map<CellId, double>& g, const std::map<CellId, double>& h,
                   const std::set<CellId>& region, double tol = 1e-12);

// The four blind-regime precision cases for one group. Under a_max <= b_min the
// alignment of zeta with +/- eta_s on q_high decides the direction; under
// b_max < a_min the eta_s level separation between regions plus alignment on
// q_low decides it. Alignment and sup/inf of eta_s are evaluated over region
// cells where eta_s is defined.
struct PrecisionCaseVerdict {
    bool precision_defined = false;            // under both classifiers
    std::optional<double> precision_unconstrained;
    std::optional<double> precision_fair;
    SeparationCase separation = SeparationCase::neither;

    // Case flags; several may hold at once (then every implied direction is checked).
    bool deletion_aligned = false;      // a_max <= b_min, zeta ~ (2sh-1) eta_s on q_high -> pi up
    bool deletion_antialigned = false;  // a_max <= b_min, zeta ~ (1-2sh) eta_s on q_high -> pi down
    bool addition_aligned = false;      // b_max < a_min, level cond., zeta ~ (2sh-1) eta_s on q_low -> pi up
    bool addition_antialigned = false;  // b_max < a_min, level cond., zeta ~ (1-2sh) eta_s on q_low -> pi down

    bool any_case() const {
        return deletion_aligned || deletion_antialigned || addition_aligned || addition_antialigned;
    }
    // Every direction implied by a holding case is satisfied (slack 1e-9).
    bool directions_hold = true;
    std::vector<std::string> failures;
};

PrecisionCaseVerdict precision_cases(const PopulationSpec& pop, double c, Notion notion,
                                     double delta, int group, const SolveOptions& opt = {});

// Structural audit over a grid of (notion, regime, delta) points.
enum class AuditStatus { verified, violated, not_applicable };

const char* to_string(AuditStatus s);

struct AuditEntry {
    // One of: aware-threshold-shift, aware-ntr-redistribution, aware-precision,
    // aware-sweep-monotone, blind-threshold-regions, blind-ntr-direction,
    // blind-precision-cases, blind-sweep-monotone.
    std::string claim;
    Regime regime = Regime::aware;
    Notion notion = Notion::dp;
    std::optional<double> delta; // nullopt for whole-sweep claims
    AuditStatus status = AuditStatus::verified;
    std::string detail;       // short human-readable numbers
    std::string witness_json; // violated entries carry the population inline
};

struct AuditGridPoint {
    Notion notion;
    Regime regime;
    double delta;
};

struct AuditReport {
    std::string population;
    double cost = 0.5;
    std::vector<AuditEntry> entries;

    bool any_aware_violation() const;
    bool any_violation() const;
};

AuditReport audit(const PopulationSpec& pop, double c, const std::vector<AuditGridPoint>& grid,
                  const SolveOptions& opt = {});

// Convenience: full grid = all notions x all regimes x the given deltas.
std::vector<AuditGridPoint> full_grid(const std::vector<double>& deltas);

} // namespace fairlevel
