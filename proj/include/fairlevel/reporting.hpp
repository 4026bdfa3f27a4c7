#pragma once

#include <string>
#include <vector>

#include "fairlevel/analysis.hpp"
#include "fairlevel/fairbayes.hpp"
#include "fairlevel/oracle.hpp"

namespace fairlevel {

// Fixed numeric formatting used by every emitted artifact: 12 significant
// digits, "-0" normalized to "0". Undefined values render as "NA" in CSV.
std::string format_num(double v);

// CSV schema shared by sweep rows, solve reports and chart data.
std::string report_csv_header();
std::string report_csv_row(double delta, const FairSolveResult& solved, const GroupReport& report,
                           Notion notion);

std::string solve_result_to_json(const FairSolveResult& solved, const GroupReport& report,
                                 Notion notion, Regime regime);

std::string sweep_to_csv(const DeltaSweepResult& sweep, const PopulationSpec& pop, double c,
                         Notion notion);

std::string group_report_to_json(const GroupReport& report);

std::string audit_report_to_json(const std::vector<AuditReport>& reports);
std::string audit_report_to_table(const std::vector<AuditReport>& reports);
std::string audit_report_to_csv(const std::vector<AuditReport>& reports);

std::string certify_result_to_json(const CertifyResult& result, const PopulationSpec& pop,
                                   double c, Notion notion, Regime regime, double delta);

// Grouped bar chart of per-group NTR under the unconstrained and the fair
// classifier, with the disparity gap annotated. Pure SVG, no plotting library.
std::string chart_svg(const PopulationSpec& pop, double c, Notion notion, Regime regime,
                      double delta, const GroupReport& unconstrained, const GroupReport& fair);

// The numbers behind the chart, same formatting.
std::string chart_csv(Notion notion, const GroupReport& unconstrained, const GroupReport& fair);

} // namespace fairlevel
