#include "fairlevel/reporting.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace fairlevel {

using nlohmann::json;

std::string format_num(double v) {
    if (v == 0.0) return "0";
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

std::string opt_num(const std::optional<double>& v) { return v ? format_num(*v) : "NA"; }

// Routes a value through the 12-digit formatter so JSON numbers match the CSV.
json jnum(double v) {
    if (std::isnan(v) || std::isinf(v)) return json(format_num(v));
    return json(std::stod(format_num(v)));
}

json jopt(const std::optional<double>& v) { return v ? jnum(*v) : json(nullptr); }

json unit_json(const DecisionUnit& u, double p) {
    json j;
    j["x"] = u.cell;
    if (u.group == kBlindGroup)
        j["s"] = nullptr;
    else
        j["s"] = u.group;
    j["accept"] = jnum(p);
    return j;
}

json classifier_json(const RandomizedClassifier& f) {
    json arr = json::array();
    for (const auto& [u, p] : f.accept()) arr.push_back(unit_json(u, p));
    return arr;
}

} // namespace

std::string report_csv_header() {
    return "delta,lambda_star,risk,dm,gsr_0,gsr_1,tpr_0,tpr_1,fpr_0,fpr_1,ntr_0,ntr_1,prec_0,"
           "prec_1";
}

std::string report_csv_row(double delta, const FairSolveResult& solved, const GroupReport& report,
                           Notion notion) {
    std::ostringstream row;
    row << format_num(delta) << ',' << format_num(solved.lambda_star) << ','
        << format_num(report.risk) << ',' << format_num(report.dm_for(notion));
    for (auto field : {&GroupStats::gsr, &GroupStats::tpr, &GroupStats::fpr})
        for (int s = 0; s < 2; ++s) row << ',' << format_num(report.group[s].*field);
    for (int s = 0; s < 2; ++s) row << ',' << format_num(report.group[s].ntr(notion));
    for (int s = 0; s < 2; ++s) row << ',' << opt_num(report.group[s].precision);
    return row.str();
}

std::string group_report_to_json(const GroupReport& report) {
    json j;
    j["c"] = jnum(report.c);
    j["risk"] = jnum(report.risk);
    for (int s = 0; s < 2; ++s) {
        json g;
        g["gsr"] = jnum(report.group[s].gsr);
        g["tpr"] = jnum(report.group[s].tpr);
        g["fpr"] = jnum(report.group[s].fpr);
        g["precision"] = jopt(report.group[s].precision);
        j["group"][std::to_string(s)] = g;
    }
    for (Notion n : kAllNotions) {
        json d;
        d["dm"] = jnum(report.dm_for(n));
        d["advantaged"] = report.roles_for(n).advantaged;
        d["disadvantaged"] = report.roles_for(n).disadvantaged;
        d["tie"] = report.roles_for(n).tie;
        j["notion"][to_string(n)] = d;
    }
    return j.dump(2);
}

std::string solve_result_to_json(const FairSolveResult& solved, const GroupReport& report,
                                 Notion notion, Regime regime) {
    json j;
    j["notion"] = to_string(notion);
    j["regime"] = to_string(regime);
    j["delta"] = jnum(solved.tolerance_delta);
    j["lambda_star"] = jnum(solved.lambda_star);
    j["already_fair"] = solved.already_fair;
    j["achieved_dm"] = jnum(solved.achieved_dm);
    j["achieved_risk"] = jnum(solved.achieved_risk);
    j["classifier"] = classifier_json(solved.classifier);
    j["boundary_alpha"] = json::array();
    for (const auto& [u, a] : solved.boundary_alpha)
        j["boundary_alpha"].push_back(unit_json(u, a));
    j["report"] = json::parse(group_report_to_json(report));
    return j.dump(2);
}

std::string sweep_to_csv(const DeltaSweepResult& sweep, const PopulationSpec& pop, double c,
                         Notion notion) {
    std::ostringstream out;
    out << report_csv_header() << '\n';
    for (std::size_t i = 0; i < sweep.results.size(); ++i) {
        const GroupReport rep = rates(sweep.results[i].classifier, pop, c);
        out << report_csv_row(sweep.deltas[i], sweep.results[i], rep, notion) << '\n';
    }
    return out.str();
}

std::string audit_report_to_json(const std::vector<AuditReport>& reports) {
    json arr = json::array();
    for (const auto& report : reports) {
        json r;
        r["population"] = report.population;
        r["c"] = jnum(report.cost);
        r["entries"] = json::array();
        for (const auto& e : report.entries) {
            json je;
            je["claim"] = e.claim;
            je["regime"] = to_string(e.regime);
            je["notion"] = to_string(e.notion);
            je["delta"] = e.delta ? jnum(*e.delta) : json(nullptr);
            je["status"] = to_string(e.status);
            je["detail"] = e.detail;
            if (!e.witness_json.empty()) je["witness"] = json::parse(e.witness_json);
            r["entries"].push_back(je);
        }
        arr.push_back(r);
    }
    return arr.dump(2);
}

std::string audit_report_to_table(const std::vector<AuditReport>& reports) {
    std::ostringstream out;
    int verified = 0, violated = 0, na = 0;
    for (const auto& report : reports) {
        out << "population: " << report.population << " (c=" << format_num(report.cost) << ")\n";
        for (const auto& e : report.entries) {
            out << "  " << e.claim << "  " << to_string(e.regime) << '/' << to_string(e.notion);
            if (e.delta)
                out << " delta=" << format_num(*e.delta);
            else
                out << " (sweep)";
            out << "  " << to_string(e.status);
            if (!e.detail.empty()) out << "  [" << e.detail << "]";
            out << '\n';
            switch (e.status) {
                case AuditStatus::verified: ++verified; break;
                case AuditStatus::violated: ++violated; break;
                case AuditStatus::not_applicable: ++na; break;
            }
        }
    }
    out << "summary: " << verified << " verified, " << violated << " violated, " << na
        << " not-applicable\n";
    return out.str();
}

std::string audit_report_to_csv(const std::vector<AuditReport>& reports) {
    std::ostringstream out;
    out << "population,claim,regime,notion,delta,status\n";
    for (const auto& report : reports) {
        for (const auto& e : report.entries) {
            out << report.population << ',' << e.claim << ',' << to_string(e.regime) << ','
                << to_string(e.notion) << ',' << (e.delta ? format_num(*e.delta) : "NA") << ','
                << to_string(e.status) << '\n';
        }
    }
    return out.str();
}

std::string certify_result_to_json(const CertifyResult& result, const PopulationSpec& pop,
                                   double c, Notion notion, Regime regime, double delta) {
    json j;
    j["population"] = pop.name();
    j["c"] = jnum(c);
    j["notion"] = to_string(notion);
    j["regime"] = to_string(regime);
    j["delta"] = jnum(delta);
    j["pass"] = result.pass;
    j["gap"] = jnum(result.gap);
    j["solver_risk"] = jnum(result.solver_risk);
    j["oracle_risk"] = jnum(result.oracle_risk);
    j["solver_lambda"] = jnum(result.solver_lambda);
    j["solver_dm"] = jnum(result.solver_dm);
    j["grid_resolution"] = result.grid_resolution;
    j["feasible_count"] = result.feasible_count;
    j["solver_classifier"] = classifier_json(result.solver_classifier);
    j["oracle_classifier"] = classifier_json(result.oracle_classifier);
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// SVG chart

namespace {

struct Bar {
    double x, y, w, h;
    const char* fill;
    std::string label;
};

} // namespace

std::string chart_svg(const PopulationSpec& pop, double c, Notion notion, Regime regime,
                      double delta, const GroupReport& unconstrained, const GroupReport& fair) {
    const double width = 640, height = 420;
    const double plot_left = 70, plot_right = 610, plot_top = 70, plot_bottom = 350;
    const double plot_h = plot_bottom - plot_top;

    auto ybar = [&](double v) { return plot_bottom - v * plot_h; };

    std::vector<Bar> bars;
    const double group_w = (plot_right - plot_left) / 2.0;
    const double bar_w = 90;
    for (int s = 0; s < 2; ++s) {
        const double center = plot_left + group_w * (s + 0.5);
        const double v0 = unconstrained.group[s].ntr(notion);
        const double v1 = fair.group[s].ntr(notion);
        bars.push_back({center - bar_w - 10, ybar(v0), bar_w, plot_bottom - ybar(v0), "#4878a8",
                        format_num(v0)});
        bars.push_back({center + 10, ybar(v1), bar_w, plot_bottom - ybar(v1), "#d9822b",
                        format_num(v1)});
    }

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    svg << "<text x=\"320\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">"
        << pop.name() << " | " << to_string(notion) << " / " << to_string(regime)
        << " | c=" << format_num(c) << " delta=" << format_num(delta) << "</text>\n";

    for (int i = 0; i <= 4; ++i) {
        const double v = i / 4.0;
        const double y = ybar(v);
        svg << "<line x1=\"" << plot_left << "\" y1=\"" << y << "\" x2=\"" << plot_right
            << "\" y2=\"" << y << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << plot_left - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << format_num(v) << "</text>\n";
    }

    for (const auto& b : bars) {
        svg << "<rect x=\"" << b.x << "\" y=\"" << b.y << "\" width=\"" << b.w << "\" height=\""
            << b.h << "\" fill=\"" << b.fill << "\"/>\n";
        svg << "<text x=\"" << b.x + b.w / 2 << "\" y=\"" << b.y - 6
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << b.label
            << "</text>\n";
    }

    for (int s = 0; s < 2; ++s) {
        const double center = plot_left + group_w * (s + 0.5);
        svg << "<text x=\"" << center << "\" y=\"" << plot_bottom + 22
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">group " << s
            << "</text>\n";
    }

    svg << "<rect x=\"" << plot_left << "\" y=\"" << height - 40
        << "\" width=\"14\" height=\"14\" fill=\"#4878a8\"/>\n";
    svg << "<text x=\"" << plot_left + 20 << "\" y=\"" << height - 28
        << "\" font-family=\"sans-serif\" font-size=\"12\">unconstrained (Delta="
        << format_num(unconstrained.dm_for(notion)) << ")</text>\n";
    svg << "<rect x=\"" << plot_left + 260 << "\" y=\"" << height - 40
        << "\" width=\"14\" height=\"14\" fill=\"#d9822b\"/>\n";
    svg << "<text x=\"" << plot_left + 280 << "\" y=\"" << height - 28
        << "\" font-family=\"sans-serif\" font-size=\"12\">fair (Delta="
        << format_num(fair.dm_for(notion)) << ")</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string chart_csv(Notion notion, const GroupReport& unconstrained, const GroupReport& fair) {
    std::ostringstream out;
    out << "classifier,ntr_0,ntr_1,dm\n";
    out << "unconstrained," << format_num(unconstrained.group[0].ntr(notion)) << ','
        << format_num(unconstrained.group[1].ntr(notion)) << ','
        << format_num(unconstrained.dm_for(notion)) << '\n';
    out << "fair," << format_num(fair.group[0].ntr(notion)) << ','
        << format_num(fair.group[1].ntr(notion)) << ',' << format_num(fair.dm_for(notion))
        << '\n';
    return out.str();
}

} // namespace fairlevel
