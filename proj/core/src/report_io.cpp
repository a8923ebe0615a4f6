#include "spikelab/report_io.hpp"

#include <cstdio>

#include <json.hpp>

namespace spikelab {

namespace {

using nlohmann::json;

json stats_to_json(const FunctionStats& fs) {
    json j{{"M", fs.M},
           {"Mp", fs.Mp},
           {"se", fs.se},
           {"size", fs.size},
           {"conciseness", fs.conciseness},
           {"ability", fs.ability}};
    if (!fs.leveled_M.empty()) {
        j["leveled_M"] = fs.leveled_M;
        j["leveled_Mp"] = fs.leveled_Mp;
    }
    return j;
}

json report_to_json_value(const EfficiencyReport& report) {
    json per = json::array();
    for (const auto& fs : report.per_function) per.push_back(stats_to_json(fs));

    json totals{{"M", report.totals.M},
                {"Mp", report.totals.Mp},
                {"se", report.totals.se},
                {"ability", report.totals.ability}};
    if (!report.totals.leveled_M.empty()) {
        totals["leveled_M"] = report.totals.leveled_M;
        totals["leveled_Mp"] = report.totals.leveled_Mp;
    }

    json j{{"mode", report.mode == EvalMode::Expected ? "expected" : "montecarlo"},
           {"N", report.N},
           {"seed", report.seed},
           {"alpha", report.alpha},
           {"measures_exact", report.measures_exact},
           {"per_function", std::move(per)},
           {"totals", std::move(totals)}};
    if (report.contour.has_value()) {
        j["contour"] = json{{"kappa", report.contour->kappa},
                            {"top_level", report.contour->top_level}};
    }
    return j;
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

std::string report_to_json(const EfficiencyReport& report, int indent) {
    return report_to_json_value(report).dump(indent) + "\n";
}

std::string report_to_csv(const EfficiencyReport& report) {
    std::string out = "function,M,Mp,se,size,conciseness,ability\n";
    for (std::size_t k = 0; k < report.per_function.size(); ++k) {
        const auto& fs = report.per_function[k];
        out += "f" + std::to_string(k + 1) + "," + std::to_string(fs.M) + "," +
               std::to_string(fs.Mp) + "," + fmt6(fs.se) + "," + std::to_string(fs.size) + "," +
               fmt6(fs.conciseness) + "," + fmt6(fs.ability) + "\n";
    }
    std::int64_t total_size = 0;
    for (const auto& fs : report.per_function) total_size += fs.size;
    out += "total," + std::to_string(report.totals.M) + "," + std::to_string(report.totals.Mp) +
           "," + fmt6(report.totals.se) + "," + std::to_string(total_size) + ",," +
           fmt6(report.totals.ability) + "\n";
    return out;
}

std::string ranked_to_json(const std::vector<RankedEntry>& ranked, int indent) {
    json arr = json::array();
    for (const auto& entry : ranked) {
        arr.push_back(json{{"name", entry.name},
                           {"bucket", entry.bucket},
                           {"total_size", entry.total_size},
                           {"report", report_to_json_value(entry.report)}});
    }
    return arr.dump(indent) + "\n";
}

std::string ranked_to_csv(const std::vector<RankedEntry>& ranked) {
    std::string out = "rank,name,bucket,se,ability,total_size\n";
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& e = ranked[i];
        out += std::to_string(i + 1) + "," + e.name + "," + std::to_string(e.bucket) + "," +
               fmt6(e.report.totals.se) + "," + fmt6(e.report.totals.ability) + "," +
               std::to_string(e.total_size) + "\n";
    }
    return out;
}

} // namespace spikelab
