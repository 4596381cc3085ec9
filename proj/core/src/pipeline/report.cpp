#include "awls/pipeline/report.hpp"

#include <charconv>
#include <cmath>
#include <map>

#include "awls/pipeline/metrics.hpp"

namespace awls {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string topology_bits(const Topology& t) {
    std::string s;
    for (std::uint8_t b : t.status) s += b ? '1' : '0';
    return s;
}

nlohmann::json ExperimentReport::aggregate() const {
    std::vector<double> gaps, realized, bench, slack, nodes;
    std::size_t undefined = 0, improved = 0, worse = 0;
    std::map<std::string, std::size_t> statuses;
    for (const ProfileRow& r : rows) {
        if (r.gap) gaps.push_back(*r.gap);
        else ++undefined;
        realized.push_back(r.realized);
        bench.push_back(r.benchmark);
        slack.push_back(r.slack);
        nodes.push_back(static_cast<double>(r.nodes));
        if (r.realized > r.top_realized + 1e-9) ++improved;
        if (r.realized < r.top_realized - 1e-9) ++worse;
        ++statuses[status_name(r.status)];
    }
    nlohmann::json j;
    j["method"] = method;
    j["case"] = case_id;
    if (method == "pcnn") j["lambda"] = lambda;
    j["profiles"] = rows.size();
    j["gap_pct"] = summary_to_json(summarize(gaps));
    j["gap_undefined"] = undefined;
    j["realized"] = summary_to_json(summarize(realized));
    j["benchmark"] = summary_to_json(summarize(bench));
    j["slack"] = summary_to_json(summarize(slack));
    j["nodes"] = summary_to_json(summarize(nodes));
    j["refinement"] = {{"improved", improved}, {"worse", worse}};
    j["status"] = statuses;
    return j;
}

void ExperimentReport::write_csv(std::ostream& out) const {
    out << "profile,method,lambda,status,chosen,top_incumbent,predicted,realized,top_realized,benchmark,gap_pct,"
           "slack,pool_size,nodes\n";
    for (const ProfileRow& r : rows) {
        out << r.profile << ',' << method << ',' << format_double(lambda) << ',' << status_name(r.status) << ','
            << topology_bits(r.chosen) << ',' << topology_bits(r.top_incumbent) << ',' << format_double(r.predicted)
            << ',' << format_double(r.realized) << ',' << format_double(r.top_realized) << ','
            << format_double(r.benchmark) << ',' << (r.gap ? format_double(*r.gap) : std::string()) << ','
            << format_double(r.slack) << ',' << r.pool_size << ',' << r.nodes << '\n';
    }
}

void ExperimentReport::write_timing_csv(std::ostream& out) const {
    out << "profile,method,lambda,seconds\n";
    for (const ProfileRow& r : rows)
        out << r.profile << ',' << method << ',' << format_double(lambda) << ',' << format_double(r.seconds) << '\n';
}

}  // namespace awls
