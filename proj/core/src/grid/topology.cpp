#include "awls/grid/topology.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <nlohmann/json.hpp>

#include "awls/errors.hpp"

namespace awls {

std::size_t Topology::num_off() const noexcept {
    return static_cast<std::size_t>(std::count(status.begin(), status.end(), std::uint8_t{0}));
}

std::string topology_to_json(const Topology& t) {
    nlohmann::json j = nlohmann::json::array();
    for (auto s : t.status) j.push_back(static_cast<int>(s));
    return j.dump();
}

Topology topology_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    if (!j.is_array()) throw ContractError("topology JSON must be an array");
    Topology t;
    for (const auto& v : j) {
        int s = v.get<int>();
        if (s != 0 && s != 1) throw ContractError("topology entries must be 0 or 1");
        t.status.push_back(static_cast<std::uint8_t>(s));
    }
    return t;
}

bool is_connected(const NetworkCase& c, const Topology& topo) {
    if (topo.size() != c.num_branches())
        throw ContractError("topology length " + std::to_string(topo.size()) + " != branch count " +
                            std::to_string(c.num_branches()));
    const std::size_t n = c.num_buses();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    std::size_t components = n;
    for (std::size_t e = 0; e < c.num_branches(); ++e) {
        if (!topo.status[e]) continue;
        auto a = find(c.from_index(e));
        auto b = find(c.to_index(e));
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components == 1;
}

BudgetSet enumerate_budget_set(const NetworkCase& c, const std::vector<BranchId>& candidate_lines, std::size_t k,
                               bool exclude_islanding) {
    BudgetSet out;
    std::vector<std::size_t> cand;
    cand.reserve(candidate_lines.size());
    for (BranchId id : candidate_lines) {
        std::size_t idx = c.branch_index(id);
        if (std::find(cand.begin(), cand.end(), idx) != cand.end())
            throw ContractError("candidate line " + std::to_string(id) + " listed twice");
        cand.push_back(idx);
    }
    if (k > cand.size()) {
        out.warnings.push_back("budget k=" + std::to_string(k) + " exceeds " + std::to_string(cand.size()) +
                               " candidate lines; clamped");
        k = cand.size();
    }
    const std::size_t m = cand.size();
    for (std::size_t r = 0; r <= k; ++r) {
        // Lexicographic r-combinations of candidate positions.
        std::vector<std::size_t> comb(r);
        std::iota(comb.begin(), comb.end(), std::size_t{0});
        while (true) {
            Topology t = Topology::all_on(c.num_branches());
            for (std::size_t p : comb) t.status[cand[p]] = 0;
            if (!exclude_islanding || is_connected(c, t)) out.topologies.push_back(std::move(t));
            if (r == 0) break;
            std::size_t i = r;
            while (i > 0 && comb[i - 1] == m - r + i - 1) --i;
            if (i == 0) break;
            ++comb[i - 1];
            for (std::size_t j = i; j < r; ++j) comb[j] = comb[j - 1] + 1;
        }
    }
    return out;
}

std::vector<BranchId> load_line_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open line list " + path);
    auto j = nlohmann::json::parse(in);
    if (j.is_object() && j.contains("lines")) j = j["lines"];
    return j.get<std::vector<BranchId>>();
}

}  // namespace awls
