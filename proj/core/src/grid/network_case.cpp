#include "awls/grid/network_case.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "awls/errors.hpp"

namespace awls {

namespace {

constexpr double kTapMin = 0.9;
constexpr double kTapMax = 1.1;

void validate_bus(const Bus& b) {
    const std::string who = "bus " + std::to_string(b.id);
    if (!(b.v_min > 0.0) || !(b.v_min <= b.v_max))
        throw ValidationError("voltage-bounds", who + " needs 0 < v_min <= v_max");
    if (!(b.pd >= 0.0)) throw ValidationError("nonnegative-demand", who + " has pd < 0");
    if (!(b.qd >= 0.0)) throw ValidationError("nonnegative-demand", who + " has qd < 0");
    if (!(b.pg_min <= b.pg_max) || !(b.qg_min <= b.qg_max))
        throw ValidationError("generator-bounds", who + " has inverted generator bounds");
}

void validate_branch(const Branch& br) {
    const std::string who = "branch " + std::to_string(br.id);
    if (br.from == br.to) throw ValidationError("branch-endpoints", who + " is a self loop");
    if (!(br.tap >= kTapMin && br.tap <= kTapMax))
        throw ValidationError("tap-range", who + " tap outside [0.9, 1.1]");
    constexpr double half_pi = std::numbers::pi / 2.0;
    if (!(br.theta_min >= -half_pi && br.theta_min <= br.theta_max && br.theta_max <= half_pi))
        throw ValidationError("angle-bounds", who + " needs -pi/2 <= theta_min <= theta_max <= pi/2");
    if (!(br.s_max > 0.0)) throw ValidationError("thermal-limit", who + " needs s_max > 0");
    if (!std::isfinite(br.g) || !std::isfinite(br.b) || !std::isfinite(br.g_sh) || !std::isfinite(br.b_sh))
        throw ValidationError("admittance", who + " has non-finite admittance");
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

double to_double(std::string_view tok, int line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError(line, "expected a number, got '" + std::string(tok) + "'");
    return v;
}

int to_int(std::string_view tok, int line) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError(line, "expected an integer, got '" + std::string(tok) + "'");
    return v;
}

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

enum class Section { None, Bus, Gen, Branch, Unknown };

}  // namespace

NetworkCase::NetworkCase(double base_mva, std::vector<Bus> buses, std::vector<Branch> branches)
    : base_mva_(base_mva), buses_(std::move(buses)), branches_(std::move(branches)) {
    if (!(base_mva_ > 0.0)) throw ValidationError("base-mva", "base_mva must be positive");
    if (buses_.empty()) throw ValidationError("bus-count", "case has no buses");

    std::unordered_map<BusId, std::size_t> bus_pos;
    int slack_count = 0;
    for (std::size_t i = 0; i < buses_.size(); ++i) {
        validate_bus(buses_[i]);
        if (!bus_pos.emplace(buses_[i].id, i).second)
            throw ValidationError("unique-bus-id", "duplicate bus id " + std::to_string(buses_[i].id));
        if (buses_[i].type == 3) {
            ++slack_count;
            slack_index_ = i;
        }
    }
    if (slack_count != 1)
        throw ValidationError("single-slack", "expected exactly one slack bus, found " + std::to_string(slack_count));

    std::unordered_set<BranchId> branch_ids;
    from_idx_.reserve(branches_.size());
    to_idx_.reserve(branches_.size());
    for (const Branch& br : branches_) {
        validate_branch(br);
        if (!branch_ids.insert(br.id).second)
            throw ValidationError("unique-branch-id", "duplicate branch id " + std::to_string(br.id));
        auto f = bus_pos.find(br.from);
        auto t = bus_pos.find(br.to);
        if (f == bus_pos.end() || t == bus_pos.end())
            throw ValidationError("branch-endpoints",
                                  "branch " + std::to_string(br.id) + " references an unknown bus");
        from_idx_.push_back(f->second);
        to_idx_.push_back(t->second);
    }
}

std::size_t NetworkCase::bus_index(BusId id) const {
    for (std::size_t i = 0; i < buses_.size(); ++i)
        if (buses_[i].id == id) return i;
    throw ContractError("unknown bus id " + std::to_string(id));
}

std::size_t NetworkCase::branch_index(BranchId id) const {
    for (std::size_t i = 0; i < branches_.size(); ++i)
        if (branches_[i].id == id) return i;
    throw ContractError("unknown branch id " + std::to_string(id));
}

double NetworkCase::total_demand() const noexcept {
    double s = 0.0;
    for (const Bus& b : buses_) s += b.pd + b.qd;
    return s;
}

NetworkCase parse_case(std::string_view text) {
    double base_mva = 100.0;
    bool have_base = false;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<std::string> warnings;

    struct GenRow {
        BusId bus;
        double pmin, pmax, qmin, qmax;
        int line;
    };
    std::vector<GenRow> gens;

    Section section = Section::None;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto tok = split_ws(line);
        if (tok.empty()) continue;

        if (tok[0] == "BASE_MVA") {
            if (tok.size() < 2) throw ParseError(line_no, "BASE_MVA needs a value");
            base_mva = to_double(tok[1], line_no);
            have_base = true;
            continue;
        }
        if (tok.size() == 1 && std::isalpha(static_cast<unsigned char>(tok[0][0]))) {
            if (tok[0] == "BUS") section = Section::Bus;
            else if (tok[0] == "GEN") section = Section::Gen;
            else if (tok[0] == "BRANCH") section = Section::Branch;
            else {
                section = Section::Unknown;
                warnings.push_back("line " + std::to_string(line_no) + ": unsupported section '" +
                                   std::string(tok[0]) + "' ignored");
            }
            continue;
        }

        auto need = [&](std::size_t n, const char* what) {
            if (tok.size() < n)
                throw ParseError(line_no, std::string(what) + " row needs " + std::to_string(n) + " columns, got " +
                                              std::to_string(tok.size()));
            if (tok.size() > n)
                warnings.push_back("line " + std::to_string(line_no) + ": " + std::to_string(tok.size() - n) +
                                   " extra column(s) ignored");
        };

        switch (section) {
        case Section::None:
            throw ParseError(line_no, "data row outside of a BUS/GEN/BRANCH section");
        case Section::Unknown:
            break;
        case Section::Bus: {
            need(6, "BUS");
            Bus b;
            b.id = to_int(tok[0], line_no);
            b.type = to_int(tok[1], line_no);
            b.v_min = to_double(tok[2], line_no);
            b.v_max = to_double(tok[3], line_no);
            b.pd = to_double(tok[4], line_no);
            b.qd = to_double(tok[5], line_no);
            buses.push_back(b);
            break;
        }
        case Section::Gen: {
            need(5, "GEN");
            gens.push_back({to_int(tok[0], line_no), to_double(tok[1], line_no), to_double(tok[2], line_no),
                            to_double(tok[3], line_no), to_double(tok[4], line_no), line_no});
            break;
        }
        case Section::Branch: {
            need(11, "BRANCH");
            Branch br;
            br.id = to_int(tok[0], line_no);
            br.from = to_int(tok[1], line_no);
            br.to = to_int(tok[2], line_no);
            br.g = to_double(tok[3], line_no);
            br.b = to_double(tok[4], line_no);
            br.g_sh = to_double(tok[5], line_no);
            br.b_sh = to_double(tok[6], line_no);
            br.tap = to_double(tok[7], line_no);
            br.theta_min = to_double(tok[8], line_no);
            br.theta_max = to_double(tok[9], line_no);
            br.s_max = to_double(tok[10], line_no);
            branches.push_back(br);
            break;
        }
        }
    }
    if (!have_base) warnings.push_back("BASE_MVA missing; assuming 100");

    for (const GenRow& g : gens) {
        auto it = std::find_if(buses.begin(), buses.end(), [&](const Bus& b) { return b.id == g.bus; });
        if (it == buses.end())
            throw ValidationError("generator-bus", "generator on line " + std::to_string(g.line) +
                                                        " references unknown bus " + std::to_string(g.bus));
        it->pg_min += g.pmin;
        it->pg_max += g.pmax;
        it->qg_min += g.qmin;
        it->qg_max += g.qmax;
        it->has_generator = true;
    }

    NetworkCase c(base_mva, std::move(buses), std::move(branches));
    for (auto& w : warnings) c.add_warning(std::move(w));
    return c;
}

NetworkCase load_case(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open case file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_case(ss.str());
}

std::string serialize_case(const NetworkCase& c) {
    std::ostringstream out;
    out << "BASE_MVA " << fmt(c.base_mva()) << "\n\nBUS\n# id type v_min v_max pd qd\n";
    for (const Bus& b : c.buses())
        out << b.id << ' ' << b.type << ' ' << fmt(b.v_min) << ' ' << fmt(b.v_max) << ' ' << fmt(b.pd) << ' '
            << fmt(b.qd) << '\n';
    out << "\nGEN\n# bus pg_min pg_max qg_min qg_max\n";
    for (const Bus& b : c.buses())
        if (b.has_generator)
            out << b.id << ' ' << fmt(b.pg_min) << ' ' << fmt(b.pg_max) << ' ' << fmt(b.qg_min) << ' '
                << fmt(b.qg_max) << '\n';
    out << "\nBRANCH\n# id from to g b g_sh b_sh tap theta_min theta_max s_max\n";
    for (const Branch& br : c.branches())
        out << br.id << ' ' << br.from << ' ' << br.to << ' ' << fmt(br.g) << ' ' << fmt(br.b) << ' '
            << fmt(br.g_sh) << ' ' << fmt(br.b_sh) << ' ' << fmt(br.tap) << ' ' << fmt(br.theta_min) << ' '
            << fmt(br.theta_max) << ' ' << fmt(br.s_max) << '\n';
    return out.str();
}

}  // namespace awls
