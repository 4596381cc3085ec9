#include "awls/pipeline/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <iterator>
#include <random>
#include <string>

#include "awls/errors.hpp"
#include "awls/pipeline/evaluator.hpp"
#include "parallel.hpp"

namespace awls {

void LoadBands::validate() const {
    if (bands.empty()) throw ContractError("at least one load band is required");
    for (const auto& b : bands)
        if (!(b[0] >= 0.0 && b[0] <= b[1])) throw ContractError("load band bounds must satisfy 0 <= lo <= hi");
}

std::vector<LoadProfile> sample_profiles(const NetworkCase& c, std::size_t n, const LoadBands& bands,
                                         std::uint64_t seed) {
    bands.validate();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, bands.bands.size() - 1);
    const LoadProfile nominal = LoadProfile::nominal(c);
    std::vector<LoadProfile> out;
    out.reserve(n);
    for (std::size_t p = 0; p < n; ++p) {
        const auto& band = bands.bands[pick(rng)];
        std::uniform_real_distribution<double> u(band[0], band[1]);
        LoadProfile lp = nominal;
        for (std::size_t i = 0; i < c.num_buses(); ++i) {
            const double f = u(rng);
            lp.pd[i] *= f;
            lp.qd[i] *= f;
        }
        out.push_back(std::move(lp));
    }
    return out;
}

void Dataset::validate(double tol) const {
    for (const Sample& s : samples) {
        if (s.topology >= topologies.size() || s.profile >= profiles.size())
            throw ValidationError("dataset-index", "sample refers to a missing topology or profile");
        const double cap = profiles[s.profile].total();
        if (!(s.label >= -tol && s.label <= cap + tol))
            throw ValidationError("label-range", "label " + std::to_string(s.label) + " outside [0, " +
                                                     std::to_string(cap) + "]");
    }
}

namespace {

std::vector<std::size_t> pick_sorted(std::size_t n, std::size_t want, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (want == 0 || want >= n) return idx;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(want);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace

Dataset gen_dataset(const NetworkCase& c, const DatasetConfig& config, const std::string& case_id) {
    config.bands.validate();
    if (config.n_profiles == 0) throw ContractError("n_profiles must be positive");
    Dataset d;
    d.case_id = case_id;
    d.config = config;

    std::mt19937_64 master(config.seed);
    const std::uint64_t profile_seed = master(), topo_seed = master(), pair_seed = master();

    BudgetSet budget = enumerate_budget_set(c, config.candidate_lines, config.k, config.exclude_islanding);
    std::mt19937_64 trng(topo_seed);
    for (std::size_t t : pick_sorted(budget.topologies.size(), config.n_topologies, trng))
        d.topologies.push_back(budget.topologies[t]);
    d.profiles = sample_profiles(c, config.n_profiles, config.bands, profile_seed);

    const std::size_t total = d.topologies.size() * d.profiles.size();
    std::mt19937_64 prng(pair_seed);
    for (std::size_t pair : pick_sorted(total, config.max_samples, prng)) {
        Sample s;
        s.topology = pair / d.profiles.size();
        s.profile = pair % d.profiles.size();
        d.samples.push_back(std::move(s));
    }

    // samples are topology-major; one task per topology keeps the LP warm
    std::vector<std::size_t> start{0};
    for (std::size_t i = 1; i <= d.samples.size(); ++i)
        if (i == d.samples.size() || d.samples[i].topology != d.samples[i - 1].topology) start.push_back(i);
    detail::parallel_for(start.size() - 1, config.jobs, [&](std::size_t g) {
        ShedEvaluator ev(c);
        for (std::size_t i = start[g]; i < start[g + 1]; ++i) {
            Sample& s = d.samples[i];
            const ShedResult r = ev.evaluate(d.topologies[s.topology], d.profiles[s.profile]);
            if (r.status != SolveStatus::Optimal) ev.shed(d.topologies[s.topology], d.profiles[s.profile]);
            s.label = r.shed;
            s.bus_shed = r.bus_shed;
        }
    });
    d.validate();
    return d;
}

std::vector<double> surrogate_input(const Topology& topo, const LoadProfile& load) {
    std::vector<double> in;
    in.reserve(topo.size() + load.pd.size() + load.qd.size());
    for (std::uint8_t s : topo.status) in.push_back(s ? 1.0 : 0.0);
    in.insert(in.end(), load.pd.begin(), load.pd.end());
    in.insert(in.end(), load.qd.begin(), load.qd.end());
    return in;
}

namespace {

struct SelectionMask {
    std::vector<char> profile, topology;

    SelectionMask(const Dataset& d, const SampleSelection& sel)
        : profile(d.profiles.size(), 0), topology(d.topologies.size(), 0) {
        for (std::size_t p : sel.profiles) profile.at(p) = 1;
        for (std::size_t t : sel.topologies) topology.at(t) = 1;
    }
    bool operator()(const Sample& s) const { return profile[s.profile] && topology[s.topology]; }
};

std::vector<std::size_t> iota_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

void check_fraction(double f, const char* what) {
    if (!(f >= 0.0 && f <= 1.0)) throw ContractError(std::string(what) + " must be in [0, 1]");
}

// `count` entries drawn uniformly, sorted.
std::vector<std::size_t> draw(std::vector<std::size_t> pool, std::size_t count, std::mt19937_64& rng) {
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min(count, pool.size()));
    std::sort(pool.begin(), pool.end());
    return pool;
}

DataSplit topology_split(const Dataset& d, std::vector<std::size_t> train, std::vector<std::size_t> test) {
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    DataSplit s;
    s.train = {iota_indices(d.profiles.size()), std::move(train)};
    s.test = {iota_indices(d.profiles.size()), std::move(test)};
    return s;
}

}  // namespace

SampleSelection SampleSelection::all_topologies(const Dataset& d, std::vector<std::size_t> profiles) {
    return {std::move(profiles), iota_indices(d.topologies.size())};
}

TrainingSet to_training_set(const Dataset& d, const std::vector<std::size_t>& profiles) {
    return to_training_set(d, SampleSelection::all_topologies(d, profiles));
}

TrainingSet to_training_set(const Dataset& d, const SampleSelection& sel) {
    const SelectionMask keep(d, sel);
    TrainingSet t;
    for (const Sample& s : d.samples) {
        if (!keep(s)) continue;
        t.inputs.push_back(surrogate_input(d.topologies[s.topology], d.profiles[s.profile]));
        t.labels.push_back(s.label);
    }
    return t;
}

std::vector<std::vector<double>> area_labels(const Dataset& d, const std::vector<int>& area_of, int num_areas,
                                             const std::vector<std::size_t>& profiles) {
    return area_labels(d, area_of, num_areas, SampleSelection::all_topologies(d, profiles));
}

std::vector<std::vector<double>> area_labels(const Dataset& d, const std::vector<int>& area_of, int num_areas,
                                             const SampleSelection& sel) {
    const SelectionMask keep(d, sel);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(num_areas));
    for (const Sample& s : d.samples) {
        if (!keep(s)) continue;
        if (s.bus_shed.size() != area_of.size()) throw ContractError("bus shed does not match the partition");
        std::vector<double> sum(out.size(), 0.0);
        for (std::size_t i = 0; i < area_of.size(); ++i) sum[static_cast<std::size_t>(area_of[i])] += s.bus_shed[i];
        for (std::size_t a = 0; a < out.size(); ++a) out[a].push_back(sum[a]);
    }
    return out;
}

ProfileSplit split_profiles(std::size_t n_profiles, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction <= 1.0)) throw ContractError("train fraction must be in (0, 1]");
    std::vector<std::size_t> idx = iota_indices(n_profiles);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n_profiles)));
    ProfileSplit s;
    s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

DataSplit profile_split(const Dataset& d, double train_fraction, std::uint64_t seed) {
    const ProfileSplit p = split_profiles(d.profiles.size(), train_fraction, seed);
    return {SampleSelection::all_topologies(d, p.train), SampleSelection::all_topologies(d, p.test)};
}

DataSplit outage_count_split(const Dataset& d, std::size_t max_train_outages, double extra_fraction,
                             double top_fraction, std::uint64_t seed) {
    check_fraction(extra_fraction, "extra fraction");
    check_fraction(top_fraction, "top fraction");
    std::vector<double> total(d.topologies.size(), 0.0);
    std::vector<std::size_t> count(d.topologies.size(), 0);
    for (const Sample& s : d.samples) {
        total[s.topology] += s.label;
        ++count[s.topology];
    }
    std::vector<std::size_t> train, heavy;
    for (std::size_t t = 0; t < d.topologies.size(); ++t)
        (d.topologies[t].num_off() <= max_train_outages ? train : heavy).push_back(t);
    // most severe first; index breaks ties
    auto mean = [&](std::size_t t) { return count[t] ? total[t] / static_cast<double>(count[t]) : 0.0; };
    std::vector<std::size_t> ranked = heavy;
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) { return mean(a) > mean(b); });
    const auto n = static_cast<double>(heavy.size());
    ranked.resize(static_cast<std::size_t>(std::llround(top_fraction * n)));
    std::mt19937_64 rng(seed);
    const std::vector<std::size_t> extra =
        draw(ranked, static_cast<std::size_t>(std::llround(extra_fraction * n)), rng);
    std::vector<std::size_t> test;
    std::set_difference(heavy.begin(), heavy.end(), extra.begin(), extra.end(), std::back_inserter(test));
    train.insert(train.end(), extra.begin(), extra.end());
    return topology_split(d, std::move(train), std::move(test));
}

DataSplit line_set_split(const NetworkCase& c, const Dataset& d, const std::vector<BranchId>& base_lines,
                         double extra_fraction, std::uint64_t seed) {
    check_fraction(extra_fraction, "extra fraction");
    std::vector<char> base(c.num_branches(), 0);
    for (BranchId id : base_lines) base[c.branch_index(id)] = 1;
    std::vector<std::size_t> train, other;
    for (std::size_t t = 0; t < d.topologies.size(); ++t) {
        const Topology& topo = d.topologies[t];
        if (topo.size() != c.num_branches()) throw ContractError("dataset does not match the case");
        bool inside = true;
        for (std::size_t l = 0; l < topo.size() && inside; ++l) inside = topo.status[l] || base[l];
        (inside ? train : other).push_back(t);
    }
    std::mt19937_64 rng(seed);
    const std::vector<std::size_t> extra =
        draw(other, static_cast<std::size_t>(std::llround(extra_fraction * static_cast<double>(other.size()))), rng);
    std::vector<std::size_t> test;
    std::set_difference(other.begin(), other.end(), extra.begin(), extra.end(), std::back_inserter(test));
    train.insert(train.end(), extra.begin(), extra.end());
    return topology_split(d, std::move(train), std::move(test));
}

nlohmann::json bands_to_json(const LoadBands& b) { return b.bands; }

LoadBands bands_from_json(const nlohmann::json& j) {
    LoadBands b;
    b.bands = j.get<std::vector<std::array<double, 2>>>();
    b.validate();
    return b;
}

namespace {

nlohmann::json config_to_json(const DatasetConfig& c) {
    return {{"candidate_lines", c.candidate_lines}, {"k", c.k},
            {"n_profiles", c.n_profiles},           {"n_topologies", c.n_topologies},
            {"max_samples", c.max_samples},         {"exclude_islanding", c.exclude_islanding},
            {"bands", bands_to_json(c.bands)},      {"seed", c.seed}};
}

DatasetConfig config_from_json(const nlohmann::json& j) {
    DatasetConfig c;
    c.candidate_lines = j.at("candidate_lines").get<std::vector<BranchId>>();
    c.k = j.at("k").get<std::size_t>();
    c.n_profiles = j.at("n_profiles").get<std::size_t>();
    c.n_topologies = j.at("n_topologies").get<std::size_t>();
    c.max_samples = j.at("max_samples").get<std::size_t>();
    c.exclude_islanding = j.at("exclude_islanding").get<bool>();
    c.bands = bands_from_json(j.at("bands"));
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

}  // namespace

void write_dataset(const Dataset& d, std::ostream& out) {
    nlohmann::json h = {{"schema", "awls.dataset/1"},
                        {"case", d.case_id},
                        {"config", config_to_json(d.config)},
                        {"topologies", d.topologies.size()},
                        {"profiles", d.profiles.size()},
                        {"samples", d.samples.size()}};
    out << h.dump() << '\n';
    for (std::size_t t = 0; t < d.topologies.size(); ++t)
        out << nlohmann::json{{"topology", t}, {"x", d.topologies[t].status}}.dump() << '\n';
    for (std::size_t p = 0; p < d.profiles.size(); ++p)
        out << nlohmann::json{{"profile", p}, {"pd", d.profiles[p].pd}, {"qd", d.profiles[p].qd}}.dump() << '\n';
    for (const Sample& s : d.samples)
        out << nlohmann::json{{"sample", {s.topology, s.profile}}, {"label", s.label}, {"bus_shed", s.bus_shed}}.dump()
            << '\n';
}

Dataset read_dataset(std::istream& in) {
    std::string line;
    int lineno = 0;
    auto next = [&]() -> nlohmann::json {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                return nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw ParseError(lineno, e.what());
            }
        }
        return nullptr;
    };
    const nlohmann::json h = next();
    if (!h.is_object() || h.value("schema", "") != "awls.dataset/1")
        throw ValidationError("dataset-schema", "expected an awls.dataset/1 header");
    Dataset d;
    d.case_id = h.value("case", "");
    d.config = config_from_json(h.at("config"));
    const auto nt = h.at("topologies").get<std::size_t>(), np = h.at("profiles").get<std::size_t>(),
               ns = h.at("samples").get<std::size_t>();
    try {
        for (std::size_t t = 0; t < nt; ++t) {
            const auto j = next();
            if (j.is_null() || j.at("topology").get<std::size_t>() != t) throw ParseError(lineno, "expected topology " + std::to_string(t));
            d.topologies.push_back({j.at("x").get<std::vector<std::uint8_t>>()});
        }
        for (std::size_t p = 0; p < np; ++p) {
            const auto j = next();
            if (j.is_null() || j.at("profile").get<std::size_t>() != p) throw ParseError(lineno, "expected profile " + std::to_string(p));
            d.profiles.push_back({j.at("pd").get<std::vector<double>>(), j.at("qd").get<std::vector<double>>()});
        }
        for (std::size_t i = 0; i < ns; ++i) {
            const auto j = next();
            if (j.is_null()) throw ParseError(lineno, "dataset ends after " + std::to_string(i) + " samples");
            Sample s;
            s.topology = j.at("sample").at(0).get<std::size_t>();
            s.profile = j.at("sample").at(1).get<std::size_t>();
            s.label = j.at("label").get<double>();
            s.bus_shed = j.at("bus_shed").get<std::vector<double>>();
            d.samples.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(lineno, e.what());
    }
    d.validate();
    return d;
}

}  // namespace awls
