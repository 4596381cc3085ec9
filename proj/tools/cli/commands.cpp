#include "commands.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "awls/errors.hpp"
#include "awls/model/powerflow.hpp"
#include "awls/nn/train.hpp"
#include "awls/partition/partition.hpp"
#include "awls/pipeline/awls_solve.hpp"
#include "awls/pipeline/benchmark.hpp"
#include "awls/pipeline/dataset.hpp"
#include "awls/pipeline/experiment.hpp"
#include "awls/pipeline/report.hpp"

namespace awls::cli {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
}

Dataset read_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config", "cannot open dataset " + path);
    return read_dataset(in);
}

LoadProfile resolve_load(const Context& ctx, const json& block) {
    const std::string ds = block.at("dataset").get<std::string>();
    LoadProfile load;
    if (!ds.empty()) {
        const Dataset d = read_dataset_file(ds);
        const auto i = block.at("profile").get<std::size_t>();
        if (i >= d.profiles.size()) throw ValidationError("config", "profile index out of range for " + ds);
        load = d.profiles[i];
    } else {
        load = LoadProfile::nominal(ctx.grid);
    }
    const double s = block.at("scale").get<double>();
    for (double& v : load.pd) v *= s;
    for (double& v : load.qd) v *= s;
    load.validate(ctx.grid);
    return load;
}

std::string off_list(const NetworkCase& c, const Topology& t) {
    std::string s;
    for (std::size_t l = 0; l < t.size(); ++l)
        if (!t.status[l]) s += (s.empty() ? "" : ";") + std::to_string(c.branches()[l].id);
    return s;
}

json off_ids(const NetworkCase& c, const Topology& t) {
    json a = json::array();
    for (std::size_t l = 0; l < t.size(); ++l)
        if (!t.status[l]) a.push_back(c.branches()[l].id);
    return a;
}

void write_json(const std::filesystem::path& p, const json& j) { open_out(p) << j.dump(2) << '\n'; }

std::vector<BranchId> line_ids(const json& lines) {
    if (lines.is_string()) return load_line_list(lines.get<std::string>());
    return lines.get<std::vector<BranchId>>();
}

// the same split for train and eval
DataSplit resolve_split(const Context& ctx, const Dataset& d) {
    const json& s = ctx.config.at("split");
    const std::string mode = s.at("mode").get<std::string>();
    if (mode == "outage_count")
        return outage_count_split(d, s.at("max_train_outages").get<std::size_t>(), s.at("extra_fraction").get<double>(),
                                  s.at("top_fraction").get<double>(), ctx.seed);
    if (mode == "line_set")
        return line_set_split(ctx.grid, d, line_ids(s.at("base_lines")), s.at("extra_fraction").get<double>(),
                              ctx.seed);
    return profile_split(d, s.at("train_fraction").get<double>(), ctx.seed);
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

}  // namespace

void cmd_gen_data(Context& ctx) {
    const json& g = ctx.config.at("gen-data");
    DatasetConfig dc;
    dc.candidate_lines = ctx.lines;
    dc.k = ctx.k;
    dc.n_profiles = g.at("n_profiles").get<std::size_t>();
    dc.n_topologies = g.at("n_topologies").get<std::size_t>();
    dc.max_samples = g.at("max_samples").get<std::size_t>();
    dc.exclude_islanding = g.at("exclude_islanding").get<bool>();
    dc.bands = bands_from_json(g.at("bands"));
    dc.seed = ctx.seed;
    dc.jobs = ctx.jobs;
    const Dataset d = gen_dataset(ctx.grid, dc, ctx.case_id);
    auto f = open_out(ctx.artifacts.add("dataset.jsonl"));
    write_dataset(d, f);
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        lo = i ? std::min(lo, d.samples[i].label) : d.samples[i].label;
        hi = i ? std::max(hi, d.samples[i].label) : d.samples[i].label;
    }
    *ctx.out << "gen-data: " << d.samples.size() << " samples (" << d.topologies.size() << " topologies x "
             << d.profiles.size() << " profiles), labels " << fixed(lo) << ".." << fixed(hi) << " pu\n";
}

void cmd_partition(Context& ctx) {
    const json& p = ctx.config.at("partition");
    PartitionConfig pc;
    pc.areas = p.at("areas").get<int>();
    pc.embed_dim = p.at("embed_dim").get<int>();
    pc.d_max = p.at("d_max").get<std::size_t>();
    pc.seed = ctx.seed;
    const Partition part = spectral_partition(ctx.grid, pc);
    write_json(ctx.artifacts.add("partition.json"), partition_to_json(ctx.grid, part));
    std::string sizes;
    for (const auto& a : part.areas(ctx.grid)) sizes += (sizes.empty() ? "" : ",") + std::to_string(a.size());
    *ctx.out << "partition: " << part.num_areas << " areas (sizes " << sizes << "), " << part.tie_lines.size()
             << " tie lines\n";
}

void cmd_train(Context& ctx) {
    const json& t = ctx.config.at("train");
    const Dataset d = read_dataset_file(t.at("dataset").get<std::string>());
    if (d.profiles.empty() || d.profiles.front().pd.size() != ctx.grid.num_buses())
        throw ValidationError("config", "dataset does not match the case");
    const DataSplit split = resolve_split(ctx, d);
    const TrainingSet train_set = to_training_set(d, split.train);
    const TrainingSet test_set = to_training_set(d, split.test);
    const InputSpec spec{ctx.grid.num_branches(), ctx.grid.num_buses()};

    const std::string arch = t.at("arch").get<std::string>();
    ReluNet net;
    json info{{"arch", arch}};
    if (arch == "single") {
        net = ReluNet::dense(spec, t.at("hidden").get<std::vector<std::size_t>>(), ctx.seed);
    } else {
        Partition part;
        const std::string pfile = t.at("partition").get<std::string>();
        if (!pfile.empty()) {
            std::ifstream in(pfile);
            part = partition_from_json(ctx.grid, json::parse(in));
        } else {
            PartitionConfig pc;
            pc.areas = t.at("areas").get<int>();
            pc.seed = ctx.seed;
            part = spectral_partition(ctx.grid, pc);
            write_json(ctx.artifacts.add("partition.json"), partition_to_json(ctx.grid, part));
        }
        const auto labels = area_labels(d, part.area_of, part.num_areas, split.train);
        const auto budget =
            budget_neurons(labels, t.at("neurons_per_layer").get<std::size_t>(), t.at("h_min").get<std::size_t>());
        net = build_block_sparse_net(ctx.grid, part, budget, t.at("hidden_layers").get<std::size_t>(), ctx.seed);
        info["areas"] = part.num_areas;
        info["neurons_per_area"] = budget;
    }
    TrainConfig tc;
    tc.epochs = t.at("epochs").get<std::size_t>();
    tc.learning_rate = t.at("learning_rate").get<double>();
    tc.batch_size = t.at("batch_size").get<std::size_t>();
    tc.final_lr_fraction = t.at("final_lr_fraction").get<double>();
    tc.train_fraction = ctx.config.at("split").at("train_fraction").get<double>();
    tc.seed = ctx.seed;
    const TrainResult r = train(net, train_set, tc);
    save_net(r.net, ctx.artifacts.add("net.json").string());
    {
        auto f = open_out(ctx.artifacts.add("loss.csv"));
        f << "epoch,mse\n";
        for (std::size_t e = 0; e < r.loss_trace.size(); ++e) f << e + 1 << ',' << format_double(r.loss_trace[e]) << '\n';
    }
    info["parameters"] = r.net.num_parameters();
    info["train_samples"] = train_set.size();
    info["test_samples"] = test_set.size();
    info["train_mse"] = r.loss_trace.empty() ? mse(r.net, train_set) : r.loss_trace.back();
    info["test_mse"] = test_set.size() ? json(mse(r.net, test_set)) : json();
    info["split"] = ctx.config.at("split").at("mode");
    info["train_profiles"] = split.train.profiles;
    info["test_profiles"] = split.test.profiles;
    info["train_topologies"] = split.train.topologies;
    info["test_topologies"] = split.test.topologies;
    write_json(ctx.artifacts.add("train.json"), info);
    *ctx.out << "train: " << arch << " net, " << r.net.num_parameters() << " parameters, train mse "
             << format_double(info["train_mse"].get<double>()) << ", test mse "
             << (test_set.size() ? format_double(info["test_mse"].get<double>()) : std::string("n/a")) << '\n';
}

void cmd_enumerate(Context& ctx) {
    const LoadProfile load = resolve_load(ctx, ctx.config.at("enumerate").at("load"));
    const BenchmarkTable t = enumerate_benchmarks(ctx.grid, {load}, ctx.lines, ctx.k, ctx.jobs).front();
    {
        auto f = open_out(ctx.artifacts.add("enumerate.csv"));
        f << "index,off,eta\n";
        for (std::size_t i = 0; i < t.topologies.size(); ++i)
            f << i << ',' << off_list(ctx.grid, t.topologies[i]) << ',' << format_double(t.values[i]) << '\n';
    }
    write_json(ctx.artifacts.add("enumerate.json"), {{"topologies", t.topologies.size()},
                                                     {"best_index", t.best},
                                                     {"best_off", off_ids(ctx.grid, t.best_topology())},
                                                     {"best_value", t.best_value()},
                                                     {"total_demand", load.total()}});
    *ctx.out << "enumerate: " << t.topologies.size() << " topologies, worst case off ["
             << off_list(ctx.grid, t.best_topology()) << "] sheds " << fixed(t.best_value()) << " pu\n";
}

void cmd_solve_lower(Context& ctx) {
    const json& b = ctx.config.at("solve-lower");
    const LoadProfile load = resolve_load(ctx, b.at("load"));
    Topology topo = Topology::all_on(ctx.grid.num_branches());
    for (const auto& id : b.at("off")) topo.status[ctx.grid.branch_index(id.get<BranchId>())] = 0;
    ShedEvaluator ev(ctx.grid);
    const ShedResult r = ev.evaluate(topo, load);
    if (r.status != SolveStatus::Optimal) ctx.limit_hit = true;
    write_json(ctx.artifacts.add("lower.json"), {{"status", status_name(r.status)},
                                                 {"off", off_ids(ctx.grid, topo)},
                                                 {"shed", r.shed},
                                                 {"bus_shed", r.bus_shed},
                                                 {"iterations", r.iterations},
                                                 {"total_demand", load.total()}});
    if (b.at("dump").get<bool>()) {
        auto f = open_out(ctx.artifacts.add("lower.lp"));
        write_lp(build_lower_level(ctx.grid, load, topo).system, f);
    }
    *ctx.out << "solve-lower: " << status_name(r.status) << ", shed " << fixed(r.shed) << " of "
             << fixed(load.total()) << " pu\n";
}

void cmd_solve_awls(Context& ctx) {
    const json& b = ctx.config.at("solve-awls");
    const LoadProfile load = resolve_load(ctx, b.at("load"));
    const ReluNet net = load_net(b.at("net").get<std::string>());
    AwlsConfig ac;
    ac.solver.pool_size = b.at("pool_size").get<std::size_t>();
    ac.solver.seed = ctx.seed;
    ac.solver.node_limit = b.at("node_limit").get<long>();
    ac.solver.time_limit = b.at("time_limit").get<double>();
    ac.big_m = b.at("big_m").get<double>();
    ac.s_bar = b.at("s_bar").get<double>();
    const std::string method = b.at("surrogate").get<std::string>();
    const double lambda = b.at("lambda").get<double>();
    const ReluBounds bounds = compute_bounds(net, surrogate_box(ctx.grid, ctx.lines, load), ac.big_m);
    const AwlsSolution s = method == "nn" ? solve_direct_nn(ctx.grid, load, net, bounds, ctx.lines, ctx.k, ac)
                                          : solve_pcnn(ctx.grid, load, net, bounds, ctx.lines, ctx.k, lambda, ac);
    if (s.status != SolveStatus::Optimal) ctx.limit_hit = true;

    ExperimentReport rep;
    rep.method = method;
    rep.case_id = ctx.case_id;
    rep.lambda = method == "pcnn" ? lambda : 0.0;
    ProfileRow row;
    row.status = s.status;
    row.nodes = s.nodes;
    row.seconds = s.seconds;
    row.slack = s.slack;
    row.pool_size = s.pool.size();
    json detail{{"status", status_name(s.status)}, {"relu_binaries", s.relu_binaries}, {"bound_clamped", bounds.clamped}};
    if (!s.pool.empty()) {
        const Refinement ref = refine_pool(ctx.grid, load, s.pool);
        row.top_incumbent = s.topology;
        row.predicted = s.predicted;
        row.top_realized = ref.values.front();
        row.chosen = ref.topology;
        row.realized = ref.shed;
        json pool = json::array();
        for (std::size_t i = 0; i < s.pool.size(); ++i)
            pool.push_back({{"off", off_ids(ctx.grid, s.pool[i])}, {"realized", ref.values[i]}});
        detail["pool"] = pool;
        detail["chosen_off"] = off_ids(ctx.grid, ref.topology);
    }
    if (b.at("benchmark").get<bool>()) {
        const BenchmarkTable t = enumerate_benchmarks(ctx.grid, {load}, ctx.lines, ctx.k, ctx.jobs).front();
        row.benchmark = t.best_value();
        if (!s.pool.empty()) row.gap = optimality_gap(row.realized, row.benchmark);
        detail["benchmark_off"] = off_ids(ctx.grid, t.best_topology());
    }
    rep.rows.push_back(row);
    {
        auto f = open_out(ctx.artifacts.add("awls.csv"));
        rep.write_csv(f);
    }
    {
        auto f = open_out(ctx.artifacts.add_volatile("timing.csv"));
        rep.write_timing_csv(f);
    }
    detail["aggregate"] = rep.aggregate();
    write_json(ctx.artifacts.add("awls.json"), detail);
    *ctx.out << "solve-awls: " << method << ' ' << status_name(s.status) << ", off ["
             << off_list(ctx.grid, row.chosen) << "], realized " << fixed(row.realized) << " pu, gap "
             << (row.gap ? fixed(*row.gap, 3) + "%" : std::string("n/a")) << '\n';
}

void cmd_eval(Context& ctx) {
    const json& e = ctx.config.at("eval");
    const Dataset d = read_dataset_file(e.at("dataset").get<std::string>());
    const ReluNet net = load_net(e.at("net").get<std::string>());
    if (net.spec().num_lines != ctx.grid.num_branches() || net.spec().num_buses != ctx.grid.num_buses())
        throw ValidationError("config", "net does not match the case");

    // surrogate quality on the held-out side of the training split
    const DataSplit split = resolve_split(ctx, d);
    const SurrogateQuality q = surrogate_quality(d, net, split.test, e.at("error_floor").get<double>());
    {
        auto f = open_out(ctx.artifacts.add("surrogate_ranks.csv"));
        q.write_csv(f);
    }

    // AWLS solves on fresh profiles
    const std::uint64_t fresh_seed = std::mt19937_64(ctx.seed ^ 0x6576616cULL)();
    const auto loads = sample_profiles(ctx.grid, e.at("profiles").get<std::size_t>(), d.config.bands, fresh_seed);
    const auto tables = enumerate_benchmarks(ctx.grid, loads, ctx.lines, ctx.k, ctx.jobs);
    {
        auto f = open_out(ctx.artifacts.add("benchmark.csv"));
        f << "profile,total_demand,best_off,best_value\n";
        for (std::size_t p = 0; p < loads.size(); ++p)
            f << p << ',' << format_double(loads[p].total()) << ',' << off_list(ctx.grid, tables[p].best_topology())
              << ',' << format_double(tables[p].best_value()) << '\n';
    }
    ExperimentConfig xc;
    xc.methods = e.at("methods").get<std::vector<std::string>>();
    xc.lambdas = e.at("lambdas").get<std::vector<double>>();
    xc.solve.solver.pool_size = e.at("pool_size").get<std::size_t>();
    xc.solve.solver.seed = ctx.seed;
    xc.solve.solver.node_limit = e.at("node_limit").get<long>();
    xc.solve.solver.time_limit = e.at("time_limit").get<double>();
    xc.solve.big_m = e.at("big_m").get<double>();
    xc.jobs = ctx.jobs;
    const auto reports = run_awls_experiment(ctx.grid, ctx.case_id, loads, tables, net, ctx.lines, ctx.k, xc);

    json summary{{"surrogate", q.aggregate()}, {"reports", json::array()}};
    std::ofstream timing = open_out(ctx.artifacts.add_volatile("timing.csv"));
    timing << "profile,method,lambda,seconds\n";
    for (const ExperimentReport& r : reports) {
        const std::string name =
            r.method == "nn" ? "report_nn.csv" : "report_pcnn_" + format_double(r.lambda) + ".csv";
        auto f = open_out(ctx.artifacts.add(name));
        r.write_csv(f);
        std::ostringstream t;
        r.write_timing_csv(t);
        const std::string rows = t.str();
        timing << rows.substr(rows.find('\n') + 1);
        summary["reports"].push_back(r.aggregate());
        for (const ProfileRow& row : r.rows)
            if (row.status != SolveStatus::Optimal) ctx.limit_hit = true;
    }
    timing.close();
    {
        auto f = open_out(ctx.artifacts.add("lambda_sweep.csv"));
        write_lambda_sweep(reports, f);
    }
    write_json(ctx.artifacts.add("eval.json"), summary);

    const auto& err = summary["surrogate"]["error_pct"];
    *ctx.out << "eval: surrogate median error " << fixed(err["median"].get<double>(), 3) << "%, max "
             << fixed(err["max"].get<double>(), 3) << "%, mean tau "
             << fixed(summary["surrogate"]["tau"]["avg"].get<double>(), 3) << ", mean rho "
             << fixed(summary["surrogate"]["rho"]["avg"].get<double>(), 3) << '\n';
    for (const json& r : summary["reports"]) {
        const json& g = r["gap_pct"];
        *ctx.out << "eval: " << r["method"].get<std::string>();
        if (r.contains("lambda")) *ctx.out << " lambda " << format_double(r["lambda"].get<double>());
        *ctx.out << " gap avg " << (g["avg"].is_null() ? std::string("n/a") : fixed(g["avg"].get<double>(), 3))
                 << "%, max " << (g["max"].is_null() ? std::string("n/a") : fixed(g["max"].get<double>(), 3))
                 << "% over " << g["count"].get<std::size_t>() << " profiles\n";
    }
}

}  // namespace awls::cli
