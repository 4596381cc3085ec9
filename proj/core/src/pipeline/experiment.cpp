#include "awls/pipeline/experiment.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "awls/errors.hpp"
#include "parallel.hpp"

namespace awls {

SurrogateQuality surrogate_quality(const Dataset& d, const ReluNet& net, const std::vector<std::size_t>& profiles,
                                   double floor_fraction, double tie_step) {
    return surrogate_quality(d, net, SampleSelection::all_topologies(d, profiles), floor_fraction, tie_step);
}

SurrogateQuality surrogate_quality(const Dataset& d, const ReluNet& net, const SampleSelection& sel,
                                   double floor_fraction, double tie_step) {
    std::vector<char> keep(d.profiles.size(), 0), keep_topo(d.topologies.size(), 0);
    for (std::size_t p : sel.profiles) keep.at(p) = 1;
    for (std::size_t t : sel.topologies) keep_topo.at(t) = 1;
    std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> by_profile;
    SurrogateQuality q;
    for (const Sample& s : d.samples) {
        if (!keep[s.profile] || !keep_topo[s.topology]) continue;
        const LoadProfile& load = d.profiles[s.profile];
        const double pred = net.forward(surrogate_input(d.topologies[s.topology], load));
        q.errors.push_back(prediction_error(pred, s.label, floor_fraction * load.total()));
        q.abs_errors.push_back(std::abs(pred - s.label));
        auto& [truth, guess] = by_profile[s.profile];
        truth.push_back(snap(s.label, tie_step));
        guess.push_back(pred);
    }
    for (const auto& [p, tg] : by_profile) {
        q.profiles.push_back(p);
        q.tau.push_back(kendall_tau_b(tg.first, tg.second));
        q.rho.push_back(spearman_rho(tg.first, tg.second));
    }
    return q;
}

nlohmann::json SurrogateQuality::aggregate() const {
    return {{"samples", errors.size()},
            {"error_pct", summary_to_json(summarize(errors))},
            {"abs_error", summary_to_json(summarize(abs_errors))},
            {"tau", summary_to_json(summarize(tau))},
            {"rho", summary_to_json(summarize(rho))}};
}

void SurrogateQuality::write_csv(std::ostream& out) const {
    out << "profile,tau,rho\n";
    for (std::size_t i = 0; i < profiles.size(); ++i)
        out << profiles[i] << ',' << format_double(tau[i]) << ',' << format_double(rho[i]) << '\n';
}

std::vector<ExperimentReport> run_awls_experiment(const NetworkCase& c, const std::string& case_id,
                                                  const std::vector<LoadProfile>& loads,
                                                  const std::vector<BenchmarkTable>& tables, const ReluNet& net,
                                                  const std::vector<BranchId>& candidate_lines, std::size_t k,
                                                  const ExperimentConfig& config) {
    if (tables.size() != loads.size()) throw ContractError("one benchmark table per load profile required");
    struct Run {
        std::string method;
        double lambda;
    };
    std::vector<Run> runs;
    for (const std::string& m : config.methods) {
        if (m == "nn") runs.push_back({m, 0.0});
        else if (m == "pcnn")
            for (double l : config.lambdas) runs.push_back({m, l});
        else throw ContractError("unknown method " + m);
    }
    std::vector<ExperimentReport> reports(runs.size());
    for (std::size_t r = 0; r < runs.size(); ++r) {
        reports[r].method = runs[r].method;
        reports[r].lambda = runs[r].lambda;
        reports[r].case_id = case_id;
        reports[r].rows.resize(loads.size());
    }
    detail::parallel_for(loads.size(), config.jobs, [&](std::size_t p) {
        const LoadProfile& load = loads[p];
        const ReluBounds bounds = compute_bounds(net, surrogate_box(c, candidate_lines, load), config.solve.big_m);
        ShedEvaluator ev(c, config.solve.solver);
        for (std::size_t r = 0; r < runs.size(); ++r) {
            const AwlsSolution s = runs[r].method == "nn"
                                       ? solve_direct_nn(c, load, net, bounds, candidate_lines, k, config.solve)
                                       : solve_pcnn(c, load, net, bounds, candidate_lines, k, runs[r].lambda,
                                                    config.solve);
            ProfileRow row;
            row.profile = p;
            row.status = s.status;
            row.nodes = s.nodes;
            row.seconds = s.seconds;
            row.slack = s.slack;
            row.pool_size = s.pool.size();
            row.benchmark = tables[p].best_value();
            if (s.pool.empty()) {
                reports[r].rows[p] = row;
                continue;
            }
            row.top_incumbent = s.topology;
            row.predicted = s.predicted;
            const Refinement ref = refine_pool(c, load, s.pool, ev);
            row.top_realized = ref.values.front();
            row.chosen = ref.topology;
            row.realized = ref.shed;
            row.gap = optimality_gap(row.realized, row.benchmark);
            reports[r].rows[p] = row;
        }
    });
    return reports;
}

void write_lambda_sweep(const std::vector<ExperimentReport>& reports, std::ostream& out) {
    out << "lambda,profiles,gap_avg,gap_median,gap_max,slack_avg\n";
    for (const ExperimentReport& r : reports) {
        if (r.method != "pcnn") continue;
        std::vector<double> gaps, slack;
        for (const ProfileRow& row : r.rows) {
            if (row.gap) gaps.push_back(*row.gap);
            slack.push_back(row.slack);
        }
        const Summary g = summarize(gaps), s = summarize(slack);
        out << format_double(r.lambda) << ',' << r.rows.size() << ',' << format_double(g.avg) << ','
            << format_double(g.median) << ',' << format_double(g.max) << ',' << format_double(s.avg) << '\n';
    }
}

}  // namespace awls
