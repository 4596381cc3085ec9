#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "awls/pipeline/awls_solve.hpp"
#include "awls/pipeline/benchmark.hpp"
#include "awls/pipeline/dataset.hpp"
#include "awls/pipeline/metrics.hpp"
#include "awls/pipeline/report.hpp"

namespace awls {

/// Prediction error and rank agreement of a net over dataset profiles.
struct SurrogateQuality {
    std::vector<double> errors;      // percent, one per sample
    std::vector<double> abs_errors;  // pu
    std::vector<std::size_t> profiles;
    std::vector<double> tau;         // per profile (NaN when a side is constant)
    std::vector<double> rho;

    nlohmann::json aggregate() const;
    void write_csv(std::ostream& out) const;
};

/// Errors use max(eta, floor_fraction * total demand of the profile) as the
/// denominator. True values are snapped to tie_step before ranking.
SurrogateQuality surrogate_quality(const Dataset& d, const ReluNet& net, const std::vector<std::size_t>& profiles,
                                   double floor_fraction = 0.01, double tie_step = 1e-6);
/// Same over a selection; ranks compare the selected topologies per profile.
SurrogateQuality surrogate_quality(const Dataset& d, const ReluNet& net, const SampleSelection& sel,
                                   double floor_fraction = 0.01, double tie_step = 1e-6);

struct ExperimentConfig {
    std::vector<std::string> methods{"nn", "pcnn"};
    std::vector<double> lambdas{10.0};
    AwlsConfig solve;
    int jobs = 1;
};

/// Direct-NN and PCNN solves with pool refinement against precomputed
/// benchmark tables; one report per method (and per lambda for PCNN).
std::vector<ExperimentReport> run_awls_experiment(const NetworkCase& c, const std::string& case_id,
                                                  const std::vector<LoadProfile>& loads,
                                                  const std::vector<BenchmarkTable>& tables, const ReluNet& net,
                                                  const std::vector<BranchId>& candidate_lines, std::size_t k,
                                                  const ExperimentConfig& config);

/// Rows: lambda, gap summary; data for a plateau plot.
void write_lambda_sweep(const std::vector<ExperimentReport>& reports, std::ostream& out);

}  // namespace awls
