#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

namespace awls {

/// Kendall tau-b (tie corrected); NaN when either side is constant.
double kendall_tau_b(const std::vector<double>& a, const std::vector<double>& b);
/// Pearson correlation of average ranks; NaN when either side is constant.
double spearman_rho(const std::vector<double>& a, const std::vector<double>& b);
/// Average ranks starting at 1.
std::vector<double> average_ranks(const std::vector<double>& v);

/// |realized - best| / best * 100; empty when best is not positive.
std::optional<double> optimality_gap(double realized, double best);

/// Normalized prediction error |pred - truth| / max(truth, floor) * 100.
double prediction_error(double predicted, double truth, double floor);

struct Summary {
    std::size_t count = 0;  // finite entries used
    double min = 0.0;
    double avg = 0.0;
    double max = 0.0;
    double median = 0.0;
};
/// Ignores NaN entries.
Summary summarize(const std::vector<double>& v);
nlohmann::json summary_to_json(const Summary& s);

/// Rounds to a multiple of `step`; used to merge solver-noise ties.
double snap(double v, double step);

}  // namespace awls
