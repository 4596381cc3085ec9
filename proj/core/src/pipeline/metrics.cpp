#include "awls/pipeline/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "awls/errors.hpp"

namespace awls {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// number of pairs inside runs of equal values of a sorted key
template <class Eq>
double tied_pairs(std::size_t n, Eq eq) {
    double t = 0.0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i < n && eq(i - 1, i)) {
            ++run;
            continue;
        }
        t += 0.5 * static_cast<double>(run) * static_cast<double>(run - 1);
        run = 1;
    }
    return t;
}

// merge sort of v counting the inversions
double sort_count(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0.0;
    const std::size_t mid = lo + (hi - lo) / 2;
    double swaps = sort_count(v, buf, lo, mid) + sort_count(v, buf, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            swaps += static_cast<double>(mid - i);
            buf[k++] = v[j++];
        } else {
            buf[k++] = v[i++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
              v.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

void check_pair(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ContractError("rank statistics need equal-length samples");
}

}  // namespace

double kendall_tau_b(const std::vector<double>& a, const std::vector<double>& b) {
    check_pair(a, b);
    const std::size_t n = a.size();
    if (n < 2) return kNaN;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        return a[i] < a[j] || (a[i] == a[j] && b[i] < b[j]);
    });
    const double n1 = tied_pairs(n, [&](std::size_t i, std::size_t j) { return a[idx[i]] == a[idx[j]]; });
    const double n3 = tied_pairs(
        n, [&](std::size_t i, std::size_t j) { return a[idx[i]] == a[idx[j]] && b[idx[i]] == b[idx[j]]; });
    std::vector<double> v(n), buf(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = b[idx[i]];
    const double swaps = sort_count(v, buf, 0, n);
    const double n2 = tied_pairs(n, [&](std::size_t i, std::size_t j) { return v[i] == v[j]; });
    const double n0 = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    const double denom = std::sqrt((n0 - n1) * (n0 - n2));
    if (denom == 0.0) return kNaN;
    return (n0 - n1 - n2 + n3 - 2.0 * swaps) / denom;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
        i = j + 1;
    }
    return r;
}

double spearman_rho(const std::vector<double>& a, const std::vector<double>& b) {
    check_pair(a, b);
    if (a.size() < 2) return kNaN;
    const auto ra = average_ranks(a), rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return kNaN;
    return sab / std::sqrt(saa * sbb);
}

std::optional<double> optimality_gap(double realized, double best) {
    if (!(best > 0.0)) return std::nullopt;
    return std::abs(realized - best) / best * 100.0;
}

double prediction_error(double predicted, double truth, double floor) {
    return std::abs(predicted - truth) / std::max(truth, floor) * 100.0;
}

Summary summarize(const std::vector<double>& v) {
    std::vector<double> f;
    for (double x : v)
        if (!std::isnan(x)) f.push_back(x);
    Summary s;
    s.count = f.size();
    if (f.empty()) {
        s.min = s.avg = s.max = s.median = kNaN;
        return s;
    }
    std::sort(f.begin(), f.end());
    s.min = f.front();
    s.max = f.back();
    s.avg = std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
    const std::size_t m = f.size() / 2;
    s.median = f.size() % 2 ? f[m] : 0.5 * (f[m - 1] + f[m]);
    return s;
}

nlohmann::json summary_to_json(const Summary& s) {
    auto num = [](double x) -> nlohmann::json { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); };
    return {{"count", s.count}, {"min", num(s.min)}, {"avg", num(s.avg)}, {"max", num(s.max)}, {"median", num(s.median)}};
}

double snap(double v, double step) {
    if (!(step > 0.0)) return v;
    const double r = std::round(v / step) * step;
    return r == 0.0 ? 0.0 : r;
}

}  // namespace awls
