#include "awls/partition/partition.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <set>

#include "awls/errors.hpp"
#include "awls/grid/topology.hpp"

namespace awls {
namespace {

double branch_weight(const Branch& br) {
    const double y = std::abs(std::complex<double>(br.g, br.b));
    if (!(y > 0.0) || !std::isfinite(y))
        throw ValidationError("branch-impedance", "branch " + std::to_string(br.id) + " has no finite nonzero impedance");
    return y;  // 1 / |z| with z = 1 / (g + jb)
}

// Clusters the vertices of a connected weighted graph given by its Laplacian.
std::vector<int> spectral_clusters(const Eigen::MatrixXd& lap, int k, int dim, std::uint64_t seed, int iters) {
    const auto n = lap.rows();
    if (k <= 1 || n <= 1) return std::vector<int>(static_cast<std::size_t>(n), 0);
    const SymmetricEigen e = jacobi_eigen(lap);
    dim = std::max(1, std::min<int>(dim, static_cast<int>(n) - 1));
    const Eigen::MatrixXd emb = e.vectors.middleCols(1, dim);
    return kmeans(emb, k, seed, iters);
}

std::vector<std::vector<std::size_t>> components_of(const NetworkCase& c, const std::vector<int>& area, int a) {
    std::vector<std::vector<std::size_t>> adj(c.num_buses());
    for (std::size_t l = 0; l < c.num_branches(); ++l) {
        const std::size_t i = c.from_index(l), j = c.to_index(l);
        if (area[i] == a && area[j] == a) {
            adj[i].push_back(j);
            adj[j].push_back(i);
        }
    }
    std::vector<char> seen(c.num_buses(), 0);
    std::vector<std::vector<std::size_t>> comps;
    for (std::size_t s = 0; s < c.num_buses(); ++s) {
        if (area[s] != a || seen[s]) continue;
        std::vector<std::size_t> comp{s};
        seen[s] = 1;
        for (std::size_t h = 0; h < comp.size(); ++h)
            for (std::size_t v : adj[comp[h]])
                if (!seen[v]) {
                    seen[v] = 1;
                    comp.push_back(v);
                }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

// Moves stray components of an area to the neighbouring area they are most
// strongly tied to. Returns true if anything moved.
bool repair_connectivity(const NetworkCase& c, std::vector<int>& area, int num_areas) {
    for (int a = 0; a < num_areas; ++a) {
        auto comps = components_of(c, area, a);
        if (comps.size() <= 1) continue;
        std::size_t keep = 0;
        for (std::size_t i = 1; i < comps.size(); ++i)
            if (comps[i].size() > comps[keep].size()) keep = i;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            if (i == keep) continue;
            std::vector<double> tie(static_cast<std::size_t>(num_areas), 0.0);
            std::set<std::size_t> members(comps[i].begin(), comps[i].end());
            for (std::size_t l = 0; l < c.num_branches(); ++l) {
                const std::size_t u = c.from_index(l), v = c.to_index(l);
                const bool in_u = members.count(u) > 0, in_v = members.count(v) > 0;
                if (in_u == in_v) continue;
                const std::size_t other = in_u ? v : u;
                if (area[other] != a) tie[static_cast<std::size_t>(area[other])] += branch_weight(c.branches()[l]);
            }
            const int target = static_cast<int>(std::max_element(tie.begin(), tie.end()) - tie.begin());
            if (tie[static_cast<std::size_t>(target)] <= 0.0) continue;
            for (std::size_t b : comps[i]) area[b] = target;
        }
        return true;
    }
    return false;
}

Eigen::MatrixXd induced_laplacian(const NetworkCase& c, const std::vector<std::size_t>& buses) {
    std::vector<int> local(c.num_buses(), -1);
    for (std::size_t i = 0; i < buses.size(); ++i) local[buses[i]] = static_cast<int>(i);
    const auto n = static_cast<Eigen::Index>(buses.size());
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t l = 0; l < c.num_branches(); ++l) {
        const int u = local[c.from_index(l)], v = local[c.to_index(l)];
        if (u < 0 || v < 0) continue;
        const double w = branch_weight(c.branches()[l]);
        lap(u, u) += w;
        lap(v, v) += w;
        lap(u, v) -= w;
        lap(v, u) -= w;
    }
    return lap;
}

// Renumbers areas by their smallest bus index and drops empty ones.
int canonical(std::vector<int>& area) {
    int next = 0;
    std::vector<int> remap;
    for (int& a : area) {
        if (static_cast<std::size_t>(a) >= remap.size()) remap.resize(static_cast<std::size_t>(a) + 1, -1);
        if (remap[static_cast<std::size_t>(a)] < 0) remap[static_cast<std::size_t>(a)] = next++;
        a = remap[static_cast<std::size_t>(a)];
    }
    return next;
}

}  // namespace

Eigen::MatrixXd build_laplacian(const NetworkCase& c) {
    const auto n = static_cast<Eigen::Index>(c.num_buses());
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t l = 0; l < c.num_branches(); ++l) {
        const auto i = static_cast<Eigen::Index>(c.from_index(l));
        const auto j = static_cast<Eigen::Index>(c.to_index(l));
        const double w = branch_weight(c.branches()[l]);
        lap(i, j) -= w;
        lap(j, i) -= w;
        lap(i, i) += w;
        lap(j, j) += w;
    }
    return lap;
}

SymmetricEigen jacobi_eigen(Eigen::MatrixXd a, double tol, int max_sweeps) {
    const auto n = a.rows();
    if (a.cols() != n) throw ContractError("matrix must be square");
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    SymmetricEigen out;
    for (; out.sweeps < max_sweeps; ++out.sweeps) {
        double off = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j) off += a(i, j) * a(i, j);
        if (std::sqrt(off) < tol) break;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double cs = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * cs;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = cs * akp - sn * akq;
                    a(k, q) = sn * akp + cs * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = cs * apk - sn * aqk;
                    a(q, k) = sn * apk + cs * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = cs * vkp - sn * vkq;
                    v(k, q) = sn * vkp + cs * vkq;
                }
            }
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
        Eigen::VectorXd col = v.col(order[static_cast<std::size_t>(k)]);
        // sign convention: first nonzero entry positive
        for (Eigen::Index i = 0; i < n; ++i)
            if (std::abs(col(i)) > 1e-12) {
                if (col(i) < 0) col = -col;
                break;
            }
        out.vectors.col(k) = col;
    }
    return out;
}

std::vector<int> kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iterations) {
    const auto n = points.rows();
    if (k < 1 || k > n) throw ContractError("k-means needs 1 <= k <= number of points");
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd centers(k, points.cols());
    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    centers.row(0) = points.row(first(rng));
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            d2[static_cast<std::size_t>(i)] =
                std::min(d2[static_cast<std::size_t>(i)], (points.row(i) - centers.row(c - 1)).squaredNorm());
            total += d2[static_cast<std::size_t>(i)];
        }
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double r = std::uniform_real_distribution<double>(0.0, total)(rng);
            for (pick = 0; pick < n - 1; ++pick) {
                r -= d2[static_cast<std::size_t>(pick)];
                if (r <= 0.0) break;
            }
        } else {
            pick = c % n;
        }
        centers.row(c) = points.row(pick);
    }
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    for (int it = 0; it < max_iterations; ++it) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = (points.row(i) - centers.row(c)).squaredNorm();
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            if (label[static_cast<std::size_t>(i)] != best) {
                label[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        std::vector<int> count(static_cast<std::size_t>(k), 0);
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k, points.cols());
        for (Eigen::Index i = 0; i < n; ++i) {
            sum.row(label[static_cast<std::size_t>(i)]) += points.row(i);
            ++count[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (count[static_cast<std::size_t>(c)] > 0) {
                centers.row(c) = sum.row(c) / count[static_cast<std::size_t>(c)];
                continue;
            }
            // empty cluster: take the point farthest from its center
            Eigen::Index far = 0;
            double fd = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d = (points.row(i) - centers.row(label[static_cast<std::size_t>(i)])).squaredNorm();
                if (d > fd && count[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])] > 1) {
                    fd = d;
                    far = i;
                }
            }
            --count[static_cast<std::size_t>(label[static_cast<std::size_t>(far)])];
            label[static_cast<std::size_t>(far)] = c;
            count[static_cast<std::size_t>(c)] = 1;
            centers.row(c) = points.row(far);
            changed = true;
        }
        if (!changed) break;
    }
    return label;
}

std::vector<std::vector<BusId>> Partition::areas(const NetworkCase& c) const {
    std::vector<std::vector<BusId>> out(static_cast<std::size_t>(num_areas));
    for (std::size_t i = 0; i < area_of.size(); ++i) out[static_cast<std::size_t>(area_of[i])].push_back(c.buses()[i].id);
    return out;
}

Partition make_partition(const NetworkCase& c, const std::vector<int>& area_of) {
    if (area_of.size() != c.num_buses()) throw ContractError("area assignment must cover every bus");
    Partition p;
    p.area_of = area_of;
    p.num_areas = canonical(p.area_of);
    for (std::size_t l = 0; l < c.num_branches(); ++l)
        if (p.area_of[c.from_index(l)] != p.area_of[c.to_index(l)]) p.tie_lines.push_back(c.branches()[l].id);
    return p;
}

Partition spectral_partition(const NetworkCase& c, const PartitionConfig& config) {
    const int n = static_cast<int>(c.num_buses());
    if (config.areas < 1 || config.areas > n) throw ContractError("area count must lie in [1, N]");
    if (!is_connected(c, Topology::all_on(c.num_branches())))
        throw ValidationError("connected-case", "spectral partitioning needs a connected case");
    if (config.areas == 1) return make_partition(c, std::vector<int>(c.num_buses(), 0));

    const int dim = config.embed_dim > 0 ? config.embed_dim : std::min(config.areas - 1, 3);
    const std::size_t d_max =
        config.d_max > 0 ? config.d_max
                         : static_cast<std::size_t>(std::ceil(1.5 * std::ceil(static_cast<double>(n) / config.areas)));
    std::vector<int> area = spectral_clusters(build_laplacian(c), config.areas, dim, config.seed,
                                              config.kmeans_iterations);
    int num = config.areas;
    for (int guard = 0; guard < 8 * n; ++guard) {
        if (repair_connectivity(c, area, num)) continue;
        int big = -1;
        std::vector<std::size_t> members;
        for (int a = 0; a < num && big < 0; ++a) {
            members.clear();
            for (std::size_t i = 0; i < c.num_buses(); ++i)
                if (area[i] == a) members.push_back(i);
            if (members.size() > d_max) big = a;
        }
        if (big < 0) break;
        const std::vector<int> half =
            spectral_clusters(induced_laplacian(c, members), 2, 1, config.seed + static_cast<std::uint64_t>(guard) + 1,
                              config.kmeans_iterations);
        for (std::size_t i = 0; i < members.size(); ++i)
            if (half[i] == 1) area[members[i]] = num;
        ++num;
    }
    return make_partition(c, area);
}

nlohmann::json partition_to_json(const NetworkCase& c, const Partition& p) {
    nlohmann::json j;
    j["schema"] = "awls.partition/1";
    j["areas"] = p.areas(c);
    j["tie_lines"] = p.tie_lines;
    return j;
}

Partition partition_from_json(const NetworkCase& c, const nlohmann::json& j) {
    std::vector<int> area(c.num_buses(), -1);
    const auto areas = j.at("areas").get<std::vector<std::vector<BusId>>>();
    for (std::size_t a = 0; a < areas.size(); ++a)
        for (BusId b : areas[a]) {
            const std::size_t i = c.bus_index(b);
            if (area[i] >= 0) throw ValidationError("partition", "bus " + std::to_string(b) + " listed twice");
            area[i] = static_cast<int>(a);
        }
    for (int a : area)
        if (a < 0) throw ValidationError("partition", "partition does not cover every bus");
    Partition p = make_partition(c, area);
    if (j.contains("tie_lines") && j["tie_lines"].get<std::vector<BranchId>>() != p.tie_lines)
        throw ValidationError("partition", "tie line list does not match the areas");
    return p;
}

std::vector<std::size_t> budget_neurons(const std::vector<std::vector<double>>& labels_by_area, std::size_t total,
                                        std::size_t h_min) {
    const std::size_t k = labels_by_area.size();
    if (k == 0) throw ContractError("no areas to budget");
    if (total < k * h_min) throw ContractError("neuron total below the per-area minimum");
    std::vector<double> sd(k);
    for (std::size_t a = 0; a < k; ++a) {
        const auto& v = labels_by_area[a];
        if (v.size() < 2) throw ContractError("each area needs at least two samples");
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        sd[a] = std::sqrt(s / static_cast<double>(v.size() - 1));
    }
    if (std::accumulate(sd.begin(), sd.end(), 0.0) <= 0.0) std::fill(sd.begin(), sd.end(), 1.0);

    std::vector<char> floored(k, 0);
    std::vector<double> ideal(k, 0.0);
    while (true) {
        double pool = static_cast<double>(total), weight = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
            if (floored[a]) pool -= static_cast<double>(h_min);
            else weight += sd[a];
        }
        bool again = false;
        for (std::size_t a = 0; a < k; ++a) {
            if (floored[a]) {
                ideal[a] = static_cast<double>(h_min);
                continue;
            }
            ideal[a] = weight > 0.0 ? pool * sd[a] / weight : 0.0;
            if (ideal[a] < static_cast<double>(h_min)) {
                floored[a] = 1;
                again = true;
            }
        }
        if (!again) break;
    }
    std::vector<std::size_t> h(k);
    std::size_t used = 0;
    for (std::size_t a = 0; a < k; ++a) {
        h[a] = static_cast<std::size_t>(std::floor(ideal[a] + 1e-9));
        used += h[a];
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return ideal[x] - static_cast<double>(h[x]) > ideal[y] - static_cast<double>(h[y]);
    });
    for (std::size_t i = 0; used < total; ++i, ++used) ++h[order[i % k]];
    return h;
}

std::vector<std::vector<std::size_t>> area_inputs(const NetworkCase& c, const Partition& p) {
    const InputSpec spec{c.num_branches(), c.num_buses()};
    std::vector<std::set<std::size_t>> sets(static_cast<std::size_t>(p.num_areas));
    for (std::size_t i = 0; i < c.num_buses(); ++i) {
        auto& s = sets[static_cast<std::size_t>(p.area_of[i])];
        s.insert(spec.pd(i));
        s.insert(spec.qd(i));
    }
    for (std::size_t l = 0; l < c.num_branches(); ++l) {
        const std::size_t u = c.from_index(l), v = c.to_index(l);
        const int au = p.area_of[u], av = p.area_of[v];
        sets[static_cast<std::size_t>(au)].insert(spec.line(l));
        if (au == av) continue;
        sets[static_cast<std::size_t>(av)].insert(spec.line(l));
        sets[static_cast<std::size_t>(au)].insert(spec.pd(v));
        sets[static_cast<std::size_t>(av)].insert(spec.pd(u));
    }
    std::vector<std::vector<std::size_t>> out;
    for (const auto& s : sets) out.emplace_back(s.begin(), s.end());
    return out;
}

ReluNet build_block_sparse_net(const NetworkCase& c, const Partition& p, const std::vector<std::size_t>& budget,
                               std::size_t hidden_layers, std::uint64_t seed) {
    if (budget.size() != static_cast<std::size_t>(p.num_areas)) throw ContractError("budget must list every area");
    if (hidden_layers == 0) throw ContractError("need at least one hidden layer");
    const InputSpec spec{c.num_branches(), c.num_buses()};
    std::vector<int> group;
    for (std::size_t a = 0; a < budget.size(); ++a) group.insert(group.end(), budget[a], static_cast<int>(a));
    const std::size_t width = group.size();
    ReluNet net = ReluNet::dense(spec, std::vector<std::size_t>(hidden_layers, width), seed);
    if (p.num_areas == 1) return net;

    const auto inputs = area_inputs(c, p);
    for (std::size_t k = 0; k < hidden_layers; ++k) {
        Layer& L = net.layers()[k];
        std::fill(L.mask.begin(), L.mask.end(), 0);
        for (std::size_t i = 0; i < L.out; ++i) {
            const int a = group[i];
            std::size_t nnz = 0;
            if (k == 0) {
                for (std::size_t j : inputs[static_cast<std::size_t>(a)]) L.mask[i * L.in + j] = 1;
                nnz = inputs[static_cast<std::size_t>(a)].size();
            } else {
                for (std::size_t j = 0; j < L.in; ++j)
                    if (group[j] == a) L.mask[i * L.in + j] = 1;
                nnz = budget[static_cast<std::size_t>(a)];
            }
            // keep the initializer's variance for the reduced fan-in
            const double scale = std::sqrt(static_cast<double>(L.in + L.out) / static_cast<double>(nnz + L.out));
            for (std::size_t j = 0; j < L.in; ++j) L.weight[i * L.in + j] *= scale;
        }
        L.group = group;
    }
    net.apply_masks();
    net.validate();
    return net;
}

}  // namespace awls
