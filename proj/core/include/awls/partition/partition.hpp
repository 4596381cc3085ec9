#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "awls/grid/network_case.hpp"
#include "awls/nn/relu_net.hpp"

namespace awls {

/// Weighted Laplacian with edge weight 1/|z| per branch (parallel branches add up).
Eigen::MatrixXd build_laplacian(const NetworkCase& c);

struct SymmetricEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // matching columns
    int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below tol.
SymmetricEigen jacobi_eigen(Eigen::MatrixXd a, double tol = 1e-10, int max_sweeps = 200);

/// Seeded k-means with k-means++ seeding over the rows of `points`.
std::vector<int> kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iterations = 100);

struct PartitionConfig {
    int areas = 5;
    int embed_dim = 0;       // 0 = min(areas - 1, 3)
    std::size_t d_max = 0;   // 0 = 1.5 * ceil(N / areas), rounded up
    std::uint64_t seed = 0;
    int kmeans_iterations = 100;
};

struct Partition {
    std::vector<int> area_of;  // per bus index
    int num_areas = 0;
    std::vector<BranchId> tie_lines;

    std::vector<std::vector<BusId>> areas(const NetworkCase& c) const;
    bool operator==(const Partition&) const = default;
};

/// Spectral embedding on the smallest nontrivial Laplacian eigenvectors,
/// k-means, then repairs: areas are made internally connected and any area
/// above d_max buses is split in two along its own Fiedler vector.
Partition spectral_partition(const NetworkCase& c, const PartitionConfig& config);

/// Area assignment from explicit bus lists; tie lines derived.
Partition make_partition(const NetworkCase& c, const std::vector<int>& area_of);

nlohmann::json partition_to_json(const NetworkCase& c, const Partition& p);
Partition partition_from_json(const NetworkCase& c, const nlohmann::json& j);

/// Hidden-neuron counts proportional to the per-area label standard deviation,
/// at least h_min each, summing to total (largest remainder).
std::vector<std::size_t> budget_neurons(const std::vector<std::vector<double>>& labels_by_area, std::size_t total,
                                        std::size_t h_min = 4);

/// Inputs seen by each area's sub-network: local pd/qd, statuses of lines
/// touching the area (tie lines on both sides) and the pd of the far end of
/// every tie line. Sorted, in InputSpec indexing.
std::vector<std::vector<std::size_t>> area_inputs(const NetworkCase& c, const Partition& p);

/// One masked net holding a per-area sub-network in every hidden layer; the
/// identity output sums the areas. Weights start from the dense initializer
/// with the same seed, so one area reproduces ReluNet::dense.
ReluNet build_block_sparse_net(const NetworkCase& c, const Partition& p, const std::vector<std::size_t>& budget,
                               std::size_t hidden_layers, std::uint64_t seed);

}  // namespace awls
