#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "awls/errors.hpp"
#include "awls/grid/topology.hpp"
#include "awls/partition/partition.hpp"
#include "synthetic_cases.hpp"
#include "toy_cases.hpp"

using namespace awls;

namespace {

// triangles {1,2,3} and {4,5,6}, joined by a weak 3-4 tie
const char* kTwoTriangles = R"(BASE_MVA 100
BUS
1 3 0.95 1.05 0.1 0.0
2 1 0.95 1.05 0.1 0.0
3 1 0.95 1.05 0.1 0.0
4 1 0.95 1.05 0.1 0.0
5 1 0.95 1.05 0.1 0.0
6 1 0.95 1.05 0.1 0.0
GEN
1 0 1 -1 1
BRANCH
1 1 2 1 -10 0 0 1 -0.5 0.5 1
2 2 3 1 -12 0 0 1 -0.5 0.5 1
3 1 3 1 -9 0 0 1 -0.5 0.5 1
4 4 5 1 -10 0 0 1 -0.5 0.5 1
5 5 6 1 -11 0 0 1 -0.5 0.5 1
6 4 6 1 -8 0 0 1 -0.5 0.5 1
7 3 4 0.1 -0.5 0 0 1 -0.5 0.5 1
)";

NetworkCase ieee14() { return load_case(std::string(AWLS_DATA_DIR) + "/ieee14.case"); }

bool area_connected(const NetworkCase& c, const Partition& p, int a) {
    Topology t = Topology::all_on(c.num_branches());
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < c.num_buses(); ++i)
        if (p.area_of[i] == a) members.push_back(i);
    // BFS restricted to the area
    std::set<std::size_t> seen{members[0]};
    std::vector<std::size_t> q{members[0]};
    for (std::size_t h = 0; h < q.size(); ++h)
        for (std::size_t l = 0; l < c.num_branches(); ++l) {
            std::size_t u = c.from_index(l), v = c.to_index(l);
            if (p.area_of[u] != a || p.area_of[v] != a) continue;
            if (u != q[h]) std::swap(u, v);
            if (u == q[h] && !seen.count(v)) {
                seen.insert(v);
                q.push_back(v);
            }
        }
    return seen.size() == members.size();
}

// Sum of the per-area sub-networks evaluated on their own.
double per_area_sum(const ReluNet& net, const std::vector<double>& x, int areas) {
    double total = net.layers().back().bias[0];
    for (int a = 0; a < areas; ++a) {
        std::vector<double> act = x;
        for (std::size_t k = 0; k + 1 < net.layers().size(); ++k) {
            const Layer& L = net.layers()[k];
            std::vector<double> next(L.out, 0.0);
            for (std::size_t i = 0; i < L.out; ++i) {
                if (L.group[i] != a) continue;
                double s = L.bias[i];
                for (std::size_t j = 0; j < L.in; ++j)
                    if (k == 0 || net.layers()[k - 1].group[j] == a) s += L.w(i, j) * act[j];
                next[i] = std::max(0.0, s);
            }
            act = next;
        }
        const Layer& out = net.layers().back();
        for (std::size_t j = 0; j < out.in; ++j)
            if (net.layers()[net.layers().size() - 2].group[j] == a) total += out.w(0, j) * act[j];
    }
    return total;
}

}  // namespace

TEST(Laplacian, TwoBus) {
    // |z| = 0.5 <=> |y| = 2
    NetworkCase c = parse_case(R"(BASE_MVA 100
BUS
1 3 0.95 1.05 0 0
2 1 0.95 1.05 0.5 0.1
GEN
1 0 1 -1 1
BRANCH
1 1 2 0 -2 0 0 1 -0.5 0.5 1
)");
    Eigen::MatrixXd lap = build_laplacian(c);
    EXPECT_NEAR(lap(0, 0), 2.0, 1e-15);
    EXPECT_NEAR(lap(0, 1), -2.0, 1e-15);
    EXPECT_NEAR(lap(1, 0), -2.0, 1e-15);
    EXPECT_NEAR(lap(1, 1), 2.0, 1e-15);
}

TEST(Laplacian, ZeroAdmittanceBranchNamed) {
    std::string text = awls::testing::kTriangle;
    text.replace(text.find("1 1 2 1.0 -6.0"), 14, "1 1 2 0.0 0.0");
    NetworkCase c = parse_case(text);
    try {
        build_laplacian(c);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("branch 1"), std::string::npos);
    }
}

TEST(Laplacian, Ieee14Properties) {
    NetworkCase c = ieee14();
    Eigen::MatrixXd lap = build_laplacian(c);
    EXPECT_LT((lap - lap.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT(lap.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd x(14);
        for (int i = 0; i < 14; ++i) x(i) = g(rng);
        EXPECT_GE(x.dot(lap * x), -1e-10);
    }
}

TEST(Jacobi, DecomposesAndFindsConstantNullVector) {
    NetworkCase c = ieee14();
    Eigen::MatrixXd lap = build_laplacian(c);
    SymmetricEigen e = jacobi_eigen(lap);
    const Eigen::MatrixXd& v = e.vectors;
    EXPECT_LT((v.transpose() * v - Eigen::MatrixXd::Identity(14, 14)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((lap * v - v * e.values.asDiagonal()).cwiseAbs().maxCoeff(), 1e-8);
    for (int k = 1; k < 14; ++k) EXPECT_LE(e.values(k - 1), e.values(k));
    EXPECT_NEAR(e.values(0), 0.0, 1e-9);
    EXPECT_GT(e.values(1), 1e-6);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(14) / std::sqrt(14.0);
    EXPECT_NEAR(std::abs(v.col(0).dot(ones)), 1.0, 1e-9);
}

TEST(SpectralPartition, TwoTrianglesMatchMinCutOracle) {
    NetworkCase c = parse_case(kTwoTriangles);
    Eigen::MatrixXd lap = build_laplacian(c);
    // exhaustive minimum cut over all bipartitions with bus 1 on side 0
    double best = 1e300;
    int best_mask = 0;
    for (int mask = 1; mask < 32; ++mask) {
        auto side = [&](int i) { return i == 0 ? 0 : (mask >> (i - 1)) & 1; };
        double cut = 0.0;
        for (int i = 0; i < 6; ++i)
            for (int j = i + 1; j < 6; ++j)
                if (side(i) != side(j)) cut -= lap(i, j);
        if (cut < best) {
            best = cut;
            best_mask = mask;
        }
    }
    PartitionConfig cfg;
    cfg.areas = 2;
    cfg.seed = 3;
    Partition p = spectral_partition(c, cfg);
    ASSERT_EQ(p.num_areas, 2);
    for (int i = 1; i < 6; ++i) EXPECT_EQ(p.area_of[static_cast<std::size_t>(i)], (best_mask >> (i - 1)) & 1);
    EXPECT_EQ(p.tie_lines, std::vector<BranchId>{7});
}

TEST(SpectralPartition, SingleArea) {
    NetworkCase c = ieee14();
    PartitionConfig cfg;
    cfg.areas = 1;
    Partition p = spectral_partition(c, cfg);
    EXPECT_EQ(p.num_areas, 1);
    EXPECT_TRUE(p.tie_lines.empty());
    EXPECT_EQ(p.areas(c)[0].size(), 14u);
}

TEST(SpectralPartition, Ieee118FiveConnectedAreas) {
    NetworkCase c = load_case(std::string(AWLS_DATA_DIR) + "/ieee118.case");
    PartitionConfig cfg;
    cfg.areas = 5;
    cfg.seed = 1;
    cfg.d_max = c.num_buses();
    Partition p = spectral_partition(c, cfg);
    EXPECT_EQ(p.num_areas, 5);
    for (int a = 0; a < p.num_areas; ++a) EXPECT_TRUE(area_connected(c, p, a)) << "area " << a;
    EXPECT_EQ(spectral_partition(c, cfg), p);

    // with the default size cap every area stays connected and small enough
    PartitionConfig capped;
    capped.areas = 5;
    capped.seed = 1;
    Partition q = spectral_partition(c, capped);
    EXPECT_GE(q.num_areas, 5);
    for (int a = 0; a < q.num_areas; ++a) {
        EXPECT_TRUE(area_connected(c, q, a));
        EXPECT_LE(q.areas(c)[static_cast<std::size_t>(a)].size(), 36u);
    }
}

TEST(SpectralPartition, ContractsAndJson) {
    NetworkCase c = parse_case(kTwoTriangles);
    PartitionConfig cfg;
    cfg.areas = 7;
    EXPECT_THROW(spectral_partition(c, cfg), ContractError);
    cfg.areas = 2;
    Partition p = spectral_partition(c, cfg);
    nlohmann::json j = partition_to_json(c, p);
    EXPECT_EQ(j["areas"], nlohmann::json::parse("[[1,2,3],[4,5,6]]"));
    EXPECT_EQ(partition_from_json(c, j), p);
    j["tie_lines"] = {1};
    EXPECT_THROW(partition_from_json(c, j), ValidationError);
}

TEST(BudgetNeurons, Proportional) {
    EXPECT_EQ(budget_neurons({{0.0, 2.0}, {0.0, 6.0}}, 40, 4), (std::vector<std::size_t>{10, 30}));
    EXPECT_EQ(budget_neurons({{1.0, 2.0}, {5.0, 6.0}, {0.0, 1.0}}, 30, 4), (std::vector<std::size_t>{10, 10, 10}));
}

TEST(BudgetNeurons, FloorAndLargestRemainder) {
    // sample stds sqrt2 : 2 sqrt2 : 5 sqrt2. Ideal shares 3.75, 7.5, 18.75; the
    // first is floored at 4, the other two split 26 as 7.43 / 18.57 -> 7 / 19.
    EXPECT_EQ(budget_neurons({{0.0, 2.0}, {0.0, 4.0}, {0.0, 10.0}}, 30, 4), (std::vector<std::size_t>{4, 7, 19}));
    // zero variance everywhere: uniform, the leftover goes to the first area
    EXPECT_EQ(budget_neurons({{1.0, 1.0}, {2.0, 2.0}, {0.0, 0.0}}, 10, 2), (std::vector<std::size_t>{4, 3, 3}));
    EXPECT_THROW(budget_neurons({{1.0}, {1.0, 2.0}}, 10, 2), ContractError);
    EXPECT_THROW(budget_neurons({{1.0, 0.0}, {1.0, 2.0}}, 3, 2), ContractError);
}

TEST(BlockSparse, SingleAreaIsDense) {
    NetworkCase c = ieee14();
    Partition p = make_partition(c, std::vector<int>(14, 0));
    ReluNet net = build_block_sparse_net(c, p, {50}, 2, 9);
    EXPECT_EQ(net, ReluNet::dense({20, 14}, {50, 50}, 9));
}

TEST(BlockSparse, TwoTrianglesFewerParametersAndDecomposes) {
    NetworkCase c = parse_case(kTwoTriangles);
    PartitionConfig cfg;
    cfg.areas = 2;
    Partition p = spectral_partition(c, cfg);
    ReluNet sparse = build_block_sparse_net(c, p, {6, 6}, 2, 5);
    ReluNet dense = ReluNet::dense({7, 6}, {12, 12}, 5);
    EXPECT_LT(sparse.num_parameters(), dense.num_parameters());

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (Layer& L : sparse.layers())
        for (double& b : L.bias) b = 0.3 * u(rng);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> x(sparse.spec().size());
        for (double& v : x) v = u(rng);
        EXPECT_NEAR(sparse.forward(x), per_area_sum(sparse, x, 2), 1e-9);
    }
}

TEST(BlockSparse, OnlyTieFeaturesAreShared) {
    NetworkCase c = load_case(std::string(AWLS_DATA_DIR) + "/ieee118.case");
    PartitionConfig cfg;
    cfg.areas = 5;
    Partition p = spectral_partition(c, cfg);
    const InputSpec spec{c.num_branches(), c.num_buses()};
    std::set<std::size_t> tie_features;
    for (BranchId id : p.tie_lines) {
        const std::size_t l = c.branch_index(id);
        tie_features.insert(spec.line(l));
        tie_features.insert(spec.pd(c.from_index(l)));
        tie_features.insert(spec.pd(c.to_index(l)));
    }
    const auto inputs = area_inputs(c, p);
    for (std::size_t a = 0; a < inputs.size(); ++a)
        for (std::size_t b = a + 1; b < inputs.size(); ++b) {
            std::vector<std::size_t> common;
            std::set_intersection(inputs[a].begin(), inputs[a].end(), inputs[b].begin(), inputs[b].end(),
                                  std::back_inserter(common));
            for (std::size_t j : common) EXPECT_TRUE(tie_features.count(j)) << "input " << j;
        }
}

TEST(BlockSparse, ParameterCountLinearInBuses) {
    const int ring = 10;
    const std::size_t per_area = 8;
    double last_dense_ratio = 0.0;
    for (int n : {30, 60, 120, 240}) {
        NetworkCase c = awls::testing::ring_chain(n / ring, ring);
        PartitionConfig cfg;
        cfg.areas = n / ring;
        cfg.d_max = ring;
        Partition p = spectral_partition(c, cfg);
        for (const auto& a : p.areas(c)) EXPECT_LE(a.size(), static_cast<std::size_t>(ring));
        std::vector<std::size_t> budget(static_cast<std::size_t>(p.num_areas), per_area);
        ReluNet sparse = build_block_sparse_net(c, p, budget, 2, 1);
        const std::size_t width = per_area * budget.size();
        ReluNet dense = ReluNet::dense(sparse.spec(), {width, width}, 1);
        EXPECT_LE(sparse.num_parameters(), 50u * static_cast<std::size_t>(n)) << n;
        const double ratio = static_cast<double>(dense.num_parameters()) / n;
        EXPECT_GT(ratio, last_dense_ratio);
        last_dense_ratio = ratio;
    }
}
