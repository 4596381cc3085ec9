#pragma once

#include <vector>

#include "awls/grid/load_profile.hpp"
#include "awls/grid/topology.hpp"
#include "awls/model/powerflow.hpp"
#include "awls/nn/encode.hpp"
#include "awls/pipeline/evaluator.hpp"
#include "awls/solver/milp.hpp"

namespace awls {

struct AwlsConfig {
    SolverConfig solver;       // pool_size is the K of the incumbent pool
    double big_m = 100.0;      // clamp for the pre-activation bounds
    double s_bar = 0.0;        // slack cap; 0 = total demand of the profile
    AwlsConfig() { solver.pool_size = 10; }
};

struct AwlsSolution {
    SolveStatus status = SolveStatus::Infeasible;
    Topology topology;              // best incumbent
    double objective = 0.0;
    double predicted = 0.0;         // surrogate value at the incumbent
    double model_shed = 0.0;        // PCNN only: shed inside the single-level model
    double slack = 0.0;             // PCNN only
    std::vector<Topology> pool;     // best first, distinct
    long nodes = 0;
    double seconds = 0.0;
    std::size_t relu_binaries = 0;
};

/// Input box for the surrogate: candidate statuses in [0, 1], other statuses
/// fixed at 1, loads fixed at the profile.
InputBox surrogate_box(const NetworkCase& c, const std::vector<BranchId>& candidate_lines, const LoadProfile& load);
/// [x; pd; qd] as operands for the encoder.
std::vector<Operand> surrogate_operands(const std::vector<Operand>& x, const LoadProfile& load);

/// Emitter for build_ovf_model that encodes `net` with `bounds`.
SurrogateEmitter nn_emitter(const ReluNet& net, const ReluBounds& bounds, const LoadProfile& load);

/// max eta_hat(x) over X(k): budget row plus the net, no physics.
AwlsSolution solve_direct_nn(const NetworkCase& c, const LoadProfile& load, const ReluNet& net,
                             const ReluBounds& bounds, const std::vector<BranchId>& candidate_lines, std::size_t k,
                             const AwlsConfig& config = {});

/// Physics-constrained surrogate model; lambda must be positive.
AwlsSolution solve_pcnn(const NetworkCase& c, const LoadProfile& load, const ReluNet& net, const ReluBounds& bounds,
                        const std::vector<BranchId>& candidate_lines, std::size_t k, double lambda,
                        const AwlsConfig& config = {});

struct Refinement {
    Topology topology;
    double shed = 0.0;
    std::size_t index = 0;        // position in the pool
    std::vector<double> values;   // lower-level shed per pool entry
};

/// Lower-level solve per pool entry; keeps the first argmax.
Refinement refine_pool(const NetworkCase& c, const LoadProfile& load, const std::vector<Topology>& pool,
                       ShedEvaluator& evaluator);
Refinement refine_pool(const NetworkCase& c, const LoadProfile& load, const std::vector<Topology>& pool);

}  // namespace awls
