#pragma once

#include <string>
#include <vector>

#include "awls/model/constraint_system.hpp"
#include "awls/nn/relu_net.hpp"

namespace awls {

enum class NeuronState : std::uint8_t { Undetermined, Active, Inactive };

struct NeuronBound {
    double lower = 0.0;  // pre-activation bounds after clamping
    double upper = 0.0;
    NeuronState state = NeuronState::Undetermined;
};

struct ReluBounds {
    std::vector<std::vector<NeuronBound>> layers;  // one entry per layer, output included
    double clamp = 100.0;
    std::size_t clamped = 0;  // neurons whose interval bound was cut back to the clamp

    std::size_t undetermined() const;
};

/// Per-input interval; equal ends fix an input.
struct InputBox {
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Interval propagation layer by layer, intersected with [-clamp, clamp].
ReluBounds compute_bounds(const ReluNet& net, const InputBox& box, double clamp = 100.0);

struct NnEncoding {
    VarId output = -1;
    std::size_t binaries = 0;
    std::size_t eliminated = 0;        // hidden neurons resolved to constant or linear
    std::vector<std::vector<VarId>> z;  // post-activation variable per neuron, -1 when constant
    std::vector<std::vector<VarId>> beta;
};

/// Big-M encoding of the net over the given input operands. Undetermined
/// neurons get z in [0, M_up], a binary beta and the rows
///   z >= zhat,  z <= zhat - M_lo (1 - beta),  z <= M_up beta;
/// provably active neurons become z = zhat, inactive ones vanish. The
/// bounds must hold for every input the system can produce.
NnEncoding encode_milp(ConstraintSystem& s, const ReluNet& net, const ReluBounds& bounds,
                       const std::vector<Operand>& inputs, const std::string& prefix = "nn");

nlohmann::json bounds_to_json(const ReluBounds& b);
ReluBounds bounds_from_json(const nlohmann::json& j);

}  // namespace awls
