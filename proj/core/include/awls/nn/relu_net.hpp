#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace awls {

enum class Activation : std::uint8_t { Relu, Identity };

/// Input ordering [x (one status per branch); pd (per bus); qd (per bus)].
struct InputSpec {
    std::size_t num_lines = 0;
    std::size_t num_buses = 0;

    std::size_t size() const noexcept { return num_lines + 2 * num_buses; }
    std::size_t line(std::size_t l) const noexcept { return l; }
    std::size_t pd(std::size_t bus) const noexcept { return num_lines + bus; }
    std::size_t qd(std::size_t bus) const noexcept { return num_lines + num_buses + bus; }
    bool operator==(const InputSpec&) const = default;
};

/// Fully connected layer with a trainability mask; masked weights are zero.
struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weight;        // out x in, row-major
    std::vector<double> bias;          // out
    std::vector<std::uint8_t> mask;    // out x in, 1 = trainable
    Activation activation = Activation::Relu;
    std::vector<int> group;            // optional per-neuron area tag, empty when dense

    double& w(std::size_t i, std::size_t j) { return weight[i * in + j]; }
    double w(std::size_t i, std::size_t j) const { return weight[i * in + j]; }
    bool operator==(const Layer&) const = default;
};

class ReluNet {
public:
    ReluNet() = default;
    ReluNet(InputSpec spec, std::vector<Layer> layers);

    /// Dense net with the given hidden widths and a scalar identity output.
    /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
    static ReluNet dense(InputSpec spec, const std::vector<std::size_t>& hidden, std::uint64_t seed);

    const InputSpec& spec() const noexcept { return spec_; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }
    std::vector<Layer>& layers() noexcept { return layers_; }

    double forward(std::span<const double> input) const;
    /// Post-activation values of every layer (the last entry holds the output).
    std::vector<std::vector<double>> activations(std::span<const double> input) const;

    /// Unmasked weights plus biases.
    std::size_t num_parameters() const;
    /// Flat view: per layer the weights (row-major) then the biases.
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> p);
    std::size_t parameter_size() const;

    void apply_masks();
    /// Throws ContractError when dimensions do not chain, the output is not a
    /// scalar identity layer, or a masked weight is nonzero.
    void validate() const;

    bool operator==(const ReluNet&) const = default;

private:
    InputSpec spec_;
    std::vector<Layer> layers_;
};

nlohmann::json net_to_json(const ReluNet& net);
ReluNet net_from_json(const nlohmann::json& j);
void save_net(const ReluNet& net, const std::string& path);
ReluNet load_net(const std::string& path);

}  // namespace awls
