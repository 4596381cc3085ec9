#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "awls/nn/relu_net.hpp"

namespace awls {

struct TrainingSet {
    std::vector<std::vector<double>> inputs;
    std::vector<double> labels;

    std::size_t size() const noexcept { return labels.size(); }
};

struct TrainConfig {
    std::size_t epochs = 1000;
    double learning_rate = 2.5e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 64;  // 0 = full batch
    std::uint64_t seed = 0;
    double train_fraction = 0.9;  // used by callers that split a dataset
    /// Cosine decay from learning_rate to learning_rate * final_lr_fraction
    /// over the epochs; 1 keeps the rate constant.
    double final_lr_fraction = 1.0;

    void validate() const;
};

struct TrainResult {
    ReluNet net;
    std::vector<double> loss_trace;  // full-batch training MSE after each epoch
};

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mean squared error of the net over a set.
double mse(const ReluNet& net, const TrainingSet& data);

/// MSE over the listed samples and its gradient in ReluNet::parameters()
/// layout; masked weights get zero gradient.
double loss_gradient(const ReluNet& net, const TrainingSet& data, const std::vector<std::size_t>& rows,
                     std::vector<double>& grad);

/// Mini-batch Adam on the squared-error loss. Masked weights stay exactly
/// zero. Throws TrainingError when the loss stops being finite.
TrainResult train(ReluNet net, const TrainingSet& data, const TrainConfig& config);

}  // namespace awls
