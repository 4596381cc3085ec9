#include "awls/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "awls/errors.hpp"

namespace awls {
namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

struct Params {
    std::vector<Mat> w;
    std::vector<Mat> mask;
    std::vector<Vec> b;
    std::vector<bool> relu;
};

Params unpack(const ReluNet& net) {
    Params p;
    for (const Layer& L : net.layers()) {
        p.w.push_back(Eigen::Map<const Mat>(L.weight.data(), static_cast<Eigen::Index>(L.out),
                                            static_cast<Eigen::Index>(L.in)));
        Mat m(L.out, L.in);
        for (std::size_t e = 0; e < L.mask.size(); ++e) m.data()[e] = L.mask[e];
        p.mask.push_back(std::move(m));
        p.b.push_back(Eigen::Map<const Vec>(L.bias.data(), static_cast<Eigen::Index>(L.out)));
        p.relu.push_back(L.activation == Activation::Relu);
    }
    return p;
}

void pack(const Params& p, ReluNet& net) {
    for (std::size_t k = 0; k < net.layers().size(); ++k) {
        Layer& L = net.layers()[k];
        std::copy(p.w[k].data(), p.w[k].data() + p.w[k].size(), L.weight.begin());
        std::copy(p.b[k].data(), p.b[k].data() + p.b[k].size(), L.bias.begin());
    }
    net.apply_masks();
}

Mat gather(const TrainingSet& data, const std::size_t* rows, std::size_t n, std::size_t width) {
    Mat x(n, width);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& in = data.inputs[rows[r]];
        if (in.size() != width) throw ContractError("training input has the wrong length");
        for (std::size_t c = 0; c < width; ++c) x(r, c) = in[c];
    }
    return x;
}

// Forward over a batch; keeps pre-activations for the backward pass.
Vec forward(const Params& p, const Mat& x, std::vector<Mat>* acts, std::vector<Mat>* pre) {
    Mat a = x;
    for (std::size_t k = 0; k < p.w.size(); ++k) {
        Mat z = a * p.w[k].transpose();
        z.rowwise() += p.b[k].transpose();
        if (acts) acts->push_back(a);
        if (pre) pre->push_back(z);
        a = p.relu[k] ? Mat(z.cwiseMax(0.0)) : z;
    }
    return a.col(0);
}

double batch_gradient(const Params& p, const Mat& x, const Vec& y, std::vector<Mat>& gw, std::vector<Vec>& gb) {
    std::vector<Mat> acts, pre;
    const Vec out = forward(p, x, &acts, &pre);
    const double n = static_cast<double>(y.size());
    const Vec diff = out - y;
    Mat g = (2.0 / n) * diff;
    gw.resize(p.w.size());
    gb.resize(p.w.size());
    for (std::size_t k = p.w.size(); k-- > 0;) {
        if (p.relu[k]) g = g.cwiseProduct((pre[k].array() > 0.0).cast<double>().matrix());
        gw[k] = (g.transpose() * acts[k]).cwiseProduct(p.mask[k]);
        gb[k] = g.colwise().sum().transpose();
        if (k > 0) g = g * p.w[k];
    }
    return diff.squaredNorm() / n;
}

}  // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ContractError("learning rate must be positive");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ContractError("train fraction must lie in (0, 1)");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0))
        throw ContractError("invalid Adam moments");
    if (!(final_lr_fraction > 0.0 && final_lr_fraction <= 1.0))
        throw ContractError("final learning-rate fraction must lie in (0, 1]");
}

double mse(const ReluNet& net, const TrainingSet& data) {
    if (data.size() == 0) throw ContractError("empty data set");
    std::vector<std::size_t> rows(data.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const Params p = unpack(net);
    const Mat x = gather(data, rows.data(), rows.size(), net.spec().size());
    const Vec y = Eigen::Map<const Vec>(data.labels.data(), static_cast<Eigen::Index>(data.size()));
    return (forward(p, x, nullptr, nullptr) - y).squaredNorm() / static_cast<double>(data.size());
}

double loss_gradient(const ReluNet& net, const TrainingSet& data, const std::vector<std::size_t>& rows,
                     std::vector<double>& grad) {
    if (rows.empty()) throw ContractError("empty batch");
    const Params p = unpack(net);
    const Mat x = gather(data, rows.data(), rows.size(), net.spec().size());
    Vec y(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) y(static_cast<Eigen::Index>(r)) = data.labels[rows[r]];
    std::vector<Mat> gw;
    std::vector<Vec> gb;
    const double loss = batch_gradient(p, x, y, gw, gb);
    grad.clear();
    for (std::size_t k = 0; k < gw.size(); ++k) {
        grad.insert(grad.end(), gw[k].data(), gw[k].data() + gw[k].size());
        grad.insert(grad.end(), gb[k].data(), gb[k].data() + gb[k].size());
    }
    return loss;
}

TrainResult train(ReluNet net, const TrainingSet& data, const TrainConfig& config) {
    config.validate();
    net.validate();
    if (data.size() == 0) throw ContractError("training set is empty");
    if (data.inputs.size() != data.labels.size()) throw ContractError("inputs and labels differ in length");
    for (double y : data.labels)
        if (!std::isfinite(y)) throw ContractError("training labels must be finite");

    const std::size_t n = data.size();
    const std::size_t width = net.spec().size();
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const Mat x_all = gather(data, all.data(), n, width);
    const Vec y_all = Eigen::Map<const Vec>(data.labels.data(), static_cast<Eigen::Index>(n));

    Params p = unpack(net);
    std::vector<Mat> mw, vw;
    std::vector<Vec> mb, vb;
    for (std::size_t k = 0; k < p.w.size(); ++k) {
        mw.push_back(Mat::Zero(p.w[k].rows(), p.w[k].cols()));
        vw.push_back(Mat::Zero(p.w[k].rows(), p.w[k].cols()));
        mb.push_back(Vec::Zero(p.b[k].size()));
        vb.push_back(Vec::Zero(p.b[k].size()));
    }

    std::mt19937_64 rng(config.seed);
    const std::size_t batch = config.batch_size == 0 ? n : std::min(config.batch_size, n);
    TrainResult result;
    std::vector<Mat> gw;
    std::vector<Vec> gb;
    double b1t = 1.0, b2t = 1.0;
    std::vector<std::size_t> order = all;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (batch < n) std::shuffle(order.begin(), order.end(), rng);
        const double phase = config.epochs > 1 ? static_cast<double>(epoch) / static_cast<double>(config.epochs - 1) : 0.0;
        const double lr = config.learning_rate *
                          (config.final_lr_fraction + (1.0 - config.final_lr_fraction) * 0.5 *
                                                          (1.0 + std::cos(std::numbers::pi * phase)));
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t m = std::min(batch, n - start);
            Mat xb(m, width);
            Vec yb(m);
            for (std::size_t r = 0; r < m; ++r) {
                xb.row(static_cast<Eigen::Index>(r)) = x_all.row(static_cast<Eigen::Index>(order[start + r]));
                yb(static_cast<Eigen::Index>(r)) = y_all(static_cast<Eigen::Index>(order[start + r]));
            }
            const double loss = batch_gradient(p, xb, yb, gw, gb);
            if (!std::isfinite(loss))
                throw TrainingError("loss became non-finite in epoch " + std::to_string(epoch) +
                                    "; try a smaller learning rate than " + std::to_string(config.learning_rate));
            b1t *= config.beta1;
            b2t *= config.beta2;
            const double step = lr * std::sqrt(1.0 - b2t) / (1.0 - b1t);
            const double eps = config.epsilon * std::sqrt(1.0 - b2t);
            for (std::size_t k = 0; k < p.w.size(); ++k) {
                mw[k] = config.beta1 * mw[k] + (1.0 - config.beta1) * gw[k];
                vw[k] = config.beta2 * vw[k] + (1.0 - config.beta2) * gw[k].cwiseAbs2();
                p.w[k].array() -= step * mw[k].array() / (vw[k].array().sqrt() + eps);
                p.w[k] = p.w[k].cwiseProduct(p.mask[k]);
                mb[k] = config.beta1 * mb[k] + (1.0 - config.beta1) * gb[k];
                vb[k] = config.beta2 * vb[k] + (1.0 - config.beta2) * gb[k].cwiseAbs2();
                p.b[k].array() -= step * mb[k].array() / (vb[k].array().sqrt() + eps);
            }
        }
        const double full = (forward(p, x_all, nullptr, nullptr) - y_all).squaredNorm() / static_cast<double>(n);
        if (!std::isfinite(full))
            throw TrainingError("loss became non-finite after epoch " + std::to_string(epoch) +
                                "; try a smaller learning rate than " + std::to_string(config.learning_rate));
        result.loss_trace.push_back(full);
    }
    pack(p, net);
    result.net = std::move(net);
    return result;
}

}  // namespace awls
