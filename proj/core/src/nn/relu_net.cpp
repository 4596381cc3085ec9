#include "awls/nn/relu_net.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "awls/errors.hpp"

namespace awls {

ReluNet::ReluNet(InputSpec spec, std::vector<Layer> layers) : spec_(spec), layers_(std::move(layers)) { validate(); }

ReluNet ReluNet::dense(InputSpec spec, const std::vector<std::size_t>& hidden, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Layer> layers;
    std::size_t in = spec.size();
    auto make = [&](std::size_t out, Activation act) {
        Layer L;
        L.in = in;
        L.out = out;
        L.activation = act;
        L.bias.assign(out, 0.0);
        L.mask.assign(out * in, 1);
        const double r = std::sqrt(6.0 / static_cast<double>(in + out));
        std::uniform_real_distribution<double> u(-r, r);
        L.weight.resize(out * in);
        for (double& w : L.weight) w = u(rng);
        layers.push_back(std::move(L));
        in = out;
    };
    for (std::size_t h : hidden) make(h, Activation::Relu);
    make(1, Activation::Identity);
    return ReluNet(spec, std::move(layers));
}

void ReluNet::validate() const {
    if (layers_.empty()) throw ContractError("network has no layers");
    std::size_t in = spec_.size();
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        const Layer& L = layers_[k];
        if (L.in != in) throw ContractError("layer " + std::to_string(k) + " input width does not chain");
        if (L.weight.size() != L.in * L.out || L.mask.size() != L.in * L.out || L.bias.size() != L.out)
            throw ContractError("layer " + std::to_string(k) + " has inconsistent array sizes");
        if (!L.group.empty() && L.group.size() != L.out)
            throw ContractError("layer " + std::to_string(k) + " group tags do not match its width");
        for (std::size_t e = 0; e < L.weight.size(); ++e)
            if (!L.mask[e] && L.weight[e] != 0.0) throw ContractError("masked weight is nonzero");
        in = L.out;
    }
    const Layer& last = layers_.back();
    if (last.out != 1 || last.activation != Activation::Identity)
        throw ContractError("output layer must be a single identity neuron");
}

std::vector<std::vector<double>> ReluNet::activations(std::span<const double> input) const {
    if (input.size() != spec_.size())
        throw ContractError("input has " + std::to_string(input.size()) + " entries, expected " +
                            std::to_string(spec_.size()));
    std::vector<std::vector<double>> out;
    std::vector<double> a(input.begin(), input.end());
    for (const Layer& L : layers_) {
        std::vector<double> z(L.out);
        for (std::size_t i = 0; i < L.out; ++i) {
            double s = L.bias[i];
            const double* row = &L.weight[i * L.in];
            for (std::size_t j = 0; j < L.in; ++j) s += row[j] * a[j];
            z[i] = L.activation == Activation::Relu ? std::max(0.0, s) : s;
        }
        out.push_back(z);
        a = std::move(z);
    }
    return out;
}

double ReluNet::forward(std::span<const double> input) const { return activations(input).back()[0]; }

std::size_t ReluNet::num_parameters() const {
    std::size_t n = 0;
    for (const Layer& L : layers_) {
        for (std::uint8_t m : L.mask) n += m;
        n += L.out;
    }
    return n;
}

std::size_t ReluNet::parameter_size() const {
    std::size_t n = 0;
    for (const Layer& L : layers_) n += L.weight.size() + L.bias.size();
    return n;
}

std::vector<double> ReluNet::parameters() const {
    std::vector<double> p;
    p.reserve(parameter_size());
    for (const Layer& L : layers_) {
        p.insert(p.end(), L.weight.begin(), L.weight.end());
        p.insert(p.end(), L.bias.begin(), L.bias.end());
    }
    return p;
}

void ReluNet::set_parameters(std::span<const double> p) {
    if (p.size() != parameter_size()) throw ContractError("parameter vector has the wrong length");
    std::size_t k = 0;
    for (Layer& L : layers_) {
        for (double& w : L.weight) w = p[k++];
        for (double& b : L.bias) b = p[k++];
    }
    apply_masks();
}

void ReluNet::apply_masks() {
    for (Layer& L : layers_)
        for (std::size_t e = 0; e < L.weight.size(); ++e)
            if (!L.mask[e]) L.weight[e] = 0.0;
}

nlohmann::json net_to_json(const ReluNet& net) {
    nlohmann::json j;
    j["schema"] = "awls.relu_net/1";
    j["input"] = {{"lines", net.spec().num_lines}, {"buses", net.spec().num_buses}};
    j["layers"] = nlohmann::json::array();
    for (const Layer& L : net.layers()) {
        nlohmann::json l;
        l["in"] = L.in;
        l["out"] = L.out;
        l["activation"] = L.activation == Activation::Relu ? "relu" : "identity";
        l["weights"] = L.weight;
        l["bias"] = L.bias;
        l["mask"] = L.mask;
        if (!L.group.empty()) l["group"] = L.group;
        j["layers"].push_back(std::move(l));
    }
    return j;
}

ReluNet net_from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "awls.relu_net/1") throw ValidationError("net-schema", "expected awls.relu_net/1");
    InputSpec spec{j.at("input").at("lines").get<std::size_t>(), j.at("input").at("buses").get<std::size_t>()};
    std::vector<Layer> layers;
    for (const auto& l : j.at("layers")) {
        Layer L;
        L.in = l.at("in").get<std::size_t>();
        L.out = l.at("out").get<std::size_t>();
        const std::string act = l.at("activation").get<std::string>();
        if (act != "relu" && act != "identity") throw ValidationError("net-schema", "unknown activation " + act);
        L.activation = act == "relu" ? Activation::Relu : Activation::Identity;
        L.weight = l.at("weights").get<std::vector<double>>();
        L.bias = l.at("bias").get<std::vector<double>>();
        L.mask = l.at("mask").get<std::vector<std::uint8_t>>();
        if (l.contains("group")) L.group = l["group"].get<std::vector<int>>();
        layers.push_back(std::move(L));
    }
    return ReluNet(spec, std::move(layers));
}

void save_net(const ReluNet& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << net_to_json(net).dump() << '\n';
}

ReluNet load_net(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return net_from_json(nlohmann::json::parse(in));
}

}  // namespace awls
