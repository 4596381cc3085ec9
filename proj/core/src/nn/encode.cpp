#include "awls/nn/encode.hpp"

#include <algorithm>
#include <cmath>

#include "awls/errors.hpp"

namespace awls {

std::size_t ReluBounds::undetermined() const {
    std::size_t n = 0;
    for (std::size_t k = 0; k + 1 < layers.size(); ++k)
        for (const NeuronBound& b : layers[k]) n += b.state == NeuronState::Undetermined;
    return n;
}

ReluBounds compute_bounds(const ReluNet& net, const InputBox& box, double clamp) {
    const std::size_t width = net.spec().size();
    if (box.lower.size() != width || box.upper.size() != width) throw ContractError("input box has the wrong length");
    if (!(clamp > 0.0)) throw ContractError("clamp must be positive");
    ReluBounds out;
    out.clamp = clamp;
    std::vector<double> lo = box.lower, hi = box.upper;
    for (std::size_t j = 0; j < width; ++j)
        if (!(std::isfinite(lo[j]) && std::isfinite(hi[j]) && lo[j] <= hi[j]))
            throw ContractError("input box must be finite and ordered");
    for (const Layer& L : net.layers()) {
        std::vector<NeuronBound> nb(L.out);
        std::vector<double> nlo(L.out), nhi(L.out);
        const bool last = &L == &net.layers().back();
        for (std::size_t i = 0; i < L.out; ++i) {
            double a = L.bias[i], b = L.bias[i];
            for (std::size_t j = 0; j < L.in; ++j) {
                const double w = L.w(i, j);
                if (w == 0.0) continue;
                a += w > 0 ? w * lo[j] : w * hi[j];
                b += w > 0 ? w * hi[j] : w * lo[j];
            }
            if (!last) {
                if (a < -clamp || b > clamp) ++out.clamped;
                a = std::max(a, -clamp);
                b = std::min(b, clamp);
                if (a > b) a = b;
            }
            NeuronBound& n = nb[i];
            n.lower = a;
            n.upper = b;
            if (L.activation == Activation::Identity) {
                n.state = NeuronState::Active;
                nlo[i] = a;
                nhi[i] = b;
            } else if (b <= 0.0) {
                n.state = NeuronState::Inactive;
                nlo[i] = nhi[i] = 0.0;
            } else if (a >= 0.0) {
                n.state = NeuronState::Active;
                nlo[i] = a;
                nhi[i] = b;
            } else {
                nlo[i] = 0.0;
                nhi[i] = b;
            }
        }
        out.layers.push_back(std::move(nb));
        lo = std::move(nlo);
        hi = std::move(nhi);
    }
    return out;
}

NnEncoding encode_milp(ConstraintSystem& s, const ReluNet& net, const ReluBounds& bounds,
                       const std::vector<Operand>& inputs, const std::string& prefix) {
    if (inputs.size() != net.spec().size()) throw ContractError("surrogate input count does not match the net");
    if (bounds.layers.size() != net.layers().size()) throw ContractError("bounds do not match the net");
    NnEncoding enc;
    std::vector<Operand> in = inputs;
    for (std::size_t k = 0; k < net.layers().size(); ++k) {
        const Layer& L = net.layers()[k];
        if (bounds.layers[k].size() != L.out) throw ContractError("bounds do not match the net");
        std::vector<Operand> next(L.out);
        std::vector<VarId> zk(L.out, -1), bk(L.out, -1);
        for (std::size_t i = 0; i < L.out; ++i) {
            LinExpr zhat(L.bias[i]);
            for (std::size_t j = 0; j < L.in; ++j) {
                const double w = L.w(i, j);
                if (w == 0.0) continue;
                if (in[j].is_variable()) zhat.add(in[j].var, w);
                else zhat.constant += w * in[j].constant;
            }
            zhat.compact();
            const NeuronBound& nb = bounds.layers[k][i];
            const std::string tag = prefix + "_" + std::to_string(k) + "_" + std::to_string(i);
            if (L.activation == Activation::Identity) {
                const VarId out = s.add_variable(prefix + "_out", nb.lower, nb.upper);
                s.add_eq(LinExpr::var(out) - zhat, 0.0, RowFamily::Relu, prefix + "_out_def");
                next[i] = Operand::variable(out);
                enc.output = out;
                continue;
            }
            if (zhat.terms.empty()) {
                next[i] = Operand::fixed(std::max(0.0, zhat.constant));
                ++enc.eliminated;
                continue;
            }
            if (nb.state == NeuronState::Inactive) {
                next[i] = Operand::fixed(0.0);
                ++enc.eliminated;
                continue;
            }
            if (nb.state == NeuronState::Active) {
                const VarId z = s.add_variable("z_" + tag, nb.lower, nb.upper);
                s.add_eq(LinExpr::var(z) - zhat, 0.0, RowFamily::Relu, "lin_" + tag);
                next[i] = Operand::variable(z);
                zk[i] = z;
                ++enc.eliminated;
                continue;
            }
            const double mlo = nb.lower, mup = nb.upper;
            const VarId z = s.add_variable("z_" + tag, 0.0, mup);
            const VarId beta = s.add_binary("beta_" + tag, -1);
            s.add_ge(LinExpr::var(z) - zhat, 0.0, RowFamily::Relu, "relu_lo_" + tag);
            s.add_le(LinExpr::var(z) - zhat + LinExpr::var(beta, -mlo), -mlo, RowFamily::Relu, "relu_hi_" + tag);
            s.add_le(LinExpr::var(z) + LinExpr::var(beta, -mup), 0.0, RowFamily::Relu, "relu_on_" + tag);
            next[i] = Operand::variable(z);
            zk[i] = z;
            bk[i] = beta;
            ++enc.binaries;
        }
        enc.z.push_back(std::move(zk));
        enc.beta.push_back(std::move(bk));
        in = std::move(next);
    }
    if (enc.output < 0) {
        // every path was constant; still expose the value through a fixed variable
        const double v = in[0].constant;
        enc.output = s.add_variable(prefix + "_out", v, v);
    }
    return enc;
}

nlohmann::json bounds_to_json(const ReluBounds& b) {
    nlohmann::json j;
    j["clamp"] = b.clamp;
    j["clamped"] = b.clamped;
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : b.layers) {
        nlohmann::json lo = nlohmann::json::array(), hi = nlohmann::json::array();
        for (const NeuronBound& n : layer) {
            lo.push_back(n.lower);
            hi.push_back(n.upper);
        }
        j["layers"].push_back({{"lower", lo}, {"upper", hi}});
    }
    return j;
}

ReluBounds bounds_from_json(const nlohmann::json& j) {
    ReluBounds b;
    b.clamp = j.at("clamp").get<double>();
    b.clamped = j.value("clamped", std::size_t{0});
    const auto& layers = j.at("layers");
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto lo = layers[k].at("lower").get<std::vector<double>>();
        const auto hi = layers[k].at("upper").get<std::vector<double>>();
        if (lo.size() != hi.size()) throw ValidationError("bounds-schema", "lower and upper differ in length");
        std::vector<NeuronBound> layer;
        const bool last = k + 1 == layers.size();
        for (std::size_t i = 0; i < lo.size(); ++i) {
            NeuronBound n{lo[i], hi[i], NeuronState::Undetermined};
            if (last) n.state = NeuronState::Active;
            else if (hi[i] <= 0.0) n.state = NeuronState::Inactive;
            else if (lo[i] >= 0.0) n.state = NeuronState::Active;
            layer.push_back(n);
        }
        b.layers.push_back(std::move(layer));
    }
    return b;
}

}  // namespace awls
