#include "awls/grid/load_profile.hpp"

#include <cmath>

#include "awls/errors.hpp"

namespace awls {

LoadProfile LoadProfile::nominal(const NetworkCase& c) {
    LoadProfile p;
    for (const Bus& b : c.buses()) {
        p.pd.push_back(b.pd);
        p.qd.push_back(b.qd);
    }
    return p;
}

double LoadProfile::total() const noexcept {
    double s = 0.0;
    for (double v : pd) s += v;
    for (double v : qd) s += v;
    return s;
}

void LoadProfile::validate(const NetworkCase& c) const {
    if (pd.size() != c.num_buses() || qd.size() != c.num_buses())
        throw ContractError("load profile length does not match the bus count");
    for (std::size_t i = 0; i < pd.size(); ++i)
        if (!(pd[i] >= 0.0) || !(qd[i] >= 0.0) || !std::isfinite(pd[i]) || !std::isfinite(qd[i]))
            throw ContractError("load profile entries must be finite and nonnegative");
}

}  // namespace awls
