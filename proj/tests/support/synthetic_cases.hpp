#pragma once

// Chains of rings: `rings` rings of `ring_size` buses, neighbouring rings joined
// by one weak tie. Every bus carries a small load; bus 1 holds the generator.

#include <sstream>
#include <string>

#include "awls/grid/network_case.hpp"

namespace awls::testing {

inline NetworkCase ring_chain(int rings, int ring_size) {
    std::ostringstream t;
    t << "BASE_MVA 100\nBUS\n";
    const int n = rings * ring_size;
    for (int b = 1; b <= n; ++b) t << b << ' ' << (b == 1 ? 3 : 1) << " 0.94 1.06 0.05 0.01\n";
    t << "GEN\n1 0 " << 0.1 * n << " -1 1\nBRANCH\n";
    int id = 1;
    for (int r = 0; r < rings; ++r) {
        const int base = r * ring_size + 1;
        for (int i = 0; i < ring_size; ++i) {
            const int u = base + i, v = base + (i + 1) % ring_size;
            t << id++ << ' ' << u << ' ' << v << " 1 -10 0 0 1 -0.5 0.5 1\n";
        }
        if (r + 1 < rings) t << id++ << ' ' << base + ring_size / 2 << ' ' << base + ring_size << " 0.1 -1 0 0 1 -0.5 0.5 1\n";
    }
    return parse_case(t.str());
}

}  // namespace awls::testing
