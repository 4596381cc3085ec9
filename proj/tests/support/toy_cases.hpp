#pragma once

// Small hand-made cases shared by the physics and pipeline tests.

#include <string>

#include "awls/grid/network_case.hpp"

namespace awls::testing {

// generator at bus 1, load at bus 2
inline const char* kTwoBus = R"(BASE_MVA 100
BUS
1 3 0.95 1.05 0.0 0.0
2 1 0.95 1.05 0.6 0.2
GEN
1 0.0 2.0 -1.0 1.0
BRANCH
1 1 2 2.0 -8.0 0.0 0.02 1.0 -0.5 0.5 2.0
)";

// triangle; the 1-3 corridor is thermally tight
inline const char* kTriangle = R"(BASE_MVA 100
BUS
1 3 0.95 1.05 0.0 0.0
2 1 0.95 1.05 0.4 0.1
3 1 0.95 1.05 0.9 0.3
GEN
1 0.0 2.0 -1.0 1.0
2 0.0 0.0 -0.3 0.3
3 0.0 0.0 -0.3 0.3
BRANCH
1 1 2 1.0 -6.0 0.0 0.01 1.0 -0.4 0.4 0.7
2 2 3 1.2 -5.0 0.0 0.01 1.0 -0.4 0.4 0.5
3 1 3 1.5 -7.0 0.0 0.01 1.0 -0.4 0.4 0.45
)";

// triangle with a small generator at the load end and asymmetric angle limits
inline const char* kTriangleTight = R"(BASE_MVA 100
BUS
1 3 0.94 1.06 0.0 0.0
2 2 0.94 1.06 0.5 0.2
3 1 0.94 1.06 0.7 0.25
GEN
1 0.0 1.0 -0.8 0.8
2 0.0 0.3 -0.4 0.4
3 0.0 0.0 -0.2 0.2
BRANCH
1 1 2 0.8 -4.0 0.0 0.02 1.0 -0.2 0.3 0.6
2 2 3 0.9 -4.5 0.0 0.0 1.0 -0.3 0.2 0.4
3 1 3 0.7 -3.5 0.0 0.02 1.0 -0.25 0.25 0.5
)";

// generators everywhere (wide bounds) for Monte-Carlo sampling of feasible points
inline const char* kFourBusRing = R"(BASE_MVA 100
BUS
1 3 0.9 1.1 0.2 0.1
2 1 0.92 1.08 0.5 0.2
3 1 0.95 1.05 0.4 0.3
4 1 0.9 1.1 0.3 0.1
GEN
1 -5.0 5.0 -5.0 5.0
2 -5.0 5.0 -5.0 5.0
3 -5.0 5.0 -5.0 5.0
4 -5.0 5.0 -5.0 5.0
BRANCH
1 1 2 1.0 -10.0 0.01 0.05 1.05 -0.5 0.6 4.0
2 2 3 2.0 -9.0 0.0 0.03 1.0 -0.4 0.4 4.0
3 3 4 1.5 -6.0 0.0 0.0 0.95 -0.6 0.3 4.0
4 4 1 0.5 -12.0 0.02 0.04 1.0 -0.3 0.5 4.0
)";

inline const char* kFiveBusMesh = R"(BASE_MVA 100
BUS
1 3 0.9 1.1 0.1 0.05
2 1 0.9 1.1 0.4 0.1
3 1 0.9 1.1 0.3 0.2
4 1 0.9 1.1 0.2 0.1
5 1 0.9 1.1 0.5 0.2
GEN
1 -6.0 6.0 -6.0 6.0
2 -6.0 6.0 -6.0 6.0
3 -6.0 6.0 -6.0 6.0
4 -6.0 6.0 -6.0 6.0
5 -6.0 6.0 -6.0 6.0
BRANCH
1 1 2 3.0 -15.0 0.0 0.04 1.0 -0.3 0.3 5.0
2 1 3 1.0 -5.0 0.0 0.02 1.0 -0.5 0.5 5.0
3 2 3 2.0 -8.0 0.0 0.02 1.1 -0.4 0.2 5.0
4 3 4 1.0 -4.0 0.01 0.0 1.0 -0.2 0.4 5.0
5 4 5 2.5 -10.0 0.0 0.05 0.9 -0.35 0.35 5.0
6 2 5 1.2 -6.0 0.0 0.0 1.0 0.0 0.0 5.0
)";

inline NetworkCase toy(const char* text) { return parse_case(text); }

}  // namespace awls::testing
