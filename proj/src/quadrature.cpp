#include "quadrature.hpp"

namespace pnp {

namespace {

// degree-2 rule: 4 symmetric points (a,b,b,b), a = (5+3*sqrt5)/20, b = (5-sqrt5)/20
constexpr double kA2 = 0.58541019662496845446;
constexpr double kB2 = 0.13819660112501051518;

constexpr std::array<std::array<double, 4>, 4> kPoints2 = {{
    {kA2, kB2, kB2, kB2},
    {kB2, kA2, kB2, kB2},
    {kB2, kB2, kA2, kB2},
    {kB2, kB2, kB2, kA2},
}};
constexpr std::array<double, 4> kWeights2 = {0.25, 0.25, 0.25, 0.25};

// Keast 14-point rule, degree 5: two 4-point symmetric orbits plus one
// 6-point edge orbit.
constexpr double kA5a = 0.0673422422100983;
constexpr double kB5a = 0.3108859192633005;
constexpr double kW5a = 0.1126879257180162;
constexpr double kA5b = 0.7217942490673264;
constexpr double kB5b = 0.0927352503108912;
constexpr double kW5b = 0.0734930431163619;
constexpr double kA5c = 0.4544962958743506;
constexpr double kB5c = 0.0455037041256494;
constexpr double kW5c = 0.0425460207770812;

constexpr std::array<std::array<double, 4>, 14> kPoints5 = {{
    {kA5a, kB5a, kB5a, kB5a},
    {kB5a, kA5a, kB5a, kB5a},
    {kB5a, kB5a, kA5a, kB5a},
    {kB5a, kB5a, kB5a, kA5a},
    {kA5b, kB5b, kB5b, kB5b},
    {kB5b, kA5b, kB5b, kB5b},
    {kB5b, kB5b, kA5b, kB5b},
    {kB5b, kB5b, kB5b, kA5b},
    {kA5c, kA5c, kB5c, kB5c},
    {kA5c, kB5c, kA5c, kB5c},
    {kA5c, kB5c, kB5c, kA5c},
    {kB5c, kA5c, kA5c, kB5c},
    {kB5c, kA5c, kB5c, kA5c},
    {kB5c, kB5c, kA5c, kA5c},
}};
constexpr std::array<double, 14> kWeights5 = {
    kW5a, kW5a, kW5a, kW5a,
    kW5b, kW5b, kW5b, kW5b,
    kW5c, kW5c, kW5c, kW5c, kW5c, kW5c,
};

} // namespace

const QuadratureRule& quadrature_degree2() {
    static const QuadratureRule rule{kPoints2, kWeights2, 2};
    return rule;
}

const QuadratureRule& quadrature_degree5() {
    static const QuadratureRule rule{kPoints5, kWeights5, 5};
    return rule;
}

} // namespace pnp
