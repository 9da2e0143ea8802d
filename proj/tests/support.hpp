#pragma once

#include "umbilic/catalog.hpp"
#include "umbilic/frame.hpp"
#include "umbilic/linalg.hpp"

#include <cmath>
#include <initializer_list>
#include <numbers>

namespace umbilic::test {

inline constexpr double kPi = std::numbers::pi;

inline ChartVec cv(std::initializer_list<double> xs) {
    ChartVec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

inline AmbientVec av(std::initializer_list<double> xs) {
    AmbientVec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

/// x rescaled to unit length in the metric at u.
inline ChartVec g_unit(const ParametricImmersion& imm, const ChartVec& u, const ChartVec& x) {
    return x / g_norm(tangent_geometry(imm, u).g, x);
}

inline const ParametricImmersion& imm(const char* name) { return catalog_entry(name).immersion; }

}  // namespace umbilic::test
