#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace umbilic {

// Chart dimension m and ambient dimension N are bounded so that every
// per-point quantity lives on the stack; integrators evaluate frames tens of
// thousands of times per curve.
inline constexpr int kMaxChartDim = 4;
inline constexpr int kMaxAmbientDim = 8;

using ChartVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxChartDim, 1>;
using ChartMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxChartDim, kMaxChartDim>;
using AmbientVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxAmbientDim, 1>;
using AmbientMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbientDim, kMaxAmbientDim>;
/// N x m matrix whose columns are tangent vectors.
using FrameMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbientDim, kMaxChartDim>;
/// N x m^2 matrix of second partials; column i*m+j holds d_i d_j f.
using SecondPartials =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbientDim, kMaxChartDim * kMaxChartDim>;
/// N x m^3 matrix of third partials; column (i*m+j)*m+k holds d_i d_j d_k f.
/// Heap allocated: rarely requested and too large to carry on the stack.
using ThirdPartials = Eigen::MatrixXd;

/// Christoffel symbols: gamma[k](i, j) = Gamma^k_ij.
using Christoffel = std::array<ChartMat, kMaxChartDim>;

/// Bilinear contraction sum_ij B_col(i*m+j) X^i Y^j of an N x m^2 array.
template <typename Partials>
AmbientVec contract2(const Partials& second, const ChartVec& x, const ChartVec& y) {
    const int m = static_cast<int>(x.size());
    AmbientVec out = AmbientVec::Zero(second.rows());
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double w = x[i] * y[j];
            if (w != 0.0) out.noalias() += w * second.col(i * m + j);
        }
    }
    return out;
}

inline AmbientVec contract3(const ThirdPartials& third, const ChartVec& x, const ChartVec& y,
                            const ChartVec& z) {
    const int m = static_cast<int>(x.size());
    AmbientVec out = AmbientVec::Zero(third.rows());
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < m; ++k) {
                const double w = x[i] * y[j] * z[k];
                if (w != 0.0) out.noalias() += w * third.col((i * m + j) * m + k);
            }
        }
    }
    return out;
}

/// Gamma(X, Y)^k = Gamma^k_ij X^i Y^j.
inline ChartVec contract_christoffel(const Christoffel& gamma, const ChartVec& x, const ChartVec& y) {
    const int m = static_cast<int>(x.size());
    ChartVec out(m);
    for (int k = 0; k < m; ++k) out[k] = x.dot(gamma[k] * y);
    return out;
}

inline double g_inner(const ChartMat& g, const ChartVec& x, const ChartVec& y) { return x.dot(g * y); }

inline double g_norm(const ChartMat& g, const ChartVec& x) { return std::sqrt(std::max(0.0, g_inner(g, x, x))); }

/// Singular values of a centred point cloud, largest first. Points are rows.
Eigen::VectorXd centred_singular_values(const Eigen::MatrixXd& points);

}  // namespace umbilic
