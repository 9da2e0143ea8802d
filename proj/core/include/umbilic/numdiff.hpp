#pragma once

#include "umbilic/error.hpp"

#include <cstddef>
#include <vector>

namespace umbilic {

/// Number of samples at each end whose first derivative uses a one-sided
/// stencil; sup-norms skip them.
inline constexpr std::size_t kStencilMargin = 2;

/// First derivative of uniformly spaced samples: fourth order (five-point
/// centred, five-point one-sided at the ends) from five samples on, second
/// order for three or four samples. Works for scalars and Eigen vectors.
template <typename V>
std::vector<V> differentiate_uniform(const std::vector<V>& f, double h) {
    const std::size_t n = f.size();
    if (n < 3) throw Error(ErrorKind::InsufficientSamples, "need at least three samples to differentiate");
    std::vector<V> d(n);
    if (n < 5) {
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
        return d;
    }
    const double s = 1.0 / (12.0 * h);
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * s;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * s;
    for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * s;
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * s;
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * s;
    return d;
}

}  // namespace umbilic
