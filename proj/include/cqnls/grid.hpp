#pragma once

#include <cmath>
#include <numbers>

namespace cqnls {

/// Uniform periodic grid on [-L, L)^2 with n points per axis (n a power of
/// two). The discrete frequency lattice is xi = (pi/L) * {-n/2, ..., n/2-1}
/// per axis; DFT index k maps to the signed integer k (k < n/2) or k - n.
struct GridSpec {
    int n = 0;
    double half_width = 0.0;

    double spacing() const { return 2.0 * half_width / n; }
    double x(int j) const { return -half_width + j * spacing(); }
    double freq(int k) const {
        const int s = (k < n / 2) ? k : k - n;
        return (std::numbers::pi / half_width) * s;
    }
    double freq_resolution() const { return std::numbers::pi / half_width; }
    double max_freq() const { return std::numbers::pi / spacing(); }
    long size() const { return static_cast<long>(n) * n; }

    bool operator==(const GridSpec&) const = default;
};

/// Validates n (power of two, >= 16) and half_width (> 0); throws
/// std::invalid_argument otherwise.
GridSpec make_grid(int n, double half_width);

}  // namespace cqnls
