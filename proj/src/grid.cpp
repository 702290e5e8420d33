#include "cqnls/grid.hpp"

#include <stdexcept>
#include <string>

namespace cqnls {

GridSpec make_grid(int n, double half_width) {
    if (n < 16 || (n & (n - 1)) != 0)
        throw std::invalid_argument("make_grid: n must be a power of two >= 16, got " +
                                    std::to_string(n));
    if (!(half_width > 0.0))
        throw std::invalid_argument("make_grid: half_width must be positive");
    return GridSpec{n, half_width};
}

}  // namespace cqnls
