#pragma once

namespace cqnls {
inline constexpr const char* kVersion = "cqnls 1.0.0";
}
