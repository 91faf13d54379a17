#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "abelian/errors.hpp"

namespace abelian {

// Cap on the number of coordinates any dense enumeration may touch.
// Expressed in log2 so callers can reason about d^n sizes without overflow.
struct Budget {
  unsigned log2_coords = 24;

  std::uint64_t max_coords() const {
    return log2_coords >= 63 ? (std::uint64_t(1) << 63) : (std::uint64_t(1) << log2_coords);
  }

  void require(double log2_size, const std::string& what) const {
    if (!(log2_size <= double(log2_coords))) {
      throw BudgetError(what + " needs 2^" + std::to_string(log2_size) +
                        " coordinates, budget is 2^" + std::to_string(log2_coords) +
                        " (raise --budget or ABELIAN_INFO_BUDGET)");
    }
  }
};

}  // namespace abelian
