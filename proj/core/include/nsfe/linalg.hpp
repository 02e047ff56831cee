#pragma once

#include <cstddef>
#include <vector>

#include "nsfe/xreal.hpp"

namespace nsfe::detail {

/// Dense row-major square system in extended precision.
struct XMatrix {
  std::size_t n = 0;
  std::vector<xreal> a;

  explicit XMatrix(std::size_t size) : n(size), a(size * size) {}
  xreal& operator()(std::size_t r, std::size_t c) { return a[r * n + c]; }
  const xreal& operator()(std::size_t r, std::size_t c) const { return a[r * n + c]; }
};

/// Gaussian elimination with partial pivoting. Returns false when a pivot is
/// below `singular_tol` times the largest entry of its column.
bool solve_in_place(XMatrix m, std::vector<xreal>& rhs, double singular_tol = 1e-40);

}  // namespace nsfe::detail
