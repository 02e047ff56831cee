#include "nsfe/linalg.hpp"

#include <algorithm>
#include <utility>

namespace nsfe::detail {

bool solve_in_place(XMatrix m, std::vector<xreal>& rhs, double singular_tol) {
  const std::size_t n = m.n;
  xreal scale = 0;
  for (const xreal& v : m.a) scale = std::max(scale, xreal(abs(v)));
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    xreal best = abs(m(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const xreal v = abs(m(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best == 0 || best < singular_tol * scale) return false;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(col, c), m(pivot, c));
      std::swap(rhs[col], rhs[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const xreal f = m(r, col) / m(col, col);
      if (f == 0) continue;
      for (std::size_t c = col; c < n; ++c) m(r, c) -= f * m(col, c);
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    xreal acc = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= m(i, c) * rhs[c];
    rhs[i] = acc / m(i, i);
  }
  return true;
}

}  // namespace nsfe::detail
