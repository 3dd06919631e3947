#pragma once

#include "cuspidal/linalg.hpp"
#include "oracles.hpp"

namespace testing_support {

inline cuspidal::IntMatrix to_matrix(const oracle::Grid& g) {
  cuspidal::IntMatrix m(g.size(), g.empty() ? 0 : g[0].size());
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g[i].size(); ++j) m(i, j) = g[i][j];
  return m;
}

inline oracle::Grid to_grid(const cuspidal::IntMatrix& m) {
  oracle::Grid g(m.rows(), std::vector<long>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) g[i][j] = m(i, j).get_si();
  return g;
}

}  // namespace testing_support
