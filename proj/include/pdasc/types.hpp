#pragma once

#include <Eigen/Core>
#include <vector>

namespace pdasc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexList = std::vector<int>;

inline Vector gather(const Vector& v, const IndexList& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Eigen::Index>(k)] = v[idx[k]];
  return out;
}

inline int count_nonzeros(const Vector& v) {
  int nnz = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) ++nnz;
  return nnz;
}

}  // namespace pdasc
