#ifndef INVREP_NN_TENSOR_HPP
#define INVREP_NN_TENSOR_HPP

#include <Eigen/Core>

#include <span>

namespace invrep {

/// Batch-major matrix: one row per example, one column per feature.
using Tensor2 = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

/// x - x is 0 for finite x and NaN otherwise, so one pass of adds decides.
/// (Eigen's allFinite is far slower on large matrices.)
inline bool all_finite(const double* data, Eigen::Index n) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) acc += data[i] - data[i];
  return acc == 0.0;
}

template <typename Derived>
bool all_finite(const Eigen::PlainObjectBase<Derived>& t) {
  return all_finite(t.data(), t.size());
}

inline std::span<const double> row_span(const Tensor2& t, Eigen::Index row) {
  return {t.data() + row * t.cols(), static_cast<std::size_t>(t.cols())};
}

}  // namespace invrep

#endif  // INVREP_NN_TENSOR_HPP
