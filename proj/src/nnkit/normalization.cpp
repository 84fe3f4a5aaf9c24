#include "daqn/nnkit/normalization.hpp"

#include <cmath>

namespace daqn {

Normalization Normalization::fit(const Tensor& stack) {
  auto cols = stack.columns();
  const double n = static_cast<double>(cols.cols());
  Normalization norm;
  norm.mean = cols.rowwise().mean();
  const Eigen::MatrixXd centered = cols.colwise() - norm.mean;
  norm.stddev = (centered.rowwise().squaredNorm() / n).cwiseSqrt();
  for (Index i = 0; i < norm.stddev.size(); ++i)
    if (!(norm.stddev[i] > 1e-12)) norm.stddev[i] = 1.0;
  return norm;
}

void Normalization::apply_columns(Eigen::Ref<Eigen::MatrixXd> cols) const {
  if (is_identity()) return;
  if (cols.rows() != mean.size())
    throw ShapeError("normalization has " + std::to_string(mean.size()) + " features, input has " +
                     std::to_string(cols.rows()));
  cols.colwise() -= mean;
  cols.array().colwise() /= stddev.array();
}

Tensor Normalization::apply(const Tensor& x) const {
  if (is_identity()) return x;
  Tensor out = x;
  if (x.size() == mean.size()) {
    Eigen::Map<Eigen::MatrixXd> col(out.data().data(), out.size(), 1);
    apply_columns(col);
  } else {
    apply_columns(out.columns());
  }
  return out;
}

}  // namespace daqn
