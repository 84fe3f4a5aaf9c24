#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace daqn {

using Index = Eigen::Index;
using Shape = std::vector<int>;

/// Raised for any inconsistent shape: bad layer chain, wrong input, mismatched loss operands.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Index shape_size(const Shape& shape);
std::string to_string(const Shape& shape);

/// Prepends a leading batch dimension.
Shape batched(const Shape& sample_shape, int batch);

/// Dense n-dimensional array of doubles in row-major order.
///
/// Storage is an Eigen vector so a tensor can be viewed as a matrix without
/// copying; a batch of N samples of shape S is a tensor of shape [N, S...]
/// and maps onto a (size(S) x N) column-major matrix, one sample per column.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, Eigen::VectorXd data);
  Tensor(Shape shape, std::initializer_list<double> values);

  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  Index size() const { return data_.size(); }
  bool empty() const { return data_.size() == 0; }

  Eigen::VectorXd& data() { return data_; }
  const Eigen::VectorXd& data() const { return data_; }

  double& operator[](Index i) { return data_[i]; }
  double operator[](Index i) const { return data_[i]; }

  /// Element access by multi-index (row-major).
  double& at(std::initializer_list<int> idx);
  double at(std::initializer_list<int> idx) const;

  /// Same data under a new shape of equal size.
  Tensor reshaped(Shape shape) const;

  /// Samples along axis 0 as columns: (size / shape[0]) x shape[0].
  Eigen::Map<Eigen::MatrixXd> columns();
  Eigen::Map<const Eigen::MatrixXd> columns() const;

  /// Slice i along axis 0, without the leading dimension.
  Tensor slice(int i) const;

  bool all_finite() const { return data_.allFinite(); }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Index flat_index(std::initializer_list<int> idx) const;

  Shape shape_;
  Eigen::VectorXd data_;
};

/// Stacks equally shaped tensors into a [N, ...] tensor.
Tensor stack(const std::vector<Tensor>& items);

/// Builds a batch tensor from a column-per-sample matrix.
Tensor from_columns(const Eigen::MatrixXd& cols, const Shape& sample_shape);

}  // namespace daqn
