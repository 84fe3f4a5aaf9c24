#include "daqn/nnkit/tensor.hpp"

#include <sstream>

namespace daqn {

Index shape_size(const Shape& shape) {
  Index n = 1;
  for (int d : shape) {
    if (d <= 0) throw ShapeError("non-positive dimension in shape " + to_string(shape));
    n *= d;
  }
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? ", " : "") << shape[i];
  os << ']';
  return os.str();
}

Shape batched(const Shape& sample_shape, int batch) {
  Shape s;
  s.reserve(sample_shape.size() + 1);
  s.push_back(batch);
  s.insert(s.end(), sample_shape.begin(), sample_shape.end());
  return s;
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(Eigen::VectorXd::Constant(shape_size(shape_), fill)) {}

Tensor::Tensor(Shape shape, Eigen::VectorXd data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_size(shape_) != data_.size())
    throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match shape " +
                     to_string(shape_));
}

Tensor::Tensor(Shape shape, std::initializer_list<double> values) : shape_(std::move(shape)) {
  if (shape_size(shape_) != static_cast<Index>(values.size()))
    throw ShapeError("initializer length does not match shape " + to_string(shape_));
  data_.resize(static_cast<Index>(values.size()));
  Index i = 0;
  for (double v : values) data_[i++] = v;
}

Index Tensor::flat_index(std::initializer_list<int> idx) const {
  if (static_cast<int>(idx.size()) != rank()) throw ShapeError("index rank mismatch for " + to_string(shape_));
  Index flat = 0;
  int axis = 0;
  for (int i : idx) {
    if (i < 0 || i >= shape_[axis]) throw std::out_of_range("tensor index out of range");
    flat = flat * shape_[axis] + i;
    ++axis;
  }
  return flat;
}

double& Tensor::at(std::initializer_list<int> idx) { return data_[flat_index(idx)]; }
double Tensor::at(std::initializer_list<int> idx) const { return data_[flat_index(idx)]; }

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != size())
    throw ShapeError("cannot reshape " + to_string(shape_) + " to " + to_string(shape));
  return Tensor(std::move(shape), data_);
}

Eigen::Map<Eigen::MatrixXd> Tensor::columns() {
  if (shape_.empty()) throw ShapeError("columns() on a rank-0 tensor");
  const Index n = shape_[0];
  return {data_.data(), size() / n, n};
}

Eigen::Map<const Eigen::MatrixXd> Tensor::columns() const {
  if (shape_.empty()) throw ShapeError("columns() on a rank-0 tensor");
  const Index n = shape_[0];
  return {data_.data(), size() / n, n};
}

Tensor Tensor::slice(int i) const {
  if (shape_.empty() || i < 0 || i >= shape_[0]) throw std::out_of_range("slice index out of range");
  Shape rest(shape_.begin() + 1, shape_.end());
  if (rest.empty()) rest = {1};
  const Index len = size() / shape_[0];
  return Tensor(rest, Eigen::VectorXd(data_.segment(i * len, len)));
}

Tensor stack(const std::vector<Tensor>& items) {
  if (items.empty()) throw ShapeError("cannot stack zero tensors");
  const Shape& s = items.front().shape();
  Tensor out(batched(s, static_cast<int>(items.size())));
  auto cols = out.columns();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].shape() != s)
      throw ShapeError("stack: item " + std::to_string(i) + " has shape " + to_string(items[i].shape()) +
                       ", expected " + to_string(s));
    cols.col(static_cast<Index>(i)) = items[i].data();
  }
  return out;
}

Tensor from_columns(const Eigen::MatrixXd& cols, const Shape& sample_shape) {
  if (shape_size(sample_shape) != cols.rows())
    throw ShapeError("from_columns: rows " + std::to_string(cols.rows()) + " do not match " +
                     to_string(sample_shape));
  Tensor out(batched(sample_shape, static_cast<int>(cols.cols())));
  out.columns() = cols;
  return out;
}

}  // namespace daqn
