#include "pdpp/tensor.hpp"

#include <algorithm>

#include "pdpp/errors.hpp"

PDPP_NAMESPACE_BEGIN

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

namespace {
void check_shape(const Shape& shape) {
  for (std::size_t d : shape) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_string(shape));
  }
}
}  // namespace

Tensor::Tensor(Shape shape, bool requires_grad) : s_(std::make_shared<detail::TensorStorage>()) {
  check_shape(shape);
  s_->data.assign(shape_numel(shape), Real{0});
  s_->shape = std::move(shape);
  s_->requires_grad = requires_grad;
}

Tensor::Tensor(Shape shape, std::vector<Real> data, bool requires_grad)
    : s_(std::make_shared<detail::TensorStorage>()) {
  check_shape(shape);
  if (shape_numel(shape) != data.size()) {
    throw ShapeError("shape " + shape_string(shape) + " needs " + std::to_string(shape_numel(shape)) +
                     " values, got " + std::to_string(data.size()));
  }
  s_->shape = std::move(shape);
  s_->data = std::move(data);
  s_->requires_grad = requires_grad;
}

Tensor Tensor::scalar(Real value, bool requires_grad) { return Tensor({1}, {value}, requires_grad); }

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<Real>> rows, bool requires_grad) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<Real> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged matrix literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(data), requires_grad);
}

Tensor Tensor::vector(std::initializer_list<Real> values, bool requires_grad) {
  return Tensor({values.size()}, std::vector<Real>(values), requires_grad);
}

std::size_t Tensor::rows() const {
  if (rank() != 2) throw ShapeError("expected a matrix, got " + shape_string(shape()));
  return s_->shape[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw ShapeError("expected a matrix, got " + shape_string(shape()));
  return s_->shape[1];
}

Real Tensor::item() const {
  if (numel() != 1) throw ShapeError("item() on tensor of shape " + shape_string(shape()));
  return s_->data[0];
}

std::span<Real> Tensor::grad() const {
  if (s_->grad.empty()) s_->grad.assign(s_->data.size(), Real{0});
  return s_->grad;
}

void Tensor::zero_grad() { std::fill(s_->grad.begin(), s_->grad.end(), Real{0}); }

Tensor Tensor::clone() const {
  Tensor t;
  t.s_ = std::make_shared<detail::TensorStorage>();
  t.s_->shape = s_->shape;
  t.s_->data = s_->data;
  return t;
}

PDPP_NAMESPACE_END
