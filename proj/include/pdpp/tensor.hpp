#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pdpp/real.hpp"

PDPP_NAMESPACE_BEGIN

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {
struct TensorStorage {
  Shape shape;
  std::vector<Real> data;
  std::vector<Real> grad;  // empty until first accumulation
  bool requires_grad = false;
};
}  // namespace detail

/// Dense row-major array of reals with an optional gradient slot.
///
/// A Tensor is a shared handle: copies alias the same storage, which is how
/// the tape refers back to values it must differentiate through. The shape is
/// fixed at construction; reshaping produces a new tensor.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, bool requires_grad = false);
  Tensor(Shape shape, std::vector<Real> data, bool requires_grad = false);

  static Tensor scalar(Real value, bool requires_grad = false);
  static Tensor matrix(std::initializer_list<std::initializer_list<Real>> rows, bool requires_grad = false);
  static Tensor vector(std::initializer_list<Real> values, bool requires_grad = false);

  bool defined() const noexcept { return static_cast<bool>(s_); }
  const Shape& shape() const { return s_->shape; }
  std::size_t rank() const { return s_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return s_->shape.at(axis); }
  std::size_t numel() const { return s_->data.size(); }
  /// Leading extent of a 2-D tensor.
  std::size_t rows() const;
  /// Trailing extent of a 2-D tensor.
  std::size_t cols() const;

  std::span<Real> data() { return s_->data; }
  std::span<const Real> data() const { return s_->data; }
  Real* ptr() { return s_->data.data(); }
  const Real* ptr() const { return s_->data.data(); }
  Real& operator[](std::size_t i) { return s_->data[i]; }
  Real operator[](std::size_t i) const { return s_->data[i]; }
  Real& at(std::size_t r, std::size_t c) { return s_->data[r * cols() + c]; }
  Real at(std::size_t r, std::size_t c) const { return s_->data[r * cols() + c]; }
  /// Value of a one-element tensor.
  Real item() const;

  bool requires_grad() const { return s_->requires_grad; }
  void set_requires_grad(bool on) { s_->requires_grad = on; }

  bool has_grad() const { return !s_->grad.empty(); }
  /// Gradient accumulator; allocated (zero-filled) on first access. Like the
  /// storage it belongs to, it is shared by every handle, const or not.
  std::span<Real> grad() const;
  void zero_grad();

  /// Deep copy with no gradient and no tape history.
  Tensor clone() const;
  /// Storage identity; two handles are the same tensor iff ids match.
  const void* id() const noexcept { return s_.get(); }

 private:
  std::shared_ptr<detail::TensorStorage> s_;
};

PDPP_NAMESPACE_END
