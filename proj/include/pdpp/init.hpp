#pragma once

#include "pdpp/rng.hpp"
#include "pdpp/tensor.hpp"

PDPP_NAMESPACE_BEGIN

/// Trainable tensor with entries uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
Tensor fan_in_uniform(Shape shape, std::size_t fan_in, Rng& rng);
/// Trainable tensor filled with `value`.
Tensor filled_parameter(Shape shape, Real value);
/// Trainable square identity matrix.
Tensor identity_parameter(std::size_t n);

PDPP_NAMESPACE_END
