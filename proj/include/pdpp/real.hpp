#pragma once

// Scalar type selection. The library is built twice: once with 32-bit reals
// (the production build) and once with PDPP_REAL_F64 defined, which is used by
// the finite-difference gradient suites. Each build lives in its own inline
// namespace so both can be linked into one binary.

#if defined(PDPP_REAL_F64)
#define PDPP_NAMESPACE_BEGIN \
  namespace pdpp {           \
  inline namespace f64 {
#define PDPP_NAMESPACE_END \
  }                        \
  }
#else
#define PDPP_NAMESPACE_BEGIN \
  namespace pdpp {           \
  inline namespace f32 {
#define PDPP_NAMESPACE_END \
  }                        \
  }
#endif

PDPP_NAMESPACE_BEGIN

#if defined(PDPP_REAL_F64)
using Real = double;
#else
using Real = float;
#endif

/// Width of the pretrained per-residue embeddings consumed by the model.
inline constexpr unsigned kPretrainedDim = 1280;

PDPP_NAMESPACE_END
