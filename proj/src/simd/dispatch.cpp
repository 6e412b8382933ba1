#include <array>
#include <cstdlib>
#include <vector>

#include "kernels_internal.hpp"

namespace pdpp::simd {

namespace {

const KernelSet kScalar{"scalar", detail::dot_scalar, detail::axpy_scalar, detail::add_scalar,
                        detail::relu_scalar};

std::vector<const KernelSet*> probe() {
  std::vector<const KernelSet*> out{&kScalar};
  if (const KernelSet* k = detail::avx2_kernels()) out.push_back(k);
  if (const KernelSet* k = detail::neon_kernels()) out.push_back(k);
  return out;
}

const std::vector<const KernelSet*>& registry() {
  static const std::vector<const KernelSet*> r = probe();
  return r;
}

const KernelSet* find(std::string_view name) {
  for (const KernelSet* k : registry()) {
    if (k->name == name) return k;
  }
  return nullptr;
}

const KernelSet* initial_selection() {
  if (const char* env = std::getenv("PDPP_SIMD")) {
    std::string_view want(env);
    if (want != "auto") {
      if (const KernelSet* k = find(want)) return k;
    }
  }
  return registry().back();  // widest available
}

const KernelSet*& current() {
  static const KernelSet* k = initial_selection();
  return k;
}

}  // namespace

const KernelSet& scalar_kernels() { return kScalar; }

std::span<const KernelSet* const> available_kernels() { return registry(); }

const KernelSet& active_kernels() { return *current(); }

bool select_kernels(std::string_view name) {
  const KernelSet* k = name == "auto" ? registry().back() : find(name);
  if (k == nullptr) return false;
  current() = k;
  return true;
}

}  // namespace pdpp::simd
