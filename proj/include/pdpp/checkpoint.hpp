#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pdpp {

inline constexpr std::string_view kCheckpointMagic = "PDPPCKPT";
inline constexpr std::uint16_t kCheckpointVersion = 1;

struct NamedArray {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::vector<float> values;

  bool operator==(const NamedArray&) const = default;
};

/// Training state. Layout (little-endian):
///   "PDPPCKPT" | u16 version | u32 n + config text | u64 epoch
///   | u32 n + generator state text | u32 parameter count
///   | per parameter: u16 n + name, u8 rank, u32 dims, f32 values
///   | u64 optimizer step | u8 has moments
///   | if so, per parameter: f32 first moments, then f32 second moments
struct Checkpoint {
  std::string config_text;
  std::uint64_t epoch = 0;
  std::string rng_state;
  std::vector<NamedArray> parameters;
  std::uint64_t optimizer_step = 0;
  // Empty, or congruent with `parameters`.
  std::vector<std::vector<float>> first_moments;
  std::vector<std::vector<float>> second_moments;

  bool operator==(const Checkpoint&) const = default;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& c);
/// Throws DataError on a wrong magic or version, truncation, inconsistent
/// shapes or trailing bytes.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

/// Atomic write (temporary file, then rename).
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pdpp
