#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pdpp {

// PDPPEMB1 container of precomputed per-residue embeddings.
//
// Layout (all integers little-endian):
//   "PDPPEMB1"                      8 bytes
//   format version                  u16 (1)
//   record count                    u32
//   per record:
//     id length                     u16
//     id                            UTF-8 bytes
//     sequence length L             u32
//     dimension D                   u32 (1280)
//     L*D IEEE-754 binary32 values, position-major
//   checksum                        u32
//
// The checksum is the sum, modulo 2^32, of every byte of every record's value
// payload (the L*D binary32 arrays).

inline constexpr std::string_view kEmbeddingMagic = "PDPPEMB1";
inline constexpr std::uint16_t kEmbeddingVersion = 1;
inline constexpr std::uint32_t kEmbeddingDim = 1280;

struct EmbeddingRecord {
  std::string id;
  std::uint32_t length = 0;
  std::uint32_t dim = kEmbeddingDim;
  std::vector<float> values;  // length * dim, position-major

  std::span<const float> row(std::size_t position) const {
    return std::span<const float>(values).subspan(position * dim, dim);
  }
};

class EmbeddingFile {
 public:
  /// Throws DataError on a duplicate id or a payload/shape mismatch.
  void add(EmbeddingRecord record);
  const EmbeddingRecord* find(std::string_view id) const;
  const std::vector<EmbeddingRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<EmbeddingRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::uint32_t payload_checksum(const EmbeddingFile& file);

std::vector<std::uint8_t> encode_embeddings(const EmbeddingFile& file);
/// Throws DataError on bad magic, unsupported version, dimension other than
/// 1280, truncation, trailing bytes, duplicate ids or checksum mismatch.
EmbeddingFile decode_embeddings(std::span<const std::uint8_t> bytes);

void write_embeddings(const std::filesystem::path& path, const EmbeddingFile& file);
EmbeddingFile read_embeddings(const std::filesystem::path& path);

/// Deterministic stand-in for pretrained embeddings: values in [-1, 1]
/// drawn from a stream keyed by (seed, id, position).
EmbeddingRecord fake_embedding(std::string id, std::size_t length, std::uint64_t seed);

}  // namespace pdpp
