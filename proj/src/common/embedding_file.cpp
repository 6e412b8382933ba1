#include "pdpp/embedding_file.hpp"

#include "pdpp/bytes.hpp"
#include "pdpp/errors.hpp"
#include "pdpp/rng.hpp"

namespace pdpp {

void EmbeddingFile::add(EmbeddingRecord record) {
  if (record.values.size() != static_cast<std::size_t>(record.length) * record.dim) {
    throw DataError("embedding record '" + record.id + "' has " + std::to_string(record.values.size()) +
                    " values for shape " + std::to_string(record.length) + "x" + std::to_string(record.dim));
  }
  if (record.id.size() > 0xFFFF) throw DataError("embedding id longer than 65535 bytes");
  if (index_.contains(record.id)) throw DataError("duplicate embedding id '" + record.id + "'");
  index_.emplace(record.id, records_.size());
  records_.push_back(std::move(record));
}

const EmbeddingRecord* EmbeddingFile::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &records_[it->second];
}

std::uint32_t payload_checksum(const EmbeddingFile& file) {
  std::uint32_t sum = 0;
  for (const auto& r : file.records()) {
    for (float v : r.values) {
      const std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
      sum += (bits & 0xFF) + ((bits >> 8) & 0xFF) + ((bits >> 16) & 0xFF) + (bits >> 24);
    }
  }
  return sum;
}

std::vector<std::uint8_t> encode_embeddings(const EmbeddingFile& file) {
  ByteWriter w;
  w.raw(kEmbeddingMagic);
  w.u16(kEmbeddingVersion);
  w.u32(static_cast<std::uint32_t>(file.size()));
  for (const auto& r : file.records()) {
    w.u16(static_cast<std::uint16_t>(r.id.size()));
    w.raw(r.id);
    w.u32(r.length);
    w.u32(r.dim);
    for (float v : r.values) w.f32(v);
  }
  w.u32(payload_checksum(file));
  return std::move(w.bytes());
}

EmbeddingFile decode_embeddings(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.raw(kEmbeddingMagic.size()) != kEmbeddingMagic) throw DataError("not a PDPPEMB1 file (bad magic)");
  const std::uint16_t version = r.u16();
  if (version != kEmbeddingVersion) throw DataError("unsupported embedding format version " + std::to_string(version));
  const std::uint32_t count = r.u32();
  EmbeddingFile file;
  for (std::uint32_t i = 0; i < count; ++i) {
    EmbeddingRecord rec;
    rec.id = r.raw(r.u16());
    rec.length = r.u32();
    rec.dim = r.u32();
    if (rec.dim != kEmbeddingDim) {
      throw DataError("record '" + rec.id + "' has dimension " + std::to_string(rec.dim) + ", expected " +
                      std::to_string(kEmbeddingDim));
    }
    const std::size_t n = static_cast<std::size_t>(rec.length) * rec.dim;
    if (r.remaining() < n * 4) throw DataError("truncated payload for record '" + rec.id + "'");
    rec.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) rec.values[j] = r.f32();
    file.add(std::move(rec));
  }
  const std::uint32_t stored = r.u32();
  if (r.remaining() != 0) throw DataError("trailing bytes after embedding checksum");
  const std::uint32_t actual = payload_checksum(file);
  if (stored != actual) {
    throw DataError("embedding checksum mismatch: stored " + std::to_string(stored) + ", computed " + std::to_string(actual));
  }
  return file;
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingFile& file) {
  write_file_atomic(path, encode_embeddings(file));
}

EmbeddingFile read_embeddings(const std::filesystem::path& path) {
  try {
    return decode_embeddings(read_file_bytes(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

EmbeddingRecord fake_embedding(std::string id, std::size_t length, std::uint64_t seed) {
  EmbeddingRecord rec;
  rec.length = static_cast<std::uint32_t>(length);
  rec.dim = kEmbeddingDim;
  rec.values.resize(length * kEmbeddingDim);
  const std::uint64_t key = mix64(seed ^ hash_bytes(id));
  for (std::size_t p = 0; p < length; ++p) {
    std::uint64_t state = mix64(key + p);
    for (std::size_t d = 0; d < kEmbeddingDim; ++d) {
      state = mix64(state);
      // 24 random bits scaled onto [-1, 1]
      const double u = static_cast<double>(state >> 40) / static_cast<double>((1u << 24) - 1);
      rec.values[p * kEmbeddingDim + d] = static_cast<float>(2.0 * u - 1.0);
    }
  }
  rec.id = std::move(id);
  return rec;
}

}  // namespace pdpp
