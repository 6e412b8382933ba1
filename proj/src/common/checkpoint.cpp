#include "pdpp/checkpoint.hpp"

#include "pdpp/bytes.hpp"
#include "pdpp/errors.hpp"

namespace pdpp {

namespace {

std::size_t element_count(const std::vector<std::uint32_t>& shape) {
  std::size_t n = 1;
  for (std::uint32_t d : shape) n *= d;
  return n;
}

void check_congruent(const Checkpoint& c) {
  for (const NamedArray& p : c.parameters) {
    if (p.name.size() > 0xFFFF) throw DataError("parameter name longer than 65535 bytes");
    if (p.shape.empty() || p.shape.size() > 0xFF) throw DataError("parameter '" + p.name + "' has an unsupported rank");
    if (element_count(p.shape) != p.values.size()) throw DataError("parameter '" + p.name + "' does not match its shape");
  }
  const bool has = !c.first_moments.empty() || !c.second_moments.empty();
  if (!has) return;
  if (c.first_moments.size() != c.parameters.size() || c.second_moments.size() != c.parameters.size()) {
    throw DataError("optimizer moments do not match the parameter list");
  }
  for (std::size_t i = 0; i < c.parameters.size(); ++i) {
    if (c.first_moments[i].size() != c.parameters[i].values.size() ||
        c.second_moments[i].size() != c.parameters[i].values.size()) {
      throw DataError("optimizer moments for '" + c.parameters[i].name + "' do not match the parameter");
    }
  }
}

void write_floats(ByteWriter& w, const std::vector<float>& v) {
  for (float x : v) w.f32(x);
}

std::vector<float> read_floats(ByteReader& r, std::size_t n) {
  if (r.remaining() / 4 < n) throw DataError("truncated checkpoint payload");
  std::vector<float> v(n);
  for (float& x : v) x = r.f32();
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& c) {
  check_congruent(c);
  ByteWriter w;
  w.raw(kCheckpointMagic);
  w.u16(kCheckpointVersion);
  w.str32(c.config_text);
  w.u64(c.epoch);
  w.str32(c.rng_state);
  w.u32(static_cast<std::uint32_t>(c.parameters.size()));
  for (const NamedArray& p : c.parameters) {
    w.u16(static_cast<std::uint16_t>(p.name.size()));
    w.raw(p.name);
    w.u8(static_cast<std::uint8_t>(p.shape.size()));
    for (std::uint32_t d : p.shape) w.u32(d);
    write_floats(w, p.values);
  }
  w.u64(c.optimizer_step);
  const bool has = !c.first_moments.empty();
  w.u8(has ? 1 : 0);
  if (has) {
    for (std::size_t i = 0; i < c.parameters.size(); ++i) {
      write_floats(w, c.first_moments[i]);
      write_floats(w, c.second_moments[i]);
    }
  }
  return std::move(w.bytes());
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < kCheckpointMagic.size() || r.raw(kCheckpointMagic.size()) != kCheckpointMagic) {
    throw DataError("not a PDPPCKPT checkpoint (bad magic)");
  }
  const std::uint16_t version = r.u16();
  if (version != kCheckpointVersion) throw DataError("unsupported checkpoint version " + std::to_string(version));
  Checkpoint c;
  c.config_text = r.str32();
  c.epoch = r.u64();
  c.rng_state = r.str32();
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedArray p;
    p.name = r.raw(r.u16());
    const std::uint8_t rank = r.u8();
    if (rank == 0) throw DataError("parameter '" + p.name + "' has rank 0");
    for (std::uint8_t k = 0; k < rank; ++k) p.shape.push_back(r.u32());
    p.values = read_floats(r, element_count(p.shape));
    c.parameters.push_back(std::move(p));
  }
  c.optimizer_step = r.u64();
  const std::uint8_t has = r.u8();
  if (has > 1) throw DataError("corrupt optimizer flag in checkpoint");
  if (has == 1) {
    for (const NamedArray& p : c.parameters) {
      c.first_moments.push_back(read_floats(r, p.values.size()));
      c.second_moments.push_back(read_floats(r, p.values.size()));
    }
  }
  if (r.remaining() != 0) throw DataError("trailing bytes after checkpoint");
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  write_file_atomic(path, encode_checkpoint(c));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  try {
    return decode_checkpoint(read_file_bytes(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace pdpp
