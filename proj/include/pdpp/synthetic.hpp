#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdpp/dataset.hpp"
#include "pdpp/embedding_file.hpp"

namespace pdpp {

/// Rule-labeled windows: positive iff the center residue is 'K' and an 'L'
/// sits within two positions of it. Half of the negatives are decoys that
/// carry exactly one of the two motif parts.
struct MotifSpec {
  std::size_t count = 400;
  std::size_t positives = 200;
  std::size_t flank = 16;
  std::uint64_t seed = 1;
  std::string id_prefix = "w";
};

std::vector<SampleRecord> motif_windows(const MotifSpec& spec);

/// True iff `window` satisfies the motif rule around its center.
bool has_motif(const std::string& window);

/// A fake embedding for every distinct embedding key among the records.
EmbeddingFile fake_embeddings_for(const std::vector<SampleRecord>& records, std::uint64_t seed);

}  // namespace pdpp
