#pragma once

#include <span>
#include <string>
#include <vector>

#include "pdpp/dataset.hpp"
#include "pdpp/embedding_file.hpp"
#include "pdpp/ops.hpp"
#include "pdpp/tensor.hpp"

PDPP_NAMESPACE_BEGIN

/// Records padded to a common length. Row b * max_len + p of `features` is
/// position p of sample b.
struct PaddedBatch {
  std::size_t size = 0;
  std::size_t max_len = 0;
  std::vector<std::string> ids;
  std::vector<std::size_t> tokens;   // size * max_len, pad token beyond each length
  Tensor features;                   // [size * max_len x 1280], zero rows on pads
  std::vector<std::size_t> lengths;  // own length of each record
  std::vector<Mask> masks;           // per sample, max_len entries, 0 on pads
  std::vector<int> labels;

  std::span<const std::size_t> sample_tokens(std::size_t b) const {
    return std::span<const std::size_t>(tokens).subspan(b * max_len, max_len);
  }
};

/// Looks up every record's pretrained embedding and pads the batch to its
/// longest record (or `min_len`, whichever is larger). Window records (with
/// both a site and a protein key) slice their protein's embedding around the
/// site; positions outside the protein
/// get zero rows. Throws AlignmentError naming the id on a missing record or
/// a length mismatch.
PaddedBatch pad_batch(std::span<const SampleRecord> records, const EmbeddingFile& embeddings, std::size_t min_len = 0);

PDPP_NAMESPACE_END
