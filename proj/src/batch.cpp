#include "pdpp/batch.hpp"

#include <algorithm>

#include "pdpp/errors.hpp"
#include "pdpp/vocabulary.hpp"

PDPP_NAMESPACE_BEGIN

PaddedBatch pad_batch(std::span<const SampleRecord> records, const EmbeddingFile& embeddings, std::size_t min_len) {
  if (records.empty()) throw ContractError("pad_batch: empty batch");
  PaddedBatch b;
  b.size = records.size();
  b.max_len = min_len;
  for (const auto& r : records) b.max_len = std::max(b.max_len, r.tokens.size());

  const std::size_t dim = kEmbeddingDim;
  b.tokens.assign(b.size * b.max_len, kPadToken);
  b.features = Tensor({b.size * b.max_len, dim});
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SampleRecord& r = records[i];
    const std::size_t len = r.tokens.size();
    const EmbeddingRecord* emb = embeddings.find(r.embedding_key());
    if (emb == nullptr) throw AlignmentError("no embedding for '" + r.embedding_key() + "' (record '" + r.id + "')");

    Real* dst = b.features.ptr() + i * b.max_len * dim;
    if (r.site && !r.protein.empty()) {
      // Window centered on the site, cut from the full-protein embedding.
      if (len % 2 == 0) throw AlignmentError("window record '" + r.id + "' has even length");
      const std::ptrdiff_t flank = static_cast<std::ptrdiff_t>(len / 2);
      const std::ptrdiff_t site = static_cast<std::ptrdiff_t>(*r.site);
      if (*r.site >= emb->length) {
        throw AlignmentError("record '" + r.id + "': site " + std::to_string(*r.site) + " beyond protein length " +
                             std::to_string(emb->length));
      }
      for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(len); ++p) {
        const std::ptrdiff_t src = site - flank + p;
        if (src < 0 || src >= static_cast<std::ptrdiff_t>(emb->length)) continue;
        const auto row = emb->row(static_cast<std::size_t>(src));
        std::copy(row.begin(), row.end(), dst + static_cast<std::size_t>(p) * dim);
      }
    } else {
      if (emb->length != len) {
        throw AlignmentError("record '" + r.id + "' has " + std::to_string(len) + " residues but its embedding has " +
                             std::to_string(emb->length) + " rows");
      }
      std::copy(emb->values.begin(), emb->values.end(), dst);
    }
    // Pad symbols inside a record carry no signal either.
    for (std::size_t p = 0; p < len; ++p) {
      if (r.tokens[p] == kPadToken) std::fill_n(dst + p * dim, dim, Real{0});
    }

    std::copy(r.tokens.begin(), r.tokens.end(), b.tokens.begin() + static_cast<std::ptrdiff_t>(i * b.max_len));
    Mask m(b.max_len, 0);
    for (std::size_t p = 0; p < len; ++p) m[p] = r.tokens[p] != kPadToken;
    b.masks.push_back(std::move(m));
    b.lengths.push_back(len);
    b.ids.push_back(r.id);
    b.labels.push_back(r.label);
  }
  return b;
}

PDPP_NAMESPACE_END
