#include "pdpp/synthetic.hpp"

#include <set>
#include <string_view>

#include "pdpp/errors.hpp"
#include "pdpp/rng.hpp"

namespace pdpp {

namespace {

constexpr std::string_view kCanonical = "ACDEFGHIKLMNPQRSTVWY";

char draw(Rng& rng, std::string_view alphabet) { return alphabet[rng.below(alphabet.size())]; }

std::string without(std::string_view alphabet, std::string_view drop) {
  std::string out;
  for (char c : alphabet) {
    if (drop.find(c) == std::string_view::npos) out += c;
  }
  return out;
}

}  // namespace

bool has_motif(const std::string& window) {
  if (window.size() % 2 == 0) return false;
  const std::size_t c = window.size() / 2;
  if (window[c] != 'K') return false;
  for (std::size_t p = c >= 2 ? c - 2 : 0; p <= c + 2 && p < window.size(); ++p) {
    if (p != c && window[p] == 'L') return true;
  }
  return false;
}

std::vector<SampleRecord> motif_windows(const MotifSpec& spec) {
  if (spec.positives > spec.count) throw ContractError("motif_windows: more positives than windows");
  if (spec.flank < 2) throw ContractError("motif_windows: flank must be at least 2");
  Rng rng(mix64(spec.seed ^ 0x6d6f746966ULL));
  const std::size_t len = 2 * spec.flank + 1, c = spec.flank;
  const std::string no_l = without(kCanonical, "L");
  const std::string no_k = without(kCanonical, "K");

  std::vector<int> labels(spec.count, 0);
  std::fill_n(labels.begin(), spec.positives, 1);
  rng.shuffle(labels);

  std::vector<SampleRecord> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    std::string w(len, 'A');
    for (char& ch : w) ch = draw(rng, kCanonical);
    const std::size_t near[] = {c - 2, c - 1, c + 1, c + 2};
    if (labels[i] == 1) {
      w[c] = 'K';
      w[near[rng.below(4)]] = 'L';
    } else {
      const std::uint64_t kind = rng.below(4);
      if (kind == 0) {
        // Decoy: the anchor without its partner.
        w[c] = 'K';
        for (std::size_t p : near) w[p] = draw(rng, no_l);
      } else if (kind == 1) {
        // Decoy: the partner without the anchor.
        w[c] = draw(rng, no_k);
        w[near[rng.below(4)]] = 'L';
      } else {
        w[c] = draw(rng, no_k);
      }
    }
    if (has_motif(w) != (labels[i] == 1)) throw ContractError("motif_windows: generated window violates its label");
    out.push_back(make_record(spec.id_prefix + std::to_string(i), std::move(w), labels[i]));
  }
  return out;
}

EmbeddingFile fake_embeddings_for(const std::vector<SampleRecord>& records, std::uint64_t seed) {
  EmbeddingFile file;
  std::set<std::string> done;
  for (const SampleRecord& r : records) {
    const std::string& key = r.embedding_key();
    if (!done.insert(key).second) continue;
    if (r.site && !r.protein.empty()) {
      throw DataError("record '" + r.id + "' is a window; fake embeddings need the full protein sequence");
    }
    file.add(fake_embedding(key, r.tokens.size(), seed));
  }
  return file;
}

}  // namespace pdpp
