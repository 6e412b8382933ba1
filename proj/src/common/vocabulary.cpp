#include "pdpp/vocabulary.hpp"

#include <array>

#include "pdpp/errors.hpp"

namespace pdpp {

namespace {
constexpr std::array<unsigned char, 256> build_lookup() {
  std::array<unsigned char, 256> t{};
  for (auto& v : t) v = static_cast<unsigned char>(kUnknownToken);
  for (std::size_t i = 0; i < kVocabulary.size(); ++i) {
    t[static_cast<unsigned char>(kVocabulary[i])] = static_cast<unsigned char>(i);
  }
  return t;
}
constexpr auto kLookup = build_lookup();
}  // namespace

std::size_t token_index(char symbol) noexcept { return kLookup[static_cast<unsigned char>(symbol)]; }

std::vector<std::size_t> tokenize(std::string_view sequence) {
  if (sequence.empty()) throw ContractError("tokenize: empty sequence");
  std::vector<std::size_t> out;
  out.reserve(sequence.size());
  for (char c : sequence) out.push_back(token_index(c));
  return out;
}

std::string detokenize(std::span<const std::size_t> tokens) {
  std::string out;
  out.reserve(tokens.size());
  for (std::size_t t : tokens) {
    if (t >= kVocabularySize) throw ContractError("detokenize: token " + std::to_string(t) + " out of range");
    out.push_back(kVocabulary[t]);
  }
  return out;
}

}  // namespace pdpp
