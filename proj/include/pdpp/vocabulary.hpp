#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pdpp {

// The 20 canonical amino acids in alphabetical one-letter order, then the
// unknown residue 'X', then the pad symbol '-'.
inline constexpr std::string_view kVocabulary = "ACDEFGHIKLMNPQRSTVWYX-";
inline constexpr std::size_t kVocabularySize = 22;
inline constexpr std::size_t kUnknownToken = 20;
inline constexpr std::size_t kPadToken = 21;
inline constexpr char kPadSymbol = '-';

/// Index of a residue symbol; anything outside the canonicals and '-' maps to 'X'.
std::size_t token_index(char symbol) noexcept;

/// One index per character. Throws ContractError on an empty string.
std::vector<std::size_t> tokenize(std::string_view sequence);

std::string detokenize(std::span<const std::size_t> tokens);

}  // namespace pdpp
