#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdpp/loss.hpp"
#include "pdpp/model.hpp"

PDPP_NAMESPACE_BEGIN

struct OptimizerConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t batch_size = 32;
  std::size_t epochs = 100;
  std::size_t patience = 0;  // epochs without validation gain before stopping; 0 disables
};

struct RunConfig {
  ModelConfig model;
  LossConfig loss;
  OptimizerConfig optim;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  std::size_t flank = 16;

  void validate() const;
};

inline constexpr std::string_view kAblationNames[] = {"no_base_embedding", "no_translinear",  "no_poscnn",
                                                      "no_pre_attention",  "no_pos_encoding", "plain_ce"};

/// The config key each ablation sets. Throws ConfigError for unknown names.
std::string_view ablation_field(std::string_view name);
void apply_ablation(RunConfig& cfg, std::string_view name);

/// Every setting as a dotted key, in a fixed order.
std::vector<std::pair<std::string, std::string>> to_key_values(const RunConfig& cfg);
/// `key = value` lines in the order of to_key_values.
std::string to_text(const RunConfig& cfg);
/// Overrides the given keys; unknown keys and unparsable values throw ConfigError.
void apply_key_values(RunConfig& cfg, const std::map<std::string, std::string>& kv);
/// Defaults overridden by a key/value document.
RunConfig parse_config(std::string_view text);

/// Keys whose values differ between two configs.
std::vector<std::string> changed_fields(const RunConfig& a, const RunConfig& b);

PDPP_NAMESPACE_END
