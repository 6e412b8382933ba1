#include "pdpp/config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <system_error>
#include <type_traits>

#include "pdpp/errors.hpp"
#include "pdpp/key_values.hpp"

PDPP_NAMESPACE_BEGIN

namespace {

template <class T>
std::string format_number(T v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
std::string format_value(T v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else {
    return format_number(v);
  }
}

[[noreturn]] void bad_value(const std::string& key, const std::string& text, const char* what) {
  throw ConfigError("config key '" + key + "': cannot parse '" + text + "' as " + what);
}

void parse_value(const std::string& key, const std::string& text, bool& out) {
  if (text == "true" || text == "1") {
    out = true;
  } else if (text == "false" || text == "0") {
    out = false;
  } else {
    bad_value(key, text, "a boolean");
  }
}

template <class T>
void parse_value(const std::string& key, const std::string& text, T& out) {
  T v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    bad_value(key, text, std::is_integral_v<T> ? "a non-negative integer" : "a number");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) bad_value(key, text, "a finite number");
  }
  out = v;
}

// Calls f(key, field) for every setting, in canonical order.
template <class Cfg, class F>
void visit_fields(Cfg& c, F&& f) {
  f("translinear.d_model", c.model.translinear.d_model);
  f("translinear.n_heads", c.model.translinear.n_heads);
  f("translinear.n_layers", c.model.translinear.n_layers);
  f("translinear.d_ff", c.model.translinear.d_ff);
  f("translinear.use_pre_attention", c.model.translinear.use_pre_attention);
  f("poscnn.kernel", c.model.poscnn.kernel);
  f("poscnn.channels", c.model.poscnn.channels);
  f("poscnn.pool_len", c.model.poscnn.pool_len);
  f("poscnn.use_positional_encoding", c.model.poscnn.use_positional_encoding);
  f("head.conv_channels", c.model.head.conv_channels);
  f("head.conv_kernel", c.model.head.conv_kernel);
  f("head.pooled_len", c.model.head.pooled_len);
  f("head.n_classes", c.model.head.n_classes);
  f("fusion.alpha", c.model.fusion.alpha);
  f("model.use_translinear", c.model.use_translinear);
  f("model.use_poscnn", c.model.use_poscnn);
  f("model.max_len", c.model.max_len);
  f("loss.lambda", c.loss.lambda);
  f("loss.beta", c.loss.beta);
  f("loss.n_classes", c.loss.n_classes);
  f("loss.plain_ce", c.loss.plain_ce);
  f("optim.lr", c.optim.lr);
  f("optim.beta1", c.optim.beta1);
  f("optim.beta2", c.optim.beta2);
  f("optim.eps", c.optim.eps);
  f("optim.batch_size", c.optim.batch_size);
  f("optim.epochs", c.optim.epochs);
  f("optim.patience", c.optim.patience);
  f("data.flank", c.flank);
  f("eval.threshold", c.threshold);
  f("seed", c.seed);
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  loss.validate();
  if (loss.n_classes != model.head.n_classes) throw ConfigError("loss.n_classes must equal head.n_classes");
  if (!(optim.lr > 0.0)) throw ConfigError("optim.lr must be positive");
  if (!(optim.beta1 >= 0.0 && optim.beta1 < 1.0) || !(optim.beta2 >= 0.0 && optim.beta2 < 1.0)) {
    throw ConfigError("optim.beta1 and optim.beta2 must lie in [0, 1)");
  }
  if (!(optim.eps > 0.0)) throw ConfigError("optim.eps must be positive");
  if (optim.batch_size == 0) throw ConfigError("optim.batch_size must be positive");
  if (optim.epochs == 0) throw ConfigError("optim.epochs must be positive");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("eval.threshold must lie in [0, 1]");
  if (flank == 0) throw ConfigError("data.flank must be positive");
}

std::string_view ablation_field(std::string_view name) {
  if (name == "no_base_embedding") return "fusion.alpha";
  if (name == "no_translinear") return "model.use_translinear";
  if (name == "no_poscnn") return "model.use_poscnn";
  if (name == "no_pre_attention") return "translinear.use_pre_attention";
  if (name == "no_pos_encoding") return "poscnn.use_positional_encoding";
  if (name == "plain_ce") return "loss.plain_ce";
  throw ConfigError("unknown ablation '" + std::string(name) + "'");
}

void apply_ablation(RunConfig& cfg, std::string_view name) {
  const std::string_view field = ablation_field(name);
  if (field == "fusion.alpha") {
    cfg.model.fusion.alpha = Real{1};
  } else {
    apply_key_values(cfg, {{std::string(field), name == "plain_ce" ? "true" : "false"}});
  }
}

std::vector<std::pair<std::string, std::string>> to_key_values(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  visit_fields(cfg, [&](const char* key, const auto& v) { out.emplace_back(key, format_value(v)); });
  return out;
}

std::string to_text(const RunConfig& cfg) {
  std::string s;
  for (const auto& [k, v] : to_key_values(cfg)) s += k + " = " + v + "\n";
  return s;
}

void apply_key_values(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
  std::set<std::string> seen;
  visit_fields(cfg, [&](const char* key, auto& field) {
    const auto it = kv.find(key);
    if (it == kv.end()) return;
    parse_value(it->first, it->second, field);
    seen.insert(it->first);
  });
  for (const auto& [k, v] : kv) {
    if (!seen.contains(k)) throw ConfigError("unknown config key '" + k + "'");
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  apply_key_values(cfg, parse_key_values(text));
  return cfg;
}

std::vector<std::string> changed_fields(const RunConfig& a, const RunConfig& b) {
  const auto ka = to_key_values(a), kb = to_key_values(b);
  std::vector<std::string> diff;
  for (std::size_t i = 0; i < ka.size(); ++i) {
    if (ka[i].second != kb[i].second) diff.push_back(ka[i].first);
  }
  return diff;
}

PDPP_NAMESPACE_END
