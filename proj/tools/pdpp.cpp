// Command-line front end: prepare, train, evaluate, predict, export-report,
// plus fake-embed and synth-motif for running without a protein model.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pdpp/bytes.hpp"
#include "pdpp/checkpoint.hpp"
#include "pdpp/config.hpp"
#include "pdpp/dataset.hpp"
#include "pdpp/embedding_file.hpp"
#include "pdpp/errors.hpp"
#include "pdpp/key_values.hpp"
#include "pdpp/metrics.hpp"
#include "pdpp/synthetic.hpp"
#include "pdpp/trainer.hpp"

namespace fs = std::filesystem;
using namespace pdpp;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

// Settings shared by the commands that build or read a RunConfig.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> keys;  // --dotted.key VALUE
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha, lambda, beta, threshold;
  std::vector<std::string> ablations;
};

void add_config_flags(CLI::App& cmd, ConfigFlags& f) {
  cmd.add_option("--config", f.config_path, "key = value configuration file");
  cmd.add_option("--seed", f.seed, "random seed");
  cmd.add_option("--alpha", f.alpha, "pretrained-embedding weight in [0, 1]");
  cmd.add_option("--lambda", f.lambda, "cross-entropy weight");
  cmd.add_option("--beta", f.beta, "conditional-entropy weight");
  cmd.add_option("--threshold", f.threshold, "decision threshold");
  cmd.add_option("--ablation", f.ablations, "comma-separated ablations")->delimiter(',');
  for (const auto& [key, value] : to_key_values(RunConfig{})) {
    if (key == "seed") continue;
    cmd.add_option_function<std::string>(
           "--" + key, [&f, key = key](const std::string& v) { f.keys[key] = v; }, "default " + value)
        ->group("Config keys");
  }
}

// Defaults, then the config file, then dotted-key flags, then the named
// shortcuts, then ablations.
RunConfig build_config(const ConfigFlags& f) {
  RunConfig cfg;
  if (!f.config_path.empty()) apply_key_values(cfg, parse_key_values(read_text_file(f.config_path)));
  apply_key_values(cfg, f.keys);
  if (f.seed) cfg.seed = *f.seed;
  if (f.alpha) cfg.model.fusion.alpha = static_cast<Real>(*f.alpha);
  if (f.lambda) cfg.loss.lambda = static_cast<Real>(*f.lambda);
  if (f.beta) cfg.loss.beta = static_cast<Real>(*f.beta);
  if (f.threshold) cfg.threshold = *f.threshold;
  for (const std::string& a : f.ablations) apply_ablation(cfg, a);
  cfg.validate();
  return cfg;
}

// Full-protein site records become windows; everything else is unchanged.
std::vector<SampleRecord> load_records(const fs::path& path, Labels labels, std::size_t flank) {
  std::vector<SampleRecord> records = read_dataset(path, labels);
  bool raw_sites = false;
  for (const SampleRecord& r : records) raw_sites = raw_sites || (r.site && r.protein.empty());
  return raw_sites ? to_windows(records, WindowSpec{flank}) : records;
}

void write_text(const fs::path& path, const std::string& text) {
  const std::vector<std::uint8_t> bytes(text.begin(), text.end());
  write_file_atomic(path, bytes);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::string format_counts(const ClassCounts& c) {
  return std::to_string(c.negatives) + " negative, " + std::to_string(c.positives) + " positive";
}

// ---- prepare ---------------------------------------------------------------

struct PrepareArgs {
  std::string input, out;
  std::uint64_t seed = 0;
  std::size_t flank = 16;
  double test_frac = 0.2, val_frac = 0.1;
};

int run_prepare(const PrepareArgs& a) {
  const std::vector<SampleRecord> raw = read_dataset(a.input);
  const std::vector<SampleRecord> records = to_windows(raw, WindowSpec{a.flank});
  SplitPlan plan;
  plan.seed = a.seed;
  plan.test_frac = a.test_frac;
  plan.train_frac = 1.0 - a.test_frac;
  plan.val_frac_of_train = a.val_frac;
  const Split s = split(records, plan);

  const fs::path out(a.out);
  ensure_dir(out);
  write_dataset(out / "train.csv", s.train);
  write_dataset(out / "val.csv", s.val);
  write_dataset(out / "test.csv", s.test);

  std::ostringstream m;
  m << "input = " << fs::path(a.input).filename().string() << "\n";
  m << "seed = " << a.seed << "\n";
  m << "train_frac = " << plan.train_frac << "\n";
  m << "test_frac = " << plan.test_frac << "\n";
  m << "val_frac_of_train = " << plan.val_frac_of_train << "\n";
  m << "flank = " << a.flank << "\n";
  const std::pair<const char*, const std::vector<SampleRecord>*> parts[] = {
      {"all", &records}, {"train", &s.train}, {"val", &s.val}, {"test", &s.test}};
  for (const auto& [name, part] : parts) {
    const ClassCounts c = count_classes(*part);
    m << name << ".negatives = " << c.negatives << "\n" << name << ".positives = " << c.positives << "\n";
  }
  for (const std::string& w : s.warnings) {
    m << "# warning: " << w << "\n";
    std::cerr << "warning: " << w << "\n";
  }
  write_text(out / "manifest.txt", m.str());
  std::cout << "train: " << format_counts(count_classes(s.train)) << "\n"
            << "val:   " << format_counts(count_classes(s.val)) << "\n"
            << "test:  " << format_counts(count_classes(s.test)) << "\n";
  return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  ConfigFlags cfg;
  std::string data, train, val, embeddings, out;
};

int run_train(const TrainArgs& a) {
  const RunConfig cfg = build_config(a.cfg);
  const fs::path train_path = a.train.empty() ? fs::path(a.data) / "train.csv" : fs::path(a.train);
  const fs::path val_path = a.val.empty() ? (a.data.empty() ? fs::path() : fs::path(a.data) / "val.csv") : fs::path(a.val);
  if (train_path.empty()) throw ConfigError("train needs --data DIR or --train FILE");
  const auto train_set = load_records(train_path, Labels::kRequired, cfg.flank);
  const auto val_set = val_path.empty() ? std::vector<SampleRecord>{} : load_records(val_path, Labels::kRequired, cfg.flank);
  const EmbeddingFile embeddings = read_embeddings(a.embeddings);

  const fs::path out(a.out);
  ensure_dir(out);
  write_text(out / "config.txt", to_text(cfg));
  std::string log = std::string(kEpochLogHeader) + "\n";
  std::cout << kEpochLogHeader << std::endl;
  const TrainResult result = train(cfg, train_set, val_set, embeddings, [&](const EpochLog& e) {
    log += e.format() + "\n";
    std::cout << e.format() << std::endl;
  });
  write_text(out / "epochs.tsv", log);
  save_checkpoint(out / "best.ckpt", result.best);
  save_checkpoint(out / "last.ckpt", result.last);
  std::cout << "best epoch " << result.best_epoch << " -> " << (out / "best.ckpt").string() << "\n";
  return 0;
}

// ---- evaluate / export-report ------------------------------------------------

void write_reports(const fs::path& out, const metrics::ScoredPredictions& s, double threshold) {
  ensure_dir(out);
  const metrics::MetricReport report = metrics::evaluate(s, threshold);
  const std::string text = metrics::format_report(report);
  write_text(out / "report.txt", text);
  write_text(out / "distribution.txt", metrics::format_distribution(metrics::prediction_distribution(s, threshold)));
  if (report.roc_auc) write_text(out / "roc.tsv", metrics::format_curve(metrics::roc_curve(s), "fpr", "tpr"));
  if (report.pr_auc) write_text(out / "pr.tsv", metrics::format_curve(metrics::pr_curve(s), "recall", "precision"));
  std::cout << text;
}

struct EvaluateArgs {
  std::string checkpoint, data, embeddings, out;
  std::optional<double> threshold;
  std::size_t batch_size = 64;
};

int run_evaluate(const EvaluateArgs& a) {
  const LoadedModel lm = load_model(load_checkpoint(a.checkpoint));
  const double threshold = a.threshold.value_or(lm.config.threshold);
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("--threshold must lie in [0, 1]");
  const auto records = load_records(a.data, Labels::kRequired, lm.config.flank);
  const EmbeddingFile embeddings = read_embeddings(a.embeddings);
  const auto scored = score_records(lm.model, records, embeddings, a.batch_size);
  write_reports(a.out, scored, threshold);

  std::string preds = "id\tprobability\tlabel\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", scored.scores[i]);
    preds += records[i].id + "\t" + buf + "\t" + std::to_string(records[i].label) + "\n";
  }
  write_text(fs::path(a.out) / "predictions.tsv", preds);
  return 0;
}

struct ExportArgs {
  std::string predictions, out;
  double threshold = metrics::kDefaultThreshold;
};

// Reads `id<TAB>probability<TAB>label` rows (the evaluate output format).
metrics::ScoredPredictions read_predictions(const std::string& path) {
  std::istringstream in(read_text_file(path));
  metrics::ScoredPredictions s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.rfind("id\t", 0) == 0) continue;
    std::istringstream row(line);
    std::string id, prob, label;
    if (!std::getline(row, id, '\t') || !std::getline(row, prob, '\t') || !std::getline(row, label, '\t')) {
      throw ParseError("expected id, probability and label columns", lineno);
    }
    try {
      s.scores.push_back(std::stod(prob));
    } catch (const std::exception&) {
      throw ParseError("bad probability '" + prob + "'", lineno);
    }
    if (label != "0" && label != "1") throw ParseError("label must be 0 or 1, got '" + label + "'", lineno);
    s.labels.push_back(label == "1");
  }
  try {
    s.validate();
  } catch (const ContractError& e) {
    throw DataError(path + ": " + e.what());
  }
  return s;
}

int run_export(const ExportArgs& a) {
  if (!(a.threshold >= 0.0 && a.threshold <= 1.0)) throw ConfigError("--threshold must lie in [0, 1]");
  write_reports(a.out, read_predictions(a.predictions), a.threshold);
  return 0;
}

// ---- predict -----------------------------------------------------------------

struct PredictArgs {
  std::string checkpoint, input, embeddings, out;
  std::size_t batch_size = 64;
};

int run_predict(const PredictArgs& a) {
  const LoadedModel lm = load_model(load_checkpoint(a.checkpoint));
  const auto records = load_records(a.input, Labels::kOptional, lm.config.flank);
  const EmbeddingFile embeddings = read_embeddings(a.embeddings);
  const std::vector<double> probs = predict_probabilities(lm.model, records, embeddings, a.batch_size);
  std::string text = "id\tprobability\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", probs[i]);
    text += records[i].id + "\t" + buf + "\n";
  }
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
  }
  return 0;
}

// ---- fake-embed / synth-motif -----------------------------------------------------

struct FakeArgs {
  std::string input, out;
  std::uint64_t seed = 0;
};

int run_fake_embed(const FakeArgs& a) {
  const auto records = read_dataset(a.input, Labels::kOptional);
  const EmbeddingFile file = fake_embeddings_for(records, a.seed);
  write_embeddings(a.out, file);
  std::cout << file.size() << " records, checksum " << payload_checksum(file) << "\n";
  return 0;
}

struct SynthArgs {
  std::string out;
  MotifSpec spec;
};

int run_synth(const SynthArgs& a) {
  write_dataset(a.out, motif_windows(a.spec));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peptide and modification-site classifier"};
  app.require_subcommand(1);

  PrepareArgs prep;
  auto* c_prep = app.add_subcommand("prepare", "window, split and write canonical dataset files");
  c_prep->add_option("input", prep.input, "raw dataset (.csv or .fasta)")->required();
  c_prep->add_option("--out", prep.out, "output directory")->required();
  c_prep->add_option("--seed", prep.seed, "split seed");
  c_prep->add_option("--flank", prep.flank, "residues on each side of a site");
  c_prep->add_option("--test-frac", prep.test_frac, "held-out fraction");
  c_prep->add_option("--val-frac", prep.val_frac, "validation fraction of the training part");

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "train a model");
  add_config_flags(*c_train, tr.cfg);
  c_train->add_option("--data", tr.data, "directory holding train.csv and val.csv");
  c_train->add_option("--train", tr.train, "training dataset");
  c_train->add_option("--val", tr.val, "validation dataset");
  c_train->add_option("--embeddings", tr.embeddings, "PDPPEMB1 file")->required();
  c_train->add_option("--out", tr.out, "run directory")->required();

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "metric report, curves and score statistics");
  c_eval->add_option("--checkpoint", ev.checkpoint)->required();
  c_eval->add_option("--data", ev.data, "labeled dataset")->required();
  c_eval->add_option("--embeddings", ev.embeddings)->required();
  c_eval->add_option("--out", ev.out, "report directory")->required();
  c_eval->add_option("--threshold", ev.threshold);
  c_eval->add_option("--batch-size", ev.batch_size);

  PredictArgs pr;
  auto* c_pred = app.add_subcommand("predict", "positive-class probability per sequence");
  c_pred->add_option("--checkpoint", pr.checkpoint)->required();
  c_pred->add_option("input", pr.input, "dataset, labels optional")->required();
  c_pred->add_option("--embeddings", pr.embeddings)->required();
  c_pred->add_option("--out", pr.out, "output file (default stdout)");
  c_pred->add_option("--batch-size", pr.batch_size);

  ExportArgs ex;
  auto* c_export = app.add_subcommand("export-report", "reports from a predictions table");
  c_export->add_option("predictions", ex.predictions, "id, probability, label (tab separated)")->required();
  c_export->add_option("--out", ex.out, "report directory")->required();
  c_export->add_option("--threshold", ex.threshold);

  FakeArgs fk;
  auto* c_fake = app.add_subcommand("fake-embed", "deterministic stand-in embeddings for a dataset");
  c_fake->add_option("input", fk.input)->required();
  c_fake->add_option("--out", fk.out)->required();
  c_fake->add_option("--seed", fk.seed);

  SynthArgs sy;
  auto* c_synth = app.add_subcommand("synth-motif", "write a rule-labeled window dataset");
  c_synth->add_option("--out", sy.out)->required();
  c_synth->add_option("--count", sy.spec.count);
  c_synth->add_option("--positives", sy.spec.positives);
  c_synth->add_option("--flank", sy.spec.flank);
  c_synth->add_option("--seed", sy.spec.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (c_prep->parsed()) return run_prepare(prep);
    if (c_train->parsed()) return run_train(tr);
    if (c_eval->parsed()) return run_evaluate(ev);
    if (c_pred->parsed()) return run_predict(pr);
    if (c_export->parsed()) return run_export(ex);
    if (c_fake->parsed()) return run_fake_embed(fk);
    if (c_synth->parsed()) return run_synth(sy);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ContractError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
