#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pdpp {

enum class TaskKind { kBioactivePeptide, kModificationSite };

/// One labeled peptide (whole sequence) or modification-site window.
struct SampleRecord {
  std::string id;
  std::string sequence;
  std::vector<std::size_t> tokens;
  int label = -1;  // 0/1, or -1 when unlabeled
  TaskKind kind = TaskKind::kBioactivePeptide;
  // Site records only: the embedding-file key of the full protein and the
  // 0-based site index within it.
  std::string protein;
  std::optional<std::size_t> site;

  /// Key under which this record's embeddings are stored.
  const std::string& embedding_key() const { return protein.empty() ? id : protein; }
};

SampleRecord make_record(std::string id, std::string sequence, int label);

enum class DatasetFormat { kCsv, kFasta };

/// csv for ".csv", fasta for ".fa", ".fasta", ".faa"; throws ConfigError otherwise.
DatasetFormat format_from_path(const std::filesystem::path& path);

enum class Labels { kRequired, kOptional };

/// Order-preserving parse. csv: header `id,sequence,label` plus optional
/// `site` and `protein` columns. fasta: `>id|label` plus optional
/// `|site=N` and `|protein=KEY` fields. Throws ParseError (with line number)
/// on malformed input, DataError on unknown labels or duplicate ids.
std::vector<SampleRecord> parse_dataset(std::string_view text, DatasetFormat format, Labels labels = Labels::kRequired);
std::vector<SampleRecord> read_dataset(const std::filesystem::path& path, Labels labels = Labels::kRequired);

std::string serialize_dataset(const std::vector<SampleRecord>& records, DatasetFormat format);
void write_dataset(const std::filesystem::path& path, const std::vector<SampleRecord>& records);

struct WindowSpec {
  std::size_t flank = 16;
  std::size_t length() const { return 2 * flank + 1; }
};

/// Residues [site - flank, site + flank], '-' where out of range.
std::string extract_window(std::string_view sequence, std::size_t site, const WindowSpec& spec = {});

/// Converts full-protein site records into window records; other records
/// pass through unchanged.
std::vector<SampleRecord> to_windows(const std::vector<SampleRecord>& records, const WindowSpec& spec);

struct SplitPlan {
  double train_frac = 0.8;
  double test_frac = 0.2;
  double val_frac_of_train = 0.1;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<SampleRecord> train, val, test;
  std::vector<std::string> warnings;
};

/// Label-stratified seeded split. Per class: test = round(test_frac * n),
/// val = round(val_frac_of_train * (n - test)), train takes the rest. A class
/// with four or more members always places at least one in test and in val.
Split split(const std::vector<SampleRecord>& records, const SplitPlan& plan);

struct ClassCounts {
  std::size_t negatives = 0;
  std::size_t positives = 0;
};
ClassCounts count_classes(const std::vector<SampleRecord>& records);

}  // namespace pdpp
