#include "pdpp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "pdpp/errors.hpp"
#include "pdpp/rng.hpp"
#include "pdpp/vocabulary.hpp"

namespace pdpp {

SampleRecord make_record(std::string id, std::string sequence, int label) {
  SampleRecord r;
  r.tokens = tokenize(sequence);
  r.id = std::move(id);
  r.sequence = std::move(sequence);
  r.label = label;
  return r;
}

DatasetFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return DatasetFormat::kCsv;
  if (ext == ".fa" || ext == ".fasta" || ext == ".faa") return DatasetFormat::kFasta;
  throw ConfigError("cannot infer dataset format from '" + path.string() + "' (expected .csv or .fasta)");
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

int parse_label(std::string_view field, Labels policy, std::size_t line) {
  if (field == "1") return 1;
  if (field == "0") return 0;
  if (field.empty() && policy == Labels::kOptional) return -1;
  throw DataError("line " + std::to_string(line) + ": unknown label '" + std::string(field) + "'");
}

std::size_t parse_site(std::string_view field, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError("invalid site '" + std::string(field) + "'", line);
  }
  return v;
}

void finish_record(SampleRecord& r, std::size_t line) {
  if (r.id.empty()) throw ParseError("empty id", line);
  if (r.sequence.empty()) throw ParseError("empty sequence for '" + r.id + "'", line);
  r.tokens = tokenize(r.sequence);
  if (r.site) {
    r.kind = TaskKind::kModificationSite;
    if (r.protein.empty()) r.protein = r.id;
  }
}

std::vector<SampleRecord> parse_csv(std::string_view text, Labels policy) {
  std::vector<SampleRecord> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  int col_id = -1, col_seq = -1, col_label = -1, col_site = -1, col_protein = -1;
  std::size_t n_cols = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split_fields(line, ',');
    if (n_cols == 0) {
      n_cols = fields.size();
      for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto f = trim(fields[i]);
        const int c = static_cast<int>(i);
        if (f == "id") col_id = c;
        else if (f == "sequence") col_seq = c;
        else if (f == "label") col_label = c;
        else if (f == "site") col_site = c;
        else if (f == "protein") col_protein = c;
        else throw ParseError("unknown column '" + std::string(f) + "'", line_no);
      }
      if (col_id < 0 || col_seq < 0) throw ParseError("header needs 'id' and 'sequence' columns", line_no);
      if (col_label < 0 && policy == Labels::kRequired) throw ParseError("header needs a 'label' column", line_no);
      continue;
    }
    if (fields.size() != n_cols) {
      throw ParseError("expected " + std::to_string(n_cols) + " fields, got " + std::to_string(fields.size()), line_no);
    }
    SampleRecord r;
    r.id = std::string(trim(fields[static_cast<std::size_t>(col_id)]));
    r.sequence = std::string(trim(fields[static_cast<std::size_t>(col_seq)]));
    r.label = col_label >= 0 ? parse_label(trim(fields[static_cast<std::size_t>(col_label)]), policy, line_no) : -1;
    if (col_site >= 0) {
      const auto f = trim(fields[static_cast<std::size_t>(col_site)]);
      if (!f.empty()) r.site = parse_site(f, line_no);
    }
    if (col_protein >= 0) r.protein = std::string(trim(fields[static_cast<std::size_t>(col_protein)]));
    finish_record(r, line_no);
    out.push_back(std::move(r));
  }
  if (n_cols == 0) throw ParseError("missing header", line_no + 1);
  return out;
}

std::vector<SampleRecord> parse_fasta(std::string_view text, Labels policy) {
  std::vector<SampleRecord> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0, header_line = 0;
  bool open = false;
  SampleRecord cur;
  auto flush = [&]() {
    if (!open) return;
    finish_record(cur, header_line);
    out.push_back(std::move(cur));
    cur = SampleRecord{};
    open = false;
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '>') {
      flush();
      open = true;
      header_line = line_no;
      const auto fields = split_fields(line.substr(1), '|');
      cur.id = std::string(trim(fields[0]));
      bool have_label = false;
      for (std::size_t i = 1; i < fields.size(); ++i) {
        const auto f = trim(fields[i]);
        if (f.starts_with("site=")) {
          cur.site = parse_site(f.substr(5), line_no);
        } else if (f.starts_with("protein=")) {
          cur.protein = std::string(f.substr(8));
        } else if (!have_label) {
          cur.label = parse_label(f, policy, line_no);
          have_label = true;
        } else {
          throw ParseError("unexpected header field '" + std::string(f) + "'", line_no);
        }
      }
      if (!have_label) {
        if (policy == Labels::kRequired) throw DataError("line " + std::to_string(line_no) + ": missing label for '" + cur.id + "'");
        cur.label = -1;
      }
      continue;
    }
    if (!open) throw ParseError("sequence line before any header", line_no);
    cur.sequence += line;
  }
  flush();
  return out;
}

void check_unique(const std::vector<SampleRecord>& records) {
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.id).second) throw DataError("duplicate id '" + r.id + "'");
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<SampleRecord> parse_dataset(std::string_view text, DatasetFormat format, Labels labels) {
  auto records = format == DatasetFormat::kCsv ? parse_csv(text, labels) : parse_fasta(text, labels);
  check_unique(records);
  return records;
}

std::vector<SampleRecord> read_dataset(const std::filesystem::path& path, Labels labels) {
  const DatasetFormat fmt = format_from_path(path);
  try {
    return parse_dataset(read_text(path), fmt, labels);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string serialize_dataset(const std::vector<SampleRecord>& records, DatasetFormat format) {
  const bool sites = std::any_of(records.begin(), records.end(), [](const SampleRecord& r) { return r.site.has_value(); });
  auto label_text = [](int label) { return label < 0 ? std::string() : std::to_string(label); };
  std::string out;
  if (format == DatasetFormat::kCsv) {
    out += sites ? "id,sequence,label,site,protein\n" : "id,sequence,label\n";
    for (const auto& r : records) {
      out += r.id + "," + r.sequence + "," + label_text(r.label);
      if (sites) out += "," + (r.site ? std::to_string(*r.site) : std::string()) + "," + r.protein;
      out += "\n";
    }
    return out;
  }
  for (const auto& r : records) {
    out += ">" + r.id;
    if (r.label >= 0) out += "|" + std::to_string(r.label);
    if (r.site) out += "|site=" + std::to_string(*r.site);
    if (!r.protein.empty() && r.protein != r.id) out += "|protein=" + r.protein;
    out += "\n" + r.sequence + "\n";
  }
  return out;
}

void write_dataset(const std::filesystem::path& path, const std::vector<SampleRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << serialize_dataset(records, format_from_path(path));
}

std::string extract_window(std::string_view sequence, std::size_t site, const WindowSpec& spec) {
  if (site >= sequence.size()) {
    throw ContractError("site " + std::to_string(site) + " outside sequence of length " + std::to_string(sequence.size()));
  }
  std::string out;
  out.reserve(spec.length());
  const std::ptrdiff_t center = static_cast<std::ptrdiff_t>(site);
  const std::ptrdiff_t flank = static_cast<std::ptrdiff_t>(spec.flank);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(sequence.size());
  for (std::ptrdiff_t p = center - flank; p <= center + flank; ++p) {
    out.push_back(p >= 0 && p < n ? sequence[static_cast<std::size_t>(p)] : kPadSymbol);
  }
  return out;
}

std::vector<SampleRecord> to_windows(const std::vector<SampleRecord>& records, const WindowSpec& spec) {
  std::vector<SampleRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    SampleRecord w = r;
    if (r.site) {
      w.sequence = extract_window(r.sequence, *r.site, spec);
      w.tokens = tokenize(w.sequence);
      w.kind = TaskKind::kModificationSite;
      if (w.protein.empty()) w.protein = r.id;
    }
    out.push_back(std::move(w));
  }
  return out;
}

ClassCounts count_classes(const std::vector<SampleRecord>& records) {
  ClassCounts c;
  for (const auto& r : records) (r.label == 1 ? c.positives : c.negatives) += 1;
  return c;
}

Split split(const std::vector<SampleRecord>& records, const SplitPlan& plan) {
  if (records.size() < 10) throw ContractError("split needs at least 10 records, got " + std::to_string(records.size()));
  if (std::abs(plan.train_frac + plan.test_frac - 1.0) > 1e-9 || plan.test_frac <= 0.0 || plan.val_frac_of_train < 0.0) {
    throw ConfigError("split fractions must be positive and train + test must equal 1");
  }
  for (const auto& r : records) {
    if (r.label != 0 && r.label != 1) throw DataError("cannot stratify unlabeled record '" + r.id + "'");
  }

  Rng rng(plan.seed);
  enum Bucket : int { kTrain, kVal, kTest };
  std::vector<int> bucket(records.size(), kTrain);
  for (int label = 0; label <= 1; ++label) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].label == label) members.push_back(i);
    }
    rng.shuffle(members);
    const std::size_t n = members.size();
    // From four members on, a class can give one to test and one to val
    // without breaking the one-sample stratification bound.
    std::size_t n_test = static_cast<std::size_t>(std::llround(plan.test_frac * static_cast<double>(n)));
    if (n_test == 0 && n >= 4) n_test = 1;
    const std::size_t n_rest = n - n_test;
    std::size_t n_val = static_cast<std::size_t>(std::llround(plan.val_frac_of_train * static_cast<double>(n_rest)));
    if (n_val == 0 && n >= 4 && plan.val_frac_of_train > 0.0) n_val = 1;
    for (std::size_t j = 0; j < n; ++j) {
      bucket[members[j]] = j < n_test ? kTest : (j < n_test + n_val ? kVal : kTrain);
    }
  }

  Split s;
  for (std::size_t i = 0; i < records.size(); ++i) {
    (bucket[i] == kTest ? s.test : bucket[i] == kVal ? s.val : s.train).push_back(records[i]);
  }
  const ClassCounts all = count_classes(records);
  auto check = [&](const char* name, const std::vector<SampleRecord>& part) {
    const ClassCounts c = count_classes(part);
    if ((all.positives > 0 && c.positives == 0) || (all.negatives > 0 && c.negatives == 0)) {
      s.warnings.push_back(std::string("stratification: a class is absent from the ") + name + " split");
    }
  };
  check("train", s.train);
  check("validation", s.val);
  check("test", s.test);
  return s;
}

}  // namespace pdpp
