#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "pdpp/batch.hpp"
#include "pdpp/bytes.hpp"
#include "pdpp/dataset.hpp"
#include "pdpp/embedding_file.hpp"
#include "pdpp/errors.hpp"
#include "pdpp/ops.hpp"
#include "pdpp/rng.hpp"
#include "pdpp/synthetic.hpp"
#include "pdpp/vocabulary.hpp"

using namespace pdpp;
using Tokens = std::vector<std::size_t>;

namespace {

std::vector<SampleRecord> labeled(std::size_t positives, std::size_t negatives) {
  std::vector<SampleRecord> out;
  for (std::size_t i = 0; i < positives + negatives; ++i) {
    out.push_back(make_record("r" + std::to_string(i), "ACDKL", i < positives ? 1 : 0));
  }
  return out;
}

std::set<std::string> ids(const std::vector<SampleRecord>& rs) {
  std::set<std::string> s;
  for (const auto& r : rs) s.insert(r.id);
  return s;
}

EmbeddingRecord ramp(std::string id, std::uint32_t length) {
  EmbeddingRecord r;
  r.id = std::move(id);
  r.length = length;
  r.values.resize(length * kEmbeddingDim);
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] = static_cast<float>(i % 97) / 8.0f + 1.0f;
  return r;
}

}  // namespace

TEST_CASE("parse examples") {
  const auto csv = parse_dataset("id,sequence,label\na,ACD,1", DatasetFormat::kCsv);
  REQUIRE(csv.size() == 1);
  CHECK(csv[0].id == "a");
  CHECK(csv[0].tokens == Tokens{0, 1, 2});
  CHECK(csv[0].label == 1);

  const auto fa = parse_dataset(">a|1\nACD", DatasetFormat::kFasta);
  REQUIRE(fa.size() == 1);
  CHECK(fa[0].id == "a");
  CHECK(fa[0].tokens == Tokens{0, 1, 2});
  CHECK(fa[0].label == 1);

  CHECK_THROWS_AS(parse_dataset("id,sequence,label\na,ACD,1\na,KLM,0", DatasetFormat::kCsv), DataError);
  CHECK_THROWS_AS(parse_dataset(">a|1\nACD\n>a|0\nKK", DatasetFormat::kFasta), DataError);
}

TEST_CASE("parse errors carry line numbers") {
  try {
    parse_dataset("id,sequence,label\na,ACD,1\nb,ACD\n", DatasetFormat::kCsv);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_dataset("id,sequence,label\na,ACD,7\n", DatasetFormat::kCsv), DataError);
  CHECK_THROWS_AS(parse_dataset("ACD\n>a|1\nACD", DatasetFormat::kFasta), ParseError);
  CHECK(parse_dataset(">a\nACD", DatasetFormat::kFasta, Labels::kOptional)[0].label == -1);
}

TEST_CASE("site records") {
  const auto csv = parse_dataset("id,sequence,label,site\np1,MKLVA,1,1\n", DatasetFormat::kCsv);
  CHECK(csv[0].kind == TaskKind::kModificationSite);
  CHECK(*csv[0].site == 1);
  const auto fa = parse_dataset(">w|0|site=40|protein=P9\nACDEF\n", DatasetFormat::kFasta);
  CHECK(*fa[0].site == 40);
  CHECK(fa[0].embedding_key() == "P9");
}

TEST_CASE("parse, serialize, parse is the identity") {
  const std::string csv = "id,sequence,label,site,protein\na,ACD,1,,\nb,KLMNP,0,2,b\nc,WY,1,0,Q1\n";
  const std::string fa = ">a|1\nACD\n>b|0|site=2\nKLMNP\n>c|1|site=0|protein=Q1\nWY\n";
  for (const auto& [text, fmt] : {std::pair{csv, DatasetFormat::kCsv}, std::pair{fa, DatasetFormat::kFasta}}) {
    const auto first = parse_dataset(text, fmt);
    const auto second = parse_dataset(serialize_dataset(first, fmt), fmt);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
      CHECK(first[i].id == second[i].id);
      CHECK(first[i].sequence == second[i].sequence);
      CHECK(first[i].label == second[i].label);
      CHECK(first[i].site == second[i].site);
      CHECK(first[i].protein == second[i].protein);
    }
  }
}

TEST_CASE("window examples") {
  CHECK(extract_window("ACDEF", 2, WindowSpec{2}) == "ACDEF");
  CHECK(extract_window("ACDEF", 0, WindowSpec{2}) == "--ACD");
  CHECK_THROWS_AS(extract_window("ACDEF", 5, WindowSpec{2}), ContractError);
  const std::string protein = "MKTAYIAKQRQISFVKSHFSRQ";
  for (std::size_t site = 0; site < protein.size(); ++site) {
    const std::string w = extract_window(protein, site);
    CHECK(w.size() == 33);
    CHECK(w[16] == protein[site]);
  }
}

TEST_CASE("to_windows keeps the protein key and the site") {
  const auto raw = parse_dataset("id,sequence,label,site\np1,MKLVAGHK,1,6\n", DatasetFormat::kCsv);
  const auto w = to_windows(raw, WindowSpec{3});
  CHECK(w[0].sequence == "VAGHK--");
  CHECK(w[0].embedding_key() == "p1");
  CHECK(*w[0].site == 6);
}

TEST_CASE("split examples") {
  const Split s = split(labeled(50, 50), SplitPlan{});
  CHECK(s.train.size() == 72);
  CHECK(s.val.size() == 8);
  CHECK(s.test.size() == 20);

  const Split again = split(labeled(50, 50), SplitPlan{});
  CHECK(ids(again.train) == ids(s.train));
  CHECK(ids(again.test) == ids(s.test));

  const Split small = split(labeled(5, 5), SplitPlan{});
  for (const auto* part : {&small.train, &small.val, &small.test}) {
    const ClassCounts c = count_classes(*part);
    CHECK(c.positives > 0);
    CHECK(c.negatives > 0);
  }
  CHECK(small.warnings.empty());
  CHECK_THROWS_AS(split(labeled(4, 5), SplitPlan{}), ContractError);
}

TEST_CASE("split is a stratified partition") {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t pos = 3 + rng.below(60), neg = 3 + rng.below(60);
    const auto all = labeled(pos, neg);
    SplitPlan plan;
    plan.seed = rng.next();
    const Split s = split(all, plan);
    CHECK(s.train.size() + s.val.size() + s.test.size() == all.size());
    std::set<std::string> seen = ids(s.train);
    for (const auto* part : {&s.val, &s.test}) {
      for (const auto& r : *part) CHECK(seen.insert(r.id).second);
    }
    CHECK(seen == ids(all));
    const double global = static_cast<double>(pos) / static_cast<double>(all.size());
    for (const auto* part : {&s.train, &s.val, &s.test}) {
      const double expect = global * static_cast<double>(part->size());
      CHECK(std::abs(static_cast<double>(count_classes(*part).positives) - expect) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("pad_batch examples") {
  EmbeddingFile emb;
  emb.add(ramp("a", 3));
  emb.add(ramp("b", 5));
  const std::vector<SampleRecord> rs = {make_record("a", "ACD", 1), make_record("b", "KLMNP", 0)};
  const PaddedBatch b = pad_batch(rs, emb);
  CHECK(b.max_len == 5);
  CHECK(b.masks[0] == Mask{1, 1, 1, 0, 0});
  CHECK(b.masks[1] == Mask{1, 1, 1, 1, 1});
  CHECK(b.sample_tokens(0)[3] == kPadToken);
  for (std::size_t c = 0; c < kEmbeddingDim; ++c) CHECK(b.features.at(4, c) == 0);

  const std::vector<SampleRecord> same = {make_record("b", "KLMNP", 0), make_record("b2", "KLMNP", 0)};
  EmbeddingFile emb2 = emb;
  emb2.add(ramp("b2", 5));
  const PaddedBatch nb = pad_batch(same, emb2);
  CHECK(nb.max_len == 5);
  CHECK(std::all_of(nb.masks.begin(), nb.masks.end(), [](const Mask& m) { return std::count(m.begin(), m.end(), 1) == 5; }));

  // Masked mean over a 2-row record padded to 4 rows ignores the pad rows.
  EmbeddingFile two;
  EmbeddingRecord r{"t", 2, kEmbeddingDim, std::vector<float>(2 * kEmbeddingDim)};
  for (std::size_t c = 0; c < kEmbeddingDim; ++c) {
    r.values[c] = 1.0f;
    r.values[kEmbeddingDim + c] = 3.0f;
  }
  two.add(r);
  const std::vector<SampleRecord> one = {make_record("t", "AC", 1)};
  const PaddedBatch pb = pad_batch(one, two, 4);
  const Tensor mean = ops::masked_mean_rows(pb.features, pb.masks[0]);
  CHECK(mean[0] == 2.0f);
  CHECK(mean[kEmbeddingDim - 1] == 2.0f);
}

TEST_CASE("pad_batch alignment errors name the record") {
  EmbeddingFile emb;
  emb.add(ramp("a", 4));
  const std::vector<SampleRecord> missing = {make_record("zz", "ACD", 1)};
  const std::vector<SampleRecord> wrong = {make_record("a", "ACD", 1)};
  for (const auto* rs : {&missing, &wrong}) {
    try {
      pad_batch(*rs, emb);
      FAIL("expected an alignment error");
    } catch (const AlignmentError& e) {
      CHECK(std::string(e.what()).find((*rs)[0].id) != std::string::npos);
    }
  }
}

TEST_CASE("window records slice the protein embedding") {
  EmbeddingFile emb;
  emb.add(ramp("P", 6));
  auto windows = to_windows(parse_dataset("id,sequence,label,site,protein\nw1,MKLVAG,1,1,P\n", DatasetFormat::kCsv), WindowSpec{2});
  const PaddedBatch b = pad_batch(windows, emb);
  REQUIRE(b.max_len == 5);
  const EmbeddingRecord& full = *emb.find("P");
  for (std::size_t c = 0; c < kEmbeddingDim; ++c) {
    CHECK(b.features.at(0, c) == 0);  // position -1
    CHECK(b.features.at(1, c) == full.row(0)[c]);
    CHECK(b.features.at(4, c) == full.row(3)[c]);
  }
  CHECK(b.masks[0] == Mask{0, 1, 1, 1, 1});
}

TEST_CASE("embedding file round trip is bit exact") {
  EmbeddingFile f;
  f.add(fake_embedding("alpha", 3, 1));
  EmbeddingRecord odd = fake_embedding("beta", 2, 2);
  odd.values[0] = -0.0f;
  odd.values[1] = std::numeric_limits<float>::denorm_min();
  odd.values[2] = std::nextafter(1.0f, 2.0f);
  f.add(odd);
  const auto bytes = encode_embeddings(f);
  CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "PDPPEMB1");
  const EmbeddingFile g = decode_embeddings(bytes);
  REQUIRE(g.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& a = f.records()[i];
    const auto& b = g.records()[i];
    CHECK(a.id == b.id);
    CHECK(a.length == b.length);
    CHECK(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(float)) == 0);
  }
  CHECK(payload_checksum(g) == payload_checksum(f));
  CHECK(encode_embeddings(g) == bytes);

  // Header layout: version 1, count 2, then the first id.
  CHECK(bytes[8] == 1);
  CHECK(bytes[9] == 0);
  CHECK(bytes[10] == 2);
  CHECK(bytes[14] == 5);
  CHECK(std::string(bytes.begin() + 16, bytes.begin() + 21) == "alpha");
}

TEST_CASE("checksum is the byte sum of the payload") {
  EmbeddingFile f;
  EmbeddingRecord r{"x", 1, kEmbeddingDim, std::vector<float>(kEmbeddingDim, 0.0f)};
  r.values[0] = 1.0f;   // bytes 00 00 80 3f
  r.values[1] = -2.0f;  // bytes 00 00 00 c0
  f.add(r);
  CHECK(payload_checksum(f) == 0x80u + 0x3fu + 0xc0u);
}

TEST_CASE("embedding decoding rejects damaged input") {
  EmbeddingFile f;
  f.add(fake_embedding("a", 2, 1));
  const auto good = encode_embeddings(f);
  auto bad_magic = good;
  bad_magic[0] = 'Q';
  auto bad_version = good;
  bad_version[8] = 2;
  auto bad_sum = good;
  bad_sum.back() ^= 1;
  auto bad_value = good;
  bad_value[30] ^= 0x10;
  auto truncated = good;
  truncated.pop_back();
  auto trailing = good;
  trailing.push_back(0);
  auto bad_dim = good;
  bad_dim[13 + 1 + 4] = 7;  // first byte of D after "a" and L
  for (const auto* b : {&bad_magic, &bad_version, &bad_sum, &bad_value, &truncated, &trailing, &bad_dim}) {
    CHECK_THROWS_AS(decode_embeddings(*b), DataError);
  }
  EmbeddingFile dup;
  dup.add(fake_embedding("a", 1, 1));
  CHECK_THROWS_AS(dup.add(fake_embedding("a", 1, 2)), DataError);
}

TEST_CASE("embedding files on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "pdpp_unit_emb";
  std::filesystem::create_directories(dir);
  EmbeddingFile f;
  f.add(fake_embedding("a", 4, 9));
  write_embeddings(dir / "e.bin", f);
  CHECK(read_file_bytes(dir / "e.bin") == encode_embeddings(f));
  CHECK(read_embeddings(dir / "e.bin").find("a")->values == f.find("a")->values);
  std::filesystem::remove_all(dir);
}

TEST_CASE("fake embeddings") {
  const EmbeddingRecord a = fake_embedding("seq", 7, 3), b = fake_embedding("seq", 7, 3);
  CHECK(a.values == b.values);
  CHECK(a.length == 7);
  CHECK(a.values.size() == 7 * kEmbeddingDim);
  CHECK(std::all_of(a.values.begin(), a.values.end(), [](float v) { return v >= -1.0f && v <= 1.0f; }));
  CHECK(fake_embedding("seq", 7, 4).values != a.values);
  // Rows depend on (seed, id, position) only: a longer record extends a shorter one.
  const EmbeddingRecord longer = fake_embedding("seq", 9, 3);
  CHECK(std::equal(a.values.begin(), a.values.end(), longer.values.begin()));
}

TEST_CASE("synthetic motif windows follow the rule") {
  MotifSpec spec;
  spec.count = 120;
  spec.positives = 30;
  spec.flank = 16;
  spec.seed = 4;
  const auto ws = motif_windows(spec);
  CHECK(ws.size() == 120);
  CHECK(count_classes(ws).positives == 30);
  for (const auto& w : ws) {
    CHECK(w.sequence.size() == 33);
    CHECK(has_motif(w.sequence) == (w.label == 1));
  }
  CHECK(has_motif("AAAAKLAAA"));
  CHECK(has_motif("AALAKAAAA"));
  CHECK_FALSE(has_motif("ALAAKAAAA"));
  CHECK_FALSE(has_motif("AAAALLAAA"));
  const auto again = motif_windows(spec);
  CHECK(again[17].sequence == ws[17].sequence);
}
