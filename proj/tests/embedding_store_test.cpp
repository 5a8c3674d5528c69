// Copyright 2026 The fadkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fadkit/embedding_store.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <random>

#include "fadkit/errors.hpp"
#include "testing/fixtures.hpp"

namespace fadkit {
namespace {

using testing::CorpusBuilder;
using testing::TempDir;

FrameMatrix random_frames(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal;
  FrameMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

TEST(EmbeddingFile, SingleValueLayout) {
  TempDir dir;
  FrameMatrix one(1, 1);
  one(0, 0) = 0.0f;
  write_embeddings(one, 1.0, dir / "one.emb");
  const std::string bytes = testing::read_text(dir / "one.emb");
  ASSERT_EQ(bytes.size(), 24u + 4u);
  EXPECT_EQ(bytes.substr(0, 4), "FEMB");
  EXPECT_EQ(read_embeddings(dir / "one.emb").frames, one);
}

TEST(EmbeddingFile, HeaderFieldsAreLittleEndian) {
  TempDir dir;
  const FrameMatrix frames = random_frames(7, 128, 1);
  write_embeddings(frames, 1.0, dir / "vggish.emb");
  const std::string b = testing::read_text(dir / "vggish.emb");
  auto u32 = [&](std::size_t at) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
           static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
  };
  EXPECT_EQ(u32(4), 1u);
  EXPECT_EQ(u32(8), 128u);
  EXPECT_EQ(u32(12), 7u);
  double rate = 0.0;
  std::memcpy(&rate, b.data() + 16, 8);  // host is little-endian in CI
  EXPECT_EQ(rate, 1.0);
  // First payload float is frames(0, 0), then frames(0, 1): row-major.
  float first = 0.0f, second = 0.0f;
  std::memcpy(&first, b.data() + 24, 4);
  std::memcpy(&second, b.data() + 28, 4);
  EXPECT_EQ(first, frames(0, 0));
  EXPECT_EQ(second, frames(0, 1));

  const EmbeddingHeader h = read_embedding_header(dir / "vggish.emb");
  EXPECT_EQ(h.dim, 128u);
  EXPECT_EQ(h.frame_rate_hz, 1.0);
}

TEST(EmbeddingFile, RoundTripIsByteExact) {
  TempDir dir;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    FrameMatrix frames = random_frames(1 + static_cast<int>(seed % 9), 1 + static_cast<int>(seed * 7 % 130), seed);
    frames(0, 0) = -0.0f;
    write_embeddings(frames, 0.1 * (1 + seed), dir / "a.emb");
    const EmbeddingMatrix back = read_embeddings(dir / "a.emb");
    ASSERT_EQ(back.frames.rows(), frames.rows());
    ASSERT_EQ(back.frames.cols(), frames.cols());
    EXPECT_EQ(std::memcmp(back.frames.data(), frames.data(), sizeof(float) * frames.size()), 0);
    write_embeddings(back.frames, back.header.frame_rate_hz, dir / "b.emb");
    EXPECT_EQ(testing::read_text(dir / "a.emb"), testing::read_text(dir / "b.emb"));
  }
}

TEST(EmbeddingFile, RejectsNonFiniteOnWrite) {
  TempDir dir;
  FrameMatrix frames = FrameMatrix::Zero(3, 4);
  frames(2, 1) = std::numeric_limits<float>::quiet_NaN();
  try {
    write_embeddings(frames, 1.0, dir / "x.emb");
    FAIL() << "expected NonFiniteError";
  } catch (const NonFiniteError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2, column 1"), std::string::npos);
  }
  EXPECT_THROW(write_embeddings(FrameMatrix(0, 3), 1.0, dir / "y.emb"), DataError);
}

TEST(EmbeddingFile, BadMagicIsFormatError) {
  TempDir dir;
  write_embeddings(random_frames(2, 3, 5), 1.0, dir / "x.emb");
  std::string bytes = testing::read_text(dir / "x.emb");
  bytes[0] = 'X';
  std::ofstream(dir / "x.emb", std::ios::binary) << bytes;
  EXPECT_THROW(read_embeddings(dir / "x.emb"), FormatError);
}

TEST(EmbeddingFile, BadVersionIsFormatError) {
  TempDir dir;
  write_embeddings(random_frames(2, 3, 5), 1.0, dir / "x.emb");
  std::string bytes = testing::read_text(dir / "x.emb");
  bytes[4] = 2;
  std::ofstream(dir / "x.emb", std::ios::binary) << bytes;
  EXPECT_THROW(read_embeddings(dir / "x.emb"), FormatError);
}

TEST(EmbeddingFile, MissingRowIsLengthError) {
  TempDir dir;
  write_embeddings(random_frames(10, 4, 6), 1.0, dir / "x.emb");
  std::string bytes = testing::read_text(dir / "x.emb");
  bytes.resize(bytes.size() - 4 * 4);  // 9 rows remain
  std::ofstream(dir / "x.emb", std::ios::binary) << bytes;
  EXPECT_THROW(read_embeddings(dir / "x.emb"), LengthError);
}

TEST(EmbeddingFile, NaNPayloadIsDataError) {
  TempDir dir;
  write_embeddings(random_frames(2, 2, 7), 1.0, dir / "x.emb");
  std::string bytes = testing::read_text(dir / "x.emb");
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bytes.data() + 24 + 8, &nan, 4);
  std::ofstream(dir / "x.emb", std::ios::binary) << bytes;
  EXPECT_THROW(read_embeddings(dir / "x.emb"), NonFiniteError);
}

TEST(FrameCount, Examples) {
  EXPECT_EQ(expected_frame_count(4.0, 1.0, 0.5), 7);
  EXPECT_EQ(expected_frame_count(1.0, 1.0, 0.5), 1);
  EXPECT_EQ(expected_frame_count(10.0, 10.0, 10.0), 1);
}

TEST(FrameCount, MatchesWindowEnumeration) {
  const double window = 1.0, hop = 0.5;
  for (double clip = 1.0; clip <= 12.0; clip += 0.25) {
    int windows = 0;
    for (int i = 0; i * hop + window <= clip + 1e-12; ++i) ++windows;
    EXPECT_EQ(expected_frame_count(clip, window, hop), windows) << clip;
  }
}

TEST(FrameCount, IncrementsByOnePerHop) {
  for (double hop : {0.1, 0.25, 0.5, 1.0}) {
    for (int steps = 0; steps < 40; ++steps) {
      const double clip = 1.0 + steps * hop;
      EXPECT_EQ(expected_frame_count(clip + hop, 1.0, hop),
                expected_frame_count(clip, 1.0, hop) + 1);
    }
  }
}

TEST(FrameCount, ClipShorterThanWindowIsRejected) {
  EXPECT_THROW(expected_frame_count(4.0, 10.0, 10.0), DataError);
  EXPECT_THROW(expected_frame_count(4.0, 1.0, 2.0), ConfigError);
  EXPECT_THROW(expected_frame_count(4.0, 0.0, 0.0), ConfigError);
}

TEST(Manifest, ParsesAndResolvesRelativePaths) {
  const std::string text = R"({
    "models": {"vggish": {"dim": 128, "rate_hz": 1.0}},
    "entries": [{"clip_id": "a", "path": "emb/a.emb", "category": "rain",
                 "system": "reference", "model": "vggish"}]})";
  const Manifest m = parse_manifest(text, "/data");
  ASSERT_EQ(m.entries.size(), 1u);
  EXPECT_EQ(m.entries[0].path, std::filesystem::path("/data/emb/a.emb"));
  EXPECT_EQ(m.categories, default_categories());
  EXPECT_EQ(m.models.at("vggish").expected_dim, 128u);
}

TEST(Manifest, RejectsDuplicateIdsUnknownCategoriesAndModels) {
  const std::string dup = R"({"models": {"m": {"dim": 2, "rate_hz": 1}},
    "entries": [{"clip_id": "a", "path": "a", "category": "rain", "system": "s", "model": "m"},
                {"clip_id": "a", "path": "b", "category": "rain", "system": "s", "model": "m"}]})";
  EXPECT_THROW(parse_manifest(dup, "."), DataError);
  const std::string bad_category = R"({"models": {"m": {"dim": 2, "rate_hz": 1}},
    "entries": [{"clip_id": "a", "path": "a", "category": "speech", "system": "s", "model": "m"}]})";
  EXPECT_THROW(parse_manifest(bad_category, "."), DataError);
  const std::string declared = R"({"models": {"m": {"dim": 2, "rate_hz": 1}},
    "categories": ["speech"],
    "entries": [{"clip_id": "a", "path": "a", "category": "speech", "system": "s", "model": "m"}]})";
  EXPECT_NO_THROW(parse_manifest(declared, "."));
  const std::string bad_model = R"({"models": {"m": {"dim": 2, "rate_hz": 1}},
    "entries": [{"clip_id": "a", "path": "a", "category": "rain", "system": "s", "model": "x"}]})";
  EXPECT_THROW(parse_manifest(bad_model, "."), DataError);
  EXPECT_THROW(parse_manifest("{not json", "."), DataError);
}

TEST(Manifest, SaveLoadKeepsEntries) {
  TempDir dir;
  CorpusBuilder b(dir.path());
  b.add_model("m", 3, 2.0);
  b.add_clip("reference", "rain", "m", random_frames(2, 3, 1));
  b.add_clip("sys", "gunshot", "m", random_frames(4, 3, 2));
  const Manifest m = load_manifest(b.write_manifest());
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[1].system, "sys");
  EXPECT_TRUE(std::filesystem::exists(m.entries[1].path));
  EXPECT_EQ(m.systems("m"), (std::vector<std::string>{"reference", "sys"}));
  EXPECT_EQ(m.categories_present("m"), (std::vector<std::string>{"gunshot", "rain"}));
  EXPECT_TRUE(validate_manifest_files(m).empty());
}

TEST(Manifest, ValidationReportsDimMismatchPerClip) {
  TempDir dir;
  CorpusBuilder b(dir.path());
  b.add_model("m", 3, 1.0);
  b.add_clip("reference", "rain", "m", random_frames(2, 3, 1));
  const std::string bad = b.add_clip("reference", "rain", "m", random_frames(2, 5, 2));
  const Manifest m = load_manifest(b.write_manifest());
  const auto issues = validate_manifest_files(m);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].clip_id, bad);
}

TEST(CollectSet, ConcatenatesInManifestOrder) {
  TempDir dir;
  CorpusBuilder b(dir.path());
  b.add_model("m", 2, 1.0);
  const FrameMatrix first = random_frames(3, 2, 10);
  const FrameMatrix second = random_frames(4, 2, 11);
  b.add_clip("reference", "rain", "m", first);
  b.add_clip("other", "rain", "m", random_frames(5, 2, 12));
  b.add_clip("reference", "rain", "m", second);
  const Manifest m = load_manifest(b.write_manifest());

  const EmbeddingSet set = collect_set(m, {"reference", std::nullopt, "m"});
  EXPECT_EQ(set.member_count, 2u);
  ASSERT_EQ(set.frames.rows(), 7);
  EXPECT_EQ(set.frames.topRows(3), first.cast<double>());
  EXPECT_EQ(set.frames.bottomRows(4), second.cast<double>());
  EXPECT_EQ(set.set_id, "reference");

  const EmbeddingSet again = collect_set(m, {"reference", std::nullopt, "m"});
  EXPECT_EQ(set.frames, again.frames);
}

TEST(CollectSet, SingleClipIsIdentity) {
  TempDir dir;
  CorpusBuilder b(dir.path());
  b.add_model("m", 4, 1.0);
  const FrameMatrix only = random_frames(6, 4, 3);
  b.add_clip("reference", "keyboard", "m", only);
  const Manifest m = load_manifest(b.write_manifest());
  const EmbeddingSet set = collect_set(m, {"reference", std::string("keyboard"), "m"});
  EXPECT_EQ(set.frames, only.cast<double>());
  EXPECT_EQ(set.set_id, "reference/keyboard");
}

TEST(CollectSet, FullDcaseShapedReferenceHas700Members) {
  TempDir dir;
  CorpusBuilder b(dir.path());
  b.add_model("vggish", 2, 1.0);
  FrameMatrix tiny = FrameMatrix::Ones(1, 2);
  for (const auto& c : default_categories()) {
    for (int i = 0; i < 100; ++i) b.add_clip("reference", c, "vggish", tiny);
  }
  const Manifest m = load_manifest(b.write_manifest());
  EXPECT_EQ(collect_set(m, {"reference", std::nullopt, "vggish"}).member_count, 700u);
}

TEST(CollectSet, ErrorsNameTheFilterAndCatchMixedDims) {
  TempDir dir;
  CorpusBuilder b(dir.path());
  b.add_model("m", 2, 1.0);
  b.add_clip("reference", "rain", "m", random_frames(2, 2, 1));
  b.add_clip("reference", "rain", "m", random_frames(2, 3, 2));
  const Manifest m = load_manifest(b.write_manifest());
  try {
    collect_set(m, {"ghost", std::nullopt, "m"});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
  EXPECT_THROW(collect_set(m, {"reference", std::nullopt, "m"}), DimensionError);
}

}  // namespace
}  // namespace fadkit
