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

// Binary embedding files (.emb), the JSON manifest that indexes them, and
// assembly of manifest entries into concatenated embedding sets.
//
// .emb layout (all little-endian):
//   0..3    "FEMB"
//   4..7    version (u32, currently 1)
//   8..11   dim (u32)
//   12..15  frame_count (u32)
//   16..23  frame_rate_hz (f64)
//   24..    frame_count * dim f32, row-major

#ifndef FADKIT_EMBEDDING_STORE_HPP_
#define FADKIT_EMBEDDING_STORE_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fadkit {

using FrameMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr char kEmbeddingMagic[4] = {'F', 'E', 'M', 'B'};
inline constexpr std::uint32_t kEmbeddingVersion = 1;
inline constexpr std::size_t kEmbeddingHeaderBytes = 24;

struct EmbeddingHeader {
  std::uint32_t version = kEmbeddingVersion;
  std::uint32_t dim = 0;
  std::uint32_t frame_count = 0;
  double frame_rate_hz = 0.0;
};

struct EmbeddingMatrix {
  EmbeddingHeader header;
  FrameMatrix frames;  // frame_count x dim
};

// Throws NonFiniteError naming the first offending (row, col), or
// DataError for empty input / non-positive rate.
void write_embeddings(const FrameMatrix& frames, double frame_rate_hz,
                      const std::filesystem::path& path);

EmbeddingMatrix read_embeddings(const std::filesystem::path& path);

// Reads and validates only the 24-byte header.
EmbeddingHeader read_embedding_header(const std::filesystem::path& path);

// Number of analysis windows of length `window_seconds`, advanced by
// `hop_seconds`, that fit in a clip of `clip_seconds`.
std::int64_t expected_frame_count(double clip_seconds, double window_seconds,
                                  double hop_seconds);

struct ModelInfo {
  std::uint32_t expected_dim = 0;
  double expected_rate_hz = 0.0;
};

struct ManifestEntry {
  std::string clip_id;
  std::filesystem::path path;  // resolved against the manifest directory
  std::string category;
  std::string system;
  std::string model;
};

inline constexpr const char* kReferenceSystem = "reference";

// The seven DCASE 2023 Task 7 labels, used when a manifest does not declare
// its own category set.
const std::vector<std::string>& default_categories();

struct Manifest {
  std::map<std::string, ModelInfo> models;
  std::vector<std::string> categories;  // closed set, declaration order
  std::vector<ManifestEntry> entries;

  // Systems in first-appearance order.
  std::vector<std::string> systems(const std::string& model) const;
  // Categories of `categories` that have at least one entry for the
  // given model (and system, if non-empty), in declaration order.
  std::vector<std::string> categories_present(const std::string& model,
                                              const std::string& system = {}) const;
};

// Parses and validates structure: unique clip ids, known models, categories
// drawn from the declared set. Relative entry paths are resolved against
// `base_dir`. Does not open embedding files.
Manifest parse_manifest(const std::string& json_text,
                        const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);

// Writes entry paths relative to the manifest's directory when possible.
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

struct ClipIssue {
  std::string clip_id;
  std::string message;
};

// Opens every entry's header and checks it against the model registry.
// Returns one issue per failing clip; leaves exclusion to the caller.
std::vector<ClipIssue> validate_manifest_files(const Manifest& manifest);

struct SetFilter {
  std::string system;
  std::optional<std::string> category;
  std::string model;

  std::string describe() const;
};

struct EmbeddingSet {
  std::string set_id;
  Eigen::MatrixXd frames;  // rows = concatenated frames of member clips
  std::size_t member_count = 0;
};

// Concatenates the frames of matching clips in manifest order.
EmbeddingSet collect_set(const Manifest& manifest, const SetFilter& filter);

}  // namespace fadkit

#endif  // FADKIT_EMBEDDING_STORE_HPP_
