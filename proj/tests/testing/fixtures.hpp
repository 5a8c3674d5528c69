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

// Temporary directories and synthetic manifest corpora for tests.

#ifndef FADKIT_TESTS_TESTING_FIXTURES_HPP_
#define FADKIT_TESTS_TESTING_FIXTURES_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fadkit/embedding_store.hpp"
#include "fadkit/rank_stats.hpp"

namespace fadkit::testing {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Writes .emb files under <root>/emb and a manifest.json at <root>.
class CorpusBuilder {
 public:
  explicit CorpusBuilder(std::filesystem::path root);

  void add_model(const std::string& name, std::uint32_t dim, double rate_hz);
  void set_categories(std::vector<std::string> categories);
  std::string add_clip(const std::string& system, const std::string& category,
                       const std::string& model, const FrameMatrix& frames,
                       double rate_hz = 1.0);
  std::filesystem::path write_manifest() const;

 private:
  std::filesystem::path root_;
  Manifest manifest_;
  std::map<std::string, int> counters_;
};

struct NoisedCorpus {
  std::filesystem::path manifest;
  std::vector<std::string> systems;   // excludes "reference"
  std::vector<double> noise_levels;   // per system, strictly increasing
};

// Reference clips per category are drawn from distinct Gaussians; system s
// repeats the reference frames plus N(0, noise_levels[s]^2) noise.
NoisedCorpus make_noised_corpus(const std::filesystem::path& root, int systems,
                                const std::vector<std::string>& categories, int dim,
                                int clips_per_cell, int frames_per_clip, std::uint64_t seed);

void write_ratings_csv(const std::filesystem::path& path, const std::vector<RatingRow>& rows);

std::string read_text(const std::filesystem::path& path);

}  // namespace fadkit::testing

#endif  // FADKIT_TESTS_TESTING_FIXTURES_HPP_
