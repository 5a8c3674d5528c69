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

#include "testing/fixtures.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

namespace fadkit::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("fadkit-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

CorpusBuilder::CorpusBuilder(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "emb");
  manifest_.categories = default_categories();
}

void CorpusBuilder::add_model(const std::string& name, std::uint32_t dim, double rate_hz) {
  manifest_.models[name] = {dim, rate_hz};
}

void CorpusBuilder::set_categories(std::vector<std::string> categories) {
  manifest_.categories = std::move(categories);
}

std::string CorpusBuilder::add_clip(const std::string& system, const std::string& category,
                                    const std::string& model, const FrameMatrix& frames,
                                    double rate_hz) {
  const std::string key = system + "-" + category + "-" + model;
  const std::string clip_id = key + "-" + std::to_string(counters_[key]++);
  const fs::path path = root_ / "emb" / (clip_id + ".emb");
  write_embeddings(frames, rate_hz, path);
  manifest_.entries.push_back({clip_id, fs::absolute(path), category, system, model});
  return clip_id;
}

fs::path CorpusBuilder::write_manifest() const {
  const fs::path path = root_ / "manifest.json";
  save_manifest(manifest_, path);
  return path;
}

NoisedCorpus make_noised_corpus(const fs::path& root, int systems,
                                const std::vector<std::string>& categories, int dim,
                                int clips_per_cell, int frames_per_clip, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  CorpusBuilder builder(root);
  builder.add_model("synthetic", static_cast<std::uint32_t>(dim), 1.0);
  builder.set_categories(categories);

  NoisedCorpus corpus;
  for (int s = 0; s < systems; ++s) {
    corpus.systems.push_back("system" + std::to_string(s + 1));
    corpus.noise_levels.push_back(0.25 * (s + 1));
  }

  for (std::size_t c = 0; c < categories.size(); ++c) {
    Eigen::VectorXd center(dim);
    Eigen::VectorXd spread(dim);
    for (int i = 0; i < dim; ++i) {
      center(i) = 2.0 * normal(rng);
      spread(i) = 0.5 + std::abs(normal(rng));
    }
    for (int clip = 0; clip < clips_per_cell; ++clip) {
      FrameMatrix reference(frames_per_clip, dim);
      for (int r = 0; r < frames_per_clip; ++r) {
        for (int i = 0; i < dim; ++i) {
          reference(r, i) = static_cast<float>(center(i) + spread(i) * normal(rng));
        }
      }
      builder.add_clip(kReferenceSystem, categories[c], "synthetic", reference);
      for (int s = 0; s < systems; ++s) {
        FrameMatrix noised = reference;
        for (int r = 0; r < frames_per_clip; ++r) {
          for (int i = 0; i < dim; ++i) {
            noised(r, i) += static_cast<float>(corpus.noise_levels[s] * normal(rng));
          }
        }
        builder.add_clip(corpus.systems[s], categories[c], "synthetic", noised);
      }
    }
  }
  corpus.manifest = builder.write_manifest();
  return corpus;
}

void write_ratings_csv(const fs::path& path, const std::vector<RatingRow>& rows) {
  std::ofstream out(path);
  out << "system,category,audio_quality,category_fit\n";
  out.precision(17);
  for (const auto& r : rows) {
    out << r.system << ',' << r.category << ',' << r.audio_quality << ',' << r.category_fit
        << '\n';
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fadkit::testing
