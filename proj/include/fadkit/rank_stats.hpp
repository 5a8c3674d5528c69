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

// Spearman correlation between FAD^-1 and perceptual ratings, with a
// noise-injection estimate of its uncertainty.

#ifndef FADKIT_RANK_STATS_HPP_
#define FADKIT_RANK_STATS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace fadkit {

struct RatingRow {
  std::string system;
  std::string category;
  double audio_quality = 0.0;
  double category_fit = 0.0;
};

// One mean score per (system, category) cell.
struct RatingsTable {
  std::vector<RatingRow> rows;
};

// Header must be exactly `system,category,audio_quality,category_fit`.
// Duplicate (system, category) pairs and non-finite scores are DataErrors.
RatingsTable parse_ratings_csv(std::istream& in);
RatingsTable load_ratings(const std::filesystem::path& path);

enum class Criterion { kAudioQuality, kCategoryFit };
std::string to_string(Criterion c);

inline constexpr const char* kOverallScope = "overall";

// Average ranks (1-based); tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of average ranks. Throws UndefinedResultError when
// either input has zero rank variance.
double spearman(std::span<const double> x, std::span<const double> y);

struct FadPoint {
  std::string system;
  std::string category;
  double fad = 0.0;
};

struct BootstrapConfig {
  double noise_std = 1.0;
  int reps = 100;
  std::uint64_t seed = 0;
};

struct Uncertainty {
  double mean_rho = 0.0;
  double std_rho = 0.0;  // population standard deviation over reps
  int reps = 0;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
};

struct CorrelationReport {
  double rho = 0.0;
  std::size_t n = 0;
  Criterion criterion = Criterion::kAudioQuality;
  std::string scope;
  // True when some FAD was 0 and negated FAD replaced FAD^-1.
  bool used_negated_fad = false;
  std::optional<Uncertainty> uncertainty;
};

// Spearman(FAD^-1, rating) over the rating cells in scope ("overall" or a
// category name). Cells are ordered by (system, category). Throws DataError
// naming any rated cell without a FAD.
CorrelationReport correlate(const std::vector<FadPoint>& fads, const RatingsTable& ratings,
                            Criterion criterion, const std::string& scope);

// Adds i.i.d. N(0, noise_std^2) noise to each rating per rep and returns
// mean / population std of the rep coefficients. Rep r draws from its own
// stream seeded by (seed, r).
Uncertainty bootstrap_uncertainty(const std::vector<FadPoint>& fads,
                                  const RatingsTable& ratings, Criterion criterion,
                                  const std::string& scope, const BootstrapConfig& config);

// correlate() followed by bootstrap_uncertainty().
CorrelationReport correlate_with_uncertainty(const std::vector<FadPoint>& fads,
                                             const RatingsTable& ratings,
                                             Criterion criterion, const std::string& scope,
                                             const BootstrapConfig& config);

// Standard normal quantile function; p must lie in (0, 1).
double normal_quantile(double p);

// Deterministic N(0, 1) stream: mt19937_64 seeded from splitmix64(seed, rep),
// uniforms on the open interval (0, 1) from the top 53 bits, then
// normal_quantile.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t rep);
  double next();

 private:
  std::mt19937_64 engine_;
};

}  // namespace fadkit

#endif  // FADKIT_RANK_STATS_HPP_
