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

#include "fadkit/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <sstream>
#include <utility>

#include <boost/math/special_functions/erf.hpp>

#include "fadkit/errors.hpp"
#include "fadkit/parallel.hpp"

namespace fadkit {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  return s;
}

double parse_score(const std::string& text, std::size_t line_no) {
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw DataError("ratings line " + std::to_string(line_no) + ": '" + text +
                    "' is not a number");
  }
  if (!std::isfinite(v)) {
    throw DataError("ratings line " + std::to_string(line_no) + ": non-finite score");
  }
  return v;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct ScopedPairs {
  std::vector<double> predictor;  // FAD^-1, or -FAD when some FAD is 0
  std::vector<double> ratings;
  bool negated = false;
};

ScopedPairs gather(const std::vector<FadPoint>& fads, const RatingsTable& ratings,
                   Criterion criterion, const std::string& scope) {
  std::map<std::pair<std::string, std::string>, double> fad_by_cell;
  for (const auto& f : fads) {
    if (!std::isfinite(f.fad) || f.fad < 0.0) {
      throw DataError("invalid FAD for (" + f.system + ", " + f.category + ")");
    }
    if (!fad_by_cell.emplace(std::make_pair(f.system, f.category), f.fad).second) {
      throw DataError("duplicate FAD for (" + f.system + ", " + f.category + ")");
    }
  }

  std::vector<const RatingRow*> rows;
  for (const auto& r : ratings.rows) {
    if (scope == kOverallScope || r.category == scope) rows.push_back(&r);
  }
  std::sort(rows.begin(), rows.end(), [](const RatingRow* a, const RatingRow* b) {
    return std::tie(a->system, a->category) < std::tie(b->system, b->category);
  });
  if (rows.size() < 2) {
    throw InsufficientDataError("scope '" + scope + "' has " + std::to_string(rows.size()) +
                                " rated cells; need at least 2");
  }

  ScopedPairs out;
  std::vector<double> fad_values;
  for (const auto* r : rows) {
    const auto it = fad_by_cell.find({r->system, r->category});
    if (it == fad_by_cell.end()) {
      throw DataError("no FAD for rated cell (" + r->system + ", " + r->category + ")");
    }
    fad_values.push_back(it->second);
    out.ratings.push_back(criterion == Criterion::kAudioQuality ? r->audio_quality
                                                                : r->category_fit);
  }
  out.negated = std::any_of(fad_values.begin(), fad_values.end(),
                            [](double v) { return v == 0.0; });
  for (double v : fad_values) out.predictor.push_back(out.negated ? -v : 1.0 / v);
  return out;
}

}  // namespace

RatingsTable parse_ratings_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      strip(line) != "system,category,audio_quality,category_fit") {
    throw DataError("ratings CSV header must be system,category,audio_quality,category_fit");
  }
  RatingsTable table;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) {
      throw DataError("ratings line " + std::to_string(line_no) + ": expected 4 fields");
    }
    RatingRow row{strip(fields[0]), strip(fields[1]), parse_score(strip(fields[2]), line_no),
                  parse_score(strip(fields[3]), line_no)};
    if (!seen.emplace(row.system, row.category).second) {
      throw DataError("ratings line " + std::to_string(line_no) + ": duplicate cell (" +
                      row.system + ", " + row.category + ")");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

RatingsTable load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open ratings file " + path.string());
  return parse_ratings_csv(in);
}

std::string to_string(Criterion c) {
  return c == Criterion::kAudioQuality ? "audio_quality" : "category_fit";
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) share rank mean((i+1)..j).
    const double shared = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = shared;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DimensionError("spearman: inputs differ in length");
  }
  if (x.size() < 2) throw InsufficientDataError("spearman needs n >= 2");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw NonFiniteError("spearman: non-finite input at index " + std::to_string(i));
    }
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(rx.size());
  // Mean rank is (n + 1) / 2 regardless of ties.
  const double mean = 0.5 * (n + 1.0);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedResultError("spearman is undefined for a constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationReport correlate(const std::vector<FadPoint>& fads, const RatingsTable& ratings,
                            Criterion criterion, const std::string& scope) {
  const ScopedPairs pairs = gather(fads, ratings, criterion, scope);
  CorrelationReport report;
  report.rho = spearman(pairs.predictor, pairs.ratings);
  report.n = pairs.ratings.size();
  report.criterion = criterion;
  report.scope = scope;
  report.used_negated_fad = pairs.negated;
  return report;
}

Uncertainty bootstrap_uncertainty(const std::vector<FadPoint>& fads,
                                  const RatingsTable& ratings, Criterion criterion,
                                  const std::string& scope, const BootstrapConfig& config) {
  if (config.reps < 1) throw ConfigError("bootstrap reps must be >= 1");
  if (!(config.noise_std >= 0.0) || !std::isfinite(config.noise_std)) {
    throw ConfigError("bootstrap noise_std must be finite and >= 0");
  }
  const ScopedPairs pairs = gather(fads, ratings, criterion, scope);
  const auto reps = static_cast<std::size_t>(config.reps);

  std::vector<double> rhos(reps);
  parallel_for(reps, [&](std::size_t rep) {
    NormalStream noise(config.seed, rep);
    std::vector<double> noisy = pairs.ratings;
    for (double& v : noisy) v += config.noise_std * noise.next();
    rhos[rep] = spearman(pairs.predictor, noisy);
  });

  // Shifted by the first coefficient so identical reps give exactly zero spread.
  const double anchor = rhos.front();
  double offset = 0.0;
  for (double r : rhos) offset += r - anchor;
  const double mean = anchor + offset / static_cast<double>(reps);
  double squares = 0.0;
  for (double r : rhos) squares += (r - mean) * (r - mean);

  Uncertainty u;
  u.mean_rho = mean;
  u.std_rho = std::sqrt(squares / static_cast<double>(reps));
  u.reps = config.reps;
  u.noise_std = config.noise_std;
  u.seed = config.seed;
  return u;
}

CorrelationReport correlate_with_uncertainty(const std::vector<FadPoint>& fads,
                                             const RatingsTable& ratings,
                                             Criterion criterion, const std::string& scope,
                                             const BootstrapConfig& config) {
  CorrelationReport report = correlate(fads, ratings, criterion, scope);
  report.uncertainty = bootstrap_uncertainty(fads, ratings, criterion, scope, config);
  return report;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw NumericalError("normal_quantile: p must lie in (0, 1)");
  }
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t rep)
    : engine_(splitmix64(seed ^ splitmix64(rep))) {}

double NormalStream::next() {
  const std::uint64_t bits = engine_() >> 11;
  const double u = (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  return normal_quantile(u);
}

}  // namespace fadkit
