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

// Command-line pipeline: fad, correlate, reduce, map and pipeline.
// run_cli() is the whole program; tools/fadkit_main.cpp only forwards argv.

#ifndef FADKIT_CLI_HPP_
#define FADKIT_CLI_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fadkit/embedding_store.hpp"
#include "fadkit/frechet.hpp"
#include "fadkit/pca.hpp"
#include "fadkit/rank_stats.hpp"
#include "json.hpp"

namespace fadkit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

inline constexpr int kDefaultPcaDim = 128;
inline constexpr std::uint64_t kDefaultSeed = 42;

struct RunConfig {
  std::filesystem::path manifest_path;
  std::optional<std::filesystem::path> ratings_path;
  // Precomputed FAD CSV for `correlate`; skips FAD computation.
  std::optional<std::filesystem::path> fad_csv_path;
  std::string model;
  std::optional<int> pca_k;
  BootstrapConfig bootstrap{1.0, 100, kDefaultSeed};
  std::filesystem::path output_dir = "fadkit_out";
  // fad/correlate: restrict evaluation systems; map: the system to map.
  std::optional<std::string> system;
  std::optional<std::string> category;

  nlohmann::json to_json() const;
  // FNV-1a 64 of the canonical JSON form, as 16 hex digits.
  std::string hash() const;
};

// Fields present in `doc` override `config`.
void apply_config_json(const nlohmann::json& doc, RunConfig& config);

// Checks referenced paths and numeric ranges; throws ConfigError.
void validate_config(const RunConfig& config, bool needs_manifest, bool needs_ratings);

// Provenance block embedded in every report.
nlohmann::json provenance(const RunConfig& config);

struct FadTable {
  std::vector<FadResult> overall;       // one per evaluation system
  std::vector<FadResult> per_category;  // system-major, categories in declared order

  std::vector<FadPoint> points() const;
};

// Overall and per-category FAD of every evaluation system against the
// reference system. With pca_k set, frames are first projected onto the
// top pca_k components fitted on the union of all sets for the model.
FadTable compute_fad_table(const Manifest& manifest, const RunConfig& config);

// Splits "system/category" set ids from FAD CSV rows into points; rows
// without a category are skipped.
std::vector<FadPoint> points_from_rows(const std::vector<FadResult>& rows);

// Resolves config.model against the manifest (single model may be implied).
std::string resolve_model(const Manifest& manifest, const RunConfig& config);

// Each command writes into config.output_dir and returns the main output.
std::filesystem::path cmd_fad(const RunConfig& config);
std::filesystem::path cmd_correlate(const RunConfig& config);
std::filesystem::path cmd_reduce(const RunConfig& config);
std::filesystem::path cmd_map(const RunConfig& config);
std::vector<std::filesystem::path> cmd_pipeline(const RunConfig& config);

int exit_code_for(const std::exception& e);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fadkit

#endif  // FADKIT_CLI_HPP_
