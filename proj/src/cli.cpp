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

#include "fadkit/cli.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "fadkit/category_map.hpp"
#include "fadkit/errors.hpp"
#include "fadkit/moments.hpp"
#include "fadkit/parallel.hpp"
#include "fadkit/version.hpp"

namespace fadkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

json report_header(const RunConfig& config) {
  json j;
  j["toolkit_version"] = kToolkitVersion;
  j["config_hash"] = config.hash();
  j["provenance"] = provenance(config);
  return j;
}

json fad_to_json(const FadResult& r) {
  json j = {{"ref_id", r.ref_id}, {"eval_id", r.eval_id}, {"model", r.model},
            {"dim", r.dim},       {"fad", r.value},      {"clamped", r.clamped}};
  j["fad_inverse"] = r.value > 0.0 ? json(1.0 / r.value) : json(nullptr);
  return j;
}

json report_to_json(const CorrelationReport& r) {
  json j = {{"criterion", to_string(r.criterion)},
            {"scope", r.scope},
            {"n", r.n},
            {"rho", r.rho},
            {"used_negated_fad", r.used_negated_fad}};
  if (r.uncertainty) {
    j["uncertainty"] = {{"mean_rho", r.uncertainty->mean_rho},
                        {"std_rho", r.uncertainty->std_rho},
                        {"reps", r.uncertainty->reps},
                        {"noise_std", r.uncertainty->noise_std},
                        {"seed", r.uncertainty->seed}};
  }
  return j;
}

// Frames of one set, optionally projected, reduced to Gaussian stats.
GaussianStats set_stats(const Manifest& manifest, const SetFilter& filter,
                        const std::optional<PcaProjection>& projection) {
  const EmbeddingSet set = collect_set(manifest, filter);
  try {
    if (projection) return stats_from_matrix(apply_pca(*projection, set.frames));
    return stats_from_matrix(set.frames);
  } catch (const InsufficientDataError& e) {
    throw InsufficientDataError("set " + set.set_id + ": " + e.what());
  }
}

std::optional<PcaProjection> fit_model_projection(const Manifest& manifest,
                                                  const std::string& model,
                                                  std::optional<int> pca_k) {
  if (!pca_k) return std::nullopt;
  const auto dim = static_cast<int>(manifest.models.at(model).expected_dim);
  if (*pca_k < 1 || *pca_k > dim) {
    throw ConfigError("--reduce " + std::to_string(*pca_k) + " is outside [1, " +
                      std::to_string(dim) + "] for model " + model);
  }
  std::vector<Eigen::MatrixXd> parts;
  Eigen::Index rows = 0;
  for (const auto& system : manifest.systems(model)) {
    parts.push_back(collect_set(manifest, {system, std::nullopt, model}).frames);
    rows += parts.back().rows();
  }
  Eigen::MatrixXd pooled(rows, dim);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    pooled.middleRows(at, p.rows()) = p;
    at += p.rows();
  }
  return fit_pca(pooled, *pca_k);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> rated_categories(const RatingsTable& ratings) {
  std::set<std::string> names;
  for (const auto& r : ratings.rows) names.insert(r.category);
  return {names.begin(), names.end()};
}

std::filesystem::path write_correlation_report(const RunConfig& config,
                                               const std::vector<FadPoint>& points) {
  const RatingsTable ratings = load_ratings(*config.ratings_path);
  std::vector<std::string> scopes;
  if (config.category) {
    scopes.push_back(*config.category);
  } else {
    scopes.push_back(kOverallScope);
    for (const auto& c : rated_categories(ratings)) scopes.push_back(c);
  }

  json doc = report_header(config);
  doc["reports"] = json::array();
  for (Criterion criterion : {Criterion::kAudioQuality, Criterion::kCategoryFit}) {
    for (const auto& scope : scopes) {
      doc["reports"].push_back(report_to_json(
          correlate_with_uncertainty(points, ratings, criterion, scope, config.bootstrap)));
    }
  }
  ensure_dir(config.output_dir);
  const fs::path path = config.output_dir / "correlation.json";
  write_text(path, doc.dump(2) + "\n");
  return path;
}

std::filesystem::path write_fad_outputs(const RunConfig& config, const FadTable& table) {
  ensure_dir(config.output_dir);
  std::vector<FadResult> rows = table.overall;
  rows.insert(rows.end(), table.per_category.begin(), table.per_category.end());

  std::ostringstream csv;
  write_fad_csv(rows, csv);
  const fs::path csv_path = config.output_dir / "fad.csv";
  write_text(csv_path, csv.str());

  json doc = report_header(config);
  doc["results"] = json::array();
  for (const auto& r : rows) doc["results"].push_back(fad_to_json(r));
  write_text(config.output_dir / "fad.json", doc.dump(2) + "\n");
  return csv_path;
}

std::string sanitize_file_stem(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    if (c == '/' || c == '\\' || c == ':') c = '_';
  }
  return out;
}

}  // namespace

json RunConfig::to_json() const {
  json j;
  j["manifest"] = manifest_path.generic_string();
  j["ratings"] = ratings_path ? json(ratings_path->generic_string()) : json(nullptr);
  j["fad_csv"] = fad_csv_path ? json(fad_csv_path->generic_string()) : json(nullptr);
  j["model"] = model;
  j["reduce"] = pca_k ? json(*pca_k) : json(nullptr);
  j["noise_std"] = bootstrap.noise_std;
  j["reps"] = bootstrap.reps;
  j["seed"] = bootstrap.seed;
  j["out"] = output_dir.generic_string();
  j["system"] = system ? json(*system) : json(nullptr);
  j["category"] = category ? json(*category) : json(nullptr);
  return j;
}

std::string RunConfig::hash() const {
  json j = to_json();
  j.erase("out");
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

void apply_config_json(const json& doc, RunConfig& config) {
  if (!doc.is_object()) throw ConfigError("config file must be a JSON object");
  static const std::set<std::string> known = {"manifest", "ratings", "fad_csv", "model",
                                              "reduce",   "noise_std", "reps", "seed",
                                              "out",      "system",  "category"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  try {
    if (doc.contains("manifest")) config.manifest_path = doc["manifest"].get<std::string>();
    if (doc.contains("ratings")) config.ratings_path = doc["ratings"].get<std::string>();
    if (doc.contains("fad_csv")) config.fad_csv_path = doc["fad_csv"].get<std::string>();
    if (doc.contains("model")) config.model = doc["model"].get<std::string>();
    if (doc.contains("reduce")) config.pca_k = doc["reduce"].get<int>();
    if (doc.contains("noise_std")) config.bootstrap.noise_std = doc["noise_std"].get<double>();
    if (doc.contains("reps")) config.bootstrap.reps = doc["reps"].get<int>();
    if (doc.contains("seed")) config.bootstrap.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("out")) config.output_dir = doc["out"].get<std::string>();
    if (doc.contains("system")) config.system = doc["system"].get<std::string>();
    if (doc.contains("category")) config.category = doc["category"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

void validate_config(const RunConfig& config, bool needs_manifest, bool needs_ratings) {
  if (needs_manifest) {
    if (config.manifest_path.empty()) throw ConfigError("--manifest is required");
    if (!fs::exists(config.manifest_path)) {
      throw ConfigError("manifest not found: " + config.manifest_path.string());
    }
  }
  if (needs_ratings && !config.ratings_path) throw ConfigError("--ratings is required");
  if (config.ratings_path && !fs::exists(*config.ratings_path)) {
    throw ConfigError("ratings file not found: " + config.ratings_path->string());
  }
  if (config.fad_csv_path && !fs::exists(*config.fad_csv_path)) {
    throw ConfigError("FAD CSV not found: " + config.fad_csv_path->string());
  }
  if (config.pca_k && *config.pca_k < 1) throw ConfigError("--reduce must be >= 1");
  if (config.bootstrap.reps < 1) throw ConfigError("--reps must be >= 1");
  if (!(config.bootstrap.noise_std >= 0.0)) throw ConfigError("--noise-std must be >= 0");
}

json provenance(const RunConfig& config) {
  return {
      {"toolkit_version", kToolkitVersion},
      {"config_hash", config.hash()},
      {"covariance_denominator", "n-1"},
      {"frame_pooling", "frames of all clips in a set are concatenated"},
      {"pca_fit_population",
       config.pca_k ? "union of reference and evaluation sets" : "none"},
      {"pca_k", config.pca_k ? json(*config.pca_k) : json(nullptr)},
      {"mds_variant", "classical (Torgerson), FAD used directly as dissimilarity"},
      {"bootstrap_noise_target", "ratings"},
      {"bootstrap_std", "population"},
      {"rank_ties", "average"},
  };
}

std::vector<FadPoint> FadTable::points() const { return points_from_rows(per_category); }

std::vector<FadPoint> points_from_rows(const std::vector<FadResult>& rows) {
  std::vector<FadPoint> points;
  for (const auto& r : rows) {
    const auto slash = r.eval_id.rfind('/');
    if (slash == std::string::npos) continue;
    points.push_back({r.eval_id.substr(0, slash), r.eval_id.substr(slash + 1), r.value});
  }
  return points;
}

std::string resolve_model(const Manifest& manifest, const RunConfig& config) {
  if (config.model.empty()) {
    if (manifest.models.size() == 1) return manifest.models.begin()->first;
    throw ConfigError("manifest declares several models; pass --model");
  }
  if (!manifest.models.count(config.model)) {
    throw ConfigError("model '" + config.model + "' is not declared in the manifest");
  }
  return config.model;
}

FadTable compute_fad_table(const Manifest& manifest, const RunConfig& config) {
  const std::string model = resolve_model(manifest, config);
  const auto systems = manifest.systems(model);
  if (std::find(systems.begin(), systems.end(), kReferenceSystem) == systems.end()) {
    throw DataError("manifest has no '" + std::string(kReferenceSystem) +
                    "' entries for model " + model);
  }
  std::vector<std::string> eval_systems;
  for (const auto& s : systems) {
    if (s != kReferenceSystem && (!config.system || s == *config.system)) {
      eval_systems.push_back(s);
    }
  }
  if (eval_systems.empty()) {
    throw DataError(config.system ? "system '" + *config.system + "' not found in manifest"
                                  : std::string("no evaluation systems in manifest"));
  }
  std::vector<std::string> categories;
  for (const auto& c : manifest.categories_present(model, kReferenceSystem)) {
    if (!config.category || c == *config.category) categories.push_back(c);
  }
  if (config.category && categories.empty()) {
    throw DataError("category '" + *config.category + "' has no reference clips");
  }

  const auto projection = fit_model_projection(manifest, model, config.pca_k);

  // Every distinct set is fitted once; order is fixed before any work runs.
  std::vector<SetFilter> filters;
  std::map<std::string, std::size_t> index_of;
  auto add = [&](const SetFilter& f) {
    const auto id = f.describe();
    if (!index_of.count(id)) {
      index_of.emplace(id, filters.size());
      filters.push_back(f);
    }
    return index_of.at(id);
  };
  std::vector<std::pair<std::size_t, std::size_t>> overall_pairs, category_pairs;
  const std::size_t ref_all = add({kReferenceSystem, std::nullopt, model});
  for (const auto& s : eval_systems) {
    overall_pairs.emplace_back(ref_all, add({s, std::nullopt, model}));
  }
  for (const auto& s : eval_systems) {
    for (const auto& c : categories) {
      category_pairs.emplace_back(add({kReferenceSystem, c, model}), add({s, c, model}));
    }
  }

  std::vector<GaussianStats> stats(filters.size());
  parallel_for(filters.size(), [&](std::size_t i) {
    stats[i] = set_stats(manifest, filters[i], projection);
  });

  auto evaluate = [&](const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
    std::vector<FadResult> out(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
      const auto [r, t] = pairs[i];
      out[i] = frechet_distance(stats[r], stats[t],
                                {filters[r].describe(), filters[t].describe(), model});
    });
    return out;
  };
  FadTable table;
  table.overall = evaluate(overall_pairs);
  table.per_category = evaluate(category_pairs);
  return table;
}

fs::path cmd_fad(const RunConfig& config) {
  validate_config(config, true, false);
  const Manifest manifest = load_manifest(config.manifest_path);
  return write_fad_outputs(config, compute_fad_table(manifest, config));
}

fs::path cmd_correlate(const RunConfig& config) {
  validate_config(config, !config.fad_csv_path, true);
  std::vector<FadPoint> points;
  if (config.fad_csv_path) {
    std::ifstream in(*config.fad_csv_path);
    if (!in) throw ConfigError("cannot open " + config.fad_csv_path->string());
    points = points_from_rows(read_fad_csv(in));
  } else {
    points = compute_fad_table(load_manifest(config.manifest_path), config).points();
  }
  return write_correlation_report(config, points);
}

fs::path cmd_reduce(const RunConfig& config) {
  validate_config(config, true, false);
  Manifest manifest = load_manifest(config.manifest_path);
  const std::string model = resolve_model(manifest, config);
  const int k = config.pca_k.value_or(kDefaultPcaDim);
  const auto projection = fit_model_projection(manifest, model, k);

  ensure_dir(config.output_dir);
  const fs::path emb_dir = config.output_dir / "embeddings";
  ensure_dir(emb_dir);
  for (auto& entry : manifest.entries) {
    if (entry.model != model) continue;
    const EmbeddingMatrix clip = read_embeddings(entry.path);
    const FrameMatrix reduced =
        apply_pca(*projection, clip.frames.cast<double>()).cast<float>();
    const fs::path target = emb_dir / (sanitize_file_stem(entry.clip_id) + ".emb");
    write_embeddings(reduced, clip.header.frame_rate_hz, target);
    entry.path = fs::absolute(target);
  }
  manifest.models[model].expected_dim = static_cast<std::uint32_t>(k);
  write_projection(*projection, config.output_dir / (sanitize_file_stem(model) + ".fpca"));

  const fs::path manifest_out = config.output_dir / "manifest.json";
  save_manifest(manifest, manifest_out);
  return manifest_out;
}

fs::path cmd_map(const RunConfig& config) {
  validate_config(config, true, false);
  const Manifest manifest = load_manifest(config.manifest_path);
  const std::string model = resolve_model(manifest, config);
  MapOptions options;
  options.system = config.system.value_or(kReferenceSystem);

  CategoryMapResult result;
  if (config.pca_k) {
    const auto projection = fit_model_projection(manifest, model, config.pca_k);
    const auto categories = manifest.categories_present(model, options.system);
    if (categories.size() < 2) {
      throw InsufficientDataError("system " + options.system +
                                  " needs at least 2 categories to map");
    }
    std::vector<LabeledStats> sets(categories.size());
    parallel_for(categories.size(), [&](std::size_t i) {
      sets[i] = {categories[i],
                 set_stats(manifest, {options.system, categories[i], model}, projection)};
    });
    result = map_from_distances(pairwise_fad(sets), options.scheme, options.grid);
  } else {
    result = build_category_map(manifest, model, options);
  }

  json doc = report_header(config);
  doc["model"] = model;
  doc["system"] = options.system;
  doc.update(to_json(result));
  ensure_dir(config.output_dir);
  const fs::path path = config.output_dir / "map.json";
  write_text(path, doc.dump(2) + "\n");
  return path;
}

std::vector<fs::path> cmd_pipeline(const RunConfig& config) {
  validate_config(config, true, false);
  const Manifest manifest = load_manifest(config.manifest_path);
  const FadTable table = compute_fad_table(manifest, config);
  std::vector<fs::path> outputs{write_fad_outputs(config, table)};
  if (config.ratings_path) outputs.push_back(write_correlation_report(config, table.points()));
  outputs.push_back(cmd_map(config));
  return outputs;
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->kind()) {
      case ErrorKind::kConfig: return kExitConfig;
      case ErrorKind::kData: return kExitData;
      case ErrorKind::kNumerical: return kExitNumerical;
    }
  }
  return kExitData;
}

namespace {

struct FlagValues {
  std::string config_file;
  std::string manifest, ratings, fad_csv, model, out, system, category;
  std::optional<int> reduce;
  std::optional<double> noise_std;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
};

void add_flags(CLI::App* cmd, FlagValues& f) {
  cmd->add_option("--config", f.config_file, "JSON config file (flags take precedence)");
  cmd->add_option("--manifest", f.manifest, "manifest.json describing the embedding files");
  cmd->add_option("--ratings", f.ratings, "ratings CSV (system,category,audio_quality,category_fit)");
  cmd->add_option("--fad-csv", f.fad_csv, "precomputed fad.csv to correlate instead of a manifest");
  cmd->add_option("--model", f.model, "embedding model name from the manifest");
  cmd->add_option("--reduce", f.reduce, "project embeddings onto the top k principal components");
  cmd->add_option("--noise-std", f.noise_std, "std of rating noise for the uncertainty estimate");
  cmd->add_option("--reps", f.reps, "noise repetitions");
  cmd->add_option("--seed", f.seed, "seed for the noise generator");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--system", f.system, "evaluation system (fad/correlate) or system to map");
  cmd->add_option("--category", f.category, "restrict to one category");
}

RunConfig resolve_config(const FlagValues& f) {
  RunConfig config;
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw ConfigError("cannot open config file " + f.config_file);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
    }
    apply_config_json(doc, config);
  }
  if (!f.manifest.empty()) config.manifest_path = f.manifest;
  if (!f.ratings.empty()) config.ratings_path = f.ratings;
  if (!f.fad_csv.empty()) config.fad_csv_path = f.fad_csv;
  if (!f.model.empty()) config.model = f.model;
  if (f.reduce) config.pca_k = *f.reduce;
  if (f.noise_std) config.bootstrap.noise_std = *f.noise_std;
  if (f.reps) config.bootstrap.reps = *f.reps;
  if (f.seed) config.bootstrap.seed = *f.seed;
  if (!f.out.empty()) config.output_dir = f.out;
  if (!f.system.empty()) config.system = f.system;
  if (!f.category.empty()) config.category = f.category;
  return config;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frechet Audio Distance toolkit", "fadkit"};
  app.set_version_flag("--version", kToolkitVersion);
  app.require_subcommand(1);

  FlagValues flags;
  CLI::App* fad = app.add_subcommand("fad", "overall and per-category FAD against the reference");
  CLI::App* correlate = app.add_subcommand("correlate", "Spearman correlation of FAD^-1 with ratings");
  CLI::App* reduce = app.add_subcommand("reduce", "PCA-reduce embedding files");
  CLI::App* map = app.add_subcommand("map", "2D MDS map of inter-category FAD");
  CLI::App* pipeline = app.add_subcommand("pipeline", "fad, then correlate (with --ratings), then map");
  for (auto* cmd : {fad, correlate, reduce, map, pipeline}) add_flags(cmd, flags);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const RunConfig config = resolve_config(flags);
    if (fad->parsed()) {
      out << "wrote " << cmd_fad(config).string() << '\n';
    } else if (correlate->parsed()) {
      out << "wrote " << cmd_correlate(config).string() << '\n';
    } else if (reduce->parsed()) {
      out << "wrote " << cmd_reduce(config).string() << '\n';
    } else if (map->parsed()) {
      out << "wrote " << cmd_map(config).string() << '\n';
    } else if (pipeline->parsed()) {
      for (const auto& p : cmd_pipeline(config)) out << "wrote " << p.string() << '\n';
    }
  } catch (const std::exception& e) {
    err << "fadkit: error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitOk;
}

}  // namespace fadkit
