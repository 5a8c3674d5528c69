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

#include "fadkit/category_map.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fadkit/errors.hpp"
#include "fadkit/moments.hpp"
#include "fadkit/parallel.hpp"
#include "fadkit/pca.hpp"

namespace fadkit {

MetaCategoryScheme MetaCategoryScheme::dcase() {
  MetaCategoryScheme s;
  s.assignments = {
      {"footstep", "Impact"},     {"gunshot", "Impact"},
      {"keyboard", "Impact"},     {"dog_bark", "Living"},
      {"sneeze_cough", "Living"}, {"moving_motor_vehicle", "Texture"},
      {"rain", "Texture"},
  };
  return s;
}

std::optional<std::string> MetaCategoryScheme::group_of(const std::string& category) const {
  const auto it = assignments.find(category);
  if (it == assignments.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> MetaCategoryScheme::groups() const {
  std::set<std::string> names;
  for (const auto& [category, group] : assignments) names.insert(group);
  return {names.begin(), names.end()};
}

MdsResult classical_mds(const Eigen::MatrixXd& distances, Eigen::Index out_dims) {
  const Eigen::Index k = distances.rows();
  if (distances.cols() != k) throw DimensionError("MDS input is not square");
  if (k < 2) throw InsufficientDataError("MDS needs at least 2 points");
  if (out_dims < 1) throw ConfigError("MDS output dims must be >= 1");
  if (!distances.allFinite()) throw NumericalError("MDS input has non-finite entries");
  const double scale = distances.cwiseAbs().maxCoeff();
  if ((distances - distances.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw NumericalError("MDS input is not symmetric");
  }
  if (distances.minCoeff() < 0.0) throw NumericalError("MDS input has negative distances");
  if (distances.diagonal().cwiseAbs().maxCoeff() > 0.0) {
    throw NumericalError("MDS input has a nonzero diagonal");
  }

  // B = -1/2 J D^2 J with J = I - 11^T / k.
  const Eigen::MatrixXd sq = distances.cwiseProduct(distances);
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(k, k) - Eigen::MatrixXd::Constant(k, k, 1.0 / static_cast<double>(k));
  Eigen::MatrixXd gram = -0.5 * centering * sq * centering;
  gram = 0.5 * (gram + gram.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) throw NumericalError("MDS eigensolver did not converge");
  const Eigen::VectorXd ascending = solver.eigenvalues();
  const double lambda_max = std::max(ascending.maxCoeff(), 0.0);
  const double floor = kMdsEigenFloor * lambda_max;

  MdsResult out;
  out.eigenvalues = ascending.reverse();
  for (Eigen::Index i = 0; i < k; ++i) {
    if (ascending(i) < -floor) out.truncated_negative_mass += -ascending(i);
  }

  const Eigen::Index used = std::min(out_dims, k);
  Eigen::MatrixXd axes(used, k);  // rows = eigenvectors, descending eigenvalue
  Eigen::VectorXd scales(used);
  for (Eigen::Index i = 0; i < used; ++i) {
    const Eigen::Index src = k - 1 - i;
    axes.row(i) = solver.eigenvectors().col(src).transpose();
    const double lambda = ascending(src);
    scales(i) = lambda > floor ? std::sqrt(lambda) : 0.0;
  }
  canonicalize_signs(axes);

  out.coords = Eigen::MatrixXd::Zero(k, out_dims);
  for (Eigen::Index i = 0; i < used; ++i) out.coords.col(i) = axes.row(i).transpose() * scales(i);
  const Eigen::RowVectorXd means = out.coords.colwise().mean();
  out.coords.rowwise() -= means;

  double residual = 0.0, total = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i + 1; j < k; ++j) {
      const double fitted = (out.coords.row(i) - out.coords.row(j)).norm();
      residual += (fitted - distances(i, j)) * (fitted - distances(i, j));
      total += distances(i, j) * distances(i, j);
    }
  }
  out.stress = total > 0.0 ? std::sqrt(residual / total) : 0.0;
  return out;
}

RegionGrid nearest_point_regions(const Eigen::MatrixXd& coords, const GridOptions& options) {
  if (options.nx < 1 || options.ny < 1) throw ConfigError("region grid must be at least 1x1");
  if (coords.rows() < 1 || coords.cols() < 2) {
    throw DimensionError("region grid needs 2D coordinates");
  }
  RegionGrid grid;
  grid.nx = options.nx;
  grid.ny = options.ny;
  const double x_lo = coords.col(0).minCoeff(), x_hi = coords.col(0).maxCoeff();
  const double y_lo = coords.col(1).minCoeff(), y_hi = coords.col(1).maxCoeff();
  const double span = std::max({x_hi - x_lo, y_hi - y_lo, 0.0});
  const double margin = span > 0.0 ? options.padding * span : 1.0;
  grid.x_min = x_lo - margin;
  grid.x_max = x_hi + margin;
  grid.y_min = y_lo - margin;
  grid.y_max = y_hi + margin;

  const double dx = (grid.x_max - grid.x_min) / grid.nx;
  const double dy = (grid.y_max - grid.y_min) / grid.ny;
  grid.nearest.resize(static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny));
  for (int iy = 0; iy < grid.ny; ++iy) {
    const double y = grid.y_min + (iy + 0.5) * dy;
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double x = grid.x_min + (ix + 0.5) * dx;
      int best = 0;
      double best_d2 = 0.0;
      for (Eigen::Index p = 0; p < coords.rows(); ++p) {
        const double ex = coords(p, 0) - x, ey = coords(p, 1) - y;
        const double d2 = ex * ex + ey * ey;
        if (p == 0 || d2 < best_d2) {
          best = static_cast<int>(p);
          best_d2 = d2;
        }
      }
      grid.nearest[static_cast<std::size_t>(iy) * grid.nx + ix] = best;
    }
  }
  return grid;
}

PairwiseFad category_distance_matrix(const Manifest& manifest, const std::string& model,
                                     const std::string& system) {
  const auto categories = manifest.categories_present(model, system);
  if (categories.size() < 2) {
    throw InsufficientDataError("system " + system + " has " +
                                std::to_string(categories.size()) +
                                " categories for model " + model + "; need at least 2");
  }
  std::vector<LabeledStats> sets(categories.size());
  parallel_for(categories.size(), [&](std::size_t i) {
    const EmbeddingSet set = collect_set(manifest, {system, categories[i], model});
    sets[i] = {categories[i], stats_from_matrix(set.frames)};
  });
  return pairwise_fad(sets);
}

CategoryMapResult map_from_distances(const PairwiseFad& distances,
                                     const MetaCategoryScheme& scheme,
                                     const GridOptions& grid) {
  const MdsResult mds = classical_mds(distances.distances, 2);
  CategoryMapResult out;
  out.labels = distances.labels;
  out.distances = distances.distances;
  out.coords = mds.coords;
  out.stress = mds.stress;
  out.truncated_negative_mass = mds.truncated_negative_mass;
  for (const auto& label : out.labels) {
    if (auto group = scheme.group_of(label)) out.meta.emplace(label, *group);
  }
  out.regions = nearest_point_regions(out.coords, grid);
  return out;
}

CategoryMapResult build_category_map(const Manifest& manifest, const std::string& model,
                                     const MapOptions& options) {
  return map_from_distances(category_distance_matrix(manifest, model, options.system),
                            options.scheme, options.grid);
}

nlohmann::json to_json(const CategoryMapResult& result) {
  using nlohmann::json;
  json j;
  j["labels"] = result.labels;
  std::vector<double> flat;
  for (Eigen::Index r = 0; r < result.distances.rows(); ++r) {
    for (Eigen::Index c = 0; c < result.distances.cols(); ++c) {
      flat.push_back(result.distances(r, c));
    }
  }
  j["distances"] = flat;
  json coords = json::array();
  for (Eigen::Index r = 0; r < result.coords.rows(); ++r) {
    coords.push_back({result.coords(r, 0), result.coords(r, 1)});
  }
  j["coords"] = coords;
  j["meta"] = result.meta;
  j["stress"] = result.stress;
  j["truncated_negative_mass"] = result.truncated_negative_mass;
  j["regions"] = {{"x_min", result.regions.x_min}, {"x_max", result.regions.x_max},
                  {"y_min", result.regions.y_min}, {"y_max", result.regions.y_max},
                  {"nx", result.regions.nx},       {"ny", result.regions.ny},
                  {"nearest", result.regions.nearest}};
  return j;
}

}  // namespace fadkit
