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

// Inter-category FAD matrix, its classical (Torgerson) MDS embedding, and
// nearest-point region data for drawing a Voronoi map of the result.

#ifndef FADKIT_CATEGORY_MAP_HPP_
#define FADKIT_CATEGORY_MAP_HPP_

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fadkit/embedding_store.hpp"
#include "fadkit/frechet.hpp"
#include "json.hpp"

namespace fadkit {

struct MetaCategoryScheme {
  std::map<std::string, std::string> assignments;  // category -> group

  // Impact / Living / Texture over the seven DCASE labels.
  static MetaCategoryScheme dcase();

  std::optional<std::string> group_of(const std::string& category) const;
  // Distinct group names, sorted.
  std::vector<std::string> groups() const;
};

struct MdsResult {
  Eigen::MatrixXd coords;  // k x out_dims, column means 0
  Eigen::VectorXd eigenvalues;  // of the double-centered matrix, descending
  double stress = 0.0;
  // Sum of |lambda| over negative eigenvalues that were dropped.
  double truncated_negative_mass = 0.0;
};

// Eigenvalues of the double-centered matrix at or below this fraction of
// the largest one are treated as zero.
inline constexpr double kMdsEigenFloor = 1e-12;

// D must be square, symmetric, nonnegative, with a zero diagonal.
MdsResult classical_mds(const Eigen::MatrixXd& distances, Eigen::Index out_dims = 2);

struct RegionGrid {
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
  int nx = 0, ny = 0;
  // Row-major (y outer, x inner) index of the nearest point for each cell
  // center; ties go to the lowest index.
  std::vector<int> nearest;
};

struct GridOptions {
  int nx = 64;
  int ny = 64;
  // Bounding box margin as a fraction of the coordinate span.
  double padding = 0.1;
};

RegionGrid nearest_point_regions(const Eigen::MatrixXd& coords, const GridOptions& options);

struct CategoryMapResult {
  std::vector<std::string> labels;
  Eigen::MatrixXd distances;
  Eigen::MatrixXd coords;
  std::map<std::string, std::string> meta;  // only labels known to the scheme
  double stress = 0.0;
  double truncated_negative_mass = 0.0;
  RegionGrid regions;
};

// FAD between every pair of categories of one system's embeddings, with
// categories in the manifest's declared order.
PairwiseFad category_distance_matrix(const Manifest& manifest, const std::string& model,
                                     const std::string& system = kReferenceSystem);

CategoryMapResult map_from_distances(const PairwiseFad& distances,
                                     const MetaCategoryScheme& scheme,
                                     const GridOptions& grid = {});

struct MapOptions {
  std::string system = kReferenceSystem;
  MetaCategoryScheme scheme = MetaCategoryScheme::dcase();
  GridOptions grid;
};

CategoryMapResult build_category_map(const Manifest& manifest, const std::string& model,
                                     const MapOptions& options = {});

// {labels, distances (row-major), coords, meta, stress,
//  truncated_negative_mass, regions}
nlohmann::json to_json(const CategoryMapResult& result);

}  // namespace fadkit

#endif  // FADKIT_CATEGORY_MAP_HPP_
