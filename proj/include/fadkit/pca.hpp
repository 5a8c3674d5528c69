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

#ifndef FADKIT_PCA_HPP_
#define FADKIT_PCA_HPP_

#include <Eigen/Dense>

#include <filesystem>

namespace fadkit {

// Top-k principal axes of a frame matrix. Each component's entry of
// largest magnitude is positive (ties go to the lowest index), so repeated
// fits on the same data give identical components.
struct PcaProjection {
  Eigen::VectorXd mean;         // d
  Eigen::MatrixXd components;   // k x d, orthonormal rows
  Eigen::VectorXd eigenvalues;  // k, nonincreasing

  Eigen::Index input_dim() const { return mean.size(); }
  Eigen::Index output_dim() const { return components.rows(); }
};

// Requires n >= 2 and 1 <= k <= min(n - 1, d); throws ConfigError for an
// out-of-range k and InsufficientDataError for n < 2.
PcaProjection fit_pca(const Eigen::Ref<const Eigen::MatrixXd>& frames, Eigen::Index k);

// (frames - mean) * components^T
Eigen::MatrixXd apply_pca(const PcaProjection& p,
                          const Eigen::Ref<const Eigen::MatrixXd>& frames);

// "FPCA", version u32, d u32, k u32, mean (d f64), eigenvalues (k f64),
// components (k*d f64 row-major), little-endian.
void write_projection(const PcaProjection& p, const std::filesystem::path& path);
PcaProjection read_projection(const std::filesystem::path& path);

// Flips the sign of each row of `vectors` so that its largest-magnitude
// entry is positive, breaking ties by lowest index. Shared with MDS.
void canonicalize_signs(Eigen::MatrixXd& vectors);

}  // namespace fadkit

#endif  // FADKIT_PCA_HPP_
