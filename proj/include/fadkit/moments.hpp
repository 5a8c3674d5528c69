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

#ifndef FADKIT_MOMENTS_HPP_
#define FADKIT_MOMENTS_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>

namespace fadkit {

// Mean and sample covariance (denominator n - 1) of a set of frames.
struct GaussianStats {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  std::int64_t n = 0;

  Eigen::Index dim() const { return mu.size(); }
};

// Streaming first and second moments. Frames are accumulated relative to
// the first frame seen, which keeps the centered second moment well
// conditioned when the mean is large compared to the spread. sum() and
// sum_outer() report the raw (unshifted) moments.
class MomentAccumulator {
 public:
  MomentAccumulator() = default;
  explicit MomentAccumulator(Eigen::Index dim);

  // Throws DimensionError on size mismatch, NonFiniteError on NaN/Inf.
  void accumulate(const Eigen::Ref<const Eigen::VectorXd>& frame);
  // Adds every row of `frames` in order.
  void accumulate_rows(const Eigen::Ref<const Eigen::MatrixXd>& frames);
  // Folds `other` into this accumulator as if its frames had been
  // accumulated here after our own.
  void merge(const MomentAccumulator& other);

  // Throws InsufficientDataError when count() < 2.
  GaussianStats finalize() const;

  std::int64_t count() const { return count_; }
  Eigen::Index dim() const { return dim_; }
  Eigen::VectorXd sum() const;
  Eigen::MatrixXd sum_outer() const;

 private:
  void set_shift(const Eigen::VectorXd& shift);

  Eigen::Index dim_ = -1;
  std::int64_t count_ = 0;
  Eigen::VectorXd shift_;
  Eigen::VectorXd shifted_sum_;
  Eigen::MatrixXd shifted_outer_;
};

// Batch path; agrees with streaming accumulation over the same rows.
GaussianStats stats_from_matrix(const Eigen::Ref<const Eigen::MatrixXd>& frames);

// Stats cache: "FSTA", version u32, d u32, n u64, mu (d f64),
// sigma (d*d f64 row-major), little-endian.
void write_stats(const GaussianStats& stats, const std::filesystem::path& path);
GaussianStats read_stats(const std::filesystem::path& path);

}  // namespace fadkit

#endif  // FADKIT_MOMENTS_HPP_
