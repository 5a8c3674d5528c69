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

// Frechet distance between Gaussian fits of two embedding sets:
//
//   FAD(r, t) = |mu_r - mu_t|^2 + tr(S_r) + tr(S_t) - 2 tr((S_r S_t)^(1/2))
//
// The cross term is evaluated through the symmetric matrix
// S_r^(1/2) S_t S_r^(1/2), which is similar to S_r S_t and has the same
// (real, nonnegative) spectrum.

#ifndef FADKIT_FRECHET_HPP_
#define FADKIT_FRECHET_HPP_

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

#include "fadkit/moments.hpp"

namespace fadkit {

// Eigenvalues below -kIndefiniteTolerance * lambda_max are treated as a
// corrupted covariance rather than rounding noise.
inline constexpr double kIndefiniteTolerance = 1e-8;
// Input matrices must be symmetric to this relative tolerance.
inline constexpr double kSymmetryTolerance = 1e-8;
// Final FAD values in [-kClampEpsilon, 0) are reported as 0.
inline constexpr double kClampEpsilon = 1e-6;

struct FadResult {
  double value = 0.0;
  std::string ref_id;
  std::string eval_id;
  std::string model;
  Eigen::Index dim = 0;
  bool clamped = false;
};

struct FadLabels {
  std::string ref_id;
  std::string eval_id;
  std::string model;
};

// PSD square root via symmetric eigendecomposition. Eigenvalues inside the
// solver's noise floor (|lambda| <= d * eps * lambda_max) are zeroed; more
// negative values than -kIndefiniteTolerance * lambda_max throw
// IndefiniteMatrixError.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sigma);

// tr((sigma_r sigma_t)^(1/2)) for symmetric PSD inputs.
double trace_sqrt_product(const Eigen::MatrixXd& sigma_r, const Eigen::MatrixXd& sigma_t);

FadResult frechet_distance(const GaussianStats& r, const GaussianStats& t,
                           const FadLabels& labels = {});

// 1 / f.value; throws UndefinedResultError when the value is 0.
double fad_inverse(const FadResult& f);

struct LabeledStats {
  std::string label;
  GaussianStats stats;
};

struct PairwiseFad {
  std::vector<std::string> labels;
  Eigen::MatrixXd distances;  // symmetric, zero diagonal
};

// Cells are evaluated in parallel (see parallel_for) and written by index.
PairwiseFad pairwise_fad(const std::vector<LabeledStats>& sets);

// CSV with header ref_id,eval_id,model,dim,fad,fad_inverse,clamped.
// fad_inverse is left empty when fad is 0.
void write_fad_csv(const std::vector<FadResult>& rows, std::ostream& out);
std::vector<FadResult> read_fad_csv(std::istream& in);

}  // namespace fadkit

#endif  // FADKIT_FRECHET_HPP_
