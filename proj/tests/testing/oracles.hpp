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

// Independent reference computations used by the unit and acceptance
// suites. Nothing here calls into the library's numerical routines.

#ifndef FADKIT_TESTS_TESTING_ORACLES_HPP_
#define FADKIT_TESTS_TESTING_ORACLES_HPP_

#include <Eigen/Dense>

#include <random>
#include <span>
#include <utility>
#include <vector>

namespace fadkit::testing {

// Cyclic Jacobi rotations on a symmetric matrix. Returns eigenvalues in
// descending order and matching eigenvectors as columns.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> jacobi_eigen(const Eigen::MatrixXd& a);

// Textbook two-pass mean and (n - 1)-denominator covariance.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> two_pass_moments(const Eigen::MatrixXd& x);

// tr((A B)^(1/2)) from the eigenvalues of the nonsymmetric product,
// computed in long double with a general (Hessenberg QR) eigensolver.
double trace_sqrt_product_oracle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Rank of each value = 1 + #smaller + (#equal - 1) / 2, by enumeration.
std::vector<double> brute_force_ranks(std::span<const double> v);
double pearson(std::span<const double> x, std::span<const double> y);
double spearman_oracle(std::span<const double> x, std::span<const double> y);

// Frechet distance between Gaussians with diagonal covariances (variances
// given), summed per dimension from the 1D closed form.
double diagonal_fad(const Eigen::VectorXd& mu_r, const Eigen::VectorXd& var_r,
                    const Eigen::VectorXd& mu_t, const Eigen::VectorXd& var_t);

Eigen::MatrixXd distances_from_coords(const Eigen::MatrixXd& coords);

// Max |aligned(a) - b| after centering both and applying the best 2D
// rotation/reflection (orthogonal Procrustes).
double procrustes_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

Eigen::MatrixXd random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);
Eigen::MatrixXd random_orthogonal(Eigen::Index d, std::mt19937_64& rng);
// Q diag(lambda) Q^T with lambda uniform in [lo, hi].
Eigen::MatrixXd random_spd(Eigen::Index d, std::mt19937_64& rng, double lo = 0.1, double hi = 3.0);

}  // namespace fadkit::testing

#endif  // FADKIT_TESTS_TESTING_ORACLES_HPP_
