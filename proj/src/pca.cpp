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

#include "fadkit/pca.hpp"

#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "fadkit/errors.hpp"
#include "fadkit/moments.hpp"

namespace fadkit {

namespace {

constexpr char kPcaMagic[5] = "FPCA";
constexpr std::uint32_t kPcaVersion = 1;

}  // namespace

void canonicalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
      const double a = std::abs(vectors(r, c));
      if (a > best_abs) {
        best_abs = a;
        best = c;
      }
    }
    if (vectors.cols() > 0 && vectors(r, best) < 0.0) vectors.row(r) *= -1.0;
  }
}

PcaProjection fit_pca(const Eigen::Ref<const Eigen::MatrixXd>& frames, Eigen::Index k) {
  const Eigen::Index n = frames.rows();
  const Eigen::Index d = frames.cols();
  if (n < 2) {
    throw InsufficientDataError("PCA needs at least 2 frames, got " + std::to_string(n));
  }
  if (k < 1 || k > std::min(n - 1, d)) {
    throw ConfigError("PCA k=" + std::to_string(k) + " outside [1, min(n-1, d)] = [1, " +
                      std::to_string(std::min(n - 1, d)) + "]");
  }

  const GaussianStats stats = stats_from_matrix(frames);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(stats.sigma);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("PCA eigensolver did not converge");
  }

  // Eigen returns ascending eigenvalues; take the last k in reverse.
  PcaProjection p;
  p.mean = stats.mu;
  p.eigenvalues.resize(k);
  p.components.resize(k, d);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index src = d - 1 - i;
    p.eigenvalues(i) = solver.eigenvalues()(src);
    p.components.row(i) = solver.eigenvectors().col(src).transpose();
  }
  canonicalize_signs(p.components);
  return p;
}

Eigen::MatrixXd apply_pca(const PcaProjection& p,
                          const Eigen::Ref<const Eigen::MatrixXd>& frames) {
  if (frames.cols() != p.input_dim()) {
    throw DimensionError("PCA expects dim " + std::to_string(p.input_dim()) + ", got " +
                         std::to_string(frames.cols()));
  }
  return (frames.rowwise() - p.mean.transpose()) * p.components.transpose();
}

void write_projection(const PcaProjection& p, const std::filesystem::path& path) {
  std::string out;
  out.append(kPcaMagic, 4);
  detail::put_u32(out, kPcaVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(p.input_dim()));
  detail::put_u32(out, static_cast<std::uint32_t>(p.output_dim()));
  for (Eigen::Index i = 0; i < p.mean.size(); ++i) detail::put_f64(out, p.mean(i));
  for (Eigen::Index i = 0; i < p.eigenvalues.size(); ++i) detail::put_f64(out, p.eigenvalues(i));
  for (Eigen::Index r = 0; r < p.components.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.components.cols(); ++c) {
      detail::put_f64(out, p.components(r, c));
    }
  }
  detail::write_file_bytes(path, out);
}

PcaProjection read_projection(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file_bytes(path);
  detail::ByteReader in(bytes, path.string());
  in.expect_magic(kPcaMagic);
  if (const auto v = in.u32(); v != kPcaVersion) {
    throw FormatError(path.string() + ": unsupported projection version " + std::to_string(v));
  }
  const auto d = static_cast<Eigen::Index>(in.u32());
  const auto k = static_cast<Eigen::Index>(in.u32());
  if (d < 1 || k < 1 || k > d) throw FormatError(path.string() + ": invalid d/k");
  PcaProjection p;
  p.mean.resize(d);
  p.eigenvalues.resize(k);
  p.components.resize(k, d);
  for (Eigen::Index i = 0; i < d; ++i) p.mean(i) = in.f64();
  for (Eigen::Index i = 0; i < k; ++i) p.eigenvalues(i) = in.f64();
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) p.components(r, c) = in.f64();
  }
  in.expect_end();
  return p;
}

}  // namespace fadkit
