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

#include "fadkit/moments.hpp"

#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "fadkit/errors.hpp"

namespace fadkit {

namespace {

constexpr char kStatsMagic[5] = "FSTA";
constexpr std::uint32_t kStatsVersion = 1;

void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m, const char* what) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!std::isfinite(m(r, c))) {
        throw NonFiniteError(std::string(what) + ": non-finite value at row " +
                             std::to_string(r) + ", column " + std::to_string(c));
      }
    }
  }
}

GaussianStats stats_from_centered(const Eigen::VectorXd& shift,
                                  const Eigen::VectorXd& shifted_sum,
                                  const Eigen::MatrixXd& shifted_outer,
                                  std::int64_t count) {
  if (count < 2) {
    throw InsufficientDataError("covariance needs at least 2 frames, got " +
                                std::to_string(count));
  }
  const double n = static_cast<double>(count);
  const Eigen::VectorXd mean_offset = shifted_sum / n;
  GaussianStats s;
  s.n = count;
  s.mu = shift + mean_offset;
  Eigen::MatrixXd scatter = shifted_outer - n * (mean_offset * mean_offset.transpose());
  scatter /= (n - 1.0);
  s.sigma = 0.5 * (scatter + scatter.transpose());
  return s;
}

}  // namespace

MomentAccumulator::MomentAccumulator(Eigen::Index dim) : dim_(dim) {
  shift_ = Eigen::VectorXd::Zero(dim);
  shifted_sum_ = Eigen::VectorXd::Zero(dim);
  shifted_outer_ = Eigen::MatrixXd::Zero(dim, dim);
}

void MomentAccumulator::set_shift(const Eigen::VectorXd& shift) {
  dim_ = shift.size();
  shift_ = shift;
  shifted_sum_ = Eigen::VectorXd::Zero(dim_);
  shifted_outer_ = Eigen::MatrixXd::Zero(dim_, dim_);
}

void MomentAccumulator::accumulate(const Eigen::Ref<const Eigen::VectorXd>& frame) {
  if (dim_ >= 0 && frame.size() != dim_) {
    throw DimensionError("frame has dim " + std::to_string(frame.size()) +
                         ", accumulator expects " + std::to_string(dim_));
  }
  require_finite(frame, "accumulate");
  if (count_ == 0) set_shift(frame);
  const Eigen::VectorXd delta = frame - shift_;
  shifted_sum_ += delta;
  shifted_outer_.noalias() += delta * delta.transpose();
  ++count_;
}

void MomentAccumulator::accumulate_rows(const Eigen::Ref<const Eigen::MatrixXd>& frames) {
  if (frames.rows() == 0) return;
  if (dim_ >= 0 && frames.cols() != dim_) {
    throw DimensionError("frames have dim " + std::to_string(frames.cols()) +
                         ", accumulator expects " + std::to_string(dim_));
  }
  require_finite(frames, "accumulate_rows");
  if (count_ == 0) set_shift(frames.row(0).transpose());
  const Eigen::MatrixXd delta = frames.rowwise() - shift_.transpose();
  shifted_sum_ += delta.colwise().sum().transpose();
  shifted_outer_.noalias() += delta.transpose() * delta;
  count_ += frames.rows();
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  if (other.dim_ != dim_) {
    throw DimensionError("cannot merge accumulators of dim " + std::to_string(dim_) +
                         " and " + std::to_string(other.dim_));
  }
  // Re-express other's moments about our shift: x - a = (x - b) + (b - a).
  const Eigen::VectorXd offset = other.shift_ - shift_;
  const double m = static_cast<double>(other.count_);
  shifted_sum_ += other.shifted_sum_ + m * offset;
  shifted_outer_ += other.shifted_outer_ + offset * other.shifted_sum_.transpose() +
                    other.shifted_sum_ * offset.transpose() +
                    m * (offset * offset.transpose());
  count_ += other.count_;
}

GaussianStats MomentAccumulator::finalize() const {
  return stats_from_centered(shift_, shifted_sum_, shifted_outer_, count_);
}

Eigen::VectorXd MomentAccumulator::sum() const {
  if (count_ == 0) return Eigen::VectorXd::Zero(std::max<Eigen::Index>(dim_, 0));
  return shifted_sum_ + static_cast<double>(count_) * shift_;
}

Eigen::MatrixXd MomentAccumulator::sum_outer() const {
  if (count_ == 0) {
    const Eigen::Index d = std::max<Eigen::Index>(dim_, 0);
    return Eigen::MatrixXd::Zero(d, d);
  }
  const double n = static_cast<double>(count_);
  Eigen::MatrixXd raw = shifted_outer_ + shift_ * shifted_sum_.transpose() +
                        shifted_sum_ * shift_.transpose() +
                        n * (shift_ * shift_.transpose());
  return 0.5 * (raw + raw.transpose());
}

GaussianStats stats_from_matrix(const Eigen::Ref<const Eigen::MatrixXd>& frames) {
  if (frames.rows() < 2) {
    throw InsufficientDataError("covariance needs at least 2 frames, got " +
                                std::to_string(frames.rows()));
  }
  require_finite(frames, "stats_from_matrix");
  const Eigen::VectorXd shift = frames.row(0).transpose();
  const Eigen::MatrixXd delta = frames.rowwise() - shift.transpose();
  const Eigen::VectorXd sum = delta.colwise().sum().transpose();
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(frames.cols(), frames.cols());
  outer.selfadjointView<Eigen::Lower>().rankUpdate(delta.transpose());
  outer = outer.selfadjointView<Eigen::Lower>();
  return stats_from_centered(shift, sum, outer, frames.rows());
}

void write_stats(const GaussianStats& stats, const std::filesystem::path& path) {
  const auto d = stats.mu.size();
  if (d < 1 || stats.sigma.rows() != d || stats.sigma.cols() != d) {
    throw DimensionError("write_stats: inconsistent mu/sigma shapes");
  }
  std::string out;
  out.append(kStatsMagic, 4);
  detail::put_u32(out, kStatsVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(d));
  detail::put_u64(out, static_cast<std::uint64_t>(stats.n));
  for (Eigen::Index i = 0; i < d; ++i) detail::put_f64(out, stats.mu(i));
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) detail::put_f64(out, stats.sigma(r, c));
  }
  detail::write_file_bytes(path, out);
}

GaussianStats read_stats(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file_bytes(path);
  detail::ByteReader in(bytes, path.string());
  in.expect_magic(kStatsMagic);
  if (const auto v = in.u32(); v != kStatsVersion) {
    throw FormatError(path.string() + ": unsupported stats version " + std::to_string(v));
  }
  const auto d = static_cast<Eigen::Index>(in.u32());
  GaussianStats s;
  s.n = static_cast<std::int64_t>(in.u64());
  if (d < 1) throw FormatError(path.string() + ": dim must be >= 1");
  s.mu.resize(d);
  s.sigma.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) s.mu(i) = in.f64();
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) s.sigma(r, c) = in.f64();
  }
  in.expect_end();
  require_finite(s.mu, path.string().c_str());
  require_finite(s.sigma, path.string().c_str());
  return s;
}

}  // namespace fadkit
