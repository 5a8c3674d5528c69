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

#include "fadkit/frechet.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "fadkit/errors.hpp"
#include "fadkit/parallel.hpp"

namespace fadkit {

namespace {

void check_symmetric(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(name) + " is not square");
  }
  if (!m.allFinite()) throw NonFiniteError(std::string(name) + " has non-finite entries");
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    throw DataError(std::string(name) + " is not symmetric (max |A - A^T| = " +
                    std::to_string(asym) + ")");
  }
}

// Clamps rounding noise to zero and rejects genuinely negative spectra.
Eigen::VectorXd clean_spectrum(const Eigen::VectorXd& eigenvalues, const char* what) {
  if (eigenvalues.size() == 0) return eigenvalues;
  const double lambda_max = eigenvalues.maxCoeff();
  const double lambda_min = eigenvalues.minCoeff();
  const double magnitude = std::max(std::abs(lambda_max), std::abs(lambda_min));
  const double floor = static_cast<double>(eigenvalues.size()) *
                       std::numeric_limits<double>::epsilon() * magnitude;
  if (lambda_min < -floor && lambda_min < -kIndefiniteTolerance * std::max(lambda_max, 0.0)) {
    std::ostringstream msg;
    msg << what << " is indefinite: eigenvalue " << lambda_min << " vs largest "
        << lambda_max;
    throw IndefiniteMatrixError(msg.str());
  }
  Eigen::VectorXd out = eigenvalues;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out(i) <= floor) out(i) = 0.0;
  }
  return out;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge");
  }
  return solver.eigenvalues();
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sigma) {
  check_symmetric(sigma, "covariance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge");
  }
  const Eigen::VectorXd roots = clean_spectrum(solver.eigenvalues(), "covariance").cwiseSqrt();
  const Eigen::MatrixXd& v = solver.eigenvectors();
  Eigen::MatrixXd root = v * roots.asDiagonal() * v.transpose();
  return 0.5 * (root + root.transpose());
}

double trace_sqrt_product(const Eigen::MatrixXd& sigma_r, const Eigen::MatrixXd& sigma_t) {
  check_symmetric(sigma_r, "sigma_r");
  check_symmetric(sigma_t, "sigma_t");
  if (sigma_r.rows() != sigma_t.rows()) {
    throw DimensionError("covariances have different dims: " +
                         std::to_string(sigma_r.rows()) + " vs " +
                         std::to_string(sigma_t.rows()));
  }
  const Eigen::MatrixXd root_r = psd_sqrt(sigma_r);
  Eigen::MatrixXd middle = root_r * sigma_t * root_r;
  middle = 0.5 * (middle + middle.transpose());
  const Eigen::VectorXd lambda =
      clean_spectrum(symmetric_eigenvalues(middle), "sqrt(sigma_r) sigma_t sqrt(sigma_r)");
  return lambda.cwiseSqrt().sum();
}

FadResult frechet_distance(const GaussianStats& r, const GaussianStats& t,
                           const FadLabels& labels) {
  if (r.dim() != t.dim()) {
    throw DimensionError("cannot compare stats of dim " + std::to_string(r.dim()) +
                         " and " + std::to_string(t.dim()));
  }
  // Bitwise-equal inputs are exactly zero; the square root would leave dust.
  double value = 0.0;
  if (r.mu != t.mu || r.sigma != t.sigma) {
    const double mean_term = (r.mu - t.mu).squaredNorm();
    const double cross = trace_sqrt_product(r.sigma, t.sigma);
    value = mean_term + r.sigma.trace() + t.sigma.trace() - 2.0 * cross;
  }

  FadResult result;
  result.ref_id = labels.ref_id;
  result.eval_id = labels.eval_id;
  result.model = labels.model;
  result.dim = r.dim();
  if (!std::isfinite(value)) {
    throw NumericalError("FAD is not finite for " + labels.ref_id + " vs " + labels.eval_id);
  }
  if (value < 0.0) {
    if (value < -kClampEpsilon) {
      throw NumericalError("FAD evaluated to " + format_double(value) + " for " +
                           labels.ref_id + " vs " + labels.eval_id);
    }
    result.value = 0.0;
    result.clamped = true;
  } else {
    result.value = value;
  }
  return result;
}

double fad_inverse(const FadResult& f) {
  if (!(f.value > 0.0)) {
    throw UndefinedResultError("FAD inverse is undefined for FAD = 0 (" + f.ref_id +
                               " vs " + f.eval_id + ")");
  }
  return 1.0 / f.value;
}

PairwiseFad pairwise_fad(const std::vector<LabeledStats>& sets) {
  const std::size_t k = sets.size();
  if (k < 2) throw InsufficientDataError("pairwise FAD needs at least 2 sets");
  for (const auto& s : sets) {
    if (s.stats.dim() != sets.front().stats.dim()) {
      throw DimensionError("set " + s.label + " has a different dim");
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) cells.emplace_back(i, j);
  }
  std::vector<double> values(cells.size());
  parallel_for(cells.size(), [&](std::size_t c) {
    const auto [i, j] = cells[c];
    values[c] = frechet_distance(sets[i].stats, sets[j].stats,
                                 {sets[i].label, sets[j].label, {}})
                    .value;
  });

  PairwiseFad out;
  out.distances = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                        static_cast<Eigen::Index>(k));
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto i = static_cast<Eigen::Index>(cells[c].first);
    const auto j = static_cast<Eigen::Index>(cells[c].second);
    out.distances(i, j) = values[c];
    out.distances(j, i) = values[c];
  }
  for (const auto& s : sets) out.labels.push_back(s.label);
  return out;
}

void write_fad_csv(const std::vector<FadResult>& rows, std::ostream& out) {
  out << "ref_id,eval_id,model,dim,fad,fad_inverse,clamped\n";
  for (const auto& r : rows) {
    out << r.ref_id << ',' << r.eval_id << ',' << r.model << ',' << r.dim << ','
        << format_double(r.value) << ',';
    if (r.value > 0.0) out << format_double(1.0 / r.value);
    out << ',' << (r.clamped ? "true" : "false") << '\n';
  }
}

std::vector<FadResult> read_fad_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "ref_id,eval_id,model,dim,fad,fad_inverse,clamped") {
    throw DataError("FAD CSV: unexpected header");
  }
  std::vector<FadResult> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 7) {
      throw DataError("FAD CSV line " + std::to_string(line_no) + ": expected 7 fields");
    }
    FadResult r;
    r.ref_id = fields[0];
    r.eval_id = fields[1];
    r.model = fields[2];
    try {
      r.dim = std::stoll(fields[3]);
      r.value = std::stod(fields[4]);
    } catch (const std::exception&) {
      throw DataError("FAD CSV line " + std::to_string(line_no) + ": bad number");
    }
    if (!std::isfinite(r.value) || r.value < 0.0) {
      throw DataError("FAD CSV line " + std::to_string(line_no) + ": invalid fad value");
    }
    r.clamped = fields[6] == "true";
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace fadkit
