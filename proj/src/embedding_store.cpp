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

#include "fadkit/embedding_store.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "binary_io.hpp"
#include "fadkit/errors.hpp"
#include "json.hpp"

namespace fadkit {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace detail;

EmbeddingHeader parse_header(const unsigned char* p, std::size_t size,
                             const fs::path& path) {
  if (size < kEmbeddingHeaderBytes) {
    throw LengthError(path.string() + ": file shorter than the 24-byte header");
  }
  if (std::memcmp(p, kEmbeddingMagic, 4) != 0) {
    throw FormatError(path.string() + ": bad magic (expected FEMB)");
  }
  EmbeddingHeader h;
  h.version = get_u32(p + 4);
  h.dim = get_u32(p + 8);
  h.frame_count = get_u32(p + 12);
  h.frame_rate_hz = std::bit_cast<double>(get_u64(p + 16));
  if (h.version != kEmbeddingVersion) {
    throw FormatError(path.string() + ": unsupported version " +
                      std::to_string(h.version));
  }
  if (h.dim < 1 || h.frame_count < 1) {
    throw FormatError(path.string() + ": dim and frame_count must be >= 1");
  }
  if (!(h.frame_rate_hz > 0.0) || !std::isfinite(h.frame_rate_hz)) {
    throw FormatError(path.string() + ": frame_rate_hz must be positive");
  }
  return h;
}

}  // namespace

void write_embeddings(const FrameMatrix& frames, double frame_rate_hz,
                      const fs::path& path) {
  if (frames.rows() < 1 || frames.cols() < 1) {
    throw DataError("write_embeddings: matrix must have at least one row and column");
  }
  if (!(frame_rate_hz > 0.0) || !std::isfinite(frame_rate_hz)) {
    throw DataError("write_embeddings: frame_rate_hz must be positive");
  }
  for (Eigen::Index r = 0; r < frames.rows(); ++r) {
    for (Eigen::Index c = 0; c < frames.cols(); ++c) {
      if (!std::isfinite(frames(r, c))) {
        throw NonFiniteError("write_embeddings: non-finite value at row " +
                             std::to_string(r) + ", column " + std::to_string(c));
      }
    }
  }

  std::string out;
  out.reserve(kEmbeddingHeaderBytes + 4 * static_cast<std::size_t>(frames.size()));
  out.append(kEmbeddingMagic, 4);
  put_u32(out, kEmbeddingVersion);
  put_u32(out, static_cast<std::uint32_t>(frames.cols()));
  put_u32(out, static_cast<std::uint32_t>(frames.rows()));
  put_u64(out, std::bit_cast<std::uint64_t>(frame_rate_hz));
  for (Eigen::Index r = 0; r < frames.rows(); ++r) {
    for (Eigen::Index c = 0; c < frames.cols(); ++c) {
      put_u32(out, std::bit_cast<std::uint32_t>(frames(r, c)));
    }
  }

  write_file_bytes(path, out);
}

EmbeddingHeader read_embedding_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  unsigned char buf[kEmbeddingHeaderBytes];
  in.read(reinterpret_cast<char*>(buf), sizeof(buf));
  return parse_header(buf, static_cast<std::size_t>(in.gcount()), path);
}

EmbeddingMatrix read_embeddings(const fs::path& path) {
  const std::string bytes = read_file_bytes(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  EmbeddingMatrix m;
  m.header = parse_header(p, bytes.size(), path);

  const std::size_t rows = m.header.frame_count;
  const std::size_t cols = m.header.dim;
  const std::size_t payload = bytes.size() - kEmbeddingHeaderBytes;
  if (payload < 4 * rows * cols) {
    throw LengthError(path.string() + ": header declares " + std::to_string(rows) +
                      " frames but payload holds " +
                      std::to_string(payload / (4 * cols)));
  }
  if (payload > 4 * rows * cols) {
    throw LengthError(path.string() + ": trailing bytes after payload");
  }

  m.frames.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const unsigned char* q = p + kEmbeddingHeaderBytes;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c, q += 4) {
      const float v = std::bit_cast<float>(get_u32(q));
      if (!std::isfinite(v)) {
        throw NonFiniteError(path.string() + ": non-finite value at row " +
                             std::to_string(r) + ", column " + std::to_string(c));
      }
      m.frames(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return m;
}

std::int64_t expected_frame_count(double clip_seconds, double window_seconds,
                                  double hop_seconds) {
  if (!(window_seconds > 0.0) || !(hop_seconds > 0.0) ||
      hop_seconds > window_seconds) {
    throw ConfigError("framing requires window > 0 and 0 < hop <= window");
  }
  if (clip_seconds < window_seconds) {
    throw DataError("clip of " + std::to_string(clip_seconds) +
                    " s is shorter than the " + std::to_string(window_seconds) +
                    " s window and cannot be framed");
  }
  // Small slack so that e.g. (4.0 - 1.0) / 0.5 lands on 6, not 5.999...
  const double steps = (clip_seconds - window_seconds) / hop_seconds;
  return static_cast<std::int64_t>(std::floor(steps + 1e-9)) + 1;
}

const std::vector<std::string>& default_categories() {
  static const std::vector<std::string> labels = {
      "dog_bark", "footstep", "gunshot", "keyboard",
      "moving_motor_vehicle", "rain", "sneeze_cough"};
  return labels;
}

std::vector<std::string> Manifest::systems(const std::string& model) const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (e.model == model && seen.insert(e.system).second) out.push_back(e.system);
  }
  return out;
}

std::vector<std::string> Manifest::categories_present(const std::string& model,
                                                      const std::string& system) const {
  std::set<std::string> present;
  for (const auto& e : entries) {
    if (e.model == model && (system.empty() || e.system == system)) {
      present.insert(e.category);
    }
  }
  std::vector<std::string> out;
  for (const auto& c : categories) {
    if (present.count(c)) out.push_back(c);
  }
  return out;
}

Manifest parse_manifest(const std::string& json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("models") || !doc.contains("entries")) {
    throw DataError("manifest must be an object with \"models\" and \"entries\"");
  }

  Manifest m;
  try {
    for (const auto& [name, info] : doc.at("models").items()) {
      ModelInfo mi;
      const auto dim = info.at("dim").get<std::int64_t>();
      mi.expected_rate_hz = info.at("rate_hz").get<double>();
      if (dim < 1 || !(mi.expected_rate_hz > 0.0)) {
        throw DataError("model " + name + ": dim and rate_hz must be positive");
      }
      mi.expected_dim = static_cast<std::uint32_t>(dim);
      m.models.emplace(name, mi);
    }

    if (doc.contains("categories")) {
      m.categories = doc.at("categories").get<std::vector<std::string>>();
    } else {
      m.categories = default_categories();
    }
    const std::set<std::string> allowed(m.categories.begin(), m.categories.end());

    std::set<std::string> ids;
    for (const auto& item : doc.at("entries")) {
      ManifestEntry e;
      e.clip_id = item.at("clip_id").get<std::string>();
      e.path = item.at("path").get<std::string>();
      e.category = item.at("category").get<std::string>();
      e.system = item.at("system").get<std::string>();
      e.model = item.at("model").get<std::string>();
      if (!ids.insert(e.clip_id).second) {
        throw DataError("duplicate clip_id " + e.clip_id);
      }
      if (!allowed.count(e.category)) {
        throw DataError("clip " + e.clip_id + ": category '" + e.category +
                        "' is not in the declared category set");
      }
      if (!m.models.count(e.model)) {
        throw DataError("clip " + e.clip_id + ": unknown model '" + e.model + "'");
      }
      if (e.path.is_relative()) e.path = base_dir / e.path;
      m.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

void save_manifest(const Manifest& manifest, const fs::path& path) {
  json doc;
  doc["models"] = json::object();
  for (const auto& [name, info] : manifest.models) {
    doc["models"][name] = {{"dim", info.expected_dim}, {"rate_hz", info.expected_rate_hz}};
  }
  doc["categories"] = manifest.categories;
  doc["entries"] = json::array();
  const fs::path base = fs::absolute(path).parent_path();
  for (const auto& e : manifest.entries) {
    fs::path p = e.path;
    if (p.is_absolute()) {
      const fs::path rel = p.lexically_relative(base);
      if (!rel.empty() && *rel.begin() != "..") p = rel;
    }
    doc["entries"].push_back({{"clip_id", e.clip_id},
                              {"path", p.generic_string()},
                              {"category", e.category},
                              {"system", e.system},
                              {"model", e.model}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write manifest " + path.string());
  out << doc.dump(2) << '\n';
}

std::vector<ClipIssue> validate_manifest_files(const Manifest& manifest) {
  std::vector<ClipIssue> issues;
  for (const auto& e : manifest.entries) {
    try {
      const auto h = read_embedding_header(e.path);
      const auto& info = manifest.models.at(e.model);
      if (h.dim != info.expected_dim) {
        issues.push_back({e.clip_id, "dim " + std::to_string(h.dim) +
                                         " does not match model " + e.model +
                                         " (expected " +
                                         std::to_string(info.expected_dim) + ")"});
      }
    } catch (const Error& err) {
      issues.push_back({e.clip_id, err.what()});
    }
  }
  return issues;
}

std::string SetFilter::describe() const {
  std::string s = system;
  if (category) s += "/" + *category;
  return s;
}

EmbeddingSet collect_set(const Manifest& manifest, const SetFilter& filter) {
  std::vector<const ManifestEntry*> matched;
  for (const auto& e : manifest.entries) {
    if (e.system == filter.system && e.model == filter.model &&
        (!filter.category || e.category == *filter.category)) {
      matched.push_back(&e);
    }
  }
  if (matched.empty()) {
    throw DataError("no manifest entries match {system: " + filter.system +
                    ", category: " + filter.category.value_or("*") +
                    ", model: " + filter.model + "}");
  }

  const auto model_it = manifest.models.find(filter.model);
  std::vector<FrameMatrix> clips;
  clips.reserve(matched.size());
  Eigen::Index total_rows = 0;
  Eigen::Index dim = -1;
  for (const auto* e : matched) {
    EmbeddingMatrix m = read_embeddings(e->path);
    if (model_it != manifest.models.end() &&
        m.header.dim != model_it->second.expected_dim) {
      throw DimensionError("clip " + e->clip_id + ": dim " +
                           std::to_string(m.header.dim) + " does not match model " +
                           filter.model + " (expected " +
                           std::to_string(model_it->second.expected_dim) + ")");
    }
    if (dim >= 0 && m.frames.cols() != dim) {
      throw DimensionError("clip " + e->clip_id + ": mixed dims within set " +
                           filter.describe());
    }
    dim = m.frames.cols();
    total_rows += m.frames.rows();
    clips.push_back(std::move(m.frames));
  }

  EmbeddingSet set;
  set.set_id = filter.describe();
  set.member_count = matched.size();
  set.frames.resize(total_rows, dim);
  Eigen::Index row = 0;
  for (const auto& c : clips) {
    set.frames.middleRows(row, c.rows()) = c.cast<double>();
    row += c.rows();
  }
  return set;
}

}  // namespace fadkit
