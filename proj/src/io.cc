// Copyright 2026 The hsgd Authors.
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

#include "hsgd/io.h"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

namespace hsgd {

std::string FormatDouble(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void CsvTable::Write(const std::string& path,
                     const std::string& config_hash) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << "# config_hash=" << config_hash << '\n';
  for (const auto& c : comments_) out << "# " << c << '\n';
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    out << (i ? "," : "") << columns_[i];
  }
  out << '\n';
  for (const auto& row : rows_) {
    if (row.cells_.size() != columns_.size()) {
      throw Error(ErrorCode::kIo, path + ": row width does not match header");
    }
    for (std::size_t i = 0; i < row.cells_.size(); ++i) {
      out << (i ? "," : "") << row.cells_[i];
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path);
}

nlohmann::json VectorToJson(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

nlohmann::json MatrixToJson(const Matrix& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  }
  return flat;
}

void SaveLawJson(const GaussianLaw<double>& law, double t, double sigma,
                 const std::string& inputs_hash, const std::string& path) {
  nlohmann::json doc;
  doc["format"] = "hsgd-law";
  doc["version"] = 1;
  doc["dtype"] = "float64";
  doc["layout"] = "row-major";
  doc["dim"] = law.dim();
  doc["t"] = t;
  doc["sigma"] = sigma;
  doc["inputs_hash"] = inputs_hash;
  doc["mean"] = VectorToJson(law.mean);
  doc["cov"] = MatrixToJson(law.cov);
  WriteJsonFile(doc, path);
}

void WriteJsonFile(const nlohmann::json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path);
}

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace hsgd
