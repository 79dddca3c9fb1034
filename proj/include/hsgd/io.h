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

#ifndef HSGD_IO_H_
#define HSGD_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "hsgd/common.h"
#include "hsgd/law.h"
#include "json.hpp"

namespace hsgd {

// Shortest form that still round-trips: 17 significant digits.
std::string FormatDouble(double value);

// A CSV file whose first line is "# config_hash=<hash>", followed by any
// comment lines, a header and rows.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns)
      : columns_(std::move(columns)) {}

  void AddComment(std::string comment) { comments_.push_back(std::move(comment)); }

  class Row {
   public:
    Row& operator<<(double v) { cells_.push_back(FormatDouble(v)); return *this; }
    Row& operator<<(std::int64_t v) { cells_.push_back(std::to_string(v)); return *this; }
    Row& operator<<(int v) { cells_.push_back(std::to_string(v)); return *this; }
    Row& operator<<(const std::string& v) { cells_.push_back(v); return *this; }
    Row& operator<<(const char* v) { cells_.push_back(v); return *this; }

   private:
    friend class CsvTable;
    std::vector<std::string> cells_;
  };

  Row& NewRow() { rows_.emplace_back(); return rows_.back(); }
  std::size_t size() const { return rows_.size(); }

  // Throws Io on failure or when a row has the wrong width.
  void Write(const std::string& path, const std::string& config_hash) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<Row> rows_;
};

nlohmann::json VectorToJson(const Vector& v);
// Row-major flat array.
nlohmann::json MatrixToJson(const Matrix& m);

// Law container: mean, cov (row-major), t, sigma and input provenance.
void SaveLawJson(const GaussianLaw<double>& law, double t, double sigma,
                 const std::string& inputs_hash, const std::string& path);

void WriteJsonFile(const nlohmann::json& doc, const std::string& path);

// ISO-8601 UTC timestamp for manifests.
std::string UtcTimestamp();

}  // namespace hsgd

#endif  // HSGD_IO_H_
