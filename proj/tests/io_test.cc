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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

namespace hsgd {
namespace {

TEST(FormatDoubleTest, RoundTripsExactly) {
  for (const double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0}) {
    EXPECT_EQ(std::strtod(FormatDouble(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(FormatDouble(0.5), "0.5");
}

TEST(CsvTableTest, WritesHashCommentsAndRows) {
  const auto path =
      (std::filesystem::temp_directory_path() / "hsgd_io_test.csv").string();
  CsvTable table({"k", "value"});
  table.AddComment("note");
  table.NewRow() << std::int64_t{3} << 0.25;
  table.Write(path, "abc123");
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), "# config_hash=abc123\n# note\nk,value\n3,0.25\n");
  CsvTable bad({"a", "b"});
  bad.NewRow() << 1.0;
  EXPECT_THROW(bad.Write(path, "x"), Error);
  std::filesystem::remove(path);
}

TEST(JsonTest, LawRoundTripsThroughText) {
  GaussianLaw<double> law{Vector::LinSpaced(3, 0.1, 0.3), Matrix::Identity(3, 3) / 3.0};
  const auto path =
      (std::filesystem::temp_directory_path() / "hsgd_io_law.json").string();
  SaveLawJson(law, 1.25, 0.5, "deadbeef", path);
  std::ifstream in(path);
  const nlohmann::json doc = nlohmann::json::parse(in);
  EXPECT_EQ(doc.at("t").get<double>(), 1.25);
  EXPECT_EQ(doc.at("inputs_hash").get<std::string>(), "deadbeef");
  EXPECT_EQ(doc.at("mean").get<std::vector<double>>()[2], law.mean(2));
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace hsgd
