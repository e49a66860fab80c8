// Copyright 2026 The rltask Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal RFC 4180 CSV tables.

#ifndef RLTASK_CSV_HPP_
#define RLTASK_CSV_HPP_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rltask {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws ProtocolError when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

std::string csv_escape(std::string_view field);
void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

CsvTable read_csv_file(const std::string& path);
// Writes to a sibling temp file and renames it into place.
void write_csv_file(const std::string& path, const CsvTable& table);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace rltask

#endif  // RLTASK_CSV_HPP_
