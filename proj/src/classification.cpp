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

#include "rltask/classification.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <regex>

#include "rltask/error.hpp"

namespace rltask {

std::string format_fixed(double value, int decimals) {
  if (value == 0.0) value = 0.0;  // no "-0.00"
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value,
                           std::chars_format::fixed, decimals);
  std::string out(buf, res.ptr);
  if (out.find_first_not_of("-0.") == std::string::npos && out[0] == '-') {
    out.erase(0, 1);
  }
  return out;
}

std::string format_record(const ClassificationRecord& r) {
  std::string n = std::to_string(r.n_min);
  if (r.n_varies()) n += ".." + std::to_string(r.n_max);
  return "C_" + std::to_string(r.k) + "(n=" + n + ",s=" + std::to_string(r.s) +
         ",f=" + format_fixed(r.f(), 2) + ")";
}

ClassificationRecord parse_record(std::string_view text) {
  static const std::regex re(
      R"(C_([0-6])\(n=([0-9]+)(?:\.\.([0-9]+))?,s=([0-9]+),f=([0-9]\.[0-9]{2})\))");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(text.begin(), text.end(), m, re)) {
    throw ProtocolError("malformed classification record '" +
                        std::string(text) + "'");
  }
  ClassificationRecord r;
  r.k = std::stoi(m[1].str());
  r.n_min = std::stoull(m[2].str());
  r.n_max = m[3].matched ? std::stoull(m[3].str()) : r.n_min;
  r.s = std::stoull(m[4].str());
  const double f = std::stod(m[5].str());
  if (r.s == 0 || r.n_min == 0 || r.n_max < r.n_min || f > 1.0) {
    throw ProtocolError("classification record out of range '" +
                        std::string(text) + "'");
  }
  r.successes = static_cast<std::size_t>(std::llround(f * r.s));
  if (format_fixed(r.f(), 2) != m[5].str()) {
    throw ProtocolError("f=" + m[5].str() + " is not a fraction of s=" +
                        std::to_string(r.s));
  }
  return r;
}

ClassificationRecord classify(std::span<const double> improvements,
                              std::span<const std::size_t> n, double threshold,
                              int k) {
  if (improvements.empty()) throw ProtocolError("no results to classify");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ProtocolError("threshold must be in (0, 1)");
  }
  if (k < 0 || k > 6) {
    throw ProtocolError("class index " + std::to_string(k) + " out of range");
  }
  if (n.empty() || (n.size() != 1 && n.size() != improvements.size())) {
    throw ProtocolError("n must be given once or per trial");
  }
  ClassificationRecord r;
  r.k = k;
  r.s = improvements.size();
  r.n_min = *std::min_element(n.begin(), n.end());
  r.n_max = *std::max_element(n.begin(), n.end());
  if (r.n_min == 0) throw ProtocolError("n must be positive");
  for (double v : improvements) {
    if (v >= threshold) ++r.successes;
  }
  r.criterion = "improvement >= " + format_fixed(threshold, 2);
  return r;
}

Aggregate aggregate(std::span<const double> values) {
  Aggregate a;
  if (values.empty()) return a;
  for (double v : values) a.mean += v;
  a.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - a.mean) * (v - a.mean);
  a.std = std::sqrt(var / static_cast<double>(values.size()));
  return a;
}

}  // namespace rltask
