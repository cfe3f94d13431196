/*
 * Copyright 2026 The overlap Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace overlap::csv {

/// Shortest round-trip representation ("%.17g"), locale independent.
std::string format(double value);

void write_header(std::ostream& out, const std::vector<std::string>& names);
void write_row(std::ostream& out, const std::vector<double>& values);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of the named column; throws when absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

/// Numeric CSV with one header row. Blank lines are skipped.
Table read(std::istream& in);

}  // namespace overlap::csv
