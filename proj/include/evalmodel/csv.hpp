/*
 * Copyright 2026 The evalmodel Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef EVALMODEL_CSV_HPP_
#define EVALMODEL_CSV_HPP_

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace evalmodel {

// RFC 4180-style reader: quoted fields, doubled quotes, CRLF tolerated.
// Lines starting with '#' before the header are skipped (schema comments).
std::vector<std::vector<std::string>> read_csv(std::istream& in);
std::vector<std::vector<std::string>> read_csv_file(const std::string& path);

// Quotes the field only when it needs quoting.
std::string csv_escape(std::string_view field);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest decimal text that round-trips the double.
std::string format_double(double value);

}  // namespace evalmodel

#endif  // EVALMODEL_CSV_HPP_
