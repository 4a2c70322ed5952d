// Copyright 2026 The heapfacts Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// RFC 4180 style CSV with LF line endings.

#ifndef HEAPFACTS_CSV_H_
#define HEAPFACTS_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace heapfacts {

using CsvRow = std::vector<std::string>;

// Quotes a field containing a comma, quote, CR or LF; quotes are doubled.
std::string csv_escape(std::string_view field);

// Escaped fields joined by commas, terminated by "\n".
std::string csv_line(const CsvRow& row);

// Parses a whole document, header included. Accepts LF or CRLF. Throws
// Error on an unterminated quoted field.
std::vector<CsvRow> parse_csv(std::string_view text);

}  // namespace heapfacts

#endif  // HEAPFACTS_CSV_H_
