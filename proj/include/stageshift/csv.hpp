/*
* Copyright (C) 2026 The stageshift authors
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
#ifndef STAGESHIFT_CSV_HPP
#define STAGESHIFT_CSV_HPP

#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace stageshift::csv
{

/// One non-comment, non-blank line of a comma-separated file.
struct Record {
    std::size_t line = 0; ///< 1-based line number in the source
    std::vector<std::string> fields;
};

/// Header plus data records. Lines starting with '#' and blank lines are skipped; fields are trimmed.
struct Document {
    std::vector<std::string> header;
    std::vector<Record> records;

    /// Column index of `name`, or throws ParseError.
    std::size_t column(std::string_view name) const;
};

Document read(std::istream& in);

double parse_double(const std::string& text, std::size_t line, std::string_view what);
std::int64_t parse_count(const std::string& text, std::size_t line, std::string_view what);

} // namespace stageshift::csv

#endif // STAGESHIFT_CSV_HPP
