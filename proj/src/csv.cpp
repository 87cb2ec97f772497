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
#include "stageshift/csv.hpp"
#include "stageshift/errors.hpp"

#include <charconv>
#include <cmath>

namespace stageshift::csv
{

namespace
{

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

} // namespace

std::size_t Document::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw ParseError("missing column '" + std::string(name) + "'", 1);
}

Document read(std::istream& in)
{
    Document doc;
    std::string line;
    std::size_t number = 0;
    bool have_header   = false;
    while (std::getline(in, line)) {
        ++number;
        if (number == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        if (!have_header) {
            doc.header  = split(t);
            have_header = true;
            continue;
        }
        auto fields = split(t);
        if (fields.size() != doc.header.size()) {
            throw ParseError("expected " + std::to_string(doc.header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             number);
        }
        doc.records.push_back({number, std::move(fields)});
    }
    if (!have_header) {
        throw ParseError("empty table: no header row");
    }
    return doc;
}

double parse_double(const std::string& text, std::size_t line, std::string_view what)
{
    double value      = 0.0;
    const char* first = text.data();
    const char* last  = text.data() + text.size();
    if (!text.empty() && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw ParseError("invalid number '" + text + "' for " + std::string(what), line);
    }
    return value;
}

std::int64_t parse_count(const std::string& text, std::size_t line, std::string_view what)
{
    std::int64_t value = 0;
    auto [ptr, ec]     = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError("invalid integer count '" + text + "' for " + std::string(what), line);
    }
    if (value < 0) {
        throw ParseError("negative " + std::string(what) + " (" + text + ")", line);
    }
    return value;
}

} // namespace stageshift::csv
