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
#include "stageshift/incidence.hpp"
#include "stageshift/csv.hpp"
#include "stageshift/errors.hpp"

#include <cfenv>
#include <cmath>
#include <optional>
#include <string>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace stageshift
{

namespace
{

constexpr const char* columns[] = {"age_lo", "age_hi", "early_count", "advanced_count", "person_years"};

struct RowProblem {
    std::size_t row; // 0-based
    std::string message;
};

std::optional<RowProblem> find_problem(const std::vector<IncidenceRow>& rows)
{
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (!(r.age_lo >= 0.0)) {
            return RowProblem{i, "age_lo must be >= 0"};
        }
        if (r.early_count < 0 || r.advanced_count < 0) {
            return RowProblem{i, "negative count"};
        }
        if (!(r.person_years >= 0.0) || !std::isfinite(r.person_years)) {
            return RowProblem{i, "person_years must be finite and >= 0"};
        }
        if ((r.early_count > 0 || r.advanced_count > 0) && !(r.person_years > 0.0)) {
            return RowProblem{i, "person_years must be > 0 where counts are positive"};
        }
        if (r.age_hi) {
            if (std::abs(*r.age_hi - r.age_lo - IncidenceTable::group_width) > 1e-9) {
                return RowProblem{i, "age group must span 5 years"};
            }
        }
        else if (i + 1 != rows.size()) {
            return RowProblem{i, "only the last age group may be open-ended"};
        }
        if (i > 0) {
            const double prev_hi = *rows[i - 1].age_hi;
            if (r.age_lo < prev_hi - 1e-9) {
                return RowProblem{i, "age group overlaps the previous group"};
            }
            if (r.age_lo > prev_hi + 1e-9) {
                std::ostringstream msg;
                msg << "age groups are not contiguous (gap between " << prev_hi << " and " << r.age_lo << ")";
                return RowProblem{i, msg.str()};
            }
        }
    }
    return std::nullopt;
}

} // namespace

IncidenceTable::IncidenceTable(std::vector<IncidenceRow> rows, double open_group_width)
    : m_rows(std::move(rows))
    , m_open_width(open_group_width)
{
    if (m_rows.empty()) {
        throw ParseError("incidence table has no rows");
    }
    if (!(m_open_width > 0.0)) {
        throw InvalidParameter("open age group width must be > 0");
    }
    if (auto problem = find_problem(m_rows)) {
        throw ParseError("row " + std::to_string(problem->row + 1) + ": " + problem->message);
    }
}

std::vector<double> IncidenceTable::midpoints() const
{
    std::vector<double> mid;
    mid.reserve(m_rows.size());
    for (const auto& r : m_rows) {
        const double hi = r.age_hi ? *r.age_hi : r.age_lo + m_open_width;
        mid.push_back(0.5 * (r.age_lo + hi));
    }
    return mid;
}

std::int64_t IncidenceTable::total_count() const
{
    std::int64_t n = 0;
    for (const auto& r : m_rows) {
        n += r.early_count + r.advanced_count;
    }
    return n;
}

IncidenceTable load_incidence(std::istream& in)
{
    const csv::Document doc = csv::read(in);
    if (doc.header.size() != std::size(columns)) {
        throw ParseError("incidence header must be exactly age_lo,age_hi,early_count,advanced_count,person_years", 1);
    }
    for (std::size_t i = 0; i < doc.header.size(); ++i) {
        if (doc.header[i] != columns[i]) {
            throw ParseError("unexpected column '" + doc.header[i] + "', expected '" + columns[i] + "'", 1);
        }
    }
    std::vector<IncidenceRow> rows;
    for (std::size_t i = 0; i < doc.records.size(); ++i) {
        const auto& rec = doc.records[i];
        const auto& f   = rec.fields;
        const std::string where = "row " + std::to_string(i + 1) + " ";
        IncidenceRow row;
        row.age_lo = csv::parse_double(f[0], rec.line, where + "age_lo");
        if (!(f[1].empty() || f[1] == "inf" || f[1] == "Inf" || f[1] == "+")) {
            row.age_hi = csv::parse_double(f[1], rec.line, where + "age_hi");
        }
        row.early_count    = csv::parse_count(f[2], rec.line, where + "early_count");
        row.advanced_count = csv::parse_count(f[3], rec.line, where + "advanced_count");
        row.person_years   = csv::parse_double(f[4], rec.line, where + "person_years");
        rows.push_back(row);
    }
    if (auto problem = find_problem(rows)) {
        const auto& rec = doc.records[problem->row];
        throw ParseError("row " + std::to_string(problem->row + 1) + ": " + problem->message, rec.line);
    }
    return IncidenceTable(std::move(rows));
}

IncidenceTable load_incidence_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw MissingInput("incidence file not found: " + path.string());
    }
    try {
        return load_incidence(in);
    }
    catch (const ParseError& e) {
        throw ParseError(path.filename().string() + ": " + e.what());
    }
}

void write_incidence(std::ostream& out, const IncidenceTable& table)
{
    out << "age_lo,age_hi,early_count,advanced_count,person_years\n";
    for (const auto& r : table.rows()) {
        out << r.age_lo << ',';
        if (r.age_hi) {
            out << *r.age_hi;
        }
        out << ',' << r.early_count << ',' << r.advanced_count << ',' << std::setprecision(15)
            << r.person_years << std::setprecision(6) << '\n';
    }
}

IncidenceTable inflate_risk(const IncidenceTable& table, double factor)
{
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw InvalidParameter("risk inflation factor must be > 0");
    }
    const int saved = std::fegetround();
    std::fesetround(FE_TONEAREST);
    std::vector<IncidenceRow> rows = table.rows();
    for (auto& r : rows) {
        r.early_count    = static_cast<std::int64_t>(std::nearbyint(static_cast<double>(r.early_count) * factor));
        r.advanced_count = static_cast<std::int64_t>(std::nearbyint(static_cast<double>(r.advanced_count) * factor));
    }
    std::fesetround(saved);
    return IncidenceTable(std::move(rows), table.open_group_width());
}

} // namespace stageshift
