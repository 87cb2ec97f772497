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
#ifndef STAGESHIFT_INCIDENCE_HPP
#define STAGESHIFT_INCIDENCE_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace stageshift
{

/// One age group. age_hi is the exclusive upper edge; absent for the terminal open group (e.g. 85+).
struct IncidenceRow {
    double age_lo = 0.0;
    std::optional<double> age_hi;
    std::int64_t early_count    = 0; ///< clinical early-stage diagnoses
    std::int64_t advanced_count = 0; ///< clinical advanced-stage diagnoses
    double person_years         = 0.0;

    bool operator==(const IncidenceRow&) const = default;
};

/**
 * Age- and stage-specific incidence counts tabulated in contiguous 5-year groups,
 * optionally closed by an open-ended group. Hazards are evaluated at group midpoints;
 * the open group is treated as [age_lo, age_lo + open_group_width).
 */
class IncidenceTable
{
public:
    static constexpr double group_width = 5.0;

    explicit IncidenceTable(std::vector<IncidenceRow> rows, double open_group_width = 5.0);

    const std::vector<IncidenceRow>& rows() const noexcept
    {
        return m_rows;
    }
    std::size_t size() const noexcept
    {
        return m_rows.size();
    }
    double open_group_width() const noexcept
    {
        return m_open_width;
    }

    std::vector<double> midpoints() const;
    std::int64_t total_count() const;

    bool operator==(const IncidenceTable&) const = default;

private:
    std::vector<IncidenceRow> m_rows;
    double m_open_width;
};

/**
 * Reads the comma-separated schema `age_lo,age_hi,early_count,advanced_count,person_years`.
 * The open group writes age_hi as empty, "inf" or "+". '#' comment lines are skipped.
 * Throws ParseError naming the offending line.
 */
IncidenceTable load_incidence(std::istream& in);
IncidenceTable load_incidence_file(const std::filesystem::path& path);

void write_incidence(std::ostream& out, const IncidenceTable& table);

/// Multiplies counts by `factor` and rounds half to even; person-years are unchanged.
IncidenceTable inflate_risk(const IncidenceTable& table, double factor);

} // namespace stageshift

#endif // STAGESHIFT_INCIDENCE_HPP
