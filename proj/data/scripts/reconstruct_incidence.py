#!/usr/bin/env python3
# Copyright (C) 2026 The stageshift authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the bundled registry-like incidence tables.

Registry counts are not redistributed here. Each table is rebuilt from rounded
age-specific rates per 100,000, a fixed advanced-stage fraction and an
age-structured person-year profile, then rounded to whole counts.
"""

import argparse
import pathlib

AGES = list(range(0, 90, 5))

# Person-years in millions for an 8-year registry window.
PERSON_YEARS_8Y = [16.0, 16.0, 16.5, 17.0, 17.0, 16.5, 16.0, 16.5, 17.0,
                   17.0, 15.5, 13.5, 10.5, 8.0, 6.5, 5.5, 4.2, 3.6]

SITES = {
    # all-stage rate per 100k by 5-year group, advanced fraction, window in years
    "lung": ([0.0, 0.0, 0.05, 0.15, 0.3, 0.6, 1.4, 3.2, 10.5, 25.0, 44.0, 87.7,
              135.0, 211.3, 325.0, 384.0, 390.0, 350.0], 0.66, 8),
    "liver": ([0.4, 0.05, 0.07, 0.1, 0.2, 0.3, 0.5, 1.0, 2.2, 5.5, 14.0, 24.0,
               27.0, 27.0, 28.0, 30.0, 30.0, 27.0], 0.45, 5),
    "pancreas": ([0.02, 0.02, 0.05, 0.1, 0.2, 0.3, 0.6, 1.2, 2.7, 5.5, 10.5, 17.0,
                  26.0, 37.0, 50.0, 63.0, 75.0, 80.0], 0.88, 5),
    "bladder": ([0.02, 0.02, 0.03, 0.05, 0.2, 0.4, 0.8, 1.5, 3.0, 6.5, 13.0, 24.0,
                 40.0, 63.0, 90.0, 115.0, 135.0, 140.0], 0.20, 5),
}


def table(rates, advanced_fraction, years):
    rows = ["age_lo,age_hi,early_count,advanced_count,person_years"]
    for lo, rate, py_m in zip(AGES, rates, PERSON_YEARS_8Y):
        py = py_m * 1e6 * years / 8.0
        total = rate * 1e-5 * py
        advanced = round(total * advanced_fraction)
        early = round(total * (1.0 - advanced_fraction))
        hi = "" if lo == AGES[-1] else str(lo + 5)
        rows.append(f"{lo},{hi},{early},{advanced},{py:.0f}")
    return "\n".join(rows) + "\n"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=pathlib.Path,
                        default=pathlib.Path(__file__).resolve().parent.parent / "incidence")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for site, (rates, frac, years) in SITES.items():
        header = (f"# Reconstructed {site} incidence: rounded rates per 100k, "
                  f"advanced fraction {frac}, {years}-year window.\n")
        (args.out / f"{site}.csv").write_text(header + table(rates, frac, years))


if __name__ == "__main__":
    main()
