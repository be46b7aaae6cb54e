"""Bundled datasets.

``gdp2023``: GDP per capita in 2023 for eleven South American countries,
international-$ at 2021 prices (World Bank series as republished by Our World
in Data, https://ourworldindata.org/grapher/gdp-per-capita-worldbank),
rounded to cents. Rows are stored in descending order of GDP.
"""
from __future__ import annotations

import csv
from importlib import resources

from .estimators import Sample

FIXTURES = {"gdp2023": ("gdp2023.csv", "gdp_per_capita")}
SOURCE_URL = "https://ourworldindata.org/grapher/gdp-per-capita-worldbank"


def fixture_rows(name: str) -> list[tuple[str, float]]:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; available: {sorted(FIXTURES)}")
    filename, column = FIXTURES[name]
    text = resources.files("ginidex").joinpath("data", filename).read_text()
    reader = csv.DictReader(text.splitlines())
    return [(row["country"], float(row[column])) for row in reader]


def load_fixture(name: str) -> Sample:
    return Sample([v for _, v in fixture_rows(name)])
