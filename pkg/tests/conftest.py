"""Shared fixtures: problem-file loading and cached coefficient fields."""

import json
import pathlib

import pytest

from kreinspec.cli_report import build_fields, load_problem

FIXTURE_DIR = pathlib.Path(__file__).resolve().parent.parent / "fixtures"

_FIELD_CACHE = {}


def fixture_path(name):
    return FIXTURE_DIR / f"{name}.json"


def load_fixture_doc(name):
    with open(fixture_path(name), "rb") as fh:
        return json.load(fh)


def fields_for(name):
    """Base (and perturbed, when present) coefficient fields for a fixture.

    Cached per session: sign-window detection and limit scans are pure
    functions of the problem file.
    """
    if name not in _FIELD_CACHE:
        spec = load_problem(fixture_path(name))
        base, pert, note = build_fields(spec)
        assert note is None, f"sign-window detection failed for {name}: {note}"
        _FIELD_CACHE[name] = (spec, base, pert)
    return _FIELD_CACHE[name]


@pytest.fixture(scope="session")
def coulomb_field():
    return fields_for("coulomb")[1]


@pytest.fixture(scope="session")
def sech2_field():
    return fields_for("sech2")[1]


@pytest.fixture(scope="session")
def gap_unit_field():
    return fields_for("gap_unit")[1]


@pytest.fixture(scope="session")
def gap_well_field():
    return fields_for("gap_well")[1]


@pytest.fixture(scope="session")
def kneser_c1_field():
    return fields_for("kneser_c1")[1]


@pytest.fixture(scope="session")
def periodic_cosine_field():
    return fields_for("periodic_cosine")[1]
