"""Pytest fixtures for tests."""

import json
from pathlib import Path
from tempfile import TemporaryDirectory

import pytest
from click.testing import CliRunner

from conewalk.algebra import LinearForm, make_polynomial_cone, make_weyl_chamber
from conewalk.increments import make_distribution


@pytest.fixture
def temp_dir():
    """Create a temporary directory that gets cleaned up."""
    with TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def runner():
    """Create a Click CLI test runner."""
    return CliRunner()


@pytest.fixture
def halfline():
    """The half-line {x > 0}, h(x) = x."""
    return make_polynomial_cone([LinearForm.from_values([1])], label="halfline")


@pytest.fixture
def weyl_a2():
    return make_weyl_chamber("A", 2)


@pytest.fixture
def weyl_c2():
    return make_weyl_chamber("C", 2)


@pytest.fixture
def weyl_d2():
    return make_weyl_chamber("D", 2)


@pytest.fixture
def rademacher():
    return make_distribution("rademacher")


@pytest.fixture
def asymmetric():
    """{-1, 0, 2} with masses 1/3, 1/2, 1/6."""
    return make_distribution("asymmetric_three_point")


@pytest.fixture
def write_config(temp_dir):
    """Write a run config dict to a JSON file and return its path."""

    def _write(payload: dict, name: str = "run.json") -> Path:
        path = temp_dir / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def halfline_config(temp_dir):
    """A small, fast DP run on the half-line."""
    return {
        "cone": {"forms": [[1]], "label": "halfline"},
        "distribution": {"kind": "rademacher"},
        "starts": [[1], [2], [3]],
        "horizons": [16, 32, 64, 128, 256],
        "method": "dp",
        "seed": 11,
        "workers": 1,
        "output_dir": str(temp_dir / "out"),
        "harmonic": {"cap": 256},
        "verify": {
            "fit_from": 16,
            "slope_tolerance": 0.1,
            "ratio_tolerance": 0.1,
            "proportionality_tolerance": 0.1,
            "tv_tolerance": 0.2,
            "near_boundary_tolerance": 0.3,
            "global_bound_tolerance": 0.2,
            "harmonic_tolerance": 1e-3,
        },
        "sample": {"sampler": "conditioned", "paths": 3, "length": 8},
    }
