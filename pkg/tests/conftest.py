from __future__ import annotations

import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from spencer_lab import io as sio
from spencer_lab.exactla import Matrix, rank
from spencer_lab.relconn import ConstantRelativeConnection

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

CONNECTION_FIXTURES = sorted(p.name for p in FIXTURES.glob("*.json")
                             if sio.detect_kind(sio.load_json(p)) == "connection")
TABLEAU_FIXTURES = sorted(p.name for p in FIXTURES.glob("*.json")
                          if sio.detect_kind(sio.load_json(p)) == "tableau")
# fixtures whose towers are smoothly defined at every level
INTEGRABLE = [f for f in CONNECTION_FIXTURES if f != "obstructed.json"]


def load_fixture(name: str):
    return sio.load(FIXTURES / name)


@pytest.fixture
def fixture_path():
    return lambda name: str(FIXTURES / name)


def random_matrix(rng: random.Random, r: int, c: int, lo=-2, hi=2, density=0.6) -> Matrix:
    return Matrix.from_rows([[rng.randint(lo, hi) if rng.random() < density else 0 for _ in range(c)]
                             for _ in range(r)], c)


def random_connection(rng: random.Random, n: int, a: int, b: int) -> ConstantRelativeConnection:
    while True:
        l = random_matrix(rng, b, a, density=0.8)
        if rank(l) == b:
            break
    C = [random_matrix(rng, b, a, density=0.4) for _ in range(n)]
    return ConstantRelativeConnection(n, a, b, l, tuple(C))


@st.composite
def small_matrices(draw, max_rows=5, max_cols=5, rows=None, cols=None):
    r = rows if rows is not None else draw(st.integers(0, max_rows))
    c = cols if cols is not None else draw(st.integers(1, max_cols))
    entries = draw(st.lists(st.integers(-3, 3), min_size=r * c, max_size=r * c))
    return Matrix.from_flat(r, c, entries)


@st.composite
def connections(draw, max_n=3, max_a=4):
    seed = draw(st.integers(0, 10**6))
    n = draw(st.integers(1, max_n))
    a = draw(st.integers(1, max_a))
    b = draw(st.integers(0, a - 1)) if a > 1 else 0
    return random_connection(random.Random(seed), n, a, b)
