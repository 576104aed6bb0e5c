"""Acceptance criteria 1-12, each printing one PASS/FAIL line."""
import json
import os
import random
import subprocess
import sys
from math import comb

import pytest

from conftest import CONNECTION_FIXTURES, FIXTURES, INTEGRABLE, load_fixture, random_connection, random_matrix
from spencer_lab import io as sio
from spencer_lab.exactla import image, rank
from spencer_lab.multilinear import GradedSlot, exterior_tensor_embedding, partial_matrix, phi_partial_matrix
from spencer_lab.oracle import compare_with_tower, truncated_solution_dim
from spencer_lab.pfaffian import pullback, to_connection, to_form
from spencer_lab.polynomial import VectorPolynomial
from spencer_lab.relconn import (
    ConstantRelativeConnection,
    finite_type_analysis,
    jet_map,
    pr_cokernel,
    pr_kernel,
    prolong_tower,
    prolongation_space,
    reduced_curvature_dim,
    symbol_map,
    symbol_prolongation_in_jets,
    tower_connections,
    validate_compatible,
)
from spencer_lab.tableau import (
    Tableau,
    TableauMap,
    phi_prolongations,
    prolong_phi,
    prolongations,
    spencer_cohomology,
)
from spencer_lab.multilinear import multi_indices


@pytest.fixture
def verdict(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\ncriterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def test_criterion_01_complex_laws(verdict):
    checked = 0
    bad = []
    for n in range(1, 5):
        for m in (1, 2):
            for k in range(2, 5):
                for j in range(0, n - 1):
                    d1 = partial_matrix(GradedSlot(n, m, j, k))
                    d2 = partial_matrix(GradedSlot(n, m, j + 1, k - 1))
                    checked += 1
                    if not (d2 @ d1).is_zero():
                        bad.append((n, m, j, k))
    rng = random.Random(2024)
    for _ in range(50):
        n, m, d = rng.randint(2, 4), rng.randint(1, 2), rng.randint(1, 3)
        phi = random_matrix(rng, n * m, d)
        g1 = prolong_phi(TableauMap(n, m, phi))
        for j in range(0, n - 1):
            first = partial_matrix(GradedSlot(n, d, j, 1)) @ exterior_tensor_embedding(n, j, g1.inclusion())
            checked += 1
            if not (phi_partial_matrix(n, phi, j + 1) @ first).is_zero():
                bad.append(("phi", n, m, j))
    verdict(1, not bad, f"{checked} compositions exactly zero" if not bad else f"nonzero: {bad[:5]}")


def test_criterion_02_full_tableau_acyclic(verdict):
    failures = []
    for n in range(1, 4):
        for k in range(1, 5):
            for m in (1, 2):
                table = spencer_cohomology(Tableau.full(n, m, k), n + 1)
                if not table.interior_vanishes():
                    failures.append((n, k, m))
    verdict(2, not failures, "interior H = 0 for n<=3, k<=4, m<=2" if not failures else f"{failures}")


def test_criterion_03_two_way_prolongation(verdict):
    rng = random.Random(31)
    cases = []
    for _ in range(24):
        n, a = rng.randint(1, 3), rng.randint(2, 6)
        cases.append(random_connection(rng, n, a, rng.randint(0, a - 1)))
    cases += [load_fixture(f) for f in CONNECTION_FIXTURES]
    bad = [i for i, c in enumerate(cases)
           if pr_kernel(c) != symbol_prolongation_in_jets(c, prolong_phi(symbol_map(c)))]
    verdict(3, not bad, f"{len(cases)} connections, ker pr == g^(1) as subspaces" if not bad else f"mismatch {bad}")


def test_criterion_04_rank_law(verdict):
    bad = []
    for name in CONNECTION_FIXTURES:
        c = load_fixture(name)
        rep = prolong_tower(c, 4, strict=False)
        gs = [s.dim for s in phi_prolongations(symbol_map(c), 4)]
        last_smooth = 4 if rep.failed_at is None else rep.failed_at - 1
        for lv in rep.levels[:last_smooth + 1]:
            if lv.rank_P != c.F_rank + sum(gs[1:lv.k + 1]):
                bad.append((name, lv.k))
    verdict(4, not bad, "rank P^N = a + sum rank g^(i) on all smooth levels" if not bad else f"{bad}")


def test_criterion_05_jet_towers(verdict):
    got = {}
    ok = True
    for n, a in ((2, 1), (3, 2)):
        ranks = prolong_tower(load_fixture(f"jet_n{n}_a{a}.json"), 3).ranks
        expected = [a * comb(n + k + 1, k + 1) for k in range(4)]
        got[(n, a)] = ranks
        ok &= ranks == expected
    verdict(5, ok, f"ranks {got}")


def test_criterion_06_sl2_finite_type(verdict):
    c = load_fixture("u3.json")
    r = finite_type_analysis(c, 4)["r"]
    oracle = [truncated_solution_dim(c, N) for N in range(2, 5)]
    verdict(6, r == 3 and oracle == [3, 3, 3], f"r = {r}, oracle N=2..4 {oracle}")


def test_criterion_07_infinite_type(verdict):
    t = load_fixture("cartan1904.json")
    dims = [g.dim for g in prolongations(t, 6)]
    c = load_fixture("cartan_conn.json")
    ft = finite_type_analysis(c, 6)
    ok = dims == [1] * 6 and ft["order"] is None and ft["symbol_dims"][1:] == dims
    verdict(7, ok, f"dims {dims}, finite type within 6: {'not found' if ft['order'] is None else ft['order']}")


def test_criterion_08_obstruction(verdict):
    c = load_fixture("obstructed.json")
    cok = pr_cokernel(c)
    red = reduced_curvature_dim(c)
    cmp = compare_with_tower(c, 3)
    ok = cok == 1 and red == 1 and 1 in cmp["disagreements"] and cmp["obstruction"] == 1
    verdict(8, ok, f"cokernel {cok}, reduced curvature {red}, disagreements at {cmp['disagreements']}")


def test_criterion_09_oracle_agreement(verdict):
    bad = []
    for name in INTEGRABLE:
        c = load_fixture(name)
        ranks = prolong_tower(c, 4).ranks
        for k in range(1, 5):
            if truncated_solution_dim(c, k) != ranks[k]:
                bad.append((name, k))
    verdict(9, not bad, f"{len(INTEGRABLE)} fixtures agree for k<=4" if not bad else f"{bad}")


def test_criterion_10_compatibility(verdict):
    rng = random.Random(10)
    pairs = good = broken = 0
    for name in INTEGRABLE:
        conns = tower_connections(load_fixture(name), 2)
        for low, up in zip(conns, conns[1:]):
            pairs += 1
            flags = validate_compatible(up, low)
            if flags["compat1"] and flags["compat2"] and image(jet_map(up)).issubspace(prolongation_space(low)):
                good += 1
            while True:
                R = random_matrix(rng, up.E_rank, up.F_rank)
                if not (low.l @ R).is_zero():
                    break
            i = rng.randrange(up.n)
            Cs = tuple(C + R if t == i else C for t, C in enumerate(up.C))
            bad = validate_compatible(ConstantRelativeConnection(up.n, up.F_rank, up.E_rank, up.l, Cs), low)
            if not (bad["compat1"] and bad["compat2"]):
                broken += 1
    ok = good == pairs and broken == pairs
    verdict(10, ok, f"{good}/{pairs} tower pairs compatible, {broken}/{pairs} perturbations rejected")


def test_criterion_11_pfaffian_roundtrip(verdict):
    ident = all(to_connection(to_form(load_fixture(f))) == load_fixture(f) for f in CONNECTION_FIXTURES)
    rng = random.Random(11)
    matches = 0
    for _ in range(30):
        n, a = rng.randint(1, 3), rng.randint(1, 4)
        c = random_connection(rng, n, a, rng.randint(0, a - 1))
        terms = {alpha: [rng.randint(-4, 4) for _ in range(a)]
                 for d in range(4) for alpha in multi_indices(n, d) if rng.random() < 0.6}
        s = VectorPolynomial.from_dict(n, a, terms)
        matches += pullback(to_form(c), s) == c.apply(s)
    verdict(11, ident and matches == 30, f"round-trip identity {ident}, s*θ = D(s) on {matches}/30 sections")


def _cli(args, seed):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    return subprocess.run([sys.executable, "-m", "spencer_lab", *args], capture_output=True, env=env,
                          check=False).stdout


def test_criterion_12_determinism(verdict):
    by_kind = {"tableau": [], "tower": [], "connection": []}
    for p in sorted(FIXTURES.glob("*.json")):
        by_kind[sio.detect_kind(sio.load_json(p))].append(str(p))
    runs = [
        ["tableau", "cohomology", *by_kind["tableau"], "--pmax", "2"],
        ["tableau", "tower", *by_kind["tower"]],
        ["conn", "analyze", *by_kind["connection"], "--max-order", "2", "--oracle-degree", "2"],
        ["pfaffian", "check", *by_kind["connection"]],
    ]
    same = True
    for args in runs:
        first, second = _cli(args, 1), _cli(args, 2)
        same &= bool(first) and first == second
        json.loads(first)
    verdict(12, same, f"{sum(len(v) for v in by_kind.values())} fixtures, byte-identical reports across runs")
