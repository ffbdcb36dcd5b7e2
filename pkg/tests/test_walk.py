import math
from fractions import Fraction

import numpy as np
import pytest

from bettimc.errors import InputError
from bettimc.fixtures import c4, disjoint_triangles, filled_triangle, hollow_triangle, octahedron
from bettimc.oracle import exact_normalized_trace, exact_second_moment
from bettimc.walk import (
    DegenerateColumn,
    WalkConfig,
    WalkTable,
    evaluate_f,
    sample_path,
    sample_paths,
    transition_profile,
)

from conftest import brute_h, er_instances, fixture_instances, random_explicit


def test_profile_examples():
    p = transition_profile(hollow_triangle(), (0, 1))
    assert (p.stay_prob, p.move_prob_each, p.degree) == (Fraction(1, 3), Fraction(1, 3), 2)
    p = transition_profile(c4(), (0, 1))
    assert (p.stay_prob, p.move_prob_each, p.degree) == (Fraction(1, 2), Fraction(1, 4), 2)
    p = transition_profile(disjoint_triangles(), (0, 1, 2))
    assert (p.stay_prob, p.degree) == (1, 0)


def test_profile_degenerate_column():
    with pytest.raises(DegenerateColumn):
        transition_profile(filled_triangle(), (0, 1))


INSTANCES = [x for x in er_instances(40, seed=11) + fixture_instances() if len(x[1].k_simplices(x[2])) <= 500]
INSTANCES += [(f"explicit{s}", random_explicit(9, 7, 3, s), 1 + s % 2) for s in range(6)]


@pytest.mark.parametrize("label,cx,k", INSTANCES, ids=[x[0] for x in INSTANCES])
def test_kernel_matches_assembled_h(label, cx, k):
    h = brute_h(cx, k)
    idx = cx.k_simplices(k)
    pos = {s: i for i, s in enumerate(idx)}
    for j, s in enumerate(idx):
        norm = sum(abs(h[i][j]) for i in range(len(idx)))
        if norm == 0:
            continue
        p = transition_profile(cx, s)
        assert p.stay_prob + p.degree * p.move_prob_each == 1
        assert p.stay_prob == abs(h[j][j]) / norm
        moved = {t: sg for t, sg in p.neighbors}
        for i, t in enumerate(idx):
            if i == j:
                continue
            expect = abs(h[i][j]) / norm
            assert (p.move_prob_each if t in moved else 0) == expect
            if t in moved:
                assert moved[t] == (1 if h[pos[t]][j] > 0 else -1)


@pytest.mark.parametrize("label,cx,k", INSTANCES[:20], ids=[x[0] for x in INSTANCES[:20]])
def test_table_matches_profiles(label, cx, k):
    table = WalkTable.build(cx, k)
    for i, s in enumerate(table.index):
        if table.norm_exact[i] == 0:
            assert table.stay[i] == 1
            continue
        p = transition_profile(cx, s)
        assert table.norm_exact[i] == p.column_norm
        assert table.stay[i] == float(p.stay_prob)
        nbrs = [(table.index[table.nbr[i, j]], int(table.nbr_sign[i, j])) for j in range(table.degree[i])]
        assert tuple(nbrs) == p.neighbors


def test_evaluate_f_examples():
    s, t = (0, 1), (0, 3)
    assert evaluate_f([s, s, s], [1, 1], [0.5, 0.5]) == 0.25
    assert evaluate_f([s, t], [1], [1.0]) == 0.0
    with pytest.raises(InputError):
        evaluate_f([s], [1], [1.0])


def test_c4_closed_two_step_paths_against_h_squared():
    # H^2[s, s] = sum over t of H[s,t] H[t,s]; each closed 2-step path contributes sign product times |H| weights
    cx = c4()
    h = brute_h(cx, 1)
    idx = cx.k_simplices(1)
    s = idx.index((0, 1))
    p = transition_profile(cx, (0, 1))
    total = p.stay_prob**2 * p.column_norm**2  # stay twice, signs +1
    for t, sg in p.neighbors:
        back = dict(transition_profile(cx, t).neighbors)[(0, 1)]
        q = transition_profile(cx, t)
        f = sg * back * p.column_norm * q.column_norm
        assert abs(f) == 1
        total += p.move_prob_each * q.move_prob_each * f
    assert total == sum(h[s][i] * h[i][s] for i in range(len(idx)))


def test_sample_path_disjoint_cliques_deterministic(rng):
    cx = disjoint_triangles()
    cfg = WalkConfig(2, 3)
    for s in cx.k_simplices(2):
        r = sample_path(cx, cfg, s, rng)
        assert r.f_value == 0.125 and r.closed


def test_sample_path_zero_norm(rng):
    cx = filled_triangle()
    for ell in (1, 2, 5):
        for s in cx.k_simplices(1):
            assert sample_path(cx, WalkConfig(1, ell), s, rng).f_value == 0.0


def test_sample_path_trace_lines(rng):
    lines = []
    sample_path(c4(), WalkConfig(1, 4), (0, 1), rng, trace=lines.append)
    assert len(lines) == 4 and lines[0].startswith("0\t0 1\t")


def test_sample_path_rejects_wrong_dimension(rng):
    with pytest.raises(InputError):
        sample_path(octahedron(), WalkConfig(1, 2), (0, 1, 2), rng)


def test_hollow_triangle_scalar_sampler_unbiased():
    cx = hollow_triangle()
    rng = np.random.default_rng(3)
    idx = cx.k_simplices(1)
    cfg = WalkConfig(1, 1)
    f = np.array([sample_path(cx, cfg, idx[i], rng).f_value for i in rng.integers(0, 3, size=100_000)])
    assert set(np.unique(f)) <= {0.0, 1.0}
    se = f.std(ddof=1) / math.sqrt(len(f))
    assert abs(f.mean() - 1 / 3) <= 3 * se


@pytest.mark.parametrize("name", ["c4", "octahedron", "hollow-triangle"])
def test_batch_and_scalar_samplers_agree_pathwise(name):
    from bettimc.fixtures import get_fixture, FIXTURES

    cx = get_fixture(name)
    k = FIXTURES[name][1]
    table = WalkTable.build(cx, k)
    for seed in range(50):
        for start in range(len(table)):
            a = sample_paths(table, 5, np.array([start]), np.random.default_rng(seed))[0]
            b = sample_path(cx, WalkConfig(k, 5), table.index[start], np.random.default_rng(seed)).f_value
            assert a == pytest.approx(b, rel=1e-12, abs=0)


@pytest.mark.parametrize("name,k,ell", [
    ("hollow-triangle", 1, 3), ("c4", 1, 6), ("octahedron", 2, 4), ("disjoint-triangles", 2, 3),
])
def test_batch_sampler_moments(name, k, ell):
    from bettimc.fixtures import get_fixture

    cx = get_fixture(name)
    table = WalkTable.build(cx, k)
    rng = np.random.default_rng(99)
    starts = rng.integers(0, len(table), size=100_000)
    f = sample_paths(table, ell, starts, rng)
    truth = float(exact_normalized_trace(cx, k, ell))
    second = float(exact_second_moment(cx, k, ell))
    se = f.std(ddof=1) / math.sqrt(len(f))
    assert abs(f.mean() - truth) <= 3 * se + 1e-15
    se2 = (f**2).std(ddof=1) / math.sqrt(len(f))
    assert abs((f**2).mean() - second) <= 3 * se2 + 1e-15


def test_walk_config_validation():
    with pytest.raises(InputError):
        WalkConfig(1, 0)
    with pytest.raises(InputError):
        WalkConfig(0, 2)
