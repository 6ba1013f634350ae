import numpy as np
import pytest
from hypothesis import given

from _helpers import ORTH_E, ORTH_F, effects, m3_pairs
from qubit_coexistence.invariants import (
    compute_invariants,
    gammas,
    invariant_arrays,
    safe_sqrt,
    sharpness,
    sharpness_arrays,
)
from qubit_coexistence.minkowski import IDENTITY, cross_o, embed3, mdot3
from qubit_coexistence.sampling import projections, sample_pairs, uniform_effects

ONE3 = np.array([1.0, 0.0, 0.0])


def test_orthogonal_projection_invariants():
    inv = compute_invariants(ORTH_E, ORTH_F)
    assert inv.C == pytest.approx(-1 / 16, abs=1e-15)
    assert inv.Cp == pytest.approx(-1 / 16, abs=1e-15)
    assert inv.D == pytest.approx(3 / 16, abs=1e-15)
    assert inv.Delta == pytest.approx(-1 / 32, abs=1e-15)
    assert inv.dd == pytest.approx(-0.5, abs=1e-15)
    assert inv.N == 0.0 and inv.Np == 0.0


def test_commuting_and_equal_pairs_have_zero_delta():
    e = np.array([0.5, 0.2, 0.1, 0.0])
    f = np.array([0.4, -0.1, -0.05, 0.0])
    assert compute_invariants(e, f).Delta == pytest.approx(0.0, abs=1e-15)
    inv = compute_invariants(e, e)
    assert inv.dd == 0.0
    assert inv.Delta == pytest.approx(0.0, abs=1e-15)


def test_gamma_examples():
    assert gammas(ORTH_E, ORTH_F) == pytest.approx((0.25, 0.25, 0.25, 0.25), abs=1e-15)
    half = np.array([0.5, 0.0, 0.0, 0.0])
    gp, gm, _, _ = gammas(half, half)
    assert gp == pytest.approx(0.5) and gm == pytest.approx(0.0, abs=1e-15)


def test_invariant_identities(rng):
    E, F = sample_pairs(rng, 10_000, "mixed")
    inv = invariant_arrays(E, F)
    assert np.max(np.abs(inv["Delta"] - inv["dd"] * inv["cross"] ** 2)) <= 1e-12
    assert np.max(np.abs(inv["GammaP"] * inv["GammaM"] - np.abs(inv["C"]))) <= 1e-12
    assert np.max(np.abs(inv["GammaPp"] * inv["GammaMp"] - np.abs(inv["Cp"]))) <= 1e-12


def test_invariants_under_complement_swap(rng):
    E, F = sample_pairs(rng, 1000, "uniform")
    a = invariant_arrays(E, F)
    b = invariant_arrays(IDENTITY - E, IDENTITY - F)
    assert np.allclose(a["D"], b["D"], atol=1e-14)
    assert np.allclose(a["Delta"], b["Delta"], atol=1e-14)
    assert np.allclose(a["C"], b["Cp"], atol=1e-14)


def test_safe_sqrt_clamps_dust_only():
    assert safe_sqrt(-1e-16) == 0.0
    with np.errstate(invalid="ignore"):
        assert np.isnan(safe_sqrt(-1e-6))


# -- identities on pairs inside the s0-s1-s2 subspace -----------------------


def _m3_frame(rng, n=10_000):
    E, F = m3_pairs(rng, n)
    Ec, Fc = ONE3 - E, ONE3 - F
    d = E - F
    g = cross_o(E, F)
    gc = cross_o(Ec, Fc)
    orient = E[:, 1] * F[:, 2] - E[:, 2] * F[:, 1]
    inv = invariant_arrays(embed3(E), embed3(F))
    return E, F, Ec, Fc, d, g, gc, orient, inv


def test_m3_cross_product_of_g(rng):
    E, F, Ec, Fc, d, g, gc, orient, inv = _m3_frame(rng)
    assert np.max(np.abs(cross_o(g, gc) + d * orient[:, None])) <= 1e-12


def test_m3_gram_identities(rng):
    E, F, Ec, Fc, d, g, gc, orient, inv = _m3_frame(rng)
    dxg = cross_o(d, g)
    assert np.max(np.abs(mdot3(g, g) - inv["C"])) <= 1e-12
    assert np.max(np.abs(mdot3(gc, gc) - inv["Cp"])) <= 1e-12
    assert np.max(np.abs(mdot3(g, gc) - inv["D"])) <= 1e-12
    assert np.max(np.abs(inv["D"] - 0.5 * mdot3(Ec + Fc, dxg))) <= 1e-12
    assert np.max(np.abs(mdot3(E + F, g))) <= 1e-12
    assert np.max(np.abs(mdot3(Ec + Fc, g) - 2 * orient)) <= 1e-12
    assert np.max(np.abs(mdot3(E + F, dxg) + 2 * inv["C"])) <= 1e-12
    assert np.max(np.abs(mdot3(Ec + Fc, dxg) - 2 * inv["D"])) <= 1e-12
    assert np.max(np.abs(mdot3(dxg, dxg) - inv["dd"] * inv["C"])) <= 1e-12


def test_m3_asymptote_directions(rng):
    E, F, Ec, Fc, d, g, gc, orient, inv = _m3_frame(rng)
    dxg = cross_o(d, g)
    s = np.sqrt(np.abs(inv["dd"]))[:, None]
    hp, hm = s * g + dxg, -s * g + dxg
    assert np.max(np.abs(mdot3(hp, hm) - 2 * inv["C"] * inv["dd"])) <= 1e-12
    assert np.max(np.abs(mdot3(E + F, hp) + 2 * inv["C"])) <= 1e-12
    assert np.max(np.abs(mdot3(E + F, hm) + 2 * inv["C"])) <= 1e-12
    generic = orient > 1e-9
    assert np.all(mdot3(hp, hm)[generic] > 0)
    assert np.all(-2 * inv["C"][generic] > 0)
    assert np.all(mdot3(Ec + Fc, hp)[generic] > 0)
    assert np.all(mdot3(Ec + Fc, hm)[generic] > 0)


def test_g_vectors_for_spacelike_pairs(rng):
    E, F, Ec, Fc, d, g, gc, orient, inv = _m3_frame(rng, 3000)
    assert np.all(np.linalg.norm(g, axis=1) > 0)
    assert np.all(np.linalg.norm(gc, axis=1) > 0)
    assert np.all(mdot3(g, g) <= 1e-12)
    assert np.all(mdot3(gc, gc) <= 1e-12)
    ggc = cross_o(g, gc)
    generic = orient > 1e-6
    assert np.all(mdot3(ggc, ggc)[generic] < 0)
    ranks = [np.linalg.matrix_rank(np.stack([a, b]), tol=1e-12) for a, b in zip(g[generic], gc[generic])]
    assert set(ranks) == {2}


def test_g_vectors_for_commuting_pairs(rng):
    # commuting spacelike pairs in M3: Bloch vectors collinear
    n = 500
    axis = rng.normal(size=(n, 2))
    axis /= np.linalg.norm(axis, axis=1, keepdims=True)
    e0 = rng.uniform(0.2, 0.8, n)
    f0 = rng.uniform(0.2, 0.8, n)
    re = rng.uniform(-1, 1, n) * np.minimum(e0, 1 - e0)
    rf = rng.uniform(-1, 1, n) * np.minimum(f0, 1 - f0)
    E = np.column_stack([e0, re[:, None] * axis])
    F = np.column_stack([f0, rf[:, None] * axis])
    d = E - F
    keep = mdot3(d, d) < -1e-6
    E, F = E[keep], F[keep]
    g, gc = cross_o(E, F), cross_o(ONE3 - E, ONE3 - F)
    ggc = cross_o(g, gc)
    assert np.max(np.abs(ggc)) <= 1e-12
    ranks = [np.linalg.matrix_rank(np.stack([a, b]), tol=1e-10) for a, b in zip(g, gc)]
    assert set(ranks) == {1}


def test_sign_of_quadratic_invariants(rng):
    E, F = sample_pairs(rng, 10_000, "mixed")
    inv = invariant_arrays(E, F)
    assert np.all(inv["C"] <= 1e-12)
    assert np.all(inv["Cp"] <= 1e-12)
    spacelike = inv["dd"] < 0
    assert np.all(inv["D"][spacelike] >= -1e-12)
    assert np.all(inv["D"][inv["dd"] < -1e-6] > 0)
    generic = spacelike & (inv["cross"] > 1e-9)
    outside = np.abs(inv["Delta"]) > 1e-12
    assert np.array_equal((inv["Delta"] < 0)[outside], generic[outside])


# -- sharpness --------------------------------------------------------------


def test_sharpness_examples():
    s = sharpness(ORTH_E)
    assert s.F == pytest.approx(0.0, abs=1e-12) and s.S == pytest.approx(1.0, abs=1e-12)
    s = sharpness([0.3, 0.0, 0.0, 0.0])
    assert s.F == pytest.approx(1.0, abs=1e-12) and s.S == pytest.approx(0.0, abs=1e-12)
    assert s.bias == pytest.approx(-0.4)
    s = sharpness([0.5, 0.0, 0.0, 0.25])
    assert s.F == pytest.approx(np.sqrt(3) / 2, abs=1e-12)
    assert s.S == pytest.approx(0.25, abs=1e-12)


@given(effects())
def test_sharpness_relations(e):
    s = sharpness(e)
    sc = sharpness(np.array([1.0, 0, 0, 0]) - e)
    assert -1e-12 <= s.F <= 1 + 1e-12
    assert s.S == pytest.approx(1 - s.F**2, abs=1e-12)
    assert s.S == pytest.approx(sc.S, abs=1e-12)


def test_sharpness_on_projections(rng):
    s = sharpness_arrays(projections(rng, 1000))
    assert np.max(np.abs(s["F"])) <= 1e-12
    s = sharpness_arrays(uniform_effects(rng, 1000))
    assert np.all((s["F"] >= 0) & (s["F"] <= 1))
