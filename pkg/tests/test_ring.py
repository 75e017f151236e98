"""Finite periodic systems: allowed momenta, fermionized-level
crossings, and the approach to the infinite-system limit."""

import math

import pytest

import q1dscatter as q


def test_free_momenta_exact(harm_mod_spectrum):
    for L, branch in ((10, 1), (50, 2), (1000, 3)):
        sol = q.ring_momentum(harm_mod_spectrum, 0.0, L, branch=branch)
        assert sol.k == 2.0 * math.pi * branch / L
        assert sol.residual == 0.0


def test_free_zero_branch_has_no_momentum(harm_mod_spectrum):
    with pytest.raises(q.NoRootInBranch):
        q.ring_momentum(harm_mod_spectrum, 0.0, 50, branch=0)


def test_roots_stay_inside_their_branch(harm_mod_spectrum):
    L = 50
    for u, branch in ((-5.0, 1), (3.0, 1), (10.0, 2), (-20.0, 2)):
        sol = q.ring_momentum(harm_mod_spectrum, u, L, branch=branch)
        lo = (2 * branch - 1) * math.pi / L
        hi = (2 * branch + 1) * math.pi / L
        assert lo < sol.k < hi
        assert sol.residual <= 1e-10
        assert sol.energy == pytest.approx(-2.0 * math.cos(sol.k), rel=1e-14)


def test_weak_attraction_empties_the_lowest_branch(harm_mod_spectrum):
    # for u_cir < U < 0 the zero branch holds no scattering momentum
    with pytest.raises(q.NoRootInBranch):
        q.ring_momentum(harm_mod_spectrum, -1.0, 50, branch=0)
    # beyond the resonance the zero-branch root reappears
    sol = q.ring_momentum(harm_mod_spectrum, -10.0, 50, branch=0)
    assert 0.0 < sol.k < math.pi / 50


def test_crossings_attractive_and_consistent(harm_mod_spectrum):
    crossings = q.ring_cir_crossings(harm_mod_spectrum, 50)
    assert len(crossings) == 9
    assert all(c.u < 0.0 for c in crossings)
    assert crossings[0].u == pytest.approx(-5.43793215672732, rel=1e-12)
    for c in crossings:
        assert c.k == (2 * c.level + 1) * math.pi / 50
        sigma = q.ring_channel_sum(harm_mod_spectrum, c.k, 50)
        assert c.u == pytest.approx(-1.0 / sigma, rel=1e-13)


def test_crossing_window_filter(harm_mod_spectrum):
    window = (-5.3, -5.0)
    subset = q.ring_cir_crossings(harm_mod_spectrum, 50, u_window=window)
    full = q.ring_cir_crossings(harm_mod_spectrum, 50)
    assert [c.u for c in subset] == [
        c.u for c in full if window[0] <= c.u <= window[1]]


def test_lowest_crossing_approaches_infinite_system_cir(micro_spectrum):
    crossings = q.ring_cir_crossings(micro_spectrum, 1000)
    cir = q.u_cir(micro_spectrum)
    assert crossings[0].u == pytest.approx(cir.u_cir, abs=1e-3)
    assert all(c.u < 0.0 for c in crossings)


def test_large_ring_matches_infinite_system(harm_mod_spectrum):
    for u in (-5.0, 4.0, -25.0):
        sol = q.ring_momentum(harm_mod_spectrum, u, 1000, branch=1)
        ref = q.asymptotic_momentum(harm_mod_spectrum, u, 1000, branch=1)
        assert abs(sol.energy - ref.energy) < 1e-12


def test_finite_size_correction_is_tiny_at_moderate_length(harm_mod_spectrum):
    sol = q.ring_momentum(harm_mod_spectrum, -5.0, 20, branch=1)
    ref = q.asymptotic_momentum(harm_mod_spectrum, -5.0, 20, branch=1)
    assert abs(sol.energy - ref.energy) < 1e-9


def test_open_channel_guards(harm_mod_spectrum):
    with pytest.raises(q.OpenChannel):
        q.ring_channel_sum(harm_mod_spectrum, 2.5, 50)
    # branch 1 of a 10-site ring reaches momenta where an excited
    # transverse channel opens: the quasi-1D description fails there
    with pytest.raises(q.OpenChannel):
        q.asymptotic_momentum(harm_mod_spectrum, -5.0, 10, branch=1)


def test_length_validation(harm_mod_spectrum):
    with pytest.raises(q.ConfigError):
        q.ring_channel_sum(harm_mod_spectrum, 0.3, 3)
    with pytest.raises(q.ConfigError):
        q.ring_momentum(harm_mod_spectrum, 1.0, 50, branch=-1)
