"""Genuine two-particle quasi-1D scattering.

Two particles with an on-site contact coupling ``U`` move on the 2D
lattice; the transverse trap makes center-of-mass and relative motion
non-separable, so scattering couples the entrance channel (both
particles in the transverse ground state) to every closed *pair* of
transverse excitations.  At total longitudinal quasi-momentum ``K`` the
pair hops collectively with rate ``J_K = 2 J cos(K/2)`` and the closed
pair channel ``(n1, n2)`` decays along the relative coordinate with
factor ``alpha_{n1,n2}`` fixed by the channel gap.

Everything is driven by the overlap kernel

    R(a; b) = sum_y s_a(y) s_b(y),

where ``s_b(y)`` is the symmetrized transverse pair function of channel
``b`` evaluated on the collision diagonal ``y1 = y2 = y``
(``psi_n(y)^2`` for equal indices, ``sqrt(2) psi_{n1} psi_{n2}`` for
distinct ones — the orthonormal two-boson convention).  The channel
amplitudes solve the linear system

    I = v + U M I,      M[a, b] = R[a, b] / D_b,

with ``v`` the entrance column ``R(a; 0,0)`` and
``D_b = E + 2 J_K alpha_b - E_b < 0`` the closed-channel denominators.
The entrance amplitude

    I00(U) = R(00;00) + U sum_b (v_b / D_b) I_b

gives the effective 1D coupling ``U1D = U * I00`` and the scattering
length ``a = -2 J_K / U1D``.  Because ``U`` enters linearly, ``I00`` is
a rational function of ``U`` with poles at the confinement-induced
resonances: diagonalizing the symmetric form
``A = |D|^{-1/2} R |D|^{-1/2}`` (eigenpairs ``mu_j, w_j``; projections
``c_j = w_j . |D|^{-1/2} v``) yields the exact partial-fraction form

    I00(U) = R(00;00) - U sum_j c_j^2 / (1 + U mu_j),

so resonances sit at ``U_j = -1/mu_j`` with ``U1D`` residue
``U_j^3 c_j^2``; the dimensionless strength ``c_j^2 |U_j| / R(00;00)``
is 1 for an ideal isolated pole and is used to separate physically
visible resonances from the dense background of negligible ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .errors import (ConfigError, Diverging, NoConvergence, OpenChannel,
                     SignConventionViolation, SingularSystem,
                     UnphysicalAmplitude)
from .traps import (J, TransverseSpectrum, TrapSpec, alpha_closed,
                    solve_transverse)

#: Resonances with normalized pole strength below this are reported as
#: invisible (they do not register at any realistic plot resolution).
VISIBILITY_FLOOR = 1e-5
#: Normalized pole strength separating broad from sharp resonances.
BROAD_THRESHOLD = 0.05

_SINGULAR_PROXIMITY = 1e-12
_FIXED_POINT_DAMPING = 0.5
_NEWTON_AFTER = 50
_MAX_ITERATIONS = 10_000
_FIXED_POINT_TOL = 1e-10


def pair_hopping(total_momentum: float = 0.0) -> float:
    """Collective hopping rate ``J_K = 2 J cos(K/2)`` of the pair.

    Positive for ``|K| < pi``; the channel reduction needs ``J_K > 0``.
    """
    if not abs(total_momentum) < math.pi:
        raise ConfigError(
            f"total quasi-momentum must satisfy |K| < pi (J_K -> 0 "
            f"freezes the collective motion), got K={total_momentum}")
    return 2.0 * J * math.cos(0.5 * total_momentum)


@dataclass(frozen=True)
class PairChannel:
    """One closed two-particle transverse channel ``(n1, n2)``,
    ``n1 <= n2``, never ``(0, 0)``.

    ``parity_weight`` is +1 / -1 for even / odd combined transverse
    parity (0 when the trap defines no parity); odd channels decouple
    from the entrance channel of a symmetric trap.
    """

    n1: int
    n2: int
    energy: float
    alpha: float
    denominator: float
    parity_weight: int


@dataclass(frozen=True)
class OverlapKernel:
    """Channel set plus overlap data of the two-body problem at one
    ``(K, E)`` point.

    ``r_matrix[a, b]`` are the channel-channel overlaps,
    ``entrance_column[b] = R(b; 0,0)`` and
    ``r_entrance = R(0,0; 0,0) = sum_y psi_0(y)^4``.
    """

    channels: tuple[PairChannel, ...]
    r_matrix: np.ndarray
    entrance_column: np.ndarray
    r_entrance: float
    j_k: float
    total_momentum: float
    energy: float
    spectrum: TransverseSpectrum
    n_cut: int

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    @property
    def denominators(self) -> np.ndarray:
        return np.array([c.denominator for c in self.channels])

    @cached_property
    def _spectral(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues ``mu_j`` of the symmetrized closed-channel form
        and entrance projections ``c_j`` (see module docstring)."""
        if self.n_channels == 0:
            return np.empty(0), np.empty(0)
        scale = 1.0 / np.sqrt(-self.denominators)
        sym = self.r_matrix * scale[:, None] * scale[None, :]
        mu, w = np.linalg.eigh(sym)
        c = w.T @ (scale * self.entrance_column)
        return mu, c

    def entrance_amplitude(self, u) -> np.ndarray | float:
        """``I00(U)`` from the partial-fraction form; vectorized in `u`.

        Algebraically identical to the direct linear solve of
        :func:`solve_scattering_length`; infinities mark resonances.
        """
        mu, c = self._spectral
        u_arr = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            shifted = 1.0 + np.multiply.outer(u_arr, mu)
            i00 = self.r_entrance - u_arr * (c * c / shifted).sum(axis=-1)
        return i00 if u_arr.shape else float(i00)

    def at_energy(self, energy: float) -> "OverlapKernel":
        """Same channel set and overlaps, re-evaluated at a different
        scattering energy (new decay factors and denominators)."""
        if energy == self.energy:
            return self
        channels = []
        for ch in self.channels:
            av = alpha_closed(ch.energy, energy, j_eff=self.j_k)
            channels.append(replace(ch, alpha=av.alpha,
                                    denominator=av.denominator))
        _check_denominators(channels)
        return OverlapKernel(
            channels=tuple(channels), r_matrix=self.r_matrix,
            entrance_column=self.entrance_column,
            r_entrance=self.r_entrance, j_k=self.j_k,
            total_momentum=self.total_momentum, energy=energy,
            spectrum=self.spectrum, n_cut=self.n_cut)


@dataclass(frozen=True)
class TwoBodyResult:
    """Scattering output at one coupling.

    ``a`` is set for zero-momentum solves, ``delta_k`` for finite-``k``
    ones; ``i_vector`` holds the closed-channel amplitudes in kernel
    channel order.  The entrance amplitude satisfies
    ``i00 = U1D / U`` and, at zero momentum, ``a = -2 J_K / U1D``.
    """

    u: float
    k: float | None
    u1d: float
    a: float | None
    delta_k: float | None
    i00: float
    i_vector: np.ndarray
    method: str


@dataclass(frozen=True)
class BornResult:
    """Born-series evaluation of the entrance amplitude.

    ``partial_sums[m]`` is ``I00`` truncated at order ``m + 1``;
    ``converged`` reports the ratio test at the final order.
    """

    u: float
    order: int
    i00: float
    u1d: float
    a: float
    partial_sums: tuple[float, ...]
    converged: bool


@dataclass(frozen=True)
class Resonance:
    """One pole of the effective coupling.

    ``width`` is the dimensionless pole strength
    ``c^2 |U_pole| / R(00;00)`` (1 for an ideal isolated pole);
    ``residue`` is the residue of ``U1D(U)`` at the pole.
    """

    u: float
    width: float
    residue: float
    kind: str
    visible: bool


@dataclass(frozen=True)
class ResonanceReport:
    """All resonances and zero crossings in a coupling window."""

    resonances: tuple[Resonance, ...]
    zero_crossings: tuple[float, ...]
    window: tuple[float, float]
    n_states: int
    n_channels: int
    converged: bool | None = None

    @property
    def visible_resonances(self) -> tuple[Resonance, ...]:
        return tuple(r for r in self.resonances if r.visible)


def _check_denominators(channels) -> None:
    bad = [c for c in channels if not c.denominator < 0.0]
    if bad:
        c = bad[0]
        raise SignConventionViolation(
            f"closed-channel denominator of ({c.n1},{c.n2}) is "
            f"{c.denominator:.6g} >= 0; the channel reduction is only "
            f"valid with negative denominators")


def build_kernel(spectrum: TransverseSpectrum, total_momentum: float = 0.0,
                 energy: float | None = None,
                 n_cut: int | None = None) -> OverlapKernel:
    """Assemble the two-body overlap kernel.

    Parameters
    ----------
    spectrum : TransverseSpectrum
        Single-particle transverse states; the first `n_cut` build the
        pair channels.
    total_momentum : float
        Conserved total quasi-momentum ``K``, ``|K| < pi``.
    energy : float, optional
        Scattering energy.  Default: the lowest pair scattering energy
        ``-2 J_K + 2 E_0`` (zero relative momentum).
    n_cut : int, optional
        Single-particle state cutoff; default: all states in `spectrum`.

    Raises
    ------
    OpenChannel
        If any retained pair channel is open at `energy`.
    SignConventionViolation
        If a closed-channel denominator fails to be negative.
    """
    j_k = pair_hopping(total_momentum)
    if n_cut is None:
        n_cut = spectrum.n_states
    if not 1 <= n_cut <= spectrum.n_states:
        raise ConfigError(
            f"n_cut={n_cut} outside 1..{spectrum.n_states} (states held "
            f"by the spectrum)")
    e0 = float(spectrum.energies[0])
    if energy is None:
        energy = -2.0 * j_k + 2.0 * e0

    parity_sign = {"even": 1, "odd": -1, "none": 0}
    channels: list[PairChannel] = []
    rows: list[np.ndarray] = []
    psi = spectrum.wavefunctions
    entrance_row = psi[0] * psi[0]
    for n1 in range(n_cut):
        for n2 in range(n1, n_cut):
            if n1 == 0 and n2 == 0:
                continue
            p1 = parity_sign[spectrum.parities[n1]]
            p2 = parity_sign[spectrum.parities[n2]]
            weight = p1 * p2
            if spectrum.symmetric and weight == -1:
                continue  # odd pair: exactly decoupled from the entrance
            e_ch = float(spectrum.energies[n1] + spectrum.energies[n2])
            av = alpha_closed(e_ch, energy, j_eff=j_k)
            channels.append(PairChannel(
                n1=n1, n2=n2, energy=e_ch, alpha=av.alpha,
                denominator=av.denominator, parity_weight=weight))
            row = psi[n1] * psi[n2]
            if n1 != n2:
                row = math.sqrt(2.0) * row
            rows.append(row)
    _check_denominators(channels)

    if rows:
        s = np.array(rows)
        r_matrix = s @ s.T
        r_matrix = 0.5 * (r_matrix + r_matrix.T)
        entrance_column = s @ entrance_row
    else:
        r_matrix = np.empty((0, 0))
        entrance_column = np.empty(0)
    return OverlapKernel(
        channels=tuple(channels), r_matrix=r_matrix,
        entrance_column=entrance_column,
        r_entrance=float(entrance_row @ entrance_row), j_k=j_k,
        total_momentum=total_momentum, energy=energy, spectrum=spectrum,
        n_cut=n_cut)


def _system_matrix(kernel: OverlapKernel) -> np.ndarray:
    return kernel.r_matrix / kernel.denominators[None, :]


def _check_not_singular(kernel: OverlapKernel, u: float) -> None:
    mu, _ = kernel._spectral
    if mu.size and u != 0.0:
        prox = float(np.min(np.abs(1.0 + u * mu)))
        if prox < _SINGULAR_PROXIMITY:
            raise SingularSystem(
                f"coupling U={u:g} sits on a confinement-induced "
                f"resonance pole (|1 + U mu| = {prox:.3g})")


def _solve_linear(kernel: OverlapKernel, u: float) -> tuple[np.ndarray, float]:
    """Direct dense solve of ``(1 - U M) I = v``; returns ``(I, I00)``."""
    _check_not_singular(kernel, u)
    if kernel.n_channels == 0:
        return np.empty(0), kernel.r_entrance
    m = _system_matrix(kernel)
    lhs = np.eye(kernel.n_channels) - u * m
    try:
        i_vec = np.linalg.solve(lhs, kernel.entrance_column)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(
            f"linear system singular at U={u:g} (resonance pole)") from exc
    i00 = kernel.r_entrance + u * float(
        (kernel.entrance_column / kernel.denominators) @ i_vec)
    return i_vec, i00


def solve_scattering_length(kernel: OverlapKernel, u: float) -> TwoBodyResult:
    """Zero-momentum two-body scattering at coupling `u`.

    Solves the channel system by a direct dense linear solve and
    returns ``U1D = U * I00`` and ``a = -2 J_K / U1D``.

    Raises
    ------
    SingularSystem
        If `u` sits numerically on a resonance pole.
    """
    i_vec, i00 = _solve_linear(kernel, u)
    u1d = u * i00
    a = math.inf if u1d == 0.0 else -2.0 * kernel.j_k / u1d
    return TwoBodyResult(u=u, k=None, u1d=u1d, a=a, delta_k=None,
                         i00=i00, i_vector=i_vec, method="direct-solve")


def u1d_curve(kernel: OverlapKernel, u_values) -> np.ndarray:
    """Effective coupling ``U1D(U)`` on an array of couplings.

    Uses the partial-fraction form (one eigendecomposition, then O(n)
    per coupling); identical to :func:`solve_scattering_length` values.
    """
    u_arr = np.asarray(u_values, dtype=float)
    return u_arr * kernel.entrance_amplitude(u_arr)


def born_series(kernel: OverlapKernel, u: float, order: int) -> BornResult:
    """Born series of the entrance amplitude, truncated at `order`.

    Order 1 is the bare overlap ``R(00;00)``; order ``m`` adds channel
    round trips up to ``U^{m-1}``.

    Raises
    ------
    Diverging
        If term magnitudes grow for 5 consecutive orders (coupling
        beyond the convergence radius set by the nearest resonance).
    """
    if order < 1:
        raise ConfigError(f"Born order must be >= 1, got {order}")
    partials = [kernel.r_entrance]
    converged = True
    if kernel.n_channels and u != 0.0:
        weight = kernel.entrance_column / kernel.denominators
        y = kernel.entrance_column.copy()
        m = _system_matrix(kernel)
        total = kernel.r_entrance
        prev_mag = None
        growing = 0
        u_pow = 1.0
        for _ in range(1, order):
            u_pow *= u
            term = u_pow * float(weight @ y)
            total += term
            partials.append(total)
            mag = abs(term)
            if prev_mag is not None:
                if mag > prev_mag:
                    growing += 1
                    if growing >= 5:
                        raise Diverging(
                            f"Born terms grew for {growing} consecutive "
                            f"orders at U={u:g}: |U| exceeds the first "
                            f"resonance coupling")
                else:
                    growing = 0
            prev_mag = mag
            y = m @ y
        if len(partials) >= 2:
            last = abs(partials[-1] - partials[-2])
            before = abs(partials[-2] - partials[-3]) if len(partials) >= 3 \
                else math.inf
            converged = last < before or last == 0.0
    else:
        partials.extend([kernel.r_entrance] * (order - 1))
    i00 = partials[-1]
    u1d = u * i00
    a = math.inf if u1d == 0.0 else -2.0 * kernel.j_k / u1d
    return BornResult(u=u, order=order, i00=i00, u1d=u1d, a=a,
                      partial_sums=tuple(partials), converged=converged)


def solve_finite_k(kernel: OverlapKernel, u: float, k: float) -> TwoBodyResult:
    """Finite-momentum two-body scattering: phase shift at relative
    quasi-momentum `k`.

    The entrance term of the channel system carries the amplitude
    factor ``X = sqrt(1 - (U I00 / (2 J_K sin k))^2)``, making the
    system nonlinear; it is solved by a damped scalar fixed point
    seeded from the linear solution, with a safeguarded Newton fallback.
    The phase shift follows from ``sin(delta) = -U I00 / (2 J_K sin k)``
    (continuously 0 at ``U = 0``).

    Raises
    ------
    NoConvergence
        If the iteration cannot reach the residual tolerance.
    UnphysicalAmplitude
        If the converged amplitude violates the sine bound.
    """
    if not 0.0 < k < math.pi:
        raise ConfigError(f"quasi-momentum must lie in (0, pi), got {k}")
    e0 = float(kernel.spectrum.energies[0])
    energy = -2.0 * kernel.j_k * math.cos(k) + 2.0 * e0
    kernel_k = kernel.at_energy(energy)
    i_lin, i00_lin = _solve_linear(kernel_k, u)
    s = 2.0 * kernel.j_k * math.sin(k)

    if u == 0.0:
        return TwoBodyResult(u=u, k=k, u1d=0.0, a=None, delta_k=0.0,
                             i00=i00_lin, i_vector=i_lin,
                             method="fixed-point")

    def amplitude_factor(i00: float) -> float:
        arg = 1.0 - (u * i00 / s) ** 2
        return math.sqrt(arg) if arg > 0.0 else 0.0

    scale = max(1.0, abs(i00_lin))
    x = i00_lin
    solved = False
    for it in range(_MAX_ITERATIONS):
        target = amplitude_factor(x) * i00_lin
        if abs(x - target) <= _FIXED_POINT_TOL * scale:
            solved = True
            break
        if it < _NEWTON_AFTER:
            x = (1.0 - _FIXED_POINT_DAMPING) * x \
                + _FIXED_POINT_DAMPING * target
        else:
            # safeguarded Newton on the bounded variable t = U I00 / s
            t_goal = u * i00_lin / s

            def mismatch(t: float) -> float:
                return t - t_goal * math.sqrt(max(0.0, 1.0 - t * t))

            t = float(brentq(mismatch, -1.0, 1.0, xtol=1e-16,
                             rtol=8.9e-16))
            x = t * s / u
            solved = abs(x - amplitude_factor(x) * i00_lin) \
                <= _FIXED_POINT_TOL * scale
            break
    if not solved:
        raise NoConvergence(
            f"finite-k fixed point stalled at U={u:g}, k={k:g} "
            f"(residual {abs(x - amplitude_factor(x) * i00_lin):.3g})")

    sine = -u * x / s
    if abs(sine) > 1.0 + 1e-12:
        raise UnphysicalAmplitude(
            f"converged amplitude violates |U I00| <= |2 J_K sin k| "
            f"(ratio {abs(sine):.6g})")
    delta = math.asin(max(-1.0, min(1.0, sine)))
    factor = amplitude_factor(x)
    u1d = -s * math.tan(delta)
    return TwoBodyResult(u=u, k=k, u1d=u1d, a=None, delta_k=delta,
                         i00=x, i_vector=factor * i_lin,
                         method="fixed-point")


def locate_resonances(kernel: OverlapKernel,
                      u_window: tuple[float, float] = (-30.0, 0.0)
                      ) -> ResonanceReport:
    """All poles and zero crossings of ``U1D(U)`` in a coupling window.

    Poles are exact reciprocal eigenvalues of the channel operator (no
    scanning); each carries its ``U1D`` residue and normalized strength,
    classified broad/sharp against :data:`BROAD_THRESHOLD` and flagged
    visible above :data:`VISIBILITY_FLOOR`.  Zero crossings of ``U1D``
    (the effective interaction changing sign between poles) are located
    by bracketed root finding on the partial-fraction form.
    """
    u_lo, u_hi = u_window
    if not u_lo < u_hi:
        raise ConfigError(f"empty coupling window {u_window}")
    mu, c = kernel._spectral
    resonances = []
    boundaries = [u_lo, u_hi]
    for mu_j, c_j in zip(mu, c):
        if mu_j == 0.0:
            continue
        u_pole = -1.0 / float(mu_j)
        if not u_lo <= u_pole <= u_hi:
            continue
        boundaries.append(u_pole)
        width = float(c_j) ** 2 * abs(u_pole) / kernel.r_entrance
        residue = u_pole ** 3 * float(c_j) ** 2
        kind = "broad" if width >= BROAD_THRESHOLD else "sharp"
        resonances.append(Resonance(u=u_pole, width=width, residue=residue,
                                    kind=kind,
                                    visible=width > VISIBILITY_FLOOR))
    resonances.sort(key=lambda r: r.u)

    crossings: list[float] = []
    bounds = sorted(set(boundaries))
    pad = 1e-9
    for lo, hi in zip(bounds, bounds[1:]):
        span = hi - lo
        if span <= 4 * pad * max(1.0, abs(lo), abs(hi)):
            continue
        a = lo + pad * max(1.0, abs(lo)) if lo != u_lo else lo
        b = hi - pad * max(1.0, abs(hi)) if hi != u_hi else hi
        if a == 0.0:
            a += pad
        if b == 0.0:
            b -= pad
        if not a < b:
            continue
        us = np.linspace(a, b, 512)
        vals = np.asarray(kernel.entrance_amplitude(us))
        finite = np.isfinite(vals)
        for i in range(len(us) - 1):
            if not (finite[i] and finite[i + 1]):
                continue
            v1, v2 = float(vals[i]), float(vals[i + 1])
            if v1 == 0.0:
                crossings.append(float(us[i]))
            elif v1 * v2 < 0.0:
                crossings.append(float(brentq(
                    lambda x: float(kernel.entrance_amplitude(x)),
                    float(us[i]), float(us[i + 1]),
                    xtol=1e-14, rtol=8.9e-16)))
    crossings = sorted(set(c for c in crossings if c != 0.0))

    return ResonanceReport(
        resonances=tuple(resonances), zero_crossings=tuple(crossings),
        window=(u_lo, u_hi), n_states=kernel.n_cut,
        n_channels=kernel.n_channels, converged=None)


def _complete_basis(spectrum: TransverseSpectrum) -> bool:
    return spectrum.n_states == len(spectrum.grid)


def converged_resonances(trap: TrapSpec, n_start: int,
                         total_momentum: float = 0.0,
                         u_window: tuple[float, float] = (-30.0, 0.0),
                         rel_tol: float = 1e-6, n_step: int = 20,
                         n_limit: int = 161) -> ResonanceReport:
    """Resonance report with the channel cutoff raised until the visible
    pole positions stabilize.

    Starts from `n_start` single-particle states and adds `n_step` per
    rung; two consecutive rungs must agree in visible-resonance count
    and positions (relative `rel_tol`).  A trap whose grid supports no
    further states (complete finite basis) is exact and returns
    immediately.

    Raises
    ------
    NoConvergence
        If `n_limit` is reached without two agreeing rungs.
    """
    if n_start < 1:
        raise ConfigError(f"n_start must be positive, got {n_start}")
    prev: ResonanceReport | None = None
    nc = n_start
    while nc <= n_limit:
        try:
            spectrum = solve_transverse(trap, n_states=nc)
        except ConfigError:
            if prev is not None:
                # the trap ran out of states: the previous rung used the
                # complete basis and is exact
                return replace(prev, converged=True)
            spectrum = solve_transverse(trap)
        kernel = build_kernel(spectrum, total_momentum=total_momentum)
        report = locate_resonances(kernel, u_window)
        if _complete_basis(spectrum):
            return replace(report, converged=True)
        if prev is not None and _reports_match(prev, report, rel_tol):
            return replace(report, converged=True)
        prev = report
        nc += n_step
    raise NoConvergence(
        f"visible resonance positions did not stabilize to {rel_tol:g} "
        f"by {n_limit} transverse states")


def _reports_match(a: ResonanceReport, b: ResonanceReport,
                   rel_tol: float) -> bool:
    ra, rb = a.visible_resonances, b.visible_resonances
    if len(ra) != len(rb):
        return False
    return all(abs(x.u - y.u) <= rel_tol * max(abs(x.u), abs(y.u))
               for x, y in zip(ra, rb))
