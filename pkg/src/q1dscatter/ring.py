"""Scattering on a finite periodic quasi-1D space (a ring of ``L``
sites wrapped along the free direction).

The scattering states on the ring carry one allowed quasi-momentum per
branch, fixed by the transcendental equation

    2 J sin(k) tan(k L / 2) = U |psi_0(0)|^2 / (1 + U Sigma_L(k)),

where ``Sigma_L`` is the closed-channel sum with ring-corrected decay
terms,

    Sigma_L(k) = sum_{n>=1} |psi_n(0)|^2 (1 + alpha_n^L)
                 / [ (E_n - E)(1 + alpha_n^L) - 2 J (alpha_n + alpha_n^{L-1}) ],

``E = -2 J cos k + E_0`` and ``alpha_n = alpha_n(k)`` evaluated
self-consistently at the same energy.  Each denominator equals
``(J/alpha)(1 - alpha^2)(1 - alpha^L) > 0``, so every term of
``Sigma_L`` is positive; as ``L -> infinity`` the ring sum reduces to
the infinite-system channel sum and the equation collapses to the
quantization rule ``k L + 2 delta_k = 2 pi m``.

No scattering length exists at finite ``L``: ``k = 0`` never solves the
equation for ``U != 0``.  Whenever the allowed energy crosses a
"fermionized" level ``-2 J cos((2n+1) pi / L) + E_0`` (the energy of a
free antisymmetric state) the system is at a confinement-induced
resonance; those crossings exist only at attractive coupling.

Branches are indexed by the free momentum they contain: branch ``b``
covers the open interval ``((2b-1) pi / L, (2b+1) pi / L)`` between
consecutive singularities of ``tan(k L / 2)`` and contains the free
solution ``k = 2 pi b / L`` at ``U = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (BranchCollision, ConfigError, NoConvergence,
                     NoRootInBranch, OpenChannel)
from .single_particle import effective_u1d, entrance_energy
from .traps import J, TransverseSpectrum, alpha_closed

_EDGE_PAD_HALF_ANGLE = 1e-8  # keep |kL/2 - (pi/2 + m pi)| above this
_SCAN_POINTS = 400
_ROOT_SEPARATION = 1e-8
_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class RingSolution:
    """One allowed ring momentum.

    ``energy`` is ``-2 J cos k`` relative to the transverse ground
    energy; ``residual`` is the relative mismatch of the momentum
    equation at `k`.
    """

    L: int
    u: float
    branch: int
    k: float
    energy: float
    residual: float


@dataclass(frozen=True)
class RingCrossing:
    """A coupling where the allowed energy meets a fermionized level.

    ``level`` indexes the crossed level ``k = (2*level + 1) pi / L``.
    """

    level: int
    k: float
    u: float


def ring_channel_sum(spectrum: TransverseSpectrum, k: float, L: int) -> float:
    """Ring-corrected closed-channel sum ``Sigma_L(k)`` (positive).

    Uses every excited state present in `spectrum`; solve the trap with
    more states to tighten the channel cutoff.
    """
    if L < 4:
        raise ConfigError(f"ring length must be at least 4 sites, got L={L}")
    energy = entrance_energy(spectrum, k)
    total = 0.0
    amps = spectrum.origin_amplitudes
    for n in range(1, spectrum.n_states):
        amp2 = float(amps[n]) ** 2
        if amp2 == 0.0:
            continue
        a = alpha_closed(float(spectrum.energies[n]), energy).alpha
        a_l = a ** L
        num = amp2 * (1.0 + a_l)
        den = (float(spectrum.energies[n]) - energy) * (1.0 + a_l) \
            - 2.0 * J * (a + a ** (L - 1))
        total += num / den
    return total


def _branch_interval(L: int, branch: int) -> tuple[float, float]:
    if branch < 0:
        raise ConfigError(f"branch index must be nonnegative, got {branch}")
    lo = max((2 * branch - 1) * math.pi / L, 0.0)
    hi = (2 * branch + 1) * math.pi / L
    if lo >= math.pi:
        raise ConfigError(
            f"branch {branch} lies outside the momentum window (0, pi) "
            f"for L={L}")
    hi = min(hi, math.pi)
    pad = 2.0 * _EDGE_PAD_HALF_ANGLE / L
    return lo + pad, hi - pad


def _pole_free_mismatch(spectrum: TransverseSpectrum, u: float, L: int,
                        k: float) -> float:
    """The momentum equation with both tan poles and coupling poles
    cleared: zero exactly at the allowed momenta.

    ``G(k) = 2 J sin k sin(kL/2) (1 + U Sigma_L) - U psi_0(0)^2 cos(kL/2)``.
    """
    half = 0.5 * k * L
    sig = ring_channel_sum(spectrum, k, L)
    psi0 = float(spectrum.origin_amplitudes[0])
    return (2.0 * J * math.sin(k) * math.sin(half) * (1.0 + u * sig)
            - u * psi0 * psi0 * math.cos(half))


def _relative_residual(spectrum: TransverseSpectrum, u: float, L: int,
                       k: float) -> float:
    half = 0.5 * k * L
    sig = ring_channel_sum(spectrum, k, L)
    psi0 = float(spectrum.origin_amplitudes[0])
    lhs = 2.0 * J * math.sin(k) * math.sin(half) * (1.0 + u * sig)
    rhs = u * psi0 * psi0 * math.cos(half)
    scale = max(abs(lhs), abs(rhs), 2.0 * J * abs(math.sin(k)))
    return abs(lhs - rhs) / scale


def ring_branch_roots(spectrum: TransverseSpectrum, u: float, L: int,
                      branch: int) -> list[RingSolution]:
    """All allowed momenta of one branch (usually one; two while the
    coupling pole of the momentum equation transits the branch)."""
    lo, hi = _branch_interval(L, branch)
    free_k = 2.0 * math.pi * branch / L

    if u == 0.0:
        if branch == 0 or not lo < free_k < hi:
            raise NoRootInBranch(
                f"branch {branch} holds no free momentum in (0, pi) at U=0"
                if branch else "k = 0 is not a scattering momentum")
        return [RingSolution(L=L, u=0.0, branch=branch, k=free_k,
                             energy=-2.0 * J * math.cos(free_k),
                             residual=0.0)]

    def g(k: float) -> float:
        return _pole_free_mismatch(spectrum, u, L, k)

    ks = np.linspace(lo, hi, _SCAN_POINTS)
    vals = np.array([g(float(k)) for k in ks])
    roots: list[float] = []
    for i in range(len(ks) - 1):
        a, b = float(vals[i]), float(vals[i + 1])
        if a == 0.0:
            roots.append(float(ks[i]))
        elif a * b < 0.0:
            roots.append(float(brentq(g, float(ks[i]), float(ks[i + 1]),
                                      xtol=1e-15, rtol=8.9e-16)))
    if vals[-1] == 0.0:
        roots.append(float(ks[-1]))

    roots = sorted(set(roots))
    for r1, r2 in zip(roots, roots[1:]):
        if r2 - r1 < _ROOT_SEPARATION:
            raise BranchCollision(
                f"two roots of branch {branch} within {r2 - r1:.3g} "
                f"at U={u:g}, L={L}")
    if not roots:
        raise NoRootInBranch(
            f"no allowed momentum in branch {branch} (interval "
            f"({lo:.6g}, {hi:.6g})) at U={u:g}, L={L}")

    out = []
    for k in roots:
        res = _relative_residual(spectrum, u, L, k)
        if res > _RESIDUAL_TOL:
            raise NoConvergence(
                f"ring root at k={k:.12g} has relative residual {res:.3g}")
        out.append(RingSolution(L=L, u=u, branch=branch, k=k,
                                energy=-2.0 * J * math.cos(k), residual=res))
    return out


def ring_momentum(spectrum: TransverseSpectrum, u: float, L: int,
                  branch: int) -> RingSolution:
    """Lowest allowed momentum of `branch` at coupling `u`.

    Raises
    ------
    NoRootInBranch
        If the branch holds no allowed momentum at this coupling (for
        attractive coupling the lowest branch is ``branch = 1``; branch
        0 only supports repulsive solutions).
    BranchCollision
        If two allowed momenta approach within 1e-8.
    OpenChannel
        If an excited transverse channel is open somewhere on the
        branch (the quasi-1D ansatz fails there).
    """
    return ring_branch_roots(spectrum, u, L, branch)[0]


def ring_cir_crossings(spectrum: TransverseSpectrum, L: int,
                       u_window: tuple[float, float] = (-math.inf, 0.0),
                       max_level: int | None = None) -> list[RingCrossing]:
    """Couplings at which an allowed energy crosses a fermionized level.

    The crossing through level ``k_n = (2n+1) pi / L`` happens at
    ``U = -1 / Sigma_L(k_n)``, necessarily negative since
    ``Sigma_L > 0``.  Levels whose momentum opens an excited transverse
    channel are skipped (the ansatz does not describe them).

    Parameters
    ----------
    spectrum : TransverseSpectrum
    L : int
        Ring circumference (sites).
    u_window : (float, float)
        Keep only crossings with ``u_lo <= U <= u_hi``.
    max_level : int, optional
        Highest fermionized level index to consider; default: all with
        ``k_n < pi``.
    """
    if L < 4:
        raise ConfigError(f"ring length must be at least 4 sites, got L={L}")
    u_lo, u_hi = u_window
    if u_lo > u_hi:
        raise ConfigError(f"empty coupling window {u_window}")
    n_max = (L - 1) // 2 if max_level is None else max_level
    out: list[RingCrossing] = []
    for n in range(n_max + 1):
        k_n = (2 * n + 1) * math.pi / L
        if not k_n < math.pi:
            break
        try:
            sig = ring_channel_sum(spectrum, k_n, L)
        except OpenChannel:
            break  # higher levels sit at higher energy: all open too
        if sig <= 0.0:  # impossible by construction; guards NaN traps
            continue
        u = -1.0 / sig
        if u_lo <= u <= u_hi:
            out.append(RingCrossing(level=n, k=k_n, u=u))
    return out


def asymptotic_momentum(spectrum: TransverseSpectrum, u: float, L: int,
                        branch: int) -> RingSolution:
    """Infinite-system prediction for the branch momentum: the root of
    ``k L + 2 delta_k = 2 pi * branch`` with the open-system phase
    shift ``delta_k``.

    This is the ``L -> infinity`` limit of :func:`ring_momentum`; the
    two agree to the order of the closed-channel ring corrections
    ``alpha^L``.  Used as a consistency oracle for large rings.
    """
    lo, hi = _branch_interval(L, branch)

    def quantization(k: float) -> float:
        delta = effective_u1d(spectrum, u, k=k).delta_k
        return k * L + 2.0 * delta - 2.0 * math.pi * branch

    qa, qb = quantization(lo), quantization(hi)
    if qa * qb > 0.0:
        raise NoRootInBranch(
            f"no quantization root in branch {branch} at U={u:g} "
            f"(phase shift window misses 2 pi * {branch})")
    k = float(brentq(quantization, lo, hi, xtol=1e-15, rtol=8.9e-16))
    return RingSolution(L=L, u=u, branch=branch, k=k,
                        energy=-2.0 * J * math.cos(k),
                        residual=abs(quantization(k)))
