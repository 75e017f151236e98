"""Transverse trap spectra and closed-channel decay factors.

A particle hops on a 2D lattice with hopping ``J`` (the global energy
unit, ``J = 1`` internally); the transverse direction ``y`` carries a
trapping potential ``V(y)``.  This module diagonalizes the transverse
Hamiltonian

    (H_y psi)(y) = -J [psi(y+1) + psi(y-1)] + V(y) psi(y)

on a finite grid, labels state parities, and computes the decay factor
``alpha`` of an energetically closed channel together with the
Green's-function denominator every scattering module divides by.

Lengths are lattice spacings; energies are in units of ``J``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConfigError, EdgeLeak, NonSymmetric, OpenChannel

J = 1.0

DEFAULT_EDGE_TOL = 1e-10
_DEFAULT_N_STATES = 40
_MAX_AUTO_Y = 40_960


# --------------------------------------------------------------------------
# trap declarations
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Harmonic:
    """Harmonic confinement ``V(y) = omega * y**2``.

    Parameters
    ----------
    omega : float
        Curvature in units of J per site^2; must be positive.
    y_max : int, optional
        Grid half-width.  ``None`` (default) selects the smallest
        half-width on which the requested states decay at the edges.
    """

    omega: float
    y_max: int | None = None

    def __post_init__(self):
        if not self.omega > 0.0:
            raise ConfigError(f"harmonic trap needs omega > 0, got {self.omega}")
        if self.y_max is not None and self.y_max < 1:
            raise ConfigError(f"y_max must be a positive integer, got {self.y_max}")


@dataclass(frozen=True)
class DeltaWell:
    """Zero-range well ``V(y) = v0`` off-site, ``V(0) = 0``.

    The potential approaches the constant ``v0 > 0`` away from the
    origin, so the trap supports exactly one bound state plus a
    transverse continuum (handled in :mod:`q1dscatter.continuum`).
    """

    v0: float
    y_max: int | None = None

    def __post_init__(self):
        if not self.v0 > 0.0:
            raise ConfigError(
                f"delta well needs v0 > 0 (v0 = 0 is free space, where the "
                f"quasi-1D reduction breaks down); got {self.v0}"
            )
        if self.y_max is not None and self.y_max < 1:
            raise ConfigError(f"y_max must be a positive integer, got {self.y_max}")

    @property
    def bound_energy(self) -> float:
        """Energy of the single bound state, ``-sqrt(v0^2 + 4 J^2) + v0``."""
        return -math.hypot(self.v0, 2.0 * J) + self.v0

    @property
    def decay(self) -> float:
        """Bound-state decay factor ``beta`` in ``psi(y) ~ beta**|y|``."""
        return (math.hypot(self.v0, 2.0 * J) - self.v0) / (2.0 * J)


@dataclass(frozen=True)
class TwoSite:
    """Two-site step trap on the grid {0, 1}: ``V(0) = 0``, ``V(1) = 2 v``,
    open boundaries.  The transverse Hamiltonian is the 2x2 matrix
    ``[[0, -J], [-J, 2 v]]``."""

    v: float


@dataclass(frozen=True)
class Tabulated:
    """Potential tabulated per site on a contiguous integer range.

    Parameters
    ----------
    values : tuple of (y, V(y)) pairs
        Sorted, contiguous integer sites.  Use :meth:`from_mapping` to
        build from a dict.
    asymptote : float, optional
        If set, ``V(y) = asymptote`` outside the tabulated range and the
        trap supports a transverse continuum; the tabulated range is the
        scattering range ``R``.  If ``None`` the tabulated grid is the
        whole (hard-walled) transverse space.
    """

    values: tuple[tuple[int, float], ...]
    asymptote: float | None = None

    @staticmethod
    def from_mapping(values: Mapping[int, float],
                     asymptote: float | None = None) -> "Tabulated":
        items = tuple(sorted((int(y), float(v)) for y, v in values.items()))
        return Tabulated(items, asymptote)

    def __post_init__(self):
        if not self.values:
            raise ConfigError("tabulated potential needs at least one site")
        ys = [y for y, _ in self.values]
        if ys != list(range(ys[0], ys[-1] + 1)):
            raise ConfigError("tabulated sites must form a contiguous integer range")

    @property
    def grid(self) -> np.ndarray:
        return np.array([y for y, _ in self.values], dtype=int)

    @property
    def potential(self) -> np.ndarray:
        return np.array([v for _, v in self.values], dtype=float)

    def is_symmetric(self) -> bool:
        ys = self.grid
        if ys[0] != -ys[-1]:
            return False
        v = self.potential
        return bool(np.all(np.abs(v - v[::-1]) < 1e-14))


TrapSpec = Union[Harmonic, DeltaWell, TwoSite, Tabulated]


def potential_on_grid(spec: TrapSpec, y_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(grid, V)`` for `spec` on the grid ``[-y_max, y_max]``
    (or the trap's own finite grid for :class:`TwoSite` / hard-walled
    :class:`Tabulated`)."""
    if isinstance(spec, TwoSite):
        return np.array([0, 1]), np.array([0.0, 2.0 * spec.v])
    if isinstance(spec, Tabulated) and spec.asymptote is None:
        return spec.grid, spec.potential
    grid = np.arange(-y_max, y_max + 1)
    if isinstance(spec, Harmonic):
        return grid, spec.omega * grid.astype(float) ** 2
    if isinstance(spec, DeltaWell):
        return grid, np.where(grid == 0, 0.0, spec.v0)
    if isinstance(spec, Tabulated):
        v = np.full(grid.shape, spec.asymptote, dtype=float)
        ys = spec.grid
        if ys[0] < -y_max or ys[-1] > y_max:
            raise ConfigError("tabulated range exceeds the requested grid")
        lo = int(ys[0] + y_max)
        v[lo:lo + len(ys)] = spec.potential
        return grid, v
    raise ConfigError(f"unknown trap spec {type(spec).__name__}")


# --------------------------------------------------------------------------
# spectra
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TransverseSpectrum:
    """Bound eigenpairs of the transverse Hamiltonian.

    Attributes
    ----------
    energies : ndarray, shape (n,)
        Nondecreasing eigenvalues in units of J.
    wavefunctions : ndarray, shape (n, n_sites)
        Orthonormal real eigenvectors, one per row.
    parities : tuple of str
        'even' / 'odd' for symmetric traps, 'none' otherwise.
    grid : ndarray of int
        Transverse site coordinates.
    symmetric : bool
        Whether V(y) = V(-y) on a symmetric grid.
    """

    energies: np.ndarray
    wavefunctions: np.ndarray
    parities: tuple[str, ...]
    grid: np.ndarray
    symmetric: bool

    @property
    def n_states(self) -> int:
        return len(self.energies)

    @property
    def origin_amplitudes(self) -> np.ndarray:
        """Amplitudes ``psi_n(0)`` at the impurity row.

        States labeled odd vanish at the origin by symmetry; the label
        decides (their floating-point residue is eigensolver noise and
        is zeroed exactly).
        """
        amps = self.wavefunctions[:, self.origin_index].copy()
        for n, parity in enumerate(self.parities):
            if parity == "odd":
                amps[n] = 0.0
        return amps

    @property
    def origin_index(self) -> int:
        i0 = int(np.searchsorted(self.grid, 0))
        if i0 >= len(self.grid) or self.grid[i0] != 0:
            raise ConfigError("transverse grid does not contain y = 0")
        return i0


def _fix_gauge(vec: np.ndarray) -> np.ndarray:
    """Deterministic sign convention: largest-magnitude component positive."""
    i = int(np.argmax(np.abs(vec)))
    return -vec if vec[i] < 0 else vec


def _parity_labels(wavefunctions: np.ndarray) -> tuple[str, ...]:
    labels = []
    for psi in wavefunctions:
        overlap = float(np.dot(psi, psi[::-1]))
        labels.append("even" if overlap > 0.0 else "odd")
    return tuple(labels)


def _grid_eigensolve(grid: np.ndarray, v: np.ndarray, n_states: int | None,
                     edge_tol: float | None, symmetric: bool) -> TransverseSpectrum:
    off = -J * np.ones(len(grid) - 1)
    energies, vectors = eigh_tridiagonal(v, off)
    vectors = vectors.T
    if edge_tol is not None:
        edge = np.maximum(np.abs(vectors[:, 0]), np.abs(vectors[:, -1]))
        n_ok = 0
        while n_ok < len(energies) and edge[n_ok] < edge_tol:
            n_ok += 1
        energies, vectors = energies[:n_ok], vectors[:n_ok]
    if n_states is not None:
        if len(energies) < n_states:
            raise EdgeLeak(
                f"only {len(energies)} states decay at the grid edge; "
                f"{n_states} requested (half-width {int(grid[-1])} too small)"
            )
        energies, vectors = energies[:n_states], vectors[:n_states]
    vectors = np.array([_fix_gauge(p) for p in vectors])
    parities = _parity_labels(vectors) if symmetric else ("none",) * len(energies)
    return TransverseSpectrum(energies=energies, wavefunctions=vectors,
                              parities=parities, grid=grid, symmetric=symmetric)


def solve_transverse(spec: TrapSpec, n_states: int | None = None,
                     edge_tol: float = DEFAULT_EDGE_TOL,
                     require_symmetric: bool = False) -> TransverseSpectrum:
    """Diagonalize the transverse trap Hamiltonian.

    Parameters
    ----------
    spec : TrapSpec
        The trap.  For :class:`DeltaWell` only the single bound state is
        returned (continuum states are handled in
        :mod:`q1dscatter.continuum`).
    n_states : int, optional
        Number of bound states to return.  For traps on an auto-sized
        grid the half-width grows until this many states decay at the
        edges.  ``None`` keeps a trap-dependent default (everything for
        finite traps).
    edge_tol : float
        Edge-decay tolerance for retained states on truncated grids.
    require_symmetric : bool
        Raise :class:`~q1dscatter.errors.NonSymmetric` if the trap is
        not reflection symmetric.

    Returns
    -------
    TransverseSpectrum

    Raises
    ------
    EdgeLeak
        If an explicit grid cannot hold the requested states.
    NonSymmetric
        If `require_symmetric` is set and the trap is asymmetric.
    """
    if isinstance(spec, TwoSite):
        if require_symmetric:
            raise NonSymmetric("the two-site step trap is not reflection symmetric")
        grid, v = potential_on_grid(spec, 1)
        h = np.array([[v[0], -J], [-J, v[1]]])
        energies, vectors = np.linalg.eigh(h)
        vectors = np.array([_fix_gauge(p) for p in vectors.T])
        if n_states is not None:
            if n_states > 2:
                raise ConfigError("the two-site trap has exactly two states")
            energies, vectors = energies[:n_states], vectors[:n_states]
        return TransverseSpectrum(energies=energies, wavefunctions=vectors,
                                  parities=("none",) * len(energies),
                                  grid=grid, symmetric=False)

    if isinstance(spec, DeltaWell):
        if n_states is not None and n_states != 1:
            raise ConfigError(
                "the delta well has a single bound state; its continuum is "
                "handled by the continuum module"
            )
        beta = spec.decay
        y_max = spec.y_max
        if y_max is None:
            y_max = max(4, math.ceil(math.log(edge_tol) / math.log(beta)))
            while beta ** y_max >= edge_tol:
                y_max += 1
        if beta ** y_max >= edge_tol:
            raise EdgeLeak(
                f"bound state decays as {beta:.4g}**|y|; half-width {y_max} "
                f"leaves edge weight above {edge_tol:g}"
            )
        grid = np.arange(-y_max, y_max + 1)
        psi = beta ** np.abs(grid).astype(float)
        psi /= math.sqrt(float(psi @ psi))
        return TransverseSpectrum(energies=np.array([spec.bound_energy]),
                                  wavefunctions=psi[None, :],
                                  parities=("even",), grid=grid, symmetric=True)

    if isinstance(spec, Harmonic):
        n_req = n_states if n_states is not None else _DEFAULT_N_STATES
        if spec.y_max is not None:
            grid, v = potential_on_grid(spec, spec.y_max)
            return _grid_eigensolve(grid, v, n_req, edge_tol, symmetric=True)
        y_max = 40
        while y_max <= _MAX_AUTO_Y:
            grid, v = potential_on_grid(spec, y_max)
            try:
                return _grid_eigensolve(grid, v, n_req, edge_tol, symmetric=True)
            except EdgeLeak:
                y_max *= 2
        raise ConfigError(
            f"auto grid sizing exceeded half-width {_MAX_AUTO_Y} "
            f"for {n_req} states"
        )

    if isinstance(spec, Tabulated):
        symmetric = spec.is_symmetric()
        if require_symmetric and not symmetric:
            raise NonSymmetric("tabulated potential is not reflection symmetric")
        if spec.asymptote is None:
            # hard-walled finite model: every eigenpair is exact
            grid, v = potential_on_grid(spec, 0)
            out = _grid_eigensolve(grid, v, None, None, symmetric=symmetric)
            if n_states is not None:
                if n_states > out.n_states:
                    raise ConfigError(
                        f"tabulated trap has only {out.n_states} states"
                    )
                out = TransverseSpectrum(
                    energies=out.energies[:n_states],
                    wavefunctions=out.wavefunctions[:n_states],
                    parities=out.parities[:n_states],
                    grid=out.grid, symmetric=symmetric)
            return out
        # continuum-supporting well: keep states below the band bottom
        band_bottom = spec.asymptote - 2.0 * J
        range_max = int(max(abs(spec.grid[0]), abs(spec.grid[-1])))
        y_max = max(range_max + 20, 40)
        while y_max <= _MAX_AUTO_Y:
            grid, v = potential_on_grid(spec, y_max)
            full = _grid_eigensolve(grid, v, None, edge_tol, symmetric=symmetric)
            bound = full.energies < band_bottom - 1e-12
            n_bound = int(np.sum(bound))
            if n_bound > 0 and (n_states is None or n_bound >= n_states):
                sel = slice(0, n_states if n_states is not None else n_bound)
                return TransverseSpectrum(
                    energies=full.energies[:n_bound][sel],
                    wavefunctions=full.wavefunctions[:n_bound][sel],
                    parities=full.parities[:n_bound][sel],
                    grid=grid, symmetric=symmetric)
            y_max *= 2
        raise EdgeLeak("no bound state found below the transverse band bottom")

    raise ConfigError(f"unknown trap spec {type(spec).__name__}")


# --------------------------------------------------------------------------
# closed-channel decay factors
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AlphaValue:
    """Decay factor of one closed channel.

    Attributes
    ----------
    alpha : float
        Decay factor in (0, 1): the closed-channel amplitude falls off
        as ``alpha ** |x|`` along the free direction.
    denominator : float
        The Green's-function denominator
        ``E + 2 J_eff alpha - E_channel``, algebraically equal to
        ``J_eff (alpha^2 - 1)/alpha`` and therefore strictly negative.
    """

    alpha: float
    denominator: float


def alpha_closed(channel_energy: float, target_energy: float,
                 j_eff: float = J) -> AlphaValue:
    """Decay factor of a closed channel at the scattering energy.

    Solves ``alpha**2 - g*alpha + 1 = 0`` with
    ``g = (channel_energy - target_energy)/j_eff`` on the ``|alpha| < 1``
    branch, ``alpha = (g - sqrt(g^2 - 4))/2``.

    Raises
    ------
    OpenChannel
        If ``g <= 2``: the channel is open (or marginal) at the target
        energy and the quasi-1D ansatz breaks down.
    """
    if not j_eff > 0.0:
        raise ConfigError(f"j_eff must be positive, got {j_eff}")
    g = (channel_energy - target_energy) / j_eff
    if g <= 2.0:
        raise OpenChannel(
            f"channel at energy {channel_energy:.6g} is open at target "
            f"energy {target_energy:.6g}: gap ratio g = {g:.6g} <= 2"
        )
    alpha = 2.0 / (g + math.sqrt(g * g - 4.0))
    denominator = target_energy + 2.0 * j_eff * alpha - channel_energy
    return AlphaValue(alpha=alpha, denominator=denominator)
