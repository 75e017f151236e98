"""Brute-force validation: exact diagonalization of the full lattice
problem, with the scattering length read off the eigenvectors.

No channel expansion is used anywhere here.  A single particle lives on
a finite strip ``x in [-Lx, Lx]`` (open or periodic) with the trap in
``y``; a particle pair at conserved total quasi-momentum ``K`` reduces
to relative coordinates ``(x = x1 - x2, y1, y2)`` with collective
hopping ``J_K = 2 J cos(K/2)`` and bosonic exchange symmetry
``(x, y1, y2) -> (-x, y2, y1)``.

Even entrance-dominated scattering eigenstates behave asymptotically as
``cos(k|x| + delta) psi_0(y)`` (entrance channel only), so the
scattering length follows from a two-parameter cosine fit in a window
away from both the impurity and the boundary:

    tan(delta) = -B2/B1  from  w(x) ~ B1 cos(kx) + B2 sin(kx),
    a(k) = 1 / (sin(k) tan(delta)),       k from the eigenvalue.

Each candidate eigenpair is polished by inverse iteration before the
fit (Lanczos eigenvector residuals of ~1e-7 would otherwise leak into
``a`` amplified by 1/k^2 at small momenta).  Several states per strip
size are extracted and ``a(k)`` is extrapolated to ``k = 0`` with a
least-squares polynomial in ``k^2`` pooled over two strip sizes (the
finite-momentum error of ``a(k)`` is even in ``k``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh, splu

from .errors import (ConfigError, ContaminatedChannel, FitWindowTooSmall,
                     NoConvergence)
from .traps import (J, DeltaWell, Harmonic, TrapSpec, alpha_closed,
                    potential_on_grid, solve_transverse)
from .two_body import pair_hopping

_N_EIGENPAIRS = 18
_MAX_ACCEPTED = 9
_K_MAX_FIT = 0.15  # beyond this the quartic k**2 model degrades
_REFINE_STEPS = 2
_ENTRANCE_WEIGHT_MIN = 0.9
_EVENNESS_MIN = 0.5
_FIT_RESIDUAL_MAX = 1e-6
_MIN_WINDOW_POINTS = 8
_CONTAMINATION_MAX = 1e-8
_DIVERGENCE_TAN = 1e-10


@dataclass(frozen=True)
class StripProblem:
    """A finite 2D lattice problem for brute-force diagonalization.

    ``lx`` is the half-extent of the free direction (sites ``-lx..lx``);
    ``y_max`` overrides the transverse half-width for traps on an
    auto-sized grid (``None`` keeps the trap's own sizing).
    """

    trap: TrapSpec
    u: float
    lx: int
    y_max: int | None = None
    boundary: str = "open"

    def __post_init__(self):
        if self.lx < 16:
            raise ConfigError(f"strip half-extent must be >= 16, got {self.lx}")
        if self.boundary not in ("open", "periodic"):
            raise ConfigError(f"boundary must be open or periodic, "
                              f"got {self.boundary!r}")


@dataclass(frozen=True)
class OracleResult:
    """Scattering length extracted from exact diagonalization.

    ``a`` is the ``k -> 0`` extrapolation pooled over both strip sizes;
    ``a_coarse``/``a_fine`` are the per-size extrapolations and
    ``k_coarse``/``k_fine`` the smallest momenta entering each.
    ``diverged`` marks an ``|a| -> infinity`` reading (e.g. ``U = 0``).
    The quality fields report the worst value over all states used.
    """

    a: float
    diverged: bool
    a_coarse: float
    a_fine: float
    k_coarse: float
    k_fine: float
    entrance_weight: float
    fit_residual: float
    contamination: float


def _effective_trap(problem: StripProblem) -> TrapSpec:
    if problem.y_max is None:
        return problem.trap
    if isinstance(problem.trap, (Harmonic, DeltaWell)):
        return replace(problem.trap, y_max=problem.y_max)
    raise ConfigError(
        "y_max override applies only to traps on an auto-sized grid")


def _transverse_ground(problem: StripProblem):
    """Transverse grid, potential, and ground state used by the strip."""
    trap = _effective_trap(problem)
    spectrum = solve_transverse(trap, n_states=1) \
        if isinstance(trap, (Harmonic, DeltaWell)) else solve_transverse(trap)
    grid = spectrum.grid
    _, v = potential_on_grid(trap, int(grid[-1]))
    return grid, v, spectrum.wavefunctions[0], float(spectrum.energies[0])


def _hop_matrix(n: int, amplitude: float, periodic: bool) -> sp.csr_matrix:
    off = -amplitude * np.ones(n - 1)
    t = sp.diags([off, off], [-1, 1], format="lil")
    if periodic and n > 2:
        t[0, n - 1] = -amplitude
        t[n - 1, 0] = -amplitude
    return t.tocsr()


def strip_hamiltonian(problem: StripProblem) -> tuple[sp.csr_matrix,
                                                      np.ndarray, np.ndarray]:
    """Sparse single-particle Hamiltonian of the strip; returns
    ``(H, x_grid, y_grid)`` with state index ``ix * len(y_grid) + iy``."""
    y_grid, v, _, _ = _transverse_ground(problem)
    nx = 2 * problem.lx + 1
    ny = len(y_grid)
    tx = _hop_matrix(nx, J, problem.boundary == "periodic")
    hy = sp.diags([v, -J * np.ones(ny - 1), -J * np.ones(ny - 1)],
                  [0, -1, 1], format="csr")
    h = (sp.kron(tx, sp.identity(ny))
         + sp.kron(sp.identity(nx), hy)).tolil()
    ix0 = problem.lx
    iy0 = int(np.searchsorted(y_grid, 0))
    h[ix0 * ny + iy0, ix0 * ny + iy0] += problem.u
    x_grid = np.arange(-problem.lx, problem.lx + 1)
    return h.tocsr(), x_grid, y_grid


def pair_hamiltonian(problem: StripProblem, total_momentum: float = 0.0
                     ) -> tuple[sp.csr_matrix, np.ndarray, np.ndarray]:
    """Sparse relative-coordinate pair Hamiltonian at total
    quasi-momentum ``K``; state index ``(ix * ny + iy1) * ny + iy2``."""
    y_grid, v, _, _ = _transverse_ground(problem)
    j_k = pair_hopping(total_momentum)
    nx = 2 * problem.lx + 1
    ny = len(y_grid)
    tx = _hop_matrix(nx, j_k, problem.boundary == "periodic")
    hy = sp.diags([v, -J * np.ones(ny - 1), -J * np.ones(ny - 1)],
                  [0, -1, 1], format="csr")
    h = (sp.kron(tx, sp.identity(ny * ny))
         + sp.kron(sp.identity(nx),
                   sp.kron(hy, sp.identity(ny))
                   + sp.kron(sp.identity(ny), hy))).tolil()
    ix0 = problem.lx
    for iy in range(ny):
        idx = (ix0 * ny + iy) * ny + iy
        h[idx, idx] += problem.u
    x_grid = np.arange(-problem.lx, problem.lx + 1)
    return h.tocsr(), x_grid, y_grid


def _check_correlation_length(problem: StripProblem, gap: float,
                              j_eff: float) -> None:
    """The slowest closed channel must decay well inside the strip."""
    alpha = alpha_closed(gap + 2.0 * j_eff, 0.0, j_eff=j_eff).alpha
    if problem.lx * (1.0 - alpha) <= 10.0:
        raise ConfigError(
            f"strip too short: slowest closed channel decays as "
            f"{alpha:.6f}**|x| over half-extent {problem.lx} "
            f"(need lx*(1-alpha) > 10)")


def _first_coupled_gap(problem: StripProblem) -> float:
    trap = _effective_trap(problem)
    spectrum = solve_transverse(trap) \
        if not isinstance(trap, (Harmonic, DeltaWell)) \
        else solve_transverse(trap, n_states=3)
    if spectrum.n_states < 2:
        return math.inf
    n = 2 if (spectrum.symmetric and spectrum.n_states > 2) else 1
    return float(spectrum.energies[n] - spectrum.energies[0])


@dataclass(frozen=True)
class _Extraction:
    a: float
    k: float
    tan_delta: float
    entrance_weight: float
    fit_residual: float
    contamination: float
    diverged: bool


def _refine_eigenpair(h_csc: sp.csc_matrix, eye: sp.csc_matrix,
                      value: float, vector: np.ndarray
                      ) -> tuple[float, np.ndarray]:
    """Polish a Lanczos eigenpair by inverse iteration at its Rayleigh
    quotient; the fallback offset keeps a singular factorization usable."""
    rho = float(value)
    psi = vector
    for _ in range(_REFINE_STEPS):
        try:
            lu = splu((h_csc - rho * eye).tocsc())
            step = lu.solve(psi)
        except RuntimeError:
            offset = 1e-9 * (1.0 + abs(rho))
            lu = splu((h_csc - (rho + offset) * eye).tocsc())
            step = lu.solve(psi)
        norm = float(np.linalg.norm(step))
        if not math.isfinite(norm) or norm == 0.0:
            break
        psi = step / norm
        rho = float(psi @ (h_csc @ psi))
    return rho, psi


def _extract_states(h: sp.csr_matrix, x_grid: np.ndarray, project, reflect,
                    e_free: float, j_eff: float, lx: int
                    ) -> list[_Extraction]:
    """Collect even entrance-dominated scattering states of ``h`` with
    their fitted asymptotic cosines, lowest momenta first."""
    lo = (lx + 3) // 4
    hi = lx // 2
    window = np.arange(lo, hi + 1)
    if len(window) < _MIN_WINDOW_POINTS:
        raise FitWindowTooSmall(
            f"fit window [{lo}, {hi}] holds {len(window)} points "
            f"(< {_MIN_WINDOW_POINTS}); increase the strip extent")
    win_idx = lx + window  # positive-x side of the symmetric grid

    k_target = math.pi / (lx + 1)
    sigma = e_free - 2.0 * j_eff * math.cos(k_target)
    n_eig = min(_N_EIGENPAIRS, h.shape[0] - 2)
    vals, vecs = eigsh(h, k=n_eig, sigma=sigma,
                       v0=np.ones(h.shape[0]))
    order = np.argsort(vals)
    h_csc = h.tocsc()
    eye = sp.identity(h.shape[0], format="csc")

    accepted: list[_Extraction] = []
    used_energies: list[float] = []
    best_reject = None
    for idx in order:
        if len(accepted) >= _MAX_ACCEPTED:
            break
        cos_k = (e_free - float(vals[idx])) / (2.0 * j_eff)
        if not -1.0 + 1e-12 < cos_k < 1.0 - 1e-12:
            continue  # outside the entrance band (e.g. impurity bound state)
        if math.acos(cos_k) > _K_MAX_FIT:
            break  # states are energy-ordered; the rest sit higher still
        psi = vecs[:, idx]
        if float(psi @ reflect(psi)) < _EVENNESS_MIN:
            continue
        rho, psi = _refine_eigenpair(h_csc, eye, float(vals[idx]), psi)
        cos_k = (e_free - rho) / (2.0 * j_eff)
        if not -1.0 + 1e-12 < cos_k < 1.0 - 1e-12:
            continue
        if any(abs(rho - e) < 1e-10 * (1.0 + abs(rho)) for e in used_energies):
            continue  # refinement collapsed onto an already-used state
        k = math.acos(cos_k)
        w = project(psi)
        weight = float(w @ w) / float(psi @ psi)
        if weight < _ENTRANCE_WEIGHT_MIN:
            continue
        w_win = w[win_idx]
        design = np.column_stack([np.cos(k * window), np.sin(k * window)])
        coeff, *_ = np.linalg.lstsq(design, w_win, rcond=None)
        norm = float(np.linalg.norm(w_win))
        resid = float(np.linalg.norm(design @ coeff - w_win)) / norm \
            if norm > 0.0 else math.inf
        full = psi.reshape(len(x_grid), -1)
        win_total = float(np.sum(full[win_idx] ** 2))
        contamination = max(0.0, win_total - float(w_win @ w_win)) / win_total \
            if win_total > 0.0 else math.inf
        if contamination > _CONTAMINATION_MAX:
            best_reject = (f"closed-channel weight {contamination:.3g} in "
                           f"the fit window at k={k:.4g}")
            continue
        if resid > _FIT_RESIDUAL_MAX:
            best_reject = (f"cosine fit residual {resid:.3g} at k={k:.4g}")
            continue
        b1, b2 = float(coeff[0]), float(coeff[1])
        tan_delta = -b2 / b1 if b1 != 0.0 else math.inf
        diverged = abs(tan_delta) < _DIVERGENCE_TAN
        a = math.inf if diverged else 1.0 / (math.sin(k) * tan_delta)
        used_energies.append(rho)
        accepted.append(_Extraction(
            a=a, k=k, tan_delta=tan_delta, entrance_weight=weight,
            fit_residual=resid, contamination=contamination,
            diverged=diverged))

    if accepted:
        accepted.sort(key=lambda e: e.k)
        return accepted
    if best_reject is not None:
        raise ContaminatedChannel(
            f"no clean scattering eigenstate found; last rejection: "
            f"{best_reject}")
    raise NoConvergence(
        "no even entrance-dominated eigenstate in the scattering window")


def _zero_momentum_fit(states: list[_Extraction]) -> float:
    """Least-squares polynomial-in-``k^2`` intercept of ``a(k)``.

    Cubic when enough points support it (the ``k^6`` term of ``a(k)``
    is what limits the extrapolation otherwise), lower degree for
    sparse data."""
    s = np.array([e.k ** 2 for e in states])
    a = np.array([e.a for e in states])
    n = len(states)
    degree = 0 if n == 1 else min(3, max(1, n - 2))
    design = np.vander(s / s.max(), degree + 1, increasing=True)
    coeff, *_ = np.linalg.lstsq(design, a, rcond=None)
    return float(coeff[0])


def _extrapolate(coarse: list[_Extraction],
                 fine: list[_Extraction]) -> OracleResult:
    """Pool the per-size extractions into the ``k -> 0`` limit."""
    live_coarse = [e for e in coarse if not e.diverged]
    live_fine = [e for e in fine if not e.diverged]
    used = (live_coarse + live_fine) or (coarse + fine)
    diverged = not (live_coarse or live_fine)
    if diverged:
        a = a_coarse = a_fine = math.inf
    else:
        a = _zero_momentum_fit(live_coarse + live_fine)
        a_coarse = _zero_momentum_fit(live_coarse) if live_coarse else math.inf
        a_fine = _zero_momentum_fit(live_fine) if live_fine else math.inf
    return OracleResult(
        a=a, diverged=diverged, a_coarse=a_coarse, a_fine=a_fine,
        k_coarse=coarse[0].k, k_fine=fine[0].k,
        entrance_weight=min(e.entrance_weight for e in used),
        fit_residual=max(e.fit_residual for e in used),
        contamination=max(e.contamination for e in used))


def strip_scattering_length(problem: StripProblem) -> OracleResult:
    """Single-particle scattering length from exact diagonalization.

    Solves the strip at half-extents ``lx//2`` and ``lx`` and
    extrapolates the pooled ``a(k)`` readings to ``k = 0``.

    Raises
    ------
    FitWindowTooSmall, ContaminatedChannel, NoConvergence
        When no clean asymptotic window exists.
    """
    if problem.boundary != "open":
        raise ConfigError("scattering extraction needs open boundaries")
    _check_correlation_length(problem, _first_coupled_gap(problem), J)

    results = []
    for lx in (problem.lx // 2, problem.lx):
        p = replace(problem, lx=lx)
        h, x_grid, y_grid = strip_hamiltonian(p)
        _, _, psi0, e0 = _transverse_ground(p)
        ny = len(y_grid)

        def project(psi, ny=ny, psi0=psi0):
            return psi.reshape(-1, ny) @ psi0

        def reflect(psi, ny=ny):
            return psi.reshape(-1, ny)[::-1].reshape(-1)

        results.append(_extract_states(h, x_grid, project, reflect,
                                       e_free=e0, j_eff=J, lx=lx))
    return _extrapolate(*results)


def pair_scattering_length(problem: StripProblem,
                           total_momentum: float = 0.0) -> OracleResult:
    """Two-particle scattering length from exact diagonalization in
    relative coordinates at total quasi-momentum ``K``.

    The same cosine extraction as the single-particle case, with
    collective hopping ``J_K`` and the entrance projector
    ``psi_0(y1) psi_0(y2)``.
    """
    if problem.boundary != "open":
        raise ConfigError("scattering extraction needs open boundaries")
    j_k = pair_hopping(total_momentum)
    _check_correlation_length(problem, _first_coupled_gap(problem), j_k)

    results = []
    for lx in (problem.lx // 2, problem.lx):
        p = replace(problem, lx=lx)
        h, x_grid, y_grid = pair_hamiltonian(p, total_momentum)
        _, _, psi0, e0 = _transverse_ground(p)
        ny = len(y_grid)
        pair_projector = np.outer(psi0, psi0).reshape(-1)

        def project(psi, ny=ny, proj=pair_projector):
            return psi.reshape(-1, ny * ny) @ proj

        def reflect(psi, ny=ny):
            nx = psi.size // (ny * ny)
            return psi.reshape(nx, ny, ny)[::-1].transpose(0, 2, 1).reshape(-1)

        results.append(_extract_states(h, x_grid, project, reflect,
                                       e_free=2.0 * e0, j_eff=j_k, lx=lx))
    return _extrapolate(*results)
