"""Exception taxonomy shared by every solver module.

Each error class carries the CLI exit code its family maps to:

* 2 -- invalid or inconsistent configuration,
* 3 -- a solver did not converge or a requested accuracy is unattainable,
* 4 -- physical-regime violation (the quasi-1D description itself breaks,
  or the requested point sits on a pole).
"""

EXIT_CONFIG = 2
EXIT_NOCONVERGENCE = 3
EXIT_REGIME = 4


class Q1DError(Exception):
    """Base class for all solver errors."""

    exit_code = EXIT_NOCONVERGENCE


# ---------------------------------------------------------------- config (2)

class ConfigError(Q1DError):
    """Invalid or inconsistent run configuration."""

    exit_code = EXIT_CONFIG


class UnknownFigure(ConfigError):
    """Requested figure recipe does not exist."""


class NonSymmetric(ConfigError):
    """Symmetric-channel reduction requested for an asymmetric potential."""


class PoleInWindow(ConfigError):
    """A known resonance sits inside the requested fit window."""


# --------------------------------------------------- non-convergence (3)

class EdgeLeak(Q1DError):
    """A retained transverse state has edge weight above tolerance.

    The transverse grid half-width is too small for the requested number
    of bound states.
    """


class TailTooLarge(Q1DError):
    """Estimated channel-sum truncation error exceeds tolerance."""


class QuadratureFail(Q1DError):
    """Quadrature error estimate exceeds the requested tolerance."""


class SharpResonanceUnresolved(Q1DError):
    """A near-singular phase-shift derivative was detected but the
    resonance peak could not be localized and fitted."""


class NoRootInBranch(Q1DError):
    """The ring momentum equation has no root in the requested branch."""


class BranchCollision(Q1DError):
    """Two ring momentum roots coincide within tolerance."""


class NoConvergence(Q1DError):
    """Iterative solver exceeded its iteration budget."""


class Diverging(Q1DError):
    """Born series terms grew for five consecutive orders."""


class FitWindowTooSmall(Q1DError):
    """Too few usable sites in the asymptotic fit window."""


class ContaminatedChannel(Q1DError):
    """No eigenstate passed the entrance-channel purity filters."""


# --------------------------------------------------------- regime (4)

class OpenChannel(Q1DError):
    """A channel required to be closed is open at the target energy."""

    exit_code = EXIT_REGIME


class AtResonance(Q1DError):
    """The requested coupling sits on a confinement-induced resonance;
    the effective coupling diverges there and is reported as a pole."""

    exit_code = EXIT_REGIME


class SingularSystem(Q1DError):
    """The two-body linear system is singular (coupling at a resonance)."""

    exit_code = EXIT_REGIME


class UnphysicalAmplitude(Q1DError):
    """Finite-momentum solution violates the unitarity bound
    ``|U * I00| <= |2 J_K sin k|``."""

    exit_code = EXIT_REGIME


class SignConventionViolation(Q1DError):
    """A closed-channel Green's-function denominator came out non-negative."""

    exit_code = EXIT_REGIME
