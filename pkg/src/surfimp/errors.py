"""Exception hierarchy shared across the package.

Two broad families matter for callers (and for the CLI exit-code map):
``ValidationError`` covers bad or inconsistent *inputs* (malformed files,
non-convex tensors, missing samples), while ``NumericalError`` covers
failures of the *algorithms* on inputs that looked fine (defective
solvents, negative radicands met mid-recovery, quadrature breakdown).
"""

from __future__ import annotations


class SurfimpError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(SurfimpError):
    """Input data violates a documented precondition or invariant."""


class NumericalError(SurfimpError):
    """A numerical procedure failed or left its guaranteed regime."""


class UsageError(SurfimpError):
    """Command line was malformed (unknown flags, missing arguments)."""


class IoError(SurfimpError):
    """A file could not be read or written."""


class ParseError(ValidationError):
    """A file was readable but its content does not match the schema."""


# --- tensor validation ------------------------------------------------------

class ConvexityViolation(ValidationError):
    """Stiffness tensor is not strongly convex (Kelvin form not positive)."""


class SingularJacobian(ValidationError):
    """Coordinate Jacobian is singular or too close to singular."""


class InvalidDirection(ValidationError):
    """Normal/tangent direction pair violates its normalization contract."""


class ZeroTangent(ValidationError):
    """Tangential wave vector is zero where a nonzero one is required."""


# --- factorization and impedance --------------------------------------------

class RealRootDetected(NumericalError):
    """The quadratic symbol has a real root.

    For a strongly convex tensor with positive density all six roots
    come in strictly complex conjugate pairs, so a real root signals a
    convexity or positivity violation in the inputs.
    """


class DefectiveSolvent(NumericalError):
    """Eigenvector basis of the solvent is numerically defective."""


class ContourTooClose(NumericalError):
    """Integration contour passes too close to a symbol root."""


class NegativeDiscriminant(NumericalError):
    """Closed-form radicand is negative; parameters are outside the
    regime where the closed form is valid."""


class InvalidImpedance(ValidationError):
    """Matrix fails the impedance invariants (Hermitian, Re part > 0)."""


# --- recovery ----------------------------------------------------------------

class DegenerateProfile(ValidationError):
    """Profile has (numerically) vanishing curvature; the rational model
    a + c/(t+b) cannot be identified from it."""


class InsufficientSamples(ValidationError):
    """Too few profile samples for the requested derivative estimate."""


class MissingSample(ValidationError):
    """A required impedance sample (direction or magnitude) is absent."""


class NegativeRadicand(NumericalError):
    """A square root taken during recovery received a negative argument."""


class SingularStep5System(NumericalError):
    """The 2x2 linear system for the density/shear gradient pair is
    singular; recovered values must be corrupt."""


class RankDeficientDesign(NumericalError):
    """Least-squares design matrix for full-tensor recovery is rank
    deficient (coplanar directions, or all sample vectors of one length)."""


class QuadratureFailure(NumericalError):
    """Line-integral quadrature did not converge to tolerance."""


# --- wave solver -------------------------------------------------------------

class CflViolation(NumericalError):
    """Requested time step violates the explicit stability bound."""
