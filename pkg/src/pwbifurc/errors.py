"""Exception types shared across the package."""


class PwbifurcError(Exception):
    """Base class for all package-specific errors."""


class NonPositiveMu(PwbifurcError):
    """Operation needs mu > 0 (degenerate trapping interval otherwise)."""


class IllPosedConfig(PwbifurcError):
    """Return-map machinery invoked on a configuration that fails the
    escape inequality e > mu**((p-q)/p) * (1 - nu**2) / (1 - nu)**(q/p)."""


class SingularDerivative(PwbifurcError):
    """Derivative requested at the switching point from the singular side."""


class BudgetExceeded(PwbifurcError):
    """Excursion did not return within the allotted step budget."""


class OutOfRange(PwbifurcError):
    """A computed or supplied parameter fell outside its admissible interval."""


class NoRoot(PwbifurcError):
    """Bisection bracket failed its sign conditions."""


class SingularPoint(PwbifurcError):
    """Derivative of the reduced map requested at z = 1 where it blows up."""


class WrongRegime(PwbifurcError):
    """Operation only defined in a different contraction-factor regime."""


class DegenerateBoundary(PwbifurcError):
    """Contraction factor sits exactly on a regime threshold."""


class NotAFixedPoint(PwbifurcError):
    """Flip coefficients requested at a point that does not satisfy the
    fixed-point condition within tolerance."""


class InsufficientData(PwbifurcError):
    """Too few samples for the requested period detection."""


class OrbitEscaped(PwbifurcError):
    """Reduced-map orbit left [nu, 1] beyond the allowed slack."""


class AllSamplesIllPosed(PwbifurcError):
    """Every sample of a sweep failed the well-posedness certificate."""


class CertificationFailed(PwbifurcError):
    """A sampled point violated a property the operation certifies."""
