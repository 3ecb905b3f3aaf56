"""Exception types raised across the library."""


class Spun4dError(Exception):
    """Base class for all library errors."""


class DegenerateInput(Spun4dError):
    """Operation received an input it cannot meaningfully process (e.g. zero polynomial)."""


class NonFiniteSample(Spun4dError):
    """A sampled function returned NaN or infinity on its stated domain."""


class GridMismatch(Spun4dError):
    """Sample lattice shape does not match the requested fit degree."""


class ZeroGap(Spun4dError):
    """A colliding parameter pair has equal images in both free coordinates; the map is not injective."""


class UnknownKnot(Spun4dError):
    """Requested knot name is not in the catalog."""


class UnliftableHeight(Spun4dError):
    """Height polynomial cannot be shifted into the two-root positive-bump shape."""


class NonGeneric(Spun4dError):
    """Plane projection has a tangential (non-transverse) self-intersection."""


class NonUnitAxis(Spun4dError):
    """Rotation axis vector is not unit length."""


class NoRoom(Spun4dError):
    """No valid bump plateau/support fits between the crossing interval and the twist axis."""


class PlaneCrossing(Spun4dError):
    """Twisted arc height becomes non-positive while rotating; offending (t, phi) attached."""

    def __init__(self, t, phi, value):
        super().__init__(
            f"twisted height {value:.6g} <= 0 at t={t:.6g}, phi={phi:.6g}"
        )
        self.t = t
        self.phi = phi
        self.value = value


class BadAxes(Spun4dError):
    """Invalid projection axes specification."""
