"""Exception types shared across the package."""


class TrajsampError(Exception):
    """Base class for all package errors."""


class InvalidBody(TrajsampError):
    """Convex body construction failed validation."""


class UnboundedBody(TrajsampError):
    """H-form body is unbounded in the probed direction."""


class DegenerateBody(TrajsampError):
    """Body is flat: its width is below tolerance."""


class EmptySlice(TrajsampError):
    """Cross-section hyperplane does not meet the body."""


class SingularBasis(TrajsampError):
    """Line/lattice basis is linearly dependent within tolerance."""


class WindowTooSmall(TrajsampError):
    """No trajectory intersects the requested window."""


class CollinearParts(TrajsampError):
    """Two-part union with parallel line directions: the full criterion needs non-collinear parts."""


class SymmetryRequired(TrajsampError):
    """Operation requires a body flagged symmetric about the origin."""


class NonIsotropicOmega(TrajsampError):
    """Operation requires a ball-shaped spectral support centered at the origin."""


class EnumerationOverflow(TrajsampError):
    """Candidate enumeration bound exceeds the configured budget."""


class EpsilonOutOfRange(TrajsampError):
    """Design margin epsilon outside its admissible interval."""


class EmptyInterior(TrajsampError):
    """Shrunk body has empty interior; no room to place atoms."""


class EpsTooCoarse(TrajsampError):
    """Along-path sampling pitch violates the restriction-band bound."""

    def __init__(self, msg, bound=None):
        super().__init__(msg)
        self.bound = bound


class NearCosetAmbiguity(TrajsampError):
    """Two atom frequencies nearly but not exactly differ by a reciprocal shift; refusing to snap."""


class UnitCellPresent(TrajsampError):
    """Occupied index set contains a translate of the binary unit cell: unfolding is impossible."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class InconsistentSystem(TrajsampError):
    """Alias relations admit no solution within tolerance."""


class ReconstructionImpossible(TrajsampError):
    """Field recovery failed; carries the witness of the offending structure."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness
