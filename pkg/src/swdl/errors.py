"""Exception and warning types shared across the package."""


class SWDLError(Exception):
    """Base class for numeric precondition failures."""


class NotSymplectic(SWDLError):
    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"matrix is not symplectic: |ad - bc - 1| = {residual:.3e}")


class ZeroEntry(SWDLError):
    def __init__(self, entry, message=None):
        self.entry = entry
        super().__init__(message or f"entry {entry} must be non-zero")


class ZeroB(ZeroEntry):
    def __init__(self, entry="b"):
        super().__init__(entry, f"LCT kernel requires {entry} != 0")


class DegenerateInput(SWDLError):
    pass


class InvalidWidth(SWDLError):
    pass


class UnboundedSupport(SWDLError):
    pass


class ZeroEnergy(SWDLError):
    pass


class ZeroAtOrigin(SWDLError):
    pass


class AxisMismatch(SWDLError):
    pass


class DegenerateMap(SWDLError):
    pass


class EmptyGrid(SWDLError):
    pass


class SignalClassMismatch(SWDLError):
    pass


class DecompositionMismatch(SWDLError):
    """Direct and decomposed uncertainty products disagree beyond tolerance."""

    def __init__(self, direct, decomposed):
        self.direct = direct
        self.decomposed = decomposed
        rel = abs(direct - decomposed) / max(abs(direct), 1e-300)
        super().__init__(
            f"direct product {direct:.6g} vs decomposition {decomposed:.6g} (rel {rel:.2e})"
        )


class TruncationWarning(UserWarning):
    """The grid edge still carries a noticeable fraction of the peak magnitude."""


class AliasRisk(UserWarning):
    """Chirp phase advances by more than pi per sample in the fast LCT."""
