"""Exception hierarchy shared by the library and the command line."""


class TwbError(Exception):
    """Base class for all workbench errors."""


class InputError(TwbError):
    """Unknown object, morphism or malformed input."""


class ConstructionError(TwbError):
    """A ring, module or morphism failed its defining laws."""

    def __init__(self, message, law=None, witness=None):
        super().__init__(message)
        self.law = law
        self.witness = witness


class SectionError(TwbError):
    """The proposed zero section is not a section of the projection."""


class PreconditionError(TwbError):
    """An operation was called outside its domain (e.g. a non-commuting cone)."""


class UnsupportedLimit(TwbError):
    """The instance cannot compute (or certify) the requested limit."""


class ResourceError(TwbError):
    """A carrier or enumeration exceeded the configured budget."""

    def __init__(self, message, needed=None, budget=None):
        super().__init__(message)
        self.needed = needed
        self.budget = budget


class HypothesisViolation(TwbError):
    """Limit existence or preservation by T^n failed at the stated bound."""

    def __init__(self, message, k=None, n=None, witness=None):
        super().__init__(message)
        self.k = k
        self.n = n
        self.witness = witness


class TheoremViolation(TwbError):
    """The comparison <q, lambda, q> is not an isomorphism for a checked bundle."""


class CorollaryViolation(TwbError):
    """The data (q, z, lambda) do not determine a bundle, so sigma cannot be rebuilt."""
