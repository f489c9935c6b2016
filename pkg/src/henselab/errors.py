"""Exception hierarchy."""


class HenselabError(Exception):
    """Base class for all library errors."""


class InvalidElement(HenselabError, ZeroDivisionError):
    """Division by an element that is zero, or an otherwise ill-formed element."""


class PrecisionExhausted(HenselabError):
    """A series computation could not be settled below the precision cap."""


class UnregisteredGenerator(HenselabError, KeyError):
    """An element or derivation refers to a generator index not in the registry."""


class UnsupportedTier(HenselabError):
    """The operation needs symbolic-tier input but got an analytic element."""


class NoWitnessFound(HenselabError):
    """A constructive search exhausted its candidate family."""


class OutsideHenselDomain(HenselabError):
    """Some coefficient of the polynomial has valuation <= 0."""


class BadBasisChoice(HenselabError):
    """The chosen points make the transformation matrix singular."""
