class SkipWebError(Exception):
    """Base class for all errors raised by this package."""


class InvalidItem(SkipWebError, ValueError):
    pass


class DuplicateKey(InvalidItem):
    pass


# Aliases kept for the per-structure vocabulary.
DuplicateItem = DuplicateKey
DuplicatePoint = DuplicateKey
DuplicateString = DuplicateKey


class PointOutsideBounds(InvalidItem):
    pass


OutsideRoot = PointOutsideBounds


class SymbolOutsideAlphabet(InvalidItem):
    pass


class CrossingSegments(InvalidItem):
    pass


class DegenerateInput(InvalidItem):
    pass


class OnBoundary(SkipWebError, ValueError):
    pass


class UniverseMismatch(SkipWebError, TypeError):
    pass


class ItemNotFound(SkipWebError, KeyError):
    pass


class MemoryTooSmall(SkipWebError, ValueError):
    pass


class WrongUniverse(SkipWebError, ValueError):
    pass


class UnresolvableHyperlink(SkipWebError, RuntimeError):
    """A hyperlink points at an element that does not exist (wiring bug)."""


DanglingHyperlink = UnresolvableHyperlink


class UnsupportedOperation(SkipWebError, NotImplementedError):
    pass


class InvariantViolation(SkipWebError, AssertionError):
    """A self-check (oracle agreement, rebuild equivalence) failed."""


class ConfigError(SkipWebError, ValueError):
    pass
