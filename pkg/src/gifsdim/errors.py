"""Exception types shared across the package.

Every error that a caller is expected to catch lives here, so modules never
need to import each other just for exceptions.  Solver routines that can
return a partial-but-certified answer do NOT raise; they flag the returned
estimate instead (see pressure/dimension status fields).
"""


class GifsError(Exception):
    """Base class for all package errors."""


class NonSimpleGraph(GifsError):
    """A vertex-coding operation was asked of a graph with parallel edges."""


class ConnectorSearchExhausted(GifsError):
    """BFS could not find a connector word within its budget."""

    def __init__(self, source, target, budget):
        self.source = source
        self.target = target
        self.budget = budget
        super().__init__(
            f"no connector word from {source!r} to {target!r} "
            f"within budget {budget}"
        )


class NonAdmissibleWord(GifsError):
    """A word violates the transition structure it was evaluated against."""


class NoAdmissibleWords(GifsError):
    """The requested word stream is empty (pressure is -inf there)."""


class DomainViolation(GifsError):
    """A point or set left the domain a map is defined on."""


class DegenerateMap(GifsError):
    """An operation that needs an invertible derivative met a constant map."""


class UnsupportedShape(GifsError):
    """No certified geometry routine exists for this shape/map pairing."""


class MixedFamily(GifsError):
    """A per-family routine received maps from incompatible families."""


class ConditionViolation(GifsError):
    """A structural precondition failed with a concrete witness."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class AlphabetMismatch(GifsError):
    """Two systems expected to share an alphabet do not."""


class InvalidAlphabet(GifsError):
    """An alphabet entry is outside the family's allowed letters."""


class SummabilityWitnessMissing(GifsError):
    """An infinite-alphabet operation needs a declared tail witness."""


class IrregularSystem(GifsError):
    """No certified pressure sign change exists in the scanned s-range."""

    def __init__(self, message, sign_pattern=None):
        self.sign_pattern = sign_pattern
        super().__init__(message)


class BudgetExhausted(GifsError):
    """A hard budget was hit before any certified answer existed."""


class IterationStall(GifsError):
    """Power iteration exhausted its budget before the requested gap.

    Raised only on request (strict_convergence=True); the default path
    returns the widest certified bracket with the stalled flag set.
    """


class SchemaViolation(GifsError):
    """Config validation failed; carries every violation found."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(self.violations)
        super().__init__(f"{len(self.violations)} config violation(s): {lines}")


class DegenerateBounds(GifsError):
    """A raster was asked for over an empty or zero-area region."""
