"""Exception hierarchy shared by every module.

Every error raised for a bad model or an ill-posed query derives from
:class:`CausalInfoError`; the CLI maps these to exit status 2.
"""


class CausalInfoError(Exception):
    """Base class for model and query errors."""


class CycleDetected(CausalInfoError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cycle detected: " + " -> ".join(map(str, self.cycle)))


class SelfParent(CausalInfoError):
    pass


class IndexOutOfRange(CausalInfoError):
    pass


class SetsNotDisjoint(CausalInfoError):
    pass


class OverlappingSets(SetsNotDisjoint):
    pass


class ScopeMismatch(CausalInfoError):
    pass


class ZeroProbabilityEvidence(CausalInfoError):
    pass


class ModelTooLarge(CausalInfoError):
    pass


class InvalidModel(CausalInfoError):
    """Raised when a model fails validation; carries the violation list."""

    def __init__(self, violations):
        self.violations = list(violations)
        detail = "; ".join(str(v) for v in self.violations[:3])
        if len(self.violations) > 3:
            detail += f"; ... ({len(self.violations)} violations)"
        super().__init__(f"invalid model: {detail}")


class InvalidSpec(CausalInfoError):
    pass


class UnsupportedModel(CausalInfoError):
    pass


class StructureMismatch(CausalInfoError):
    pass


class UndefinedConditional(CausalInfoError):
    pass


class ZNotNondescendants(CausalInfoError):
    pass


class ModelFileError(CausalInfoError):
    pass
