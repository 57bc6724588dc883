"""Exception types shared across the package."""


class CovertSigError(Exception):
    """Base class for all package-specific errors."""


class InputDomainError(CovertSigError):
    """A symbol is not a member of the alphabet it was used against."""


class ScenarioSchemaError(CovertSigError):
    """A scenario document failed schema validation.

    Carries the full list of violations, each prefixed with the offending
    field path.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class InvalidScenarioError(CovertSigError):
    """A structurally well-formed scenario violates a standing assumption."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(
            "scenario violates assumptions: "
            + "; ".join(str(v) for v in self.violations)
        )


class ImpossibleObservationError(CovertSigError):
    """An observation has zero likelihood under both sender types.

    Signals an inconsistent scenario/strategy combination rather than a
    numerical problem.
    """


class DegenerateLikelihoodError(CovertSigError):
    """A likelihood pair produced a zero denominator in the growth factor."""


class OracleHorizonError(CovertSigError):
    """The brute-force oracle was asked for a horizon above its hard bound."""
