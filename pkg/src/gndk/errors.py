"""Exception hierarchy shared by all kernel modules.

Every domain error derives from KernelError and exposes a stable ``code``
(the class name) that the CLI prints as ``ERROR <code>: <message>``.
"""


class KernelError(Exception):
    @property
    def code(self) -> str:
        return type(self).__name__


class ParseError(KernelError):
    """Input text is not in the expected surface syntax."""

    def __init__(self, message: str, position: int | None = None, expected: str | None = None):
        super().__init__(message)
        self.position = position
        self.expected = expected


class GrammarViolation(ParseError):
    """Text tokenizes but breaks a structural rule of the formula grammar."""


class BadOccurrence(KernelError):
    """A path does not address an operator occurrence of the required kind."""


class NotAGroundingTree(KernelError):
    """The formula is not an immediate grounding claim."""


class DuplicateRuleName(KernelError):
    pass


class IllFormedPattern(KernelError):
    pass


class UnknownSchema(KernelError):
    """A proof file references a rule name absent from the calculus."""


class NotIntroducible(KernelError):
    """No grounding rule instance concludes the claim's triple."""


class NoTreeEntry(KernelError):
    pass


class PartsMismatch(KernelError):
    pass


class NotAGroundingDerivation(KernelError):
    pass


class BarMismatch(KernelError):
    pass


class NoMatchingRule(KernelError):
    def __init__(self, claim, message: str | None = None):
        super().__init__(message or f"no grounding rule concludes {claim}")
        self.claim = claim


class StaleRedex(KernelError):
    """The derivation no longer contains the reducible configuration."""


class BudgetExhausted(KernelError):
    """Normalization ran out of steps; carries the partial result and trace."""

    def __init__(self, derivation, trace):
        super().__init__(f"step budget exhausted after {len(trace)} reductions")
        self.derivation = derivation
        self.trace = trace


class UnsupportedFormula(KernelError):
    """The operation is undefined for formulas of this shape."""
