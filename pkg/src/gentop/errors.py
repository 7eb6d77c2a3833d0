"""Exception types shared across the package."""


class GentopError(Exception):
    pass


class TopologyError(GentopError, ValueError):
    pass


class NotReflexive(TopologyError):
    pass


class NotTransitive(TopologyError):
    pass


class UnknownPoint(TopologyError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NotAPartition(TopologyError):
    pass


class EmptyList(GentopError, ValueError):
    pass


class NotOpen(TopologyError):
    pass


class NotClosed(TopologyError):
    pass


class MalformedElement(TopologyError):
    pass


class SpaceMismatch(GentopError, ValueError):
    pass


class NotContinuous(GentopError, ValueError):
    def __init__(self, witness, message=None):
        self.witness = witness
        super().__init__(message or f"map is not continuous at {witness!r}")


class NotDiffuse(GentopError, ValueError):
    def __init__(self, witness=None, message=None):
        self.witness = witness
        super().__init__(message or f"map is not diffuse, witness {witness!r}")


class NotEmbedding(GentopError, ValueError):
    pass


class ModeMismatch(GentopError, ValueError):
    pass


class AxiomFailure(GentopError, ValueError):
    def __init__(self, law, axiom, witness):
        self.law = law
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"{law} fails ({axiom} axiom), witness {witness!r}")


class InvalidAction(GentopError, ValueError):
    pass


class NotLocalHomeoOffI(GentopError, ValueError):
    pass


class NotACover(GentopError, ValueError):
    pass


class BudgetExceeded(GentopError, RuntimeError):
    pass


class WitnessNotFound(GentopError, LookupError):
    pass


class NegativeInput(GentopError, ValueError):
    pass


class ParseError(GentopError, ValueError):
    def __init__(self, file, line, reason):
        self.file = file
        self.line = line
        self.reason = reason
        super().__init__(f"{file}:{line}: {reason}")
