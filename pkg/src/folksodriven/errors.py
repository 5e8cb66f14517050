"""Exception hierarchy shared by the engine modules.

Every error carries a stable ``code`` string; the HTTP layer maps each code
to exactly one status, so new exception classes must be registered in
``service.ERROR_STATUS`` (enforced by a test).
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine-raised errors."""

    code = "EngineError"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details


# --- fd-core ---

class ZeroImpressions(EngineError):
    code = "ZeroImpressions"


class NegativeStrain(EngineError):
    code = "NegativeStrain"


# --- ontology-store ---

class DuplicateIri(EngineError):
    code = "DuplicateIri"


class UnknownParent(EngineError):
    code = "UnknownParent"


class IsACycle(EngineError):
    code = "IsACycle"

    def __init__(self, message: str, path: list[str], **details):
        super().__init__(message, path=path, **details)
        self.path = path


class UnknownClass(EngineError):
    code = "UnknownClass"


class BadCardinality(EngineError):
    code = "BadCardinality"


class KindMismatch(EngineError):
    code = "KindMismatch"


class EmptyLabels(EngineError):
    code = "EmptyLabels"


class UnknownIndividual(EngineError):
    code = "UnknownIndividual"


class UnknownProperty(EngineError):
    code = "UnknownProperty"


class DuplicateAssertion(EngineError):
    code = "DuplicateAssertion"


class RangeViolation(EngineError):
    code = "RangeViolation"


class CardinalityExceeded(EngineError):
    code = "CardinalityExceeded"


class WouldCreateCycle(EngineError):
    code = "WouldCreateCycle"


class SecondFather(EngineError):
    code = "SecondFather"


class ChainFork(EngineError):
    code = "ChainFork"


class ChainInconsistent(EngineError):
    code = "ChainInconsistent"


class NotHierarchical(EngineError):
    code = "NotHierarchical"


class NotTotalOrder(EngineError):
    code = "NotTotalOrder"


# --- fsn-graph ---

class UnknownTag(EngineError):
    code = "UnknownTag"


class DuplicateTag(EngineError):
    code = "DuplicateTag"


class DuplicateOrdinal(EngineError):
    code = "DuplicateOrdinal"


# --- query-engine ---

class QuerySyntaxError(EngineError):
    code = "SyntaxError"

    def __init__(self, message: str, line: int, col: int, expected: str = "", **details):
        super().__init__(message, line=line, col=col, expected=expected, **details)
        self.line = line
        self.col = col
        self.expected = expected


class UnboundSelectVar(EngineError):
    code = "UnboundSelectVar"


class UnsupportedFeature(EngineError):
    code = "UnsupportedFeature"

    def __init__(self, construct: str, **details):
        super().__init__(f"unsupported query construct: {construct}",
                         construct=construct, **details)
        self.construct = construct


class RowLimitExceeded(EngineError):
    code = "RowLimitExceeded"


class DuplicateId(EngineError):
    code = "DuplicateId"


class SlotMismatch(EngineError):
    code = "SlotMismatch"


class UnknownTemplate(EngineError):
    code = "UnknownTemplate"


class MissingParam(EngineError):
    code = "MissingParam"


class RestrictionViolation(EngineError):
    code = "RestrictionViolation"


# --- nav-model ---

class NotExpandable(EngineError):
    code = "NotExpandable"


# --- kb-service ---

class MalformedDocument(EngineError):
    code = "MalformedDocument"

    def __init__(self, message: str, line: int = 0, **details):
        super().__init__(message, line=line, **details)
        self.line = line


class BadPercent(EngineError):
    code = "BadPercent"


class PortInUse(EngineError):
    code = "PortInUse"


class DataDirUnwritable(EngineError):
    code = "DataDirUnwritable"


def all_error_classes() -> list[type[EngineError]]:
    """Every concrete error class, for exhaustive mapping checks."""
    out = []
    stack = [EngineError]
    while stack:
        cls = stack.pop()
        for sub in cls.__subclasses__():
            out.append(sub)
            stack.append(sub)
    return sorted(set(out), key=lambda c: c.__name__)
