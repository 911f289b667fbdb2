"""Document coverage prediction for relation extraction: data model,
heuristic signals, classifiers, metrics, and the downstream ranking,
budgeting, and claim-refutation procedures."""

__version__ = "0.1.0"

from .errors import CovrankError, ParseError

__all__ = ["CovrankError", "ParseError", "__version__"]
