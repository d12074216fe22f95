from .diagnostics import Diagnostic, Diagnostics, SpecError, SpecSyntaxError
from .expand import expand_spec
from .parser import parse_spec
from .printer import format_spec
from .validate import validate_spec


def load_system(text: str):
    """Parse, expand and validate ``text``; raise :class:`SpecError` on any error.

    Returns the ground system and the (warning-only) diagnostics.
    """
    sys = expand_spec(parse_spec(text))
    diags = validate_spec(sys)
    if not diags.ok:
        raise SpecError(diags)
    return sys, diags


__all__ = [
    "Diagnostic",
    "Diagnostics",
    "SpecError",
    "SpecSyntaxError",
    "expand_spec",
    "format_spec",
    "load_system",
    "parse_spec",
    "validate_spec",
]
