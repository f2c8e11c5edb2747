"""Lang-n-Change: browse SOS language definitions and validate the GSOS rule format."""

from .dsl import Program, expand_macros, parse_program
from .evaluator import EvalError, RuntimeFault, UserError, evaluate, run_program
from .gsos import ValidationReport, bundled_program, reference_check, validate_gsos
from .sos import LanguageDef, ParseError, parse_language, print_language, term_vars

__all__ = [
    "EvalError", "LanguageDef", "ParseError", "Program", "RuntimeFault", "UserError",
    "ValidationReport", "bundled_program", "evaluate", "expand_macros", "parse_language",
    "parse_program", "print_language", "reference_check", "run_program", "term_vars",
    "validate_gsos",
]
