"""Mode, termination and coverage checking of LF signatures with proof certificates."""

from ._lfm2 import Error, check, print_signature, prove, solve, trace, verify

__all__ = ["Error", "check", "print_signature", "prove", "solve", "trace", "verify"]
