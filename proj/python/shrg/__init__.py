"""SHRG composition, extraction, S-match and SemBank statistics."""

import json

from . import _shrg
from ._shrg import CompositionError, Error, IoError, ValidationError

__all__ = [
    "compose", "extract", "smatch", "isomorphic", "revise", "chi_square", "stat_test",
    "report", "transparency", "run_cli",
    "Error", "ValidationError", "CompositionError", "IoError",
]


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def compose(rules, derivation):
    """Returns {"tree": bracketed string, "graph": graph dict}."""
    return json.loads(_shrg.compose(_text(rules), _text(derivation)))


def extract(tree, graph, mode="delex"):
    return json.loads(_shrg.extract(tree, _text(graph), mode))


def smatch(cand, ref, restarts=16, seed=0, include_top=True):
    return json.loads(_shrg.smatch(_text(cand), _text(ref), restarts, seed, include_top))


def isomorphic(a, b):
    return _shrg.isomorphic(_text(a), _text(b))


def revise(catalog):
    return json.loads(_shrg.revise(_text(catalog)))


def chi_square(counts):
    return json.loads(_shrg.chi_square(counts))


def stat_test(a, b, variant="welch"):
    """variant: welch, student, paired or z."""
    return json.loads(_shrg.test(list(a), list(b), variant))


def report(corpus_text):
    return json.loads(_shrg.report(corpus_text))


def transparency(corpus_text, rules=None, restarts=16, seed=0, jobs=1):
    return json.loads(_shrg.transparency(corpus_text, _text(rules) if rules else "", restarts, seed, jobs))


def run_cli(args):
    """Runs the shrg command line in-process; returns (exit code, stdout, stderr)."""
    return _shrg.run_cli([str(a) for a in args])
