"""Calculus of algebraic constructions: terms, typing, rewriting and termination checks."""

from pathlib import Path

CORPUS = Path(__file__).parent / "corpus"


def corpus_file(name: str) -> Path:
    """Path of a bundled example, e.g. ``corpus_file("listn")``."""
    return CORPUS / f"{name}.cac"
