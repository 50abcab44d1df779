"""Tokenizer fairness audits across languages."""

__version__ = "0.1.0"
