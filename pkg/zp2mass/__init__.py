"""Exact construction, counting and classification of self-orthogonal codes over Z_{p^2}."""

__all__ = ["census", "cli", "codecore", "equivalence", "lifting", "ringmat", "verify"]
