"""Quantum graphs with delta and delta' vertex conditions.

Couplings are passed as dicts mapping vertex ids to exact values: ints,
fractions.Fraction, or strings such as "3/2". Structured results come back as
plain dicts with rationals rendered as "p/q" strings.
"""

from ._qgraph import (
    Graph,
    QGraphError,
    __version__,
    a3_family,
    balance,
    check_isospectral,
    clean_vertex,
    eigenvalues,
    expand,
    find_isospectral,
    quasi_remove,
    run_cli,
    secular_value,
    sigma,
    thm00_reduce,
    trim_edge,
    trim_loop_vertex,
    uniqueness_report,
)

__all__ = [
    "Graph",
    "QGraphError",
    "a3_family",
    "balance",
    "check_isospectral",
    "clean_vertex",
    "eigenvalues",
    "expand",
    "find_isospectral",
    "quasi_remove",
    "run_cli",
    "secular_value",
    "sigma",
    "thm00_reduce",
    "trim_edge",
    "trim_loop_vertex",
    "uniqueness_report",
]
