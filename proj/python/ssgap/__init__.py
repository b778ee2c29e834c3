"""Spectrum-singularity gap probabilities."""

import json

from ._core import (
    RouteValidityError,
    backlund_apply,
    gap,
    hard_edge_gap,
    kernel,
    tau_cross,
    tau_cross_negated,
    tau_diag,
)

__all__ = [
    "RouteValidityError",
    "backlund_apply",
    "gap",
    "gap_all",
    "hard_edge_gap",
    "kernel",
    "tau_cross",
    "tau_cross_negated",
    "tau_diag",
    "verify",
]

METHODS = ("fredholm", "sigma1", "hard-edge", "cross")


def gap_all(a, x, **kwargs):
    """All four routes; returns (results, max pairwise relative discrepancy in E)."""
    results = [gap(a, x, method=m, **kwargs) for m in METHODS]
    disc = 0.0
    for i, r in enumerate(results):
        for s in results[i + 1:]:
            disc = max(disc, abs(r["E"] - s["E"]) / max(r["E"], s["E"]))
    return results, disc


def verify(suite="all", trials=0, seed=0):
    """Run a verification suite and return the report as a dict."""
    from ._core import verify_json

    return json.loads(verify_json(suite, trials, seed))
