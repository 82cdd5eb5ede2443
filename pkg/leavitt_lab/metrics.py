from __future__ import annotations

from prometheus_client import REGISTRY, Counter, Histogram, write_to_textfile


NORMALIZATIONS_TOTAL = Counter(
    "leavitt_normalizations_total",
    "Number of normalize calls.",
)

REWRITE_STEPS_TOTAL = Counter(
    "leavitt_rewrite_steps_total",
    "CK-2 rewrite steps applied during normalization.",
)

MONOMIAL_PRODUCTS_TOTAL = Counter(
    "leavitt_monomial_products_total",
    "Monomial-by-monomial products evaluated.",
)

LINEAR_SOLVES_TOTAL = Counter(
    "leavitt_linear_solves_total",
    "Exact linear-algebra reductions grouped by purpose.",
    labelnames=("kind",),
)

CHECK_RESULTS_TOTAL = Counter(
    "leavitt_check_results_total",
    "Checker outcomes grouped by check and outcome.",
    labelnames=("check", "outcome"),
)

CHECK_DURATION_SECONDS = Histogram(
    "leavitt_check_duration_seconds",
    "Duration of checker runs in seconds.",
    labelnames=("check",),
    buckets=(0.001, 0.01, 0.05, 0.1, 0.5, 1, 5, 30, 120),
)


def record_normalization(steps: int) -> None:
    NORMALIZATIONS_TOTAL.inc()
    if steps:
        REWRITE_STEPS_TOTAL.inc(steps)


def record_products(count: int) -> None:
    if count:
        MONOMIAL_PRODUCTS_TOTAL.inc(count)


def record_solve(kind: str) -> None:
    LINEAR_SOLVES_TOTAL.labels(kind=kind or "unspecified").inc()


def observe_check(check: str, outcome: str, duration_seconds: float) -> None:
    CHECK_DURATION_SECONDS.labels(check=check).observe(max(duration_seconds, 0.0))
    CHECK_RESULTS_TOTAL.labels(check=check, outcome=outcome).inc()


def write_metrics(path: str) -> None:
    write_to_textfile(path, REGISTRY)
