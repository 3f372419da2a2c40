"""Python bindings for the wpcis scanner core."""

from ._core import (
    WpcisError,
    MockServer,
    aggregate_report,
    build_endpoint_url,
    build_injection_request,
    coerced_id,
    is_affected_version,
    leading_integer,
    normalize_target,
    parse_posts,
    parse_version,
    render_verdict,
    scan,
)

__all__ = [
    "WpcisError",
    "MockServer",
    "aggregate_report",
    "build_endpoint_url",
    "build_injection_request",
    "coerced_id",
    "is_affected_version",
    "leading_integer",
    "normalize_target",
    "parse_posts",
    "parse_version",
    "render_verdict",
    "scan",
]
