"""
This package provides utils functions.

Functions:
    - inline_refs(schema): Replaces `$ref` references of a JSON schema with their definitions.
    - configure_tracing(console): Installs the OpenTelemetry SDK tracer provider.
"""
from microslice.utils.json_schema_cleaner import inline_refs
from microslice.utils.telemetry import configure_tracing

__all__ = ["configure_tracing", "inline_refs"]
