"""
OpenTelemetry setup for the command line.

Management functions and the formation engine create spans through the OpenTelemetry API
only. Without an SDK tracer provider those spans are no-ops; `configure_tracing` installs
one, optionally exporting every finished span to stdout.
"""
from opentelemetry import trace
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import ConsoleSpanExporter, SimpleSpanProcessor

from microslice._version import __version__


def configure_tracing(console: bool = False) -> TracerProvider:
    """
    Install an SDK tracer provider as the global one.

    :param console: Export finished spans to stdout.
    :return: The installed provider.
    """
    provider = TracerProvider(
        resource=Resource.create({"service.name": "micro-slice", "service.version": __version__})
    )
    if console:
        provider.add_span_processor(SimpleSpanProcessor(ConsoleSpanExporter()))
    trace.set_tracer_provider(provider)
    return provider
