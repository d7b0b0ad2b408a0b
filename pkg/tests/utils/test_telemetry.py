# pylint: disable-all
from opentelemetry.sdk.trace.export import SimpleSpanProcessor

from microslice import __version__
from microslice.utils.telemetry import configure_tracing


def test_provider_describes_the_service():
    provider = configure_tracing()
    attributes = provider.resource.attributes
    assert attributes["service.name"] == "micro-slice"
    assert attributes["service.version"] == __version__


def test_console_export_adds_a_processor():
    provider = configure_tracing(console=True)
    processors = provider._active_span_processor._span_processors
    assert any(isinstance(processor, SimpleSpanProcessor) for processor in processors)
