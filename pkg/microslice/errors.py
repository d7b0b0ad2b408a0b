"""
Exception hierarchy for the slicing management simulator.

Every error carries a stable ``reason`` string. The formation engine turns caught errors
into trace outcomes such as ``failed:insufficient_resources`` or ``rejected:expired``, so
the reason is part of the trace format and must not change between releases.
"""
from typing import List, Optional, Tuple


class MicroSliceError(Exception):
    """Root of every error raised by this package."""

    reason: str = "error"

    def __init__(self, message: str = "", reason: Optional[str] = None):
        super().__init__(message or self.__class__.__name__)
        if reason is not None:
            self.reason = reason


class ContractViolation(MicroSliceError, ValueError):
    """A caller broke an operation precondition."""

    reason = "contract_violation"


class InsufficientResources(MicroSliceError):
    """A pool cannot cover the requested capacity for a subnet."""

    reason = "insufficient_resources"


class IncompatibleProfile(MicroSliceError):
    """A shared NSSI does not match the requirement it was offered to."""

    reason = "incompatible_profile"


class NotShareable(MicroSliceError):
    """An exclusive NSSI was offered for sharing."""

    reason = "not_shareable"


class UnknownHolder(MicroSliceError):
    """A holder released an NSSI it never referenced."""

    reason = "unknown_holder"


class UnclassifiableRequest(MicroSliceError):
    """Request flags do not map to exactly one deployment scenario."""

    reason = "unclassifiable"


class RequestDiscarded(MicroSliceError):
    """The NSMF dropped a request the network provider did not approve."""

    reason = "discarded"


class InvalidTransition(MicroSliceError):
    """A lifecycle event is illegal in the current state."""

    reason = "invalid_transition"


class MalformedRequest(MicroSliceError):
    """A raw tenant request failed validation.

    :param diagnostics: ``(field, message)`` pairs, one per failing field.
    """

    reason = "malformed"

    def __init__(self, message: str, diagnostics: Optional[List[Tuple[str, str]]] = None):
        super().__init__(message)
        self.diagnostics: List[Tuple[str, str]] = diagnostics or []


class TenantMismatch(MicroSliceError):
    """A service was assembled from NSIs of different tenants."""

    reason = "tenant_mismatch"


class InactiveNsi(MicroSliceError):
    """A service was assembled from an NSI that is not in service."""

    reason = "inactive_nsi"


class ServiceUnavailable(MicroSliceError):
    """A UE tried to attach to a service that is no longer active."""

    reason = "service_unavailable"


class NoAgreementOnFile(MicroSliceError):
    """The network provider holds no service agreement for the tenant."""

    reason = "no_agreement"


class MnoUnreachable(MicroSliceError):
    """The MNO stub is configured unreachable."""

    reason = "mno_unreachable"


class GrantRefused(MicroSliceError):
    """The MNO refused to grant an NSSI."""

    reason = "grant_refused"


class MalformedTrace(MicroSliceError):
    """A trace file line could not be parsed."""

    reason = "malformed_trace"


class ReplayDivergence(MicroSliceError):
    """A replay produced a different event, outcome or final state than the recorded run."""

    reason = "replay_divergence"


class ScenarioError(MicroSliceError):
    """Base for scenario file problems; all map to exit code 2."""

    reason = "scenario_error"

    def __init__(self, message: str, diagnostics: Optional[List[Tuple[str, str]]] = None):
        super().__init__(message)
        self.diagnostics: List[Tuple[str, str]] = diagnostics or []


class ParseError(ScenarioError):
    """A scenario cannot be found, read or decoded as JSON."""

    reason = "parse_error"


class SchemaViolation(ScenarioError):
    """A scenario file does not match the scenario schema."""

    reason = "schema_violation"


class DanglingReference(ScenarioError):
    """A scenario refers to an id it does not define."""

    reason = "dangling_reference"


class ExpectationMismatch(MicroSliceError):
    """A run outcome differs from the expectation recorded in the scenario."""

    reason = "expectation_mismatch"

    def __init__(self, message: str, request_ids: Optional[List[str]] = None):
        super().__init__(message)
        self.request_ids: List[str] = request_ids or []


class InvariantViolation(MicroSliceError):
    """An engine invariant failed. Always fatal: it signals a simulator bug."""

    reason = "invariant_violation"


class IoError(MicroSliceError):
    """Run outputs could not be written."""

    reason = "io_error"
