# pylint: disable-all
import pytest

from microslice.errors import (
    ContractViolation,
    InactiveNsi,
    MalformedRequest,
    ServiceUnavailable,
    TenantMismatch,
)
from microslice.management import (
    Csmf,
    DeploymentScenario,
    LatencyClass,
    LifecycleNotice,
    LifecycleState,
    NetworkMode,
    Nsi,
    NsiConfigType,
    ServiceStatus,
    ingest_request,
    translate_request,
)
from tests.conftest import L1, L2, M1, MNO1, UO

LOCATIONS = {"L1": L1, "L2": L2, "M1": M1}


def raw(**overrides):
    record = {
        "tenant_slice_id": "t1-s1",
        "tenant_id": "t1",
        "latency_ms": 20,
        "throughput_units": 2,
        "duration_ticks": 100,
        "customer_group": "closed",
        "home_location": "L1",
    }
    record.update(overrides)
    return record


def nsi(nsi_id="nsi-t1-s1", tenant="t1", state=LifecycleState.ACTIVATED, domain=UO):
    return Nsi(
        id=nsi_id,
        request_id="t1-s1",
        tenant_id=tenant,
        scenario=DeploymentScenario.CLOSED_DEP_A,
        config_type=NsiConfigType.TYPE1,
        constituents=["nssi-uo-001"],
        constituent_domains=[domain.name],
        owner_domain=domain,
        home_location=L1,
        state=state,
        history=[state],
    )


def test_ingest_resolves_locations_and_defaults():
    req = ingest_request(raw(share_with_locations=["L2", "L1"]), LOCATIONS, ["mno1"])
    assert req.home_location == L1
    assert req.locations == (L1, L2)
    assert req.network_mode is NetworkMode.CLOSED
    assert req.mno == "mno1"


def test_ingest_open_group_defaults_to_open_network():
    req = ingest_request(
        raw(customer_group={"kind": "open_mno_subscribers", "mno": "mno1"}),
        LOCATIONS,
        ["mno1"],
    )
    assert req.network_mode is NetworkMode.OPEN
    assert req.customer_group.subscriber_group == "mno1-subscribers"


def test_ingest_reports_every_field():
    with pytest.raises(MalformedRequest) as excinfo:
        ingest_request(raw(latency_ms=0, throughput_units=0), LOCATIONS)
    fields = [field for field, _ in excinfo.value.diagnostics]
    assert "latency_ms" in fields
    assert "throughput_units" in fields
    assert excinfo.value.reason == "malformed"


@pytest.mark.parametrize(
    "overrides, field",
    [
        ({"home_location": "L9"}, "home_location"),
        ({"home_location": "M1"}, "home_location"),
        ({"share_with_locations": ["L9"]}, "share_with_locations.0"),
        ({"mno": "mno9"}, "mno"),
        ({"dep_b_bridge": "multi_site"}, "share_with_locations"),
    ],
)
def test_ingest_rejects_bad_references(overrides, field):
    with pytest.raises(MalformedRequest) as excinfo:
        ingest_request(raw(**overrides), LOCATIONS, ["mno1"])
    assert field in [name for name, _ in excinfo.value.diagnostics]


def test_ingest_rejects_unknown_keys():
    with pytest.raises(MalformedRequest):
        ingest_request(raw(colour="blue"), LOCATIONS)


@pytest.mark.parametrize(
    "latency, expected",
    [(5, LatencyClass.STRICT), (10, LatencyClass.STRICT), (10.5, LatencyClass.RELAXED)],
)
def test_translate_latency_threshold(latency, expected):
    req = ingest_request(raw(latency_ms=latency), LOCATIONS)
    reqs = translate_request(req, 10.0)
    assert reqs.latency_class is expected
    assert reqs.profile_key == f"{expected.value}-2"


def test_translate_carries_request_fields():
    req = ingest_request(
        raw(sharing_agreement="within_location", profile_key="gold"), LOCATIONS
    )
    reqs = Csmf(strict_latency_ms=10.0).translate(req)
    assert reqs.profile_key == "gold"
    assert reqs.allows_sharing
    assert reqs.locations == (L1,)
    assert reqs.home_location == L1


def test_strict_tenants_never_share():
    req = ingest_request(raw(latency_ms=5, sharing_agreement="within_location"), LOCATIONS)
    assert not translate_request(req).allows_sharing


def test_assemble_notify_and_connect():
    csmf = Csmf()
    service = csmf.assemble_service([nsi()], "t1")
    assert service.id == "cs-t1-s1"
    assert service.owner_domains == ["uo"]
    with pytest.raises(ServiceUnavailable):
        csmf.connect_ue(service.id)
    assert csmf.notify_tenant(service).first
    assert not csmf.notify_tenant(service).first
    csmf.connect_ue(service.id)
    assert csmf.ue_attachments[service.id] == 1


def test_assemble_checks_nsis():
    csmf = Csmf()
    with pytest.raises(TenantMismatch):
        csmf.assemble_service([nsi(tenant="t2")], "t1")
    with pytest.raises(InactiveNsi):
        csmf.assemble_service([nsi(state=LifecycleState.DEACTIVATED)], "t1")
    with pytest.raises(ContractViolation):
        csmf.assemble_service([], "t1")
    with pytest.raises(ContractViolation):
        csmf.assemble_service([nsi(), nsi("nsi-t1-s1-b")], "t1")


def test_mixed_service_spans_two_domains():
    service = Csmf().assemble_service([nsi(), nsi("nsi-t1-s1-mno1", domain=MNO1)], "t1")
    assert service.nsi_ids == ["nsi-t1-s1", "nsi-t1-s1-mno1"]
    assert service.owner_domains == ["uo", "mno1"]


def test_deactivation_terminates_service():
    csmf = Csmf()
    service = csmf.assemble_service([nsi()], "t1")
    csmf.notify_tenant(service)
    csmf.on_lifecycle(
        LifecycleNotice(
            nsi_id="nsi-t1-s1",
            request_id="t1-s1",
            tenant_id="t1",
            state=LifecycleState.SUPERVISED,
        )
    )
    assert service.active
    csmf.on_lifecycle(
        LifecycleNotice(
            nsi_id="nsi-t1-s1",
            request_id="t1-s1",
            tenant_id="t1",
            state=LifecycleState.DEACTIVATED,
        )
    )
    assert service.status is ServiceStatus.TERMINATED
    with pytest.raises(ServiceUnavailable):
        csmf.notify_tenant(service)
    with pytest.raises(ServiceUnavailable):
        csmf.connect_ue(service.id)


def test_terminated_services_stay_on_record():
    csmf = Csmf()
    service = csmf.assemble_service([nsi()], "t1")
    csmf.notify_tenant(service)
    csmf.connect_ue(service.id)
    csmf.on_lifecycle(
        LifecycleNotice(
            nsi_id="nsi-t1-s1",
            request_id="t1-s1",
            tenant_id="t1",
            state=LifecycleState.TERMINATED,
        )
    )
    assert csmf.services[service.id].status is ServiceStatus.TERMINATED
    assert (csmf.served[service.id], csmf.ue_attachments[service.id]) == (1, 1)
    csmf.discard_service(service.id)
    assert (csmf.services, csmf.served, csmf.ue_attachments) == ({}, {}, {})
