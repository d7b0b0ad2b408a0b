# pylint: disable-all
import pytest

from microslice.errors import (
    ContractViolation,
    IncompatibleProfile,
    InsufficientResources,
    NotShareable,
    UnknownHolder,
)
from microslice.inventory import SubnetKind, pool_snapshot
from microslice.management import (
    LifecycleState,
    Nssmf,
    ReleaseOutcome,
    SubnetRequirement,
    aggregate_multi_domain,
)
from tests.conftest import L1, L2, M1, MNO1, UO, standard_pool


def requirement(subnet=SubnetKind.AN, units=2, location=L1, shareable=False, profile="relaxed-2"):
    return SubnetRequirement(
        subnet=subnet,
        units_needed=units,
        location=location,
        shareable=shareable,
        profile_key=profile,
    )


def test_provision_mints_sequential_ids(uo_nssmf):
    first = uo_nssmf.provision_nssi(requirement(), uo_nssmf.pools["L1"], "nsi-a")
    second = uo_nssmf.provision_nssi(
        requirement(SubnetKind.CN), uo_nssmf.pools["L1"], "nsi-a"
    )
    assert (first.id, second.id) == ("nssi-uo-001", "nssi-uo-002")
    assert first.nf_ids == ["nf1"]
    assert second.nf_ids == ["nf3"]
    assert first.state is LifecycleState.ACTIVATED
    assert first.history == [
        LifecycleState.INSTANTIATED,
        LifecycleState.CONFIGURED,
        LifecycleState.ACTIVATED,
    ]
    assert first.holders == ["nsi-a"]
    assert first.ref_count == 1


def test_failed_provision_keeps_pool_and_counter(uo_nssmf):
    pool = uo_nssmf.pools["L1"]
    before = pool_snapshot(pool)
    with pytest.raises(InsufficientResources):
        uo_nssmf.provision_nssi(requirement(units=99), pool, "nsi-a")
    assert pool_snapshot(pool) == before
    assert uo_nssmf.nssis == {}
    assert uo_nssmf.provision_nssi(requirement(), pool, "nsi-a").id == "nssi-uo-001"


def test_provision_checks_location(uo_nssmf):
    with pytest.raises(ContractViolation):
        uo_nssmf.provision_nssi(requirement(location=L2), uo_nssmf.pools["L1"], "nsi-a")


def test_pools_must_belong_to_the_domain():
    with pytest.raises(ContractViolation):
        Nssmf(UO, [standard_pool(M1)])


def test_attach_shared_increments_refcount(uo_nssmf):
    req = requirement(shareable=True)
    nssi = uo_nssmf.provision_nssi(req, uo_nssmf.pools["L1"], "nsi-a")
    assert uo_nssmf.find_shareable(req) is nssi
    uo_nssmf.attach_shared(nssi, "nsi-b", req)
    assert nssi.holders == ["nsi-a", "nsi-b"]
    assert pool_snapshot(uo_nssmf.pools["L1"]).allocated == 1


def test_attach_to_exclusive_nssi_fails(uo_nssmf):
    nssi = uo_nssmf.provision_nssi(requirement(), uo_nssmf.pools["L1"], "nsi-a")
    with pytest.raises(NotShareable):
        uo_nssmf.attach_shared(nssi, "nsi-b", requirement(shareable=True))


@pytest.mark.parametrize(
    "other",
    [
        requirement(shareable=True, profile="relaxed-4"),
        requirement(SubnetKind.CN, shareable=True),
        requirement(location=L2, shareable=True),
    ],
)
def test_attach_needs_compatible_profile(uo_nssmf, other):
    nssi = uo_nssmf.provision_nssi(
        requirement(shareable=True), uo_nssmf.pools["L1"], "nsi-a"
    )
    with pytest.raises(IncompatibleProfile):
        uo_nssmf.attach_shared(nssi, "nsi-b", other)
    assert uo_nssmf.find_shareable(other) is None


def test_attach_twice_is_a_contract_violation(uo_nssmf):
    req = requirement(shareable=True)
    nssi = uo_nssmf.provision_nssi(req, uo_nssmf.pools["L1"], "nsi-a")
    with pytest.raises(ContractViolation):
        uo_nssmf.attach_shared(nssi, "nsi-a", req)


def test_release_terminates_on_last_holder(uo_nssmf):
    req = requirement(shareable=True)
    pool = uo_nssmf.pools["L1"]
    nssi = uo_nssmf.provision_nssi(req, pool, "nsi-a")
    uo_nssmf.attach_shared(nssi, "nsi-b", req)
    assert uo_nssmf.release_nssi(nssi, "nsi-a", pool) is ReleaseOutcome.DECREMENTED
    assert pool.allocations["nf1"] == nssi.id
    assert uo_nssmf.release_nssi(nssi, "nsi-b", pool) is ReleaseOutcome.TERMINATED
    assert nssi.state is LifecycleState.TERMINATED
    assert nssi.history[-2:] == [LifecycleState.DEACTIVATED, LifecycleState.TERMINATED]
    assert pool.allocations["nf1"] is None
    assert uo_nssmf.live_nssis() == []
    assert uo_nssmf.get(nssi.id) is nssi


def test_release_unknown_holder(uo_nssmf):
    pool = uo_nssmf.pools["L1"]
    nssi = uo_nssmf.provision_nssi(requirement(), pool, "nsi-a")
    with pytest.raises(UnknownHolder):
        uo_nssmf.release_nssi(nssi, "nsi-b", pool)


def test_discard_only_terminated(uo_nssmf):
    pool = uo_nssmf.pools["L1"]
    nssi = uo_nssmf.provision_nssi(requirement(), pool, "nsi-a")
    with pytest.raises(ContractViolation):
        uo_nssmf.discard(nssi.id)
    uo_nssmf.release_nssi(nssi, "nsi-a", pool)
    uo_nssmf.discard(nssi.id)
    assert nssi.id not in uo_nssmf.nssis


def test_manage_nssis_rejects_foreign(uo_nssmf, mno_stub):
    own = uo_nssmf.provision_nssi(requirement(), uo_nssmf.pools["L1"], "nsi-a")
    foreign = mno_stub.mno_provide_nssi(requirement(SubnetKind.DN, location=M1), "nsi-a")
    assert uo_nssmf.manage_nssis([own]) == [own.id]
    with pytest.raises(ContractViolation):
        uo_nssmf.manage_nssis([own, foreign])


def test_aggregate_multi_domain(uo_nssmf, mno_stub):
    an = uo_nssmf.provision_nssi(requirement(), uo_nssmf.pools["L1"], "nsi-a")
    dn = mno_stub.mno_provide_nssi(requirement(SubnetKind.DN, location=M1), "nsi-a")
    spread = aggregate_multi_domain([an, dn])
    assert spread.by_domain == {"uo": [an.id], "mno1": [dn.id]}
    assert spread.spans_external
    assert spread.spans_multiple_domains
    assert spread.locations == ["L1", "M1"]
    assert dn.owner_domain == MNO1

    local = aggregate_multi_domain([an])
    assert not local.spans_external
    assert not local.spans_locations
    with pytest.raises(ContractViolation):
        aggregate_multi_domain([])


def test_staged_provisioning(uo_nssmf):
    pool = uo_nssmf.pools["L1"]
    req = requirement(shareable=True)
    nssi = uo_nssmf.instantiate_nssi(req, "nsi-a")
    assert (nssi.id, nssi.state, nssi.nf_ids) == ("nssi-uo-001", LifecycleState.INSTANTIATED, [])
    assert pool_snapshot(pool).allocated == 0
    assert uo_nssmf.find_shareable(req) is None
    with pytest.raises(ContractViolation):
        uo_nssmf.activate_nssi(nssi)
    assert uo_nssmf.allocate_nssi(nssi, req, pool) == ["nf1"]
    with pytest.raises(ContractViolation):
        uo_nssmf.allocate_nssi(nssi, req, pool)
    uo_nssmf.activate_nssi(nssi)
    assert nssi.history == [
        LifecycleState.INSTANTIATED,
        LifecycleState.CONFIGURED,
        LifecycleState.ACTIVATED,
    ]
    assert uo_nssmf.find_shareable(req) is nssi


def test_instantiate_needs_a_pool_at_the_location(uo_nssmf):
    with pytest.raises(ContractViolation):
        uo_nssmf.instantiate_nssi(requirement(location=M1), "nsi-a")
    assert uo_nssmf.nssis == {}


def test_abandon_mints_the_newest_id_again(uo_nssmf):
    pool = uo_nssmf.pools["L1"]
    first = uo_nssmf.instantiate_nssi(requirement(), "nsi-a")
    second = uo_nssmf.instantiate_nssi(requirement(SubnetKind.CN), "nsi-a")
    uo_nssmf.allocate_nssi(second, requirement(SubnetKind.CN), pool)
    uo_nssmf.abandon_nssi(second, pool)
    uo_nssmf.abandon_nssi(first, pool)
    assert uo_nssmf.nssis == {}
    assert pool.allocations["nf3"] is None
    assert uo_nssmf.instantiate_nssi(requirement(), "nsi-b").id == "nssi-uo-001"


def test_only_instantiated_nssis_are_abandoned(uo_nssmf):
    pool = uo_nssmf.pools["L1"]
    nssi = uo_nssmf.provision_nssi(requirement(), pool, "nsi-a")
    with pytest.raises(ContractViolation):
        uo_nssmf.abandon_nssi(nssi, pool)
    assert pool.allocations["nf1"] == nssi.id
