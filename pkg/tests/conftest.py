# pylint: disable-all
import pytest
from loguru import logger

from microslice.inventory import (
    DomainKind,
    DomainRef,
    LocationRef,
    NetworkFunctionResource,
    NfPool,
    SubnetKind,
)
from microslice.management import MnoDomain, MnoStub, Nssmf, PolicyVerdict

UO = DomainRef(kind=DomainKind.MICRO_OPERATOR, name="uo")
MNO1 = DomainRef(kind=DomainKind.MNO, name="mno1")
L1 = LocationRef(id="L1", domain=UO)
L2 = LocationRef(id="L2", domain=UO)
M1 = LocationRef(id="M1", domain=MNO1)


def make_pool(location, *specs):
    """``specs`` are ``(subnet, units)`` pairs; NFs are named nf1, nf2, ... in order."""
    return NfPool.build(
        location,
        [
            NetworkFunctionResource(
                id=f"nf{index + 1}", subnet_affinity=subnet, capacity_units=units
            )
            for index, (subnet, units) in enumerate(specs)
        ],
    )


def standard_pool(location, units=2):
    return make_pool(
        location,
        (SubnetKind.AN, units),
        (SubnetKind.AN, units),
        (SubnetKind.CN, units),
        (SubnetKind.CN, units),
        (SubnetKind.DN, units),
        (SubnetKind.DN, units),
    )


@pytest.fixture
def uo_nssmf():
    return Nssmf(UO, [standard_pool(L1), standard_pool(L2)])


@pytest.fixture
def mno_stub():
    return MnoStub(
        MnoDomain(
            domain=MNO1,
            pool=standard_pool(M1, units=4),
            policy_table={"mno1-subscribers": PolicyVerdict.ALLOW},
        )
    )


@pytest.fixture
def log_messages():
    """Collect loguru messages emitted during a test."""
    messages = []
    handler_id = logger.add(messages.append, level="DEBUG", format="{message}")
    yield messages
    logger.remove(handler_id)
