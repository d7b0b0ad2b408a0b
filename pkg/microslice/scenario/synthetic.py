"""
Seeded request and scenario generation.

Everything random in a run comes from here, drawn from one `random.Random` per call, so the
output is a pure function of the scenario and the seed.
"""
import random
from typing import Any, Dict, List, Optional

from microslice.management.models import (
    DeploymentScenario,
    GroupKind,
    NetworkMode,
    SharingAgreement,
)
from microslice.scenario.schema import ScenarioSpec

LATENCIES_MS = (5.0, 20.0, 50.0)


def _request(
    rng: random.Random,
    request_id: str,
    tenants: List[str],
    homes: List[str],
    mnos: List[str],
    max_throughput: int,
) -> Dict[str, Any]:
    home = rng.choice(homes)
    others = [loc for loc in homes if loc != home]
    raw: Dict[str, Any] = {
        "tenant_slice_id": request_id,
        "tenant_id": rng.choice(tenants),
        "latency_ms": rng.choice(LATENCIES_MS),
        "throughput_units": rng.randint(1, max_throughput),
        "duration_ticks": rng.randint(1, 10),
        "home_location": home,
    }
    kinds = [GroupKind.CLOSED, GroupKind.CLOSED, GroupKind.OPEN_PUBLIC]
    if mnos:
        kinds.append(GroupKind.OPEN_MNO_SUBSCRIBERS)
    kind = rng.choice(kinds)
    if kind is GroupKind.OPEN_MNO_SUBSCRIBERS:
        raw["customer_group"] = {"kind": kind.value, "mno": rng.choice(mnos)}
    else:
        raw["customer_group"] = kind.value

    sharing = rng.choice(list(SharingAgreement))
    if sharing is SharingAgreement.CROSS_LOCATION and not others:
        sharing = SharingAgreement.WITHIN_LOCATION
    raw["sharing_agreement"] = sharing.value
    if others and (sharing is SharingAgreement.CROSS_LOCATION or rng.random() < 0.25):
        raw["share_with_locations"] = [rng.choice(others)]
        if kind is GroupKind.CLOSED and rng.random() < 0.5:
            raw["dep_b_bridge"] = "multi_site"

    if mnos:
        roll = rng.random()
        if roll < 0.2:
            raw["network_mode"] = NetworkMode.MIXED.value
            raw[rng.choice(["needs_mno_wide_area", "mno_needs_uo_access"])] = True
        elif roll < 0.35 and kind is GroupKind.CLOSED:
            raw["needs_mno_wide_area"] = True
    return raw


def generate_requests(spec: ScenarioSpec, seed: int) -> List[Dict[str, Any]]:
    """
    Draw the scenario's synthetic requests.

    Requests are named ``syn-<nnn>`` and only reference tenants, locations and MNOs the
    scenario defines. They are not guaranteed to be served.
    """
    if spec.synthetic is None:
        return []
    rng = random.Random(seed)
    micro_operator = spec.domains.micro_operator.name
    homes = [loc.id for loc in spec.locations if loc.domain == micro_operator]
    tenants = [tenant.id for tenant in spec.tenants] or [
        agreement.tenant_id for agreement in spec.agreements
    ]
    if not homes or not tenants:
        return []
    return [
        _request(
            rng,
            f"syn-{index:03d}",
            tenants,
            homes,
            spec.mno_names(),
            spec.synthetic.max_throughput,
        )
        for index in range(1, spec.synthetic.count + 1)
    ]


def scenario_requests(spec: ScenarioSpec, seed: int) -> List[Dict[str, Any]]:
    """The requests of a run in execution order: file requests, then synthetic ones."""
    return [*spec.requests, *generate_requests(spec, seed)]


def random_scenario(
    seed: int,
    max_nfs: int = 20,
    max_requests: int = 6,
    name: Optional[str] = None,
) -> ScenarioSpec:
    """
    A random but valid scenario: one or two micro-operator sites, at most one MNO, at most
    ``max_nfs`` NFs in total and between one and ``max_requests`` requests.
    """
    rng = random.Random(seed)
    sites = ["L1", "L2"][: rng.randint(1, 2)]
    with_mno = rng.random() < 0.6
    pool_sites = sites + (["M1"] if with_mno else [])

    nf_count = rng.randint(len(pool_sites) * 3, max(len(pool_sites) * 3, max_nfs))
    nfs: Dict[str, List[Dict[str, Any]]] = {site: [] for site in pool_sites}
    for index in range(nf_count):
        # The first three NFs of every site cover AN, CN and DN once.
        site = pool_sites[index % len(pool_sites)]
        position = len(nfs[site])
        subnet = ["an", "cn", "dn"][position] if position < 3 else rng.choice(["an", "cn", "dn"])
        nfs[site].append(
            {
                "id": f"nf{position + 1}",
                "kind": rng.choice(["vnf", "pnf"]),
                "subnet_affinity": subnet,
                "capacity_units": rng.randint(1, 3),
            }
        )

    tenants = [f"t{index}" for index in range(1, rng.randint(1, 3) + 1)]
    data: Dict[str, Any] = {
        "name": name or f"random-{seed}",
        "seed": seed,
        "domains": {
            "micro_operator": {"name": "uo"},
            "mnos": (
                [
                    {
                        "name": "mno1",
                        "location": "M1",
                        "policy": {"mno1-subscribers": rng.choice(["allow", "deny"])},
                        "reachable": rng.random() < 0.9,
                        "grant_nssi": rng.random() < 0.9,
                    }
                ]
                if with_mno
                else []
            ),
        },
        "locations": [
            {"id": site, "domain": "mno1" if site == "M1" else "uo", "nfs": nfs[site]}
            for site in pool_sites
        ],
        "tenants": [{"id": tenant} for tenant in tenants],
        "agreements": [
            {
                "tenant_id": tenant,
                "valid_until_tick": 10_000,
                "allowed_scenarios": [scenario.value for scenario in DeploymentScenario],
                "sharing_permitted": rng.random() < 0.7,
            }
            for tenant in tenants
        ],
    }
    spec = ScenarioSpec.model_validate(data)
    count = rng.randint(1, max_requests)
    requests = [
        _request(
            rng,
            f"r{index}",
            tenants,
            sites,
            spec.mno_names(),
            3,
        )
        for index in range(1, count + 1)
    ]
    return spec.model_copy(update={"requests": requests})
