"""
This module loads scenario files.

Loading runs in three stages, each with its own error:

1. JSON parsing (`ParseError`, also raised for unreadable files),
2. strict schema validation (`SchemaViolation`, one diagnostic per failing field),
3. reference checks (`DanglingReference`): every domain, location, tenant, MNO and request
   a scenario mentions must be defined in it.

Scenarios bundled with the package are looked up by name, e.g. ``closed_dep_a``.
"""
import json
from collections import Counter
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Set, Tuple, Union

from loguru import logger
from pydantic import ValidationError

from microslice.errors import DanglingReference, ParseError, SchemaViolation
from microslice.scenario.schema import ScenarioSpec

FIXTURES = "fixtures"

Diagnostics = List[Tuple[str, str]]


def _duplicates(values: List[str]) -> List[str]:
    return sorted(value for value, count in Counter(values).items() if count > 1)


def _check_request(
    index: int,
    raw: Dict[str, Any],
    locations: Set[str],
    tenants: Set[str],
    mnos: Set[str],
) -> Diagnostics:
    where = f"requests.{index}"
    problems: Diagnostics = []
    tenant = raw.get("tenant_id")
    if tenants and isinstance(tenant, str) and tenant not in tenants:
        problems.append((f"{where}.tenant_id", f"unknown tenant {tenant!r}"))
    home = raw.get("home_location")
    if isinstance(home, str) and home not in locations:
        problems.append((f"{where}.home_location", f"unknown location {home!r}"))
    shared = raw.get("share_with_locations")
    if isinstance(shared, list):
        for position, location_id in enumerate(shared):
            if isinstance(location_id, str) and location_id not in locations:
                problems.append(
                    (
                        f"{where}.share_with_locations.{position}",
                        f"unknown location {location_id!r}",
                    )
                )
    mno = raw.get("mno")
    if isinstance(mno, str) and mno not in mnos:
        problems.append((f"{where}.mno", f"unknown MNO {mno!r}"))
    group = raw.get("customer_group")
    if isinstance(group, dict) and isinstance(group.get("mno"), str) and group["mno"] not in mnos:
        problems.append((f"{where}.customer_group.mno", f"unknown MNO {group['mno']!r}"))
    return problems


def check_references(spec: ScenarioSpec) -> None:
    """
    Check every cross reference of a schema-valid scenario.

    :raises DanglingReference: Listing every unresolved or duplicated name.
    """
    problems: Diagnostics = []
    micro_operator = spec.domains.micro_operator.name
    domain_names = [micro_operator, *(mno.name for mno in spec.domains.mnos)]
    for name in _duplicates(domain_names):
        problems.append(("domains", f"domain {name!r} defined twice"))
    domains = set(domain_names)

    location_ids = [loc.id for loc in spec.locations]
    for location_id in _duplicates(location_ids):
        problems.append(("locations", f"location {location_id!r} defined twice"))
    locations = set(location_ids)
    for index, loc in enumerate(spec.locations):
        if loc.domain not in domains:
            problems.append((f"locations.{index}.domain", f"unknown domain {loc.domain!r}"))
    if not any(loc.domain == micro_operator for loc in spec.locations):
        problems.append(("locations", f"no location belongs to {micro_operator!r}"))

    for index, mno in enumerate(spec.domains.mnos):
        site = spec.location(mno.location)
        if site is None:
            problems.append(
                (f"domains.mnos.{index}.location", f"unknown location {mno.location!r}")
            )
        elif site.domain != mno.name:
            problems.append(
                (
                    f"domains.mnos.{index}.location",
                    f"{mno.location} belongs to {site.domain}, not {mno.name}",
                )
            )
    for loc in spec.locations:
        if loc.domain != micro_operator and not any(
            mno.location == loc.id for mno in spec.domains.mnos
        ):
            problems.append(("locations", f"{loc.id} is not the site of its MNO {loc.domain}"))

    tenant_ids = [tenant.id for tenant in spec.tenants]
    for tenant_id in _duplicates(tenant_ids):
        problems.append(("tenants", f"tenant {tenant_id!r} defined twice"))
    tenants = set(tenant_ids)
    agreement_tenants = [agreement.tenant_id for agreement in spec.agreements]
    for tenant_id in _duplicates(agreement_tenants):
        problems.append(("agreements", f"two agreements for {tenant_id!r}"))
    if tenants:
        for index, tenant_id in enumerate(agreement_tenants):
            if tenant_id not in tenants:
                problems.append(
                    (f"agreements.{index}.tenant_id", f"unknown tenant {tenant_id!r}")
                )

    mnos = set(spec.mno_names())
    for index, raw in enumerate(spec.requests):
        problems.extend(_check_request(index, raw, locations, tenants, mnos))

    request_ids = {
        raw["tenant_slice_id"]
        for raw in spec.requests
        if isinstance(raw.get("tenant_slice_id"), str)
    }
    if spec.synthetic is not None:
        request_ids.update(f"syn-{index:03d}" for index in range(1, spec.synthetic.count + 1))
    for index, expectation in enumerate(spec.expectations):
        if expectation.request_id not in request_ids:
            problems.append(
                (
                    f"expectations.{index}.request_id",
                    f"unknown request {expectation.request_id!r}",
                )
            )
    for index, action in enumerate(spec.lifecycle):
        if action.request_id not in request_ids:
            problems.append(
                (f"lifecycle.{index}.request_id", f"unknown request {action.request_id!r}")
            )

    if problems:
        raise DanglingReference(f"scenario {spec.name} has dangling references", problems)


def parse_scenario(text: str, source: str = "<string>") -> ScenarioSpec:
    """
    Parse, validate and reference-check scenario JSON.

    :param source: Shown in error messages.
    :raises ParseError: If ``text`` is not JSON.
    :raises SchemaViolation: If the document does not match the schema.
    :raises DanglingReference: If a reference is undefined.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{source} is not valid JSON", [(f"line {exc.lineno}", exc.msg)]
        ) from None
    try:
        spec = ScenarioSpec.model_validate(data)
    except ValidationError as exc:
        diagnostics = [
            (".".join(str(part) for part in error["loc"]) or "<document>", error["msg"])
            for error in exc.errors()
        ]
        raise SchemaViolation(
            f"{source} does not match the scenario schema", diagnostics
        ) from None
    check_references(spec)
    logger.debug("loaded scenario {} from {}", spec.name, source)
    return spec


def load_scenario(path: Union[str, Path]) -> ScenarioSpec:
    """
    Load a scenario file.

    :raises ParseError: If the file cannot be read or is not JSON.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return parse_scenario(text, str(path))


def list_bundled() -> List[str]:
    """Names of the scenarios shipped with the package, sorted."""
    folder = resources.files("microslice.scenario").joinpath(FIXTURES)
    return sorted(
        entry.name[: -len(".json")]
        for entry in folder.iterdir()
        if entry.name.endswith(".json")
    )


def load_bundled(name: str) -> ScenarioSpec:
    """:raises ParseError: If no bundled scenario has this name."""
    if name not in list_bundled():
        raise ParseError(f"no bundled scenario named {name!r}")
    entry = resources.files("microslice.scenario").joinpath(FIXTURES).joinpath(f"{name}.json")
    return parse_scenario(entry.read_text(encoding="utf-8"), f"bundled:{name}")


def resolve_scenario(reference: Union[str, Path]) -> ScenarioSpec:
    """Load ``reference`` as a file path if it exists, as a bundled name otherwise."""
    path = Path(reference)
    if path.exists() or path.suffix == ".json":
        return load_scenario(path)
    return load_bundled(str(reference))
