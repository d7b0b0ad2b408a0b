"""
Administrative domains and locations.

A simulation has exactly one micro-operator domain and any number of MNO domains. Every
location, and therefore every NF pool, belongs to exactly one domain.
"""
from enum import Enum
from typing import Annotated

from pydantic import BaseModel, ConfigDict, StringConstraints

# Ids travel through the line-oriented trace format, so they may not contain spaces,
# commas or '='.
Identifier = Annotated[
    str, StringConstraints(min_length=1, pattern=r"^[A-Za-z0-9_.:\-]+$")
]


class DomainKind(str, Enum):
    """
    The two kinds of administrative domain.

    :param MICRO_OPERATOR: The local operator acting as network provider.
    :param MNO: An external mobile network operator.
    """

    MICRO_OPERATOR = "micro_operator"
    MNO = "mno"


class DomainRef(BaseModel):
    """
    Reference to an administrative domain.

    :param kind: Micro-operator or MNO.
    :param name: Domain name, unique per simulation.
    """

    model_config = ConfigDict(frozen=True)

    kind: DomainKind
    name: Identifier

    @property
    def is_external(self) -> bool:
        return self.kind is DomainKind.MNO


class LocationRef(BaseModel):
    """
    A site where tenants operate and where one NF pool lives.

    :param id: Location id, unique per simulation.
    :param domain: The owning domain.
    """

    model_config = ConfigDict(frozen=True)

    id: Identifier
    domain: DomainRef
