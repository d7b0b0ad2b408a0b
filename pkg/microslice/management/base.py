"""
This module defines the abstract base class `ManagementFunction`.

Every block of the management architecture (CSMF, NSMF, NSSMF, the network provider and
the simulated MNO) derives from it. Subclasses declare a `role`, a `description` and the
trace `actor` that stands for them; the checks in `__init_subclass__` fail at import time
when a concrete subclass forgets one.

Each instance owns an OpenTelemetry tracer named after its class and a loguru logger bound
to its role, so spans and log lines can be attributed to the function that produced them.

Example:
    class Nssmf(ManagementFunction):
        role = "nssmf"
        description = "Manages NSSIs of one domain"
        actor = Actor.UO_NSSMF
"""
import inspect
from abc import ABC
from enum import Enum
from typing import Any, Optional

from loguru import logger
from opentelemetry import trace


class Actor(str, Enum):
    """Trace actors, one per participant of the formation sequence."""

    TENANT = "tenant"
    COMM_SERVICE_PROVIDER = "comm_service_provider"
    CSMF = "csmf"
    NETWORK_PROVIDER = "network_provider"
    NSMF = "nsmf"
    UO_NSSMF = "uo_nssmf"
    MNO_NSSMF = "mno_nssmf"
    MNO_NSMF = "mno_nsmf"
    NF = "nf"
    UE = "ue"


class ManagementFunction(ABC):
    """
    Abstract base class for a management function.

    :param role: Short role name, used as logger context.
    :param description: A brief description of the function's responsibility.
    :param actor: The trace actor representing this function.
    """

    role: str
    description: str
    actor: Optional[Actor] = None

    def __init__(self, *args: Any, **kwargs: Any):
        self.args = args
        self.kwargs = kwargs
        # Spans are no-ops unless an SDK tracer provider is installed.
        self.tracer = trace.get_tracer(self.__class__.__name__)
        self.logger = logger.bind(role=self.role)

    def __init_subclass__(cls, **kwargs: Any):
        """
        Check that concrete subclasses define the required class variables.
        """
        super().__init_subclass__(**kwargs)
        if not inspect.isabstract(cls):
            if getattr(cls, "role", None) is None:
                raise TypeError(
                    f"Subclass '{cls.__name__}' must define a 'role' class variable."
                )
            if getattr(cls, "description", None) is None:
                raise TypeError(
                    f"Subclass '{cls.__name__}' must define a 'description' class variable."
                )
            if not isinstance(getattr(cls, "actor", None), Actor):
                raise TypeError(
                    f"Subclass '{cls.__name__}' must define an 'actor' class variable."
                )

    @classmethod
    def get_role(cls) -> str:
        """
        Get the role of the function.

        :raises NotImplementedError: If the `role` is not defined.
        """
        if getattr(cls, "role", None) is not None:
            return cls.role
        raise NotImplementedError(f"'{cls.__name__}' class does not define a 'role'.")

    @classmethod
    def get_description(cls) -> str:
        """
        Get the description of the function.

        :raises NotImplementedError: If the `description` is not defined.
        """
        if getattr(cls, "description", None) is not None:
            return cls.description
        raise NotImplementedError(
            f"'{cls.__name__}' class does not define a 'description'."
        )
