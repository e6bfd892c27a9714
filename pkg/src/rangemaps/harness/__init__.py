"""Instance generators, brute-force oracle and the external-map protocol."""

from .instances import (
    ADVERSARIAL_KINDS,
    EXPECTED_WITNESS,
    MAP_KINDS,
    InstanceSpec,
    generate,
    random_instance,
)
from .oracle import OracleGuardError, OracleResult, compare_extraction, oracle_extract

__all__ = [
    "ADVERSARIAL_KINDS",
    "EXPECTED_WITNESS",
    "MAP_KINDS",
    "InstanceSpec",
    "OracleGuardError",
    "OracleResult",
    "compare_extraction",
    "generate",
    "oracle_extract",
    "random_instance",
]
