"""
epiwit - exact-arithmetic engine for epimorphic-subgroup witnesses
in simple algebraic groups over algebraically closed fields of characteristic p
"""

__version__ = "0.1.0"

from .rootsys import (
    Root,
    RootSystem,
    RootSystemError,
    build_root_system,
)
from .witnesses import (
    UncoveredCase,
    WitnessCertificate,
    VerificationReport,
    build_witness,
    build_principal_witness,
    verify_witness,
    verify_witness_async,
    fault_injection_campaign,
)
from .schemas import (
    CertificateSchemaError,
    certificate_from_dict,
    certificate_to_dict,
)
from .fields import FieldTooLarge
from .config import (
    WitnessConfig,
    get_config,
    reset_config,
)
from .cache import MemoCache
from .persistence import CertificateStore
from .logging_config import (
    setup_logging,
    get_logger,
    StructuredLogger,
    create_correlation_id,
)
from . import utils

__all__ = [
    # Version
    "__version__",
    # Root systems
    "Root",
    "RootSystem",
    "RootSystemError",
    "build_root_system",
    # Witnesses
    "UncoveredCase",
    "WitnessCertificate",
    "VerificationReport",
    "build_witness",
    "build_principal_witness",
    "verify_witness",
    "verify_witness_async",
    "fault_injection_campaign",
    # Schemas
    "CertificateSchemaError",
    "certificate_from_dict",
    "certificate_to_dict",
    "FieldTooLarge",
    # Config
    "WitnessConfig",
    "get_config",
    "reset_config",
    # Cache
    "MemoCache",
    # Persistence
    "CertificateStore",
    # Logging
    "setup_logging",
    "get_logger",
    "StructuredLogger",
    "create_correlation_id",
    # Utils
    "utils",
]
