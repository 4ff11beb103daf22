"""Exact computation on lamplighter-like wreath products: forged finite-index
subgroups, their coset dynamics, and certified freeness/comparison/castle
properties of the resulting profinite-style actions."""

from .base import CongruenceSubgroup, is_prime, minimal_exponent, primes
from .certificates import (
    Castle,
    CastleAudit,
    ComparisonCertificate,
    CriterionCertificate,
    NonAFReport,
    Tower,
    TransitivityResult,
    audit_castle,
    boolean_atoms,
    build_criterion,
    certify_transitive,
    check_castle_audit,
    check_comparison_certificate,
    check_criterion_certificate,
    check_non_af_report,
    comparison_certificate,
    frac_str,
    non_af_report,
    parse_castle_file,
    translate_closure,
    verify_criterion,
    window_from_records,
)
from .config import RunConfig, apply_env, load_config, parse_config
from .dynamics import (
    CosetState,
    FiniteLevel,
    InverseSystemReport,
    OrbitResult,
    StabilizerWitness,
    StructureMap,
    UniformMeasure,
    Window,
    check_inverse_system,
    format_state,
    parse_state,
    stabilizer_witness,
    structure_map,
)
from .errors import (
    AllosteryError,
    BudgetExceededError,
    CertificateError,
    DatumInvariantError,
    ForgeError,
    MalformedCastleError,
    MeasureConditionError,
    RankMismatchError,
    TextParseError,
    WindowError,
)
from .forge import (
    PrimeAssignment,
    SubgroupDatum,
    assign_primes,
    default_epsilon,
    forge,
    prime_admissible,
)
from .wreath import (
    Lamp,
    WreathElement,
    WreathGroup,
    format_element,
    parse_element,
)

__version__ = "0.1.0"

__all__ = [
    "AllosteryError",
    "BudgetExceededError",
    "Castle",
    "CastleAudit",
    "CertificateError",
    "ComparisonCertificate",
    "CongruenceSubgroup",
    "CosetState",
    "CriterionCertificate",
    "DatumInvariantError",
    "FiniteLevel",
    "ForgeError",
    "InverseSystemReport",
    "Lamp",
    "MalformedCastleError",
    "MeasureConditionError",
    "NonAFReport",
    "OrbitResult",
    "PrimeAssignment",
    "RankMismatchError",
    "RunConfig",
    "StabilizerWitness",
    "StructureMap",
    "SubgroupDatum",
    "TextParseError",
    "Tower",
    "TransitivityResult",
    "UniformMeasure",
    "Window",
    "WindowError",
    "WreathElement",
    "WreathGroup",
    "apply_env",
    "assign_primes",
    "audit_castle",
    "boolean_atoms",
    "build_criterion",
    "certify_transitive",
    "check_castle_audit",
    "check_comparison_certificate",
    "check_criterion_certificate",
    "check_inverse_system",
    "check_non_af_report",
    "comparison_certificate",
    "default_epsilon",
    "forge",
    "format_element",
    "format_state",
    "frac_str",
    "is_prime",
    "load_config",
    "minimal_exponent",
    "non_af_report",
    "parse_castle_file",
    "parse_config",
    "parse_element",
    "parse_state",
    "prime_admissible",
    "primes",
    "stabilizer_witness",
    "structure_map",
    "translate_closure",
    "verify_criterion",
    "window_from_records",
]
