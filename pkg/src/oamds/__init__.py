"""Explicit optimal-access MDS array codes with small sub-packetization."""

from .code import CodeParams, ParameterError, digit, make_params, matrix_entry, row_support, set_digit
from .codec import DecodeError, ErasurePattern, decode, encode, syndrome
from .field import FieldElement, FieldSpec, enumerate_element, f_add, f_inv, f_mul, f_pow, get_field
from .repair import (
    AccessReport,
    ReadTrace,
    RepairPlan,
    audit_access,
    make_annihilator,
    plan_full_repair,
    plan_group_repair,
    repair_full,
    repair_group,
)
from .verify import check_mds, check_subpacketization, strip_analysis

__version__ = "0.1.0"
