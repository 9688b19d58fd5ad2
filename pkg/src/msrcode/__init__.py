"""Explicit optimal-access MSR erasure code for d in {k+1, k+2, k+3}."""

from .codec import ErasureState, MSRCode, RepairTrace, decode, decode_naive, encode, repair
from .cube import Codeword, Node, check_parity, intersection_score, plane_group
from .errors import (
    ConstructionError, MSRError, ParameterError, ShardFormatError, SingularMatrixError,
    UnrecoverableError, UnsupportedParameters,
)
from .gf2m import FieldContext, cosets, field_new
from .params import CodeParams, ThetaTable, assign_thetas, derive_params, select_field

__version__ = "0.1.0"

__all__ = [
    "Codeword", "CodeParams", "ConstructionError", "ErasureState", "FieldContext",
    "MSRCode", "MSRError", "Node", "ParameterError", "RepairTrace", "ShardFormatError",
    "SingularMatrixError", "ThetaTable", "UnrecoverableError", "UnsupportedParameters",
    "assign_thetas", "check_parity", "cosets", "decode", "decode_naive", "derive_params",
    "encode", "field_new", "intersection_score", "plane_group", "repair", "select_field",
]
