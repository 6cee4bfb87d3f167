"""phi(A) = (e^A - I) A^-1 for dense and sparse matrices via truncated Taylor series.

Dense matrices use scaling and modified squaring (:func:`phi_dense`); the
action ``phi(A) b`` uses matrix-vector products only (:func:`phi_action`,
:func:`phi_combo`).
"""
from .action import apply_T, phi_action, phi_combo
from .dense import modified_squaring, phi_dense
from .estimators import PhiAction, PhiTaylor
from .exceptions import (CatalogError, DomainError, FetchError, IntegrityError,
                         MatrixMarketError, OracleScaleError, ParameterError, PhiError,
                         ScalingOverflowError, ShapeError, ThetaSaturationWarning)
from .matrix import OpCounter, SparseMatrix, mat_mul, matvec, one_norm
from .mmio import read_matrix_market, write_matrix_market
from .normest import normest_power
from .params import PhiParams, select_action, select_costmin, select_sequential
from .reference import expm_ref, phi_ref, rel_err_1, rel_err_2
from .report import RunReport
from .suite import fetch_suite
from .taylor import eval_T, eval_T_tilde, ps_cost, ps_plan
from .theta import ThetaTable, build_theta_table, default_theta_table, derive_series

__version__ = "0.1.0"

__all__ = [
    "CatalogError", "DomainError", "FetchError", "IntegrityError", "MatrixMarketError",
    "OpCounter", "OracleScaleError", "ParameterError", "PhiAction", "PhiError",
    "PhiParams", "PhiTaylor", "RunReport", "ScalingOverflowError", "ShapeError",
    "SparseMatrix", "ThetaSaturationWarning", "ThetaTable", "apply_T",
    "build_theta_table", "default_theta_table", "derive_series", "eval_T",
    "eval_T_tilde", "expm_ref", "fetch_suite", "mat_mul", "matvec",
    "modified_squaring", "normest_power", "one_norm", "phi_action", "phi_combo",
    "phi_dense", "phi_ref", "ps_cost", "ps_plan", "read_matrix_market", "rel_err_1",
    "rel_err_2", "select_action", "select_costmin", "select_sequential",
    "write_matrix_market",
]
