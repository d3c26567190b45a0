"""Contract verification for system-of-systems models.

Parse GCSL contracts, compile them to bounded LTL, simulate stochastic
models and estimate satisfaction probabilities by statistical model checking.
"""
from .bltl import format_formula, parse_formula
from .errors import (GcslError, ModelError, MonitorError, OclError, ParseError, SimulationError,
                     SmcError, TraceTooShort, TranslationError)
from .model import SosModel, StateValuation, TimedTrace, dump_trace, load_model, load_trace, save_model
from .monitor import Verdict, check
from .ocl import eval_arith, eval_bool
from .simulate import SimConfig, simulate
from .smc import (Chernoff, Estimate, FixedN, ProbContract, chernoff_sample_size, monte_carlo,
                  verify_contract)
from .syntax import parse_contract, parse_contracts, parse_pattern
from .translate import translate_contract, translate_pattern, unfold

__version__ = "0.1.0"

__all__ = [
    "Chernoff", "Estimate", "FixedN", "GcslError", "ModelError", "MonitorError", "OclError",
    "ParseError", "ProbContract", "SimConfig", "SimulationError", "SmcError", "SosModel",
    "StateValuation", "TimedTrace", "TraceTooShort", "TranslationError", "Verdict", "check",
    "chernoff_sample_size", "dump_trace", "eval_arith", "eval_bool", "format_formula",
    "load_model", "load_trace", "monte_carlo", "parse_contract", "parse_contracts",
    "parse_formula", "parse_pattern", "save_model", "simulate", "translate_contract",
    "translate_pattern", "unfold", "verify_contract",
]
