from . import ast
from .parser import parse_contract, parse_contracts, parse_expr, parse_pattern, parse_property
from .printer import dump_tree, print_contract, print_expr, print_pattern, print_property

__all__ = [
    "ast", "parse_contract", "parse_contracts", "parse_expr", "parse_pattern", "parse_property",
    "dump_tree", "print_contract", "print_expr", "print_pattern", "print_property",
]
