from .lexer import SourceSpan, Token, tokenize
from .expr import Expr, ExprBody, eval_expr, format_expr
from .parser import parse_scm, parse_pmf_literal
from .serializer import serialize_scm, model_hash

__all__ = [
    "SourceSpan",
    "Token",
    "tokenize",
    "Expr",
    "ExprBody",
    "eval_expr",
    "format_expr",
    "parse_scm",
    "parse_pmf_literal",
    "serialize_scm",
    "model_hash",
]
