"""First-order quasi-set language: lexer, parser, printer, evaluator, axiom corpus."""
from .lexer import Token, tokenize
from .parser import check_sorts, parse
from .syntax import (BinOp, Func, Not, Num, Pow, Pred, Quant, Rel, Var, binder_count, depth,
                     format_formula, format_term, free_vars)
from .evaluator import evaluate
from .corpus import AXIOM_TEXT, CORPUS, CorpusVerdict, check_axiom, check_corpus

__all__ = [
    "Token", "tokenize", "parse", "check_sorts", "format_formula", "format_term", "free_vars",
    "depth", "binder_count", "evaluate", "check_axiom", "check_corpus", "CorpusVerdict",
    "CORPUS", "AXIOM_TEXT",
    "Var", "Num", "Func", "Pow", "Pred", "Rel", "Not", "BinOp", "Quant",
]
