"""Parser and compiler for the def/eval script language.

Commands have the shape

    def NAME "?msd_fib FORMULA":
    eval NAME "?msd_fib FORMULA":

and `#` starts a comment that runs to the end of the line.  Formulas are
first-order: comparisons between terms, calls `$name(t1,...,tk)` into the
automaton store, the connectives  ~  &  |  =>  <=>  (tightest to loosest),
and the quantifiers A/E, which extend to the end of the enclosing group.
Terms allow + and -, multiplication by a constant, and integer division by
a constant.  The normative grammar lives in docs/grammar.ebnf.

Compilation is the standard logic-to-automata correspondence: every formula
becomes a complete DFA whose tracks are its free variables in lexicographic
order.  Arithmetic atoms are flattened to fresh variables constrained by
the base relation automata (`add`, equality, order, fixed constants), and
each fresh variable is existentially projected immediately around the atom
that introduced it.  Quantifiers range over integers, so the no-"11" track
check is conjoined before every projection, and `def` results are conjoined
with it on every free track.  Universal quantification is ~E~.

Subtraction is relational: an atom containing x - y simply has no witness
when y > x.  Multiplication by a constant compiles by balanced repeated
doubling, and t / c introduces z with c*z <= t <= c*z + c - 1.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass
from pathlib import Path

from . import arith
from .dfa import Dfa, product, track_no11
from .errors import CompileError, ContractError, ParseError, ScriptError

# -- abstract syntax ---------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    coeff: int
    term: object


@dataclass(frozen=True)
class Div:
    term: object
    divisor: int


@dataclass(frozen=True)
class Cmp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class CallAtom:
    name: str
    args: tuple


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Quant:
    kind: str
    names: tuple
    body: object


@dataclass(frozen=True)
class Command:
    kind: str
    name: str
    formula: object
    line: int


# -- lexing ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<numeration>\?[A-Za-z_]+)
  | (?P<call>\$[A-Za-z_][A-Za-z0-9_]*)
  | (?P<num>\d+)
  | (?P<quant>[AE])
  | (?P<name>[a-z_][A-Za-z0-9_]*)
  | (?P<op><=>|=>|<=|>=|!=|[=<>~&|()+\-*/,])
    """,
    re.VERBOSE,
)

_RELOPS = {"=", "!=", "<", "<=", ">", ">="}


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex_formula(src: str, line: int, col: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col)
        text = m.group()
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


def _scan_commands(source: str):
    """Split a script into (kind, name, formula_text, line, col) records."""
    line = 1
    col = 1
    i = 0
    n = len(source)

    def error(msg):
        raise ParseError(msg, line, col)

    def advance(k=1):
        nonlocal i, line, col
        for _ in range(k):
            if i < n and source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    def skip_blank():
        while i < n:
            if source[i].isspace():
                advance()
            elif source[i] == "#":
                while i < n and source[i] != "\n":
                    advance()
            else:
                return

    word_re = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
    while True:
        skip_blank()
        if i >= n:
            return
        cmd_line = line
        m = word_re.match(source, i)
        if not m or m.group() not in ("def", "eval"):
            error("expected 'def' or 'eval'")
        kind = m.group()
        advance(len(kind))
        skip_blank()
        m = word_re.match(source, i)
        if not m:
            error(f"expected a name after '{kind}'")
        name = m.group()
        advance(len(name))
        skip_blank()
        if i >= n or source[i] != '"':
            error("expected a quoted formula")
        advance()
        f_line, f_col = line, col
        start = i
        while i < n and source[i] != '"':
            advance()
        if i >= n:
            raise ParseError("unbalanced quotes", f_line, f_col)
        body = source[start:i]
        advance()
        skip_blank()
        if i >= n or source[i] != ":":
            error("expected ':' after the closing quote")
        advance()
        yield kind, name, body, f_line, f_col, cmd_line


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind, text=None) -> _Tok:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise ParseError(f"expected {want!r}, found {t.text!r}", t.line, t.col)
        return self.next()

    def error(self, msg):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    # formulas

    def parse_formula(self):
        t = self.peek()
        if t.kind == "quant":
            self.next()
            names = [self.expect("name").text]
            while self.peek().text == ",":
                self.next()
                names.append(self.expect("name").text)
            body = self.parse_formula()
            return Quant(t.text, tuple(names), body)
        return self.parse_iff()

    def _rhs(self, sub):
        if self.peek().kind == "quant":
            return self.parse_formula()
        return sub()

    def parse_iff(self):
        left = self.parse_impl()
        while self.peek().text == "<=>":
            self.next()
            left = Bin("<=>", left, self._rhs(self.parse_impl))
        return left

    def parse_impl(self):
        left = self.parse_or()
        if self.peek().text == "=>":
            self.next()
            return Bin("=>", left, self._rhs(self.parse_impl))
        return left

    def parse_or(self):
        left = self.parse_and()
        while self.peek().text == "|":
            self.next()
            left = Bin("|", left, self._rhs(self.parse_and))
        return left

    def parse_and(self):
        left = self.parse_unary()
        while self.peek().text == "&":
            self.next()
            left = Bin("&", left, self._rhs(self.parse_unary))
        return left

    def parse_unary(self):
        t = self.peek()
        if t.text == "~":
            self.next()
            if self.peek().kind == "quant":
                return Not(self.parse_formula())
            return Not(self.parse_unary())
        return self.parse_atom()

    def parse_atom(self):
        t = self.peek()
        if t.kind == "call":
            self.next()
            self.expect("op", "(")
            args = [self.parse_term()]
            while self.peek().text == ",":
                self.next()
                args.append(self.parse_term())
            self.expect("op", ")")
            return CallAtom(t.text[1:], tuple(args))
        if t.text == "(":
            save = self.pos
            try:
                return self.parse_comparison()
            except ParseError:
                self.pos = save
            self.next()
            inner = self.parse_formula()
            self.expect("op", ")")
            return inner
        return self.parse_comparison()

    def parse_comparison(self):
        left = self.parse_term()
        t = self.peek()
        if t.text not in _RELOPS:
            raise ParseError(f"expected a comparison, found {t.text!r}", t.line, t.col)
        self.next()
        right = self.parse_term()
        return Cmp(t.text, left, right)

    # terms

    def parse_term(self):
        left = self.parse_factor()
        while self.peek().text in ("+", "-"):
            op = self.next().text
            right = self.parse_factor()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def parse_factor(self):
        t = self.peek()
        if t.kind == "num":
            self.next()
            value = int(t.text)
            if self.peek().text == "*":
                self.next()
                return Mul(value, self.parse_factor())
            return self._suffix(Const(value))
        return self._suffix(self.parse_primary())

    def _suffix(self, term):
        while self.peek().text in ("*", "/"):
            op = self.next().text
            t = self.expect("num")
            value = int(t.text)
            if op == "*":
                term = Mul(value, term)
            else:
                if value == 0:
                    raise ParseError("division by zero constant", t.line, t.col)
                term = Div(term, value)
        return term

    def parse_primary(self):
        t = self.peek()
        if t.kind == "name":
            self.next()
            return Var(t.text)
        if t.text == "(":
            self.next()
            inner = self.parse_term()
            self.expect("op", ")")
            return inner
        raise ParseError(f"expected a term, found {t.text!r}", t.line, t.col)


def parse_formula_src(src: str, line: int = 1, col: int = 1):
    """Parse one quoted-formula body, including its numeration token."""
    toks = _lex_formula(src, line, col)
    p = _Parser(toks)
    t = p.peek()
    if t.kind != "numeration":
        raise ParseError("formula must start with '?msd_fib'", t.line, t.col)
    if t.text != "?msd_fib":
        raise ParseError(f"unknown numeration {t.text!r}", t.line, t.col)
    p.next()
    f = p.parse_formula()
    end = p.peek()
    if end.kind != "eof":
        raise ParseError(f"trailing input {end.text!r}", end.line, end.col)
    _scope_check(f, frozenset())
    return f


def parse(source: str) -> list[Command]:
    """Parse a script into commands."""
    out = []
    for kind, name, body, line, col, cmd_line in _scan_commands(source):
        formula = parse_formula_src(body, line, col)
        out.append(Command(kind, name, formula, cmd_line))
    return out


# -- scope analysis ----------------------------------------------------------


def _scope_check(f, bound: frozenset) -> None:
    if isinstance(f, Quant):
        for v in f.names:
            if v in bound:
                raise CompileError(f"variable {v!r} is bound twice on one path")
        _scope_check(f.body, bound | set(f.names))
    elif isinstance(f, Bin):
        _scope_check(f.left, bound)
        _scope_check(f.right, bound)
    elif isinstance(f, Not):
        _scope_check(f.body, bound)


def free_vars(f) -> tuple[str, ...]:
    """Free variables in lexicographic order."""
    out: set[str] = set()

    def term(t, bound):
        if isinstance(t, Var):
            if t.name not in bound:
                out.add(t.name)
        elif isinstance(t, (Add, Sub)):
            term(t.left, bound)
            term(t.right, bound)
        elif isinstance(t, Mul):
            term(t.term, bound)
        elif isinstance(t, Div):
            term(t.term, bound)

    def walk(g, bound):
        if isinstance(g, Quant):
            walk(g.body, bound | set(g.names))
        elif isinstance(g, Bin):
            walk(g.left, bound)
            walk(g.right, bound)
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, Cmp):
            term(g.left, bound)
            term(g.right, bound)
        elif isinstance(g, CallAtom):
            for a in g.args:
                term(a, bound)

    walk(f, frozenset())
    return tuple(sorted(out))


# -- the automaton store -----------------------------------------------------

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class AutomatonStore:
    """Directory-backed registry of named automata with track variables.

    Each entry persists as NAME.aut (automaton text format) plus a sidecar
    NAME.vars holding the space-separated track variable names.  Defining an
    existing name overwrites it.
    """

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._cache: dict[str, tuple[Dfa, tuple[str, ...]]] = {}

    def put(self, name: str, automaton: Dfa, varnames) -> None:
        varnames = tuple(varnames)
        if not _NAME_RE.match(name):
            raise ContractError(f"bad automaton name {name!r}")
        if len(varnames) != automaton.arity:
            raise ContractError("one variable per track required")
        (self.root / f"{name}.aut").write_text(automaton.to_text())
        (self.root / f"{name}.vars").write_text(" ".join(varnames) + "\n")
        self._cache[name] = (automaton, varnames)

    def get(self, name: str) -> tuple[Dfa, tuple[str, ...]]:
        if name in self._cache:
            return self._cache[name]
        aut_path = self.root / f"{name}.aut"
        if not aut_path.exists():
            raise KeyError(name)
        automaton = Dfa.from_text(aut_path.read_text())
        vars_path = self.root / f"{name}.vars"
        varnames = tuple(vars_path.read_text().split()) if vars_path.exists() else ()
        self._cache[name] = (automaton, varnames)
        return self._cache[name]

    def __contains__(self, name: str) -> bool:
        return name in self._cache or (self.root / f"{name}.aut").exists()

    def names(self) -> list[str]:
        disk = {p.stem for p in self.root.glob("*.aut")}
        return sorted(disk | set(self._cache))


# -- compilation -------------------------------------------------------------

_AND = lambda x, y: x and y  # noqa: E731
_OPS = {
    "&": _AND,
    "|": lambda x, y: x or y,
    "=>": lambda x, y: (not x) or y,
    "<=>": lambda x, y: x == y,
}


class _Compiler:
    def __init__(self, store: AutomatonStore):
        self.store = store
        self._fresh_n = 0
        self._eq = arith.eq()
        self._neq = arith.neq()
        self._lt = arith.lt()
        self._le = arith.le()
        self._consts: dict[int, Dfa] = {}
        self._add: Dfa | None = None

    # resources

    def fresh(self) -> str:
        self._fresh_n += 1
        return f"_{self._fresh_n}"

    def const(self, value: int) -> Dfa:
        if value not in self._consts:
            self._consts[value] = arith.const(value)
        return self._consts[value]

    @property
    def add(self) -> Dfa:
        if self._add is None:
            try:
                self._add, _ = self.store.get("add")
            except KeyError:
                raise CompileError(
                    "arithmetic needs the base automaton 'add' in the store"
                ) from None
        return self._add

    # structure

    def formula(self, f):
        if isinstance(f, Cmp):
            return self._cmp(f)
        if isinstance(f, CallAtom):
            return self._call(f)
        if isinstance(f, Not):
            d, vs = self.formula(f.body)
            return d.complement(), vs
        if isinstance(f, Bin):
            return self._and_like(self.formula(f.left), self.formula(f.right), _OPS[f.op])
        if isinstance(f, Quant):
            if f.kind == "E":
                d, vs = self.formula(f.body)
                for name in f.names:
                    d, vs = self._project((d, vs), name)
                return d, vs
            d, vs = self.formula(f.body)
            d = d.complement()
            for name in f.names:
                d, vs = self._project((d, vs), name)
            return d.complement(), vs
        raise CompileError(f"cannot compile node {type(f).__name__}")

    # atoms

    def _cmp(self, f: Cmp):
        v1, c1, f1 = self.flatten(f.left)
        v2, c2, f2 = self.flatten(f.right)
        rel = {
            "=": self._eq,
            "!=": self._neq,
            "<": self._lt,
            "<=": self._le,
            ">": self._lt,
            ">=": self._le,
        }[f.op]
        args = [v2, v1] if f.op in (">", ">=") else [v1, v2]
        return self._atom(rel, args, c1 + c2, f1 + f2)

    def _call(self, f: CallAtom):
        try:
            aut, names = self.store.get(f.name)
        except KeyError:
            raise CompileError(f"unknown automaton ${f.name}") from None
        if len(f.args) != aut.arity:
            raise CompileError(
                f"${f.name} takes {aut.arity} arguments, got {len(f.args)}"
            )
        argvars = []
        cons = []
        fresh = []
        for a in f.args:
            v, c, fr = self.flatten(a)
            argvars.append(v)
            cons.extend(c)
            fresh.extend(fr)
        return self._atom(aut, argvars, cons, fresh)

    def _atom(self, rel: Dfa, argvars, constraints, freshes):
        cur = self._apply(rel, argvars)
        for pair in constraints:
            cur = self._and_like(cur, pair, _AND)
        for v in reversed(freshes):
            cur = self._project(cur, v)
        return cur

    # terms

    def flatten(self, t):
        """(variable, constraint automata, fresh variables) for a term."""
        if isinstance(t, Var):
            return t.name, [], []
        if isinstance(t, Const):
            v = self.fresh()
            return v, [(self.const(t.value), (v,))], [v]
        if isinstance(t, Add):
            va, ca, fa = self.flatten(t.left)
            vb, cb, fb = self.flatten(t.right)
            v = self.fresh()
            cons = ca + cb + [self._apply(self.add, [va, vb, v])]
            return v, cons, fa + fb + [v]
        if isinstance(t, Sub):
            va, ca, fa = self.flatten(t.left)
            vb, cb, fb = self.flatten(t.right)
            v = self.fresh()
            # v + right = left; no witness when right > left
            cons = ca + cb + [self._apply(self.add, [v, vb, va])]
            return v, cons, fa + fb + [v]
        if isinstance(t, Mul):
            if t.coeff == 0:
                v = self.fresh()
                return v, [(self.const(0), (v,))], [v]
            vt, ct, ft = self.flatten(t.term)
            v, cons, fr = self._mul_chain(t.coeff, vt)
            return v, ct + cons, ft + fr
        if isinstance(t, Div):
            if t.divisor == 1:
                return self.flatten(t.term)
            vt, ct, ft = self.flatten(t.term)
            v = self.fresh()
            w, cons, fr = self._mul_chain(t.divisor, v)
            u = self.fresh()
            k = self.fresh()
            cons = (
                ct
                + cons
                + [
                    (self.const(t.divisor - 1), (k,)),
                    self._apply(self.add, [w, k, u]),
                    self._apply(self._le, [w, vt]),
                    self._apply(self._le, [vt, u]),
                ]
            )
            return v, cons, ft + [v] + fr + [u, k]
        raise CompileError(f"cannot flatten term {type(t).__name__}")

    def _mul_chain(self, c: int, v: str):
        """Variable holding c*v via balanced repeated doubling."""
        if c == 1:
            return v, [], []
        half, cons, fresh = self._mul_chain(c // 2, v)
        dbl = self.fresh()
        cons = cons + [self._apply(self.add, [half, half, dbl])]
        fresh = fresh + [dbl]
        if c % 2:
            odd = self.fresh()
            cons = cons + [self._apply(self.add, [dbl, v, odd])]
            fresh = fresh + [odd]
            return odd, cons, fresh
        return dbl, cons, fresh

    # track plumbing

    def _apply(self, rel: Dfa, varnames):
        """Relation automaton rebound to named variables (duplicates glue)."""
        target = tuple(sorted(set(varnames)))
        index = {v: i for i, v in enumerate(target)}
        assignment = [index[v] for v in varnames]
        return rel.remap_tracks(assignment, len(target)), target

    def _and_like(self, left, right, op):
        d1, v1 = left
        d2, v2 = right
        if v1 == v2:
            return product(d1, d2, op), v1
        target = tuple(sorted(set(v1) | set(v2)))
        a1 = [target.index(v) for v in v1]
        a2 = [target.index(v) for v in v2]
        return product(d1, d2, op, align_a=a1, align_b=a2), target

    def _project(self, pair, name: str):
        d, vs = pair
        if name not in vs:
            return pair
        idx = vs.index(name)
        guarded = product(d, track_no11(d.arity, idx), _AND)
        return guarded.project(idx), vs[:idx] + vs[idx + 1 :]


def compile_formula(f, store: AutomatonStore):
    """Compile to (automaton, free variable tuple), tracks in name order."""
    comp = _Compiler(store)
    d, vs = comp.formula(f)
    expected = free_vars(f)
    if vs != expected:
        raise CompileError(f"free variables {vs} != expected {expected}")
    return d, vs


def eval_closed(f, store: AutomatonStore) -> bool:
    """Truth value of a closed formula."""
    d, vs = compile_formula(f, store)
    if vs:
        raise CompileError(f"eval formula has free variables {', '.join(vs)}")
    return bool(d.finals[d.initial])


def eval_formula_src(src: str, store: AutomatonStore) -> bool:
    return eval_closed(parse_formula_src(src), store)


def define(name: str, f, store: AutomatonStore) -> Dfa:
    """Compile a definition, conjoin validity on every free track, store it."""
    d, vs = compile_formula(f, store)
    for idx in range(len(vs)):
        d = product(d, track_no11(d.arity, idx), _AND)
    store.put(name, d, vs)
    return d


# -- script execution --------------------------------------------------------


@dataclass(frozen=True)
class CommandResult:
    kind: str
    name: str
    value: bool | None
    states: int
    seconds: float

    def line(self) -> str:
        if self.kind == "def":
            return f"{self.name}: defined ({self.states} states)"
        return f"{self.name}: {'TRUE' if self.value else 'FALSE'}"


@dataclass
class ScriptReport:
    results: list[CommandResult]

    @property
    def all_true(self) -> bool:
        return all(r.value for r in self.results if r.kind == "eval")

    def text(self) -> str:
        return "\n".join(r.line() for r in self.results) + ("\n" if self.results else "")


def run_script(source: str, store: AutomatonStore) -> ScriptReport:
    """Execute commands in order; defs persist to the store.

    Any error aborts the script with the failing command named.
    """
    results = []
    for cmd in parse(source):
        t0 = time.perf_counter()
        try:
            if cmd.kind == "def":
                d = define(cmd.name, cmd.formula, store)
                value = None
                states = d.n_states
            else:
                value = eval_closed(cmd.formula, store)
                states = 0
        except ScriptError as exc:
            raise ScriptError(
                f"command {cmd.name!r} failed: {exc}", command=cmd.name
            ) from exc
        results.append(
            CommandResult(cmd.kind, cmd.name, value, states, time.perf_counter() - t0)
        )
    return ScriptReport(results)
