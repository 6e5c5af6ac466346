"""The ``frob`` command line tool and its ``.frob`` document format.

A document is line oriented; ``;`` also ends a statement and ``#`` starts
a comment.  Every index written in a document or printed in a report is
1-based::

    field 5

    algebra R {
      basis e11 e21 e22
      unit e11 + e22
      mul e11*e11 = e11 ; mul e21*e11 = e21
      mul e22*e21 = e21 ; mul e22*e22 = e22
      idempotents e11, e22
    }

    module S over R { dim 1 ; action e11 = [[1]] ; action e21 = [[0]] ; action e22 = [[0]] }
    bimodule M over R, k { dim 1 ; left e11 = [[0]] ; ... ; right one = [[1]] }
    subspace U of R killed { 1 }

    task ranks M
    expect lrk = [[0, 1]]
    expect message ~ "not closed"

Products not listed are zero.  Action matrices act on row vectors and
must be given for every basis element.  ``U.corner`` names the corner
algebra of a subspace and may be used wherever an algebra is expected.
An optional ``radical`` line lists a basis of the Jacobson radical.

``expect key = value`` compares a dotted path into the JSON result of the
preceding task with a JSON value; ``expect key ~ "text"`` asks for a
substring of a string result.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import frobanalysis as fa
from .algebra import Algebra, InvalidAlgebra
from .bimodule import (AdjunctionFailure, Bimodule, DualsNotIsomorphic, FrobeniusUnknown,
                       InvalidBimodule, NotLeftProjective, NotRightProjective, frobenius_check, tensor_pair)
from .exactla import PrimeField
from .module import (IsomorphismUnknown, NotInjective, Representation, injective_decompose, is_projective,
                     NotProjective, standard_catalog)
from .spectrum import localizing_from, weakly_open

COMMANDS = ("check", "ranks", "classify", "restrict", "partition", "glue", "duality", "report-all")
TASK_KINDS = COMMANDS[:-1]

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_UNKNOWN = 0, 1, 2, 3


class FrobSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int = 1):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line, self.col = line, col


class FrobSemanticError(ValueError):
    def __init__(self, block: str, reason: str):
        super().__init__(f"{block}: {reason}")
        self.block, self.reason = block, reason


# -- document model ------------------------------------------------------------------------------


@dataclass
class Expectation:
    key: str
    op: str                  # "=" or "~"
    value: object
    line: int


@dataclass
class Task:
    kind: str
    args: list
    line: int
    expects: list = field(default_factory=list)


@dataclass
class Document:
    fld: Optional[PrimeField] = None
    algebras: dict = field(default_factory=dict)           # name -> Algebra
    modules: dict = field(default_factory=dict)            # name -> (Representation, algebra ref)
    bimodules: dict = field(default_factory=dict)          # name -> (Bimodule, left ref, right ref)
    subspaces: dict = field(default_factory=dict)          # name -> (algebra ref, killed, WeaklyOpenSubspace)
    tasks: list = field(default_factory=list)
    order: list = field(default_factory=list)              # (kind, name) in declaration order

    @property
    def modulus(self) -> Optional[int]:
        return None if self.fld is None else self.fld.p

    def algebra(self, ref: str, where: str) -> Algebra:
        if ref in self.algebras:
            return self.algebras[ref]
        if ref.endswith(".corner") and ref[:-7] in self.subspaces:
            return self.subspaces[ref[:-7]][2].corner.algebra
        raise FrobSemanticError(where, f"unknown algebra {ref!r}")

    def lookup(self, name: str, where: str):
        for table in (self.bimodules, self.modules, self.subspaces):
            if name in table:
                return table[name][0] if table is not self.subspaces else table[name][2]
        if name in self.algebras or name.endswith(".corner"):
            return self.algebra(name, where)
        raise FrobSemanticError(where, f"unresolved reference {name!r}")

    def add_algebra(self, name: str, alg: Algebra) -> None:
        self._fresh(name)
        self.algebras[name] = alg
        self.order.append(("algebra", name))

    def add_module(self, name: str, rep: Representation, ref: str) -> None:
        self._fresh(name)
        self.modules[name] = (rep, ref)
        self.order.append(("module", name))

    def add_bimodule(self, name: str, m: Bimodule, left: str, right: str) -> None:
        self._fresh(name)
        self.bimodules[name] = (m, left, right)
        self.order.append(("bimodule", name))

    def add_subspace(self, name: str, ref: str, killed) -> None:
        self._fresh(name)
        alg = self.algebra(ref, f"subspace {name}")
        killed = frozenset(int(k) for k in killed)
        bad = [k for k in killed if not 0 <= k < alg.n_points]
        if bad:
            raise FrobSemanticError(f"subspace {name}", f"point {bad[0] + 1} out of range 1..{alg.n_points}")
        self.subspaces[name] = (ref, killed, weakly_open(localizing_from(alg, killed=killed)))
        self.order.append(("subspace", name))

    def _fresh(self, name: str) -> None:
        if any(name in t for t in (self.algebras, self.modules, self.bimodules, self.subspaces)):
            raise FrobSemanticError(name, "name defined twice")


# -- scanning -----------------------------------------------------------------------------------


@dataclass
class _Stmt:
    text: str
    line: int
    col: int


def _statements(text: str) -> list:
    """Split into statements at newlines and ';' outside brackets; braces stand alone."""
    out, buf, depth = [], [], 0
    start = (1, 1)
    line, col = 1, 1
    in_str = False

    def flush():
        s = "".join(buf).strip()
        if s:
            out.append(_Stmt(s, *start))
        buf.clear()

    i = 0
    while i < len(text):
        ch = text[i]
        if in_str:
            buf.append(ch)
            if ch == '"':
                in_str = False
        elif ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        elif ch == '"':
            in_str = True
            buf.append(ch)
        elif ch == "[" or ch == "{" and "".join(buf).lstrip().startswith("expect"):
            depth += 1
            buf.append(ch)
        elif ch == "]" or ch == "}" and depth > 0:
            depth -= 1
            if depth < 0:
                raise FrobSyntaxError(f"unbalanced {ch!r}", line, col)
            buf.append(ch)
        elif ch in "{}" and depth == 0:
            flush()
            out.append(_Stmt(ch, line, col))
        elif (ch == ";" or ch == "\n") and depth == 0:
            flush()
        else:
            if not buf or not "".join(buf).strip():
                start = (line, col)
            buf.append(ch)
        if ch == "\n":
            line, col = line + 1, 1
        else:
            col += 1
        i += 1
    if depth:
        raise FrobSyntaxError("unclosed bracket", line, col)
    if in_str:
        raise FrobSyntaxError("unterminated string", line, col)
    flush()
    return out


_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+)\s*\*\s*)?([^\s+*]+)\s*")


def _lincomb(text: str, alg: Algebra, st: _Stmt) -> np.ndarray:
    """Parse ``2*a + b - 3*c`` over the basis labels of ``alg``."""
    p = alg.field.p
    vec = np.zeros(alg.dim, dtype=np.int64)
    s = text.strip()
    if not s:
        raise FrobSyntaxError("empty linear combination", st.line, st.col)
    if s == "0" and "0" not in alg.labels:
        return vec
    labels = {lab: i for i, lab in enumerate(alg.labels)}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise FrobSyntaxError(f"cannot read {s[pos:]!r}", st.line, st.col + pos)
        sign, coef, lab = m.groups()
        if sign is None and not first:
            raise FrobSyntaxError(f"missing '+' before {lab!r}", st.line, st.col + pos)
        if lab not in labels:
            raise FrobSyntaxError(f"unknown basis element {lab!r} of {alg.name}", st.line, st.col + pos)
        c = int(coef) if coef is not None else 1
        vec[labels[lab]] += -c if sign == "-" else c
        pos = m.end()
        first = False
    return np.mod(vec, p)


def _matrix(text: str, st: _Stmt, dim: int) -> np.ndarray:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FrobSyntaxError(f"bad matrix: {exc.msg}", st.line, st.col) from None
    if dim == 0 and data in ([], [[]]):
        return np.zeros((0, 0), dtype=np.int64)
    arr = np.asarray(data, dtype=object)
    if arr.shape != (dim, dim) or not all(isinstance(v, int) and not isinstance(v, bool) for v in arr.ravel()):
        raise FrobSyntaxError(f"expected a {dim}x{dim} integer matrix", st.line, st.col)
    return arr.astype(np.int64)


def _value(text: str, st: _Stmt):
    t = text.strip()
    try:
        return json.loads(t)
    except json.JSONDecodeError:
        if re.fullmatch(r"[A-Za-z_][\w.|'-]*", t):
            return t
        raise FrobSyntaxError(f"bad value {t!r}", st.line, st.col) from None


# -- parsing ------------------------------------------------------------------------------------


def parse(text: str) -> Document:
    """Parse and validate a document; raises FrobSyntaxError or FrobSemanticError."""
    stmts = _statements(text)
    doc = Document()
    i = 0
    while i < len(stmts):
        st = stmts[i]
        if st.text in "{}":
            raise FrobSyntaxError(f"unexpected '{st.text}'", st.line, st.col)
        words = st.text.split()
        head = words[0]
        if i + 1 < len(stmts) and stmts[i + 1].text == "{":
            j = i + 2
            body = []
            while j < len(stmts) and stmts[j].text != "}":
                if stmts[j].text == "{":
                    raise FrobSyntaxError("nested block", stmts[j].line, stmts[j].col)
                body.append(stmts[j])
                j += 1
            if j == len(stmts):
                raise FrobSyntaxError("block is not closed", st.line, st.col)
            _block(doc, st, body)
            i = j + 1
            continue
        if head == "field":
            if doc.fld is not None:
                raise FrobSyntaxError("second field line", st.line, st.col)
            if len(words) != 2 or not words[1].isdigit():
                raise FrobSyntaxError("expected 'field <p>'", st.line, st.col)
            try:
                doc.fld = PrimeField(int(words[1]))
            except ValueError as exc:
                raise FrobSemanticError("field", str(exc)) from None
        elif head == "task":
            if len(words) < 2 or words[1] not in TASK_KINDS:
                raise FrobSyntaxError(f"unknown task kind {' '.join(words[1:2])!r}", st.line, st.col)
            doc.tasks.append(Task(words[1], words[2:], st.line))
        elif head == "expect":
            if not doc.tasks:
                raise FrobSyntaxError("expect before any task", st.line, st.col)
            m = re.fullmatch(r"expect\s+(\S+)\s*([=~])\s*(.+)", st.text)
            if not m:
                raise FrobSyntaxError("expected 'expect <key> = <value>'", st.line, st.col)
            doc.tasks[-1].expects.append(Expectation(m.group(1), m.group(2), _value(m.group(3), st), st.line))
        else:
            raise FrobSyntaxError(f"unknown statement {head!r}", st.line, st.col)
        i += 1
    for t in doc.tasks:
        for a in t.args:
            if "=" not in a:
                doc.lookup(a, f"task {t.kind} (line {t.line})")
    return doc


def _need_field(doc: Document, st: _Stmt) -> PrimeField:
    if doc.fld is None:
        raise FrobSyntaxError("'field <p>' must come first", st.line, st.col)
    return doc.fld


def _block(doc: Document, header: _Stmt, body: list) -> None:
    words = header.text.replace(",", " , ").split()
    kind = words[0]
    fld = _need_field(doc, header)
    if kind == "algebra" and len(words) == 2:
        _algebra_block(doc, fld, words[1], header, body)
    elif kind == "module" and len(words) == 4 and words[2] == "over":
        _module_block(doc, words[1], words[3], header, body)
    elif kind == "bimodule" and len(words) == 6 and words[2] == "over" and words[4] == ",":
        _bimodule_block(doc, words[1], words[3], words[5], header, body)
    elif kind == "subspace" and len(words) == 5 and words[2] == "of" and words[4] == "killed":
        pts = " ".join(s.text for s in body).replace(",", " ").split()
        if not all(x.isdigit() for x in pts):
            raise FrobSyntaxError("killed points must be positive integers", header.line, header.col)
        doc.add_subspace(words[1], words[3], [int(x) - 1 for x in pts])
    else:
        raise FrobSyntaxError(f"bad block header {header.text!r}", header.line, header.col)


def _algebra_block(doc: Document, fld: PrimeField, name: str, header: _Stmt, body: list) -> None:
    labels = None
    for st in body:
        if st.text.split()[0] == "basis":
            labels = tuple(st.text.split()[1:])
    if not labels:
        raise FrobSemanticError(f"algebra {name}", "missing basis line")
    if len(set(labels)) != len(labels):
        raise FrobSemanticError(f"algebra {name}", "repeated basis label")
    n = len(labels)
    # a stand-in with the right labels so that linear combinations parse
    shell = Algebra(fld, np.zeros((n, n, n), dtype=np.int64), np.zeros(n, dtype=np.int64), [], labels, name)
    struct = np.zeros((n, n, n), dtype=np.int64)
    unit, idem, rad = None, None, None
    index = {lab: k for k, lab in enumerate(labels)}
    for st in body:
        key, _, rest = st.text.partition(" ")
        if key == "basis":
            continue
        if key == "unit":
            unit = _lincomb(rest, shell, st)
        elif key == "mul":
            m = re.fullmatch(r"\s*(\S+)\s*\*\s*(\S+)\s*=\s*(.+)", rest)
            if not m:
                raise FrobSyntaxError("expected 'mul a*b = <combination>'", st.line, st.col)
            a, b = m.group(1), m.group(2)
            for lab in (a, b):
                if lab not in index:
                    raise FrobSyntaxError(f"unknown basis element {lab!r}", st.line, st.col)
            struct[index[a], index[b]] = _lincomb(m.group(3), shell, st)
        elif key == "idempotents":
            idem = [_lincomb(x, shell, st) for x in rest.split(",")] if rest.strip() else []
        elif key == "radical":
            rad = [_lincomb(x, shell, st) for x in rest.split(",")] if rest.strip() else []
        else:
            raise FrobSyntaxError(f"unknown algebra statement {key!r}", st.line, st.col)
    if unit is None:
        raise FrobSemanticError(f"algebra {name}", "missing unit line")
    if idem is None:
        raise FrobSemanticError(f"algebra {name}", "missing idempotents line")
    radical = None if rad is None else (np.array(rad, dtype=np.int64).reshape(-1, n) if rad else
                                        np.zeros((0, n), dtype=np.int64))
    try:
        alg = Algebra(fld, struct, unit, np.array(idem, dtype=np.int64).reshape(-1, n), labels, name,
                      radical_hint=radical).ensure_valid()
        alg.point_classes
    except (InvalidAlgebra, ArithmeticError) as exc:
        raise FrobSemanticError(f"algebra {name}", str(exc)) from None
    doc.add_algebra(name, alg)


def _actions(alg: Algebra, dim: int, body: list, key: str, where: str) -> np.ndarray:
    acts = {}
    for st in body:
        k, _, rest = st.text.partition(" ")
        if k != key:
            continue
        m = re.fullmatch(r"\s*(\S+)\s*=\s*(.+)", rest, re.S)
        if not m:
            raise FrobSyntaxError(f"expected '{key} <basis element> = <matrix>'", st.line, st.col)
        if m.group(1) not in alg.labels:
            raise FrobSyntaxError(f"unknown basis element {m.group(1)!r} of {alg.name}", st.line, st.col)
        acts[m.group(1)] = _matrix(m.group(2), st, dim)
    missing = [lab for lab in alg.labels if lab not in acts]
    if missing and dim:
        raise FrobSemanticError(where, f"no {key} matrix for {missing[0]!r}")
    if dim == 0:
        return np.zeros((alg.dim, 0, 0), dtype=np.int64)
    return np.stack([acts[lab] for lab in alg.labels])


def _dim(body: list, where: str) -> int:
    for st in body:
        w = st.text.split()
        if w[0] == "dim":
            if len(w) != 2 or not w[1].isdigit():
                raise FrobSyntaxError("expected 'dim <n>'", st.line, st.col)
            return int(w[1])
    raise FrobSemanticError(where, "missing dim line")


def _check_keys(body: list, allowed: tuple) -> None:
    for st in body:
        k = st.text.split()[0]
        if k not in allowed:
            raise FrobSyntaxError(f"unknown statement {k!r}", st.line, st.col)


def _module_block(doc: Document, name: str, ref: str, header: _Stmt, body: list) -> None:
    where = f"module {name}"
    _check_keys(body, ("dim", "action"))
    alg = doc.algebra(ref, where)
    dim = _dim(body, where)
    rep = Representation(alg, _actions(alg, dim, body, "action", where), name)
    rep_report = rep.validate()
    if not rep_report.ok:
        axiom, witness = rep_report.failures[0]
        raise FrobSemanticError(where, f"{axiom} fails (witness {witness})")
    doc.add_module(name, rep, ref)


def _bimodule_block(doc: Document, name: str, lref: str, rref: str, header: _Stmt, body: list) -> None:
    where = f"bimodule {name}"
    _check_keys(body, ("dim", "left", "right"))
    a, b = doc.algebra(lref, where), doc.algebra(rref, where)
    dim = _dim(body, where)
    try:
        m = Bimodule(a, b, _actions(a, dim, body, "left", where), _actions(b, dim, body, "right", where),
                     name).ensure_valid()
    except InvalidBimodule as exc:
        raise FrobSemanticError(where, str(exc)) from None
    doc.add_bimodule(name, m, lref, rref)


# -- serialization -------------------------------------------------------------------------------


def _fmt_lincomb(vec, labels) -> str:
    terms = [(int(c), lab) for c, lab in zip(vec, labels) if c]
    if not terms:
        return "0"
    return " + ".join(lab if c == 1 else f"{c}*{lab}" for c, lab in terms)


def _fmt_matrix(mat) -> str:
    return json.dumps(np.asarray(mat).tolist(), separators=(",", ","))


def dump(doc: Document) -> str:
    """Write a document back in the surface format."""
    lines = []
    if doc.fld is not None:
        lines.append(f"field {doc.fld.p}")
    for kind, name in doc.order:
        lines.append("")
        if kind == "algebra":
            alg = doc.algebras[name]
            lines.append(f"algebra {name} {{")
            lines.append("  basis " + " ".join(alg.labels))
            lines.append("  unit " + _fmt_lincomb(alg.unit, alg.labels))
            for i in range(alg.dim):
                for j in range(alg.dim):
                    if np.any(alg.structure[i, j]):
                        lines.append(f"  mul {alg.labels[i]}*{alg.labels[j]} = "
                                     f"{_fmt_lincomb(alg.structure[i, j], alg.labels)}")
            lines.append("  idempotents " + ", ".join(_fmt_lincomb(e, alg.labels) for e in alg.idempotents))
            if alg.radical_hint is not None:
                lines.append(("  radical " + ", ".join(_fmt_lincomb(r, alg.labels) for r in alg.radical_hint)).rstrip())
            lines.append("}")
        elif kind == "module":
            rep, ref = doc.modules[name]
            lines.append(f"module {name} over {ref} {{")
            lines.append(f"  dim {rep.dim}")
            for lab, mat in zip(rep.algebra.labels, rep.action):
                if rep.dim:
                    lines.append(f"  action {lab} = {_fmt_matrix(mat)}")
            lines.append("}")
        elif kind == "bimodule":
            m, lref, rref = doc.bimodules[name]
            lines.append(f"bimodule {name} over {lref}, {rref} {{")
            lines.append(f"  dim {m.dim}")
            if m.dim:
                for lab, mat in zip(m.left_algebra.labels, m.left):
                    lines.append(f"  left {lab} = {_fmt_matrix(mat)}")
                for lab, mat in zip(m.right_algebra.labels, m.right):
                    lines.append(f"  right {lab} = {_fmt_matrix(mat)}")
            lines.append("}")
        else:
            ref, killed, _ = doc.subspaces[name]
            pts = " ".join(str(k + 1) for k in sorted(killed))
            lines.append(f"subspace {name} of {ref} killed {{ {pts} }}" if pts else
                         f"subspace {name} of {ref} killed {{ }}")
    for t in doc.tasks:
        lines.append("")
        lines.append(" ".join(["task", t.kind, *t.args]))
        for e in t.expects:
            lines.append(f"expect {e.key} {e.op} {json.dumps(e.value)}")
    return "\n".join(lines).lstrip("\n") + "\n"


# -- running tasks ---------------------------------------------------------------------------------

_POINT_KEYS = {"simple", "factor", "killed", "surviving", "supp_F", "supp_G", "source_killed",
               "target_killed", "source_surviving", "target_surviving", "envelope of", "common", "preimage",
               "factors", "blocks", "part", "f undefined at", "ker F", "ker G", "ker GF", "ker FG",
               "preimage of intersection", "intersection of preimages"}


def one_based(obj, key: Optional[str] = None):
    """Shift point indices (recognized by key) to the 1-based surface convention."""
    if isinstance(obj, dict):
        return {str(k): one_based(v, str(k)) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [one_based(v, key) for v in obj]
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj) + 1 if key in _POINT_KEYS else int(obj)
    if isinstance(obj, np.ndarray):
        return one_based(obj.tolist(), key)
    if isinstance(obj, (frozenset, set)):
        return one_based(sorted(obj), key)
    return obj


class _Unknown(Exception):
    pass


def _pair_for(m: Bimodule, seed: int):
    """The Frobenius certificate when there is one, else the one-sided tensor pair."""
    try:
        return frobenius_check(m, seed), None
    except (DualsNotIsomorphic, NotLeftProjective) as exc:
        return tensor_pair(m, seed), f"{type(exc).__name__}: {exc}"


def _run_check(doc, args, opts):
    m = _bimodule_arg(doc, args, 0)
    seed = opts.seed
    out = {"dim": m.dim}
    cat_a, cat_b = standard_catalog(m.left_algebra), standard_catalog(m.right_algebra)
    try:
        cert = frobenius_check(m, seed)
        out.update(frobenius=True, reason=None)
        pair = cert.functors
        out["left_dual_dim"] = cert.left_dual.bimodule.dim
        out["right_dual_dim"] = cert.right_dual.bimodule.dim
    except (DualsNotIsomorphic, NotLeftProjective, NotRightProjective, AdjunctionFailure) as exc:
        out.update(frobenius=False, reason=type(exc).__name__, message=str(exc))
        try:
            pair = tensor_pair(m, seed)
        except (NotRightProjective, AdjunctionFailure):
            return out
        from .bimodule import dual
        for side in ("left", "right"):
            try:
                out[f"{side}_dual_dim"] = dual(m, side, seed).bimodule.dim
            except Exception:
                out[f"{side}_dual_dim"] = None
    for side, mod in (("left", m.left_module), ("right", m.right_module)):
        try:
            is_projective(mod, seed)
            out[f"{side}_projective"] = True
        except NotProjective:
            out[f"{side}_projective"] = False
    out["one_sided"] = not pair.frobenius
    out["tensor_dims"] = [pair.F(e).dim for e in cat_a.injectives]
    try:
        out["right_dual_injectives"] = injective_decompose(pair.q.right_module).multiplicities.tolist()
    except NotInjective:
        out["right_dual_injectives"] = None
    defects = pair.triangle_defects(cat_a.simples + cat_a.injectives + cat_a.projectives,
                                    cat_b.simples + cat_b.injectives + cat_b.projectives)
    out["zigzag"] = not defects
    if defects:
        out["zigzag_failures"] = defects
    return out


def _bimodule_arg(doc, args, k):
    if len(args) <= k:
        raise FrobSemanticError("task", f"missing argument {k + 1}")
    obj = doc.lookup(args[k], "task")
    if not isinstance(obj, Bimodule):
        raise FrobSemanticError("task", f"{args[k]!r} is not a bimodule")
    return obj


def _subspace_arg(doc, args, k):
    if len(args) <= k or args[k] not in doc.subspaces:
        raise FrobSemanticError("task", f"argument {k + 1} must name a subspace")
    return doc.subspaces[args[k]][2]


def _run_ranks(doc, args, opts):
    pair, note = _pair_for(_bimodule_arg(doc, args, 0), opts.seed)
    rk = fa.rank_report(pair)
    out = one_based(rk.as_dict())
    out["f"] = {f"x{x + 1}": f"y{y + 1}" for x, y in sorted(rk.f.items())}
    out["n_y"] = {f"y{y + 1}": n for y, n in sorted(rk.n_y.items())}
    out["fg_isotypic"] = all(rk.fg_isotypic.values())
    out["one_sided"] = note
    try:
        sm = fa.support_map(pair)
        out["support_map"] = {"f": out["f"], "surjective": sm.surjective, "injective": sm.injective,
                              "homeomorphism": sm.homeomorphism, "continuity": sm.continuity,
                              "left_localizing_iff_injective": sm.consistent}
    except fa.NotRightLocalizing as exc:
        out["support_map"] = {"error": "NotRightLocalizing", "message": str(exc)}
    return out


def _run_classify(doc, args, opts):
    pair, note = _pair_for(_bimodule_arg(doc, args, 0), opts.seed)
    cls = fa.classify(pair, opts.include_zero_subcategory)
    out = one_based(cls.as_dict())
    eq = fa.equivalence_test(pair)
    out["equivalence"] = {"holds": eq.holds, "reasons": eq.reasons}
    out["include_zero_subcategory"] = bool(opts.include_zero_subcategory)
    out["one_sided"] = note
    return out


def _run_restrict(doc, args, opts):
    pair, note = _pair_for(_bimodule_arg(doc, args, 0), opts.seed)
    u = _subspace_arg(doc, args, 1)
    res = fa.restrict(pair, u, opts.seed)
    out = one_based(res.as_dict())
    out["frobenius_witness"] = res.frobenius.witness
    out["condition_witness"] = one_based(res.condition.witness)
    if res.certificate is not None and res.bimodule.dim:
        cls = fa.classify(res.certificate)
        out["centralizing"] = cls.centralizing.holds
    out["one_sided"] = note
    return out


def _run_partition(doc, args, opts):
    if not args:
        raise FrobSemanticError("task partition", "missing argument")
    obj = doc.lookup(args[0], "task partition")
    if isinstance(obj, Bimodule):
        pair, _ = _pair_for(obj, opts.seed)
        return one_based(fa.constant_rank_partition(pair, opts.seed).as_dict())
    parts = [doc.subspaces[a][2].torsion if a in doc.subspaces else None for a in args[1:]]
    if any(p is None for p in parts) or not parts:
        raise FrobSemanticError("task partition", "expected subspaces after the first argument")
    if isinstance(obj, Algebra):
        out = one_based(fa.category_decomposition_check(obj, parts).as_dict())
        return out
    if isinstance(obj, Representation):
        if len(parts) != 2:
            raise FrobSemanticError("task partition", "a module splits along exactly two subspaces")
        tp = fa.injective_tripartition(obj, parts[0], parts[1], names=tuple(args[1:3]))
        return {"dims": [tp.first.dim, tp.second.dim, tp.rest.dim],
                "multiplicities": [list(m) for m in tp.multiplicities]}
    raise FrobSemanticError("task partition", f"{args[0]!r} cannot be partitioned")


def _run_glue(doc, args, opts):
    if len(args) != 6:
        raise FrobSemanticError("task glue", "expected V1 V2 U1 U2 M1 M2")
    v1, v2, u1, u2 = (_subspace_arg(doc, args, k) for k in range(4))
    m1, m2 = _bimodule_arg(doc, args, 4), _bimodule_arg(doc, args, 5)
    task = fa.GlueTask(v1.algebra, u1.algebra, v1, v2, u1, u2, m1, m2, name="glued")
    res = fa.glue(task, opts.seed)
    out = res.as_dict()
    out["frobenius"] = True
    return out


def _run_duality(doc, args, opts):
    m1, m2 = _bimodule_arg(doc, args, 0), _bimodule_arg(doc, args, 1)
    samples = 10
    for a in args[2:]:
        if a.startswith("samples="):
            samples = int(a.split("=", 1)[1])
    c1, c2 = frobenius_check(m1, opts.seed), frobenius_check(m2, opts.seed)
    rng = np.random.default_rng(opts.seed)
    tally = {"star_inverse": True, "dagger_inverse": True, "recovers_u": True,
             "composition_star": True, "composition_dagger": True}
    for _ in range(samples):
        u = fa.random_bimodule_hom(m1, m2, rng)
        v = fa.random_bimodule_hom(m2, m2, rng)
        for d in ("star", "dagger"):
            r = fa.dualize_morphism(u, d, c1, c2, opts.seed)
            tally[f"{d}_inverse"] &= r.laws["inverse recovers tau"]
            tally["recovers_u"] &= r.laws["regular component recovers u"]
            tally[f"composition_{d}"] &= fa.composition_law(u, v, [c1, c2, c2], d)
    return {"samples": samples, **tally}


_RUNNERS = {"check": _run_check, "ranks": _run_ranks, "classify": _run_classify, "restrict": _run_restrict,
            "partition": _run_partition, "glue": _run_glue, "duality": _run_duality}

_REPORTED_ERRORS = (fa.HypothesisFailure, fa.NotRightLocalizing, fa.NotFaithful, fa.NotDisjoint, fa.NotCover,
                    NotRightProjective, NotLeftProjective, DualsNotIsomorphic, AdjunctionFailure)


def run_task(doc: Document, task: Task, opts) -> dict:
    try:
        result = _RUNNERS[task.kind](doc, task.args, opts)
    except _REPORTED_ERRORS as exc:
        result = {"error": type(exc).__name__, "message": str(exc)}
        if getattr(exc, "witness", None) is not None:
            result["witness"] = one_based(exc.witness)
    except (IsomorphismUnknown, FrobeniusUnknown) as exc:
        raise _Unknown(f"task {task.kind} (line {task.line}): {exc}") from None
    return json.loads(json.dumps(_plain(result), sort_keys=True))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (frozenset, set)):
        return sorted(_plain(v) for v in obj)
    return obj


def _lookup_path(result, key: str):
    cur = result
    for part in key.split("."):
        if isinstance(cur, dict) and part in cur:
            cur = cur[part]
        elif isinstance(cur, list) and part.lstrip("-").isdigit() and -len(cur) <= int(part) < len(cur):
            cur = cur[int(part)]
        else:
            raise KeyError(key)
    return cur


def check_expectations(task: Task, result: dict) -> list:
    out = []
    for e in task.expects:
        try:
            actual = _lookup_path(result, e.key)
            found = True
        except KeyError:
            actual, found = None, False
        if e.op == "~":
            ok = found and isinstance(actual, str) and str(e.value) in actual
        else:
            ok = found and actual == e.value
        out.append({"key": e.key, "op": e.op, "expected": e.value, "actual": actual, "ok": ok, "line": e.line})
    return out


def default_tasks(doc: Document, command: str) -> list:
    """Tasks of the chosen kind, or the command applied to each bimodule when the document has none."""
    if command == "report-all":
        return list(doc.tasks)
    chosen = [t for t in doc.tasks if t.kind == command]
    if chosen or command not in ("check", "ranks", "classify", "partition"):
        return chosen
    return [Task(command, [name], 0) for name in doc.bimodules]


def run(doc: Document, command: str, opts) -> dict:
    if command not in COMMANDS:
        raise FrobSemanticError("command", f"unknown command {command!r}")
    sections = []
    for task in default_tasks(doc, command):
        t0 = time.perf_counter()
        result = run_task(doc, task, opts)
        sections.append({"task": task.kind, "args": list(task.args), "line": task.line, "result": result,
                         "expectations": check_expectations(task, result),
                         "_seconds": time.perf_counter() - t0})
    ok = all(e["ok"] for s in sections for e in s["expectations"])
    return {"command": command, "modulus": doc.modulus, "seed": opts.seed, "sections": sections, "ok": ok}


# -- output -------------------------------------------------------------------------------------------


def emit(report: dict, fmt: str = "text") -> str:
    if fmt == "json":
        clean = {k: v for k, v in report.items()}
        clean["sections"] = [{k: v for k, v in s.items() if not k.startswith("_")} for s in report["sections"]]
        return json.dumps(clean, sort_keys=True, indent=2) + "\n"
    lines = [f"frob {report['command']}  (p = {report['modulus']}, seed = {report['seed']})"]
    for s in report["sections"]:
        lines.append("")
        lines.append(f"== {s['task']} {' '.join(s['args'])}  [{s['_seconds']:.3f}s]")
        lines.extend(_text_section(s["task"], s["result"]))
        for e in s["expectations"]:
            mark = "ok  " if e["ok"] else "FAIL"
            lines.append(f"  {mark} expect {e['key']} {e['op']} {json.dumps(e['expected'])}"
                         + ("" if e["ok"] else f"  (got {json.dumps(e['actual'])})"))
    lines.append("")
    lines.append("all expectations met" if report["ok"] else "expectation mismatch")
    return "\n".join(lines) + "\n"


def _table(mat, rows: str, cols: str) -> list:
    mat = [list(r) for r in mat]
    ncols = len(mat[0]) if mat else 0
    head = "      " + " ".join(f"{cols}{j + 1:<3}" for j in range(ncols))
    return [head] + [f"  {rows}{i + 1:<3}" + " ".join(f"{v:<4}" for v in r) for i, r in enumerate(mat)]


def _text_section(kind: str, res: dict) -> list:
    if "error" in res:
        return [f"  {res['error']}: {res['message']}"]
    if kind == "ranks":
        out = ["  right ranks rrk(x, y):"] + ["  " + r for r in _table(res["rrk"], "x", "y")]
        out += ["  left ranks lrk(y, x):"] + ["  " + r for r in _table(res["lrk"], "y", "x")]
        out.append(f"  rho = {res['rho']}  lambda = {res['lambda']}")
        out.append(f"  Supp F = {res['supp_F']}  Supp G = {res['supp_G']}  f = {res['f']}  n_y = {res['n_y']}")
        out.append(f"  additivity {res['additivity']}  reciprocity {res['reciprocity']}  kernels {res['kernels']}")
        return out
    if kind == "classify":
        out = []
        for name in fa.ClassificationReport.PREDICATES:
            v = res[name]
            wit = "" if v["witness"] is None else f"  witness {json.dumps(v['witness'])}"
            out.append(f"  {name:<22} {str(v['holds']):<5}{wit}")
        out.append(f"  {'equivalence':<22} {res['equivalence']['holds']}")
        return out
    return [f"  {k}: {json.dumps(v)}" for k, v in sorted(res.items())]


# -- entry point ----------------------------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="frob", description="Verify Frobenius bimodule computations.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("path", help=".frob document, or '-' for standard input")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--out", help="write the report here instead of standard output")
    ap.add_argument("--include-zero-subcategory", action="store_true",
                    help="let the zero class take part in the localizing test")
    return ap


def main(argv=None) -> int:
    ap = _parser()
    try:
        opts = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if not 0 <= opts.seed < 2 ** 64:
        print("frob: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_INPUT
    opts.seed = opts.seed % (2 ** 32)
    try:
        text = sys.stdin.read() if opts.path == "-" else open(opts.path, encoding="utf-8").read()
    except OSError as exc:
        print(f"frob: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        doc = parse(text)
        report = run(doc, opts.command, opts)
    except (FrobSyntaxError, FrobSemanticError) as exc:
        print(f"frob: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except _Unknown as exc:
        print(f"frob: undecided: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    body = emit(report, opts.format)
    if opts.out:
        with open(opts.out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    return EXIT_OK if report["ok"] else EXIT_MISMATCH


__all__ = ["Document", "Task", "Expectation", "FrobSyntaxError", "FrobSemanticError", "parse", "dump", "run",
           "run_task", "emit", "main", "one_based", "COMMANDS"]
