"""Polynomial grammars and zeroness procedures.

A grammar has nonterminals of fixed dimensions and productions
``X -> p(alpha(Y1 ... Yk))`` where ``p`` is a polynomial map applied to
the concatenated child values and ``alpha`` is an optional automorphism
twist of the coefficient field.  Values of a nonterminal are the vectors
derivable bottom-up; the zeroness problem asks whether every value of
the initial nonterminal is zero (in quotient mode: zero modulo an
ambient ideal).

Zeroness is attacked from two sides, interleaved round-robin:

* derivation enumeration searches for a nonzero value, a *witness*;
* algebraic invariants: per-nonterminal ideals whose varieties contain
  every derivable value, verified production by production
  (:func:`check_certificate`) and found either by exact forward
  propagation with image closures and intersections, or by a
  degree-capped widening that extracts low-degree polynomials vanishing
  on sampled values and verifies them the same way
  (:func:`forward_closure`).

The exact propagation alone cannot terminate when reachable value sets
form growing finite families (most interesting grammars), which is why
the sampling widening exists; conversely sampling alone would never
learn equalities that need radical reasoning on twisted coefficients.
"""

from __future__ import annotations

import itertools
import threading
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .encoding import Automorphism, PolySubst
from .errors import (
    CertificateError, DimensionError, EmptyLanguageError, StructureError,
)
from .groebner import (
    Ideal, ideal_intersect, image_closure, vanishing_ideal_of_points,
)
from .linalg import kernel_basis
from .poly import (
    Coeff, EMPTY_VARTABLE, FractionField, Mode, Monomial, Poly, PolyMap,
    PolyRing, RationalField, VarKind, VarTable, map_ring_over, structure_poly,
)

Value = tuple[Poly, ...]


# ---------------------------------------------------------------------------
# grammars


@dataclass(frozen=True)
class Production:
    """One rule: lhs derives pmap applied to the twisted child values.

    ``slot_sources`` optionally rewires map inputs: each entry picks a
    coordinate of the concatenated child vector and may push a
    polynomial substitution into it (used for register updates that
    substitute different words in different registers, where no single
    field automorphism captures the rule).
    """

    lhs: str
    rhs: tuple[str, ...]
    pmap: PolyMap
    twist: Automorphism | None = None
    slot_sources: tuple[tuple[int, PolySubst | None], ...] | None = None
    label: str | None = None

    def arity(self) -> int:
        return len(self.rhs)


class Grammar:
    """Nonterminals with dimensions, productions, and a value ring.

    ``ring`` is where coordinate values live: its variables are the
    ambient value variables (may be none) and its field carries the
    coefficients.  ``ambient`` optionally makes values count as zero
    whenever they lie in that ideal (quotient mode).
    """

    def __init__(self, nonterminals: dict[str, int], initial: str,
                 productions: Iterable[Production], ring: PolyRing,
                 ambient: Ideal | None = None, name: str | None = None):
        self.nonterminals = dict(nonterminals)
        self.initial = initial
        self.productions = tuple(productions)
        self.ring = ring
        self.ambient = ambient
        self.name = name
        self._validate()

    def _validate(self) -> None:
        if self.initial not in self.nonterminals:
            raise StructureError(f"initial nonterminal {self.initial!r} undeclared")
        for nt, dim in self.nonterminals.items():
            if dim < 1:
                raise DimensionError(f"nonterminal {nt} with dimension {dim}")
        for prod in self.productions:
            if prod.lhs not in self.nonterminals:
                raise StructureError(f"production for undeclared {prod.lhs!r}")
            for r in prod.rhs:
                if r not in self.nonterminals:
                    raise StructureError(f"production uses undeclared {r!r}")
            flat_dim = sum(self.nonterminals[r] for r in prod.rhs)
            n_in = prod.pmap.n_inputs
            if prod.slot_sources is not None:
                if len(prod.slot_sources) != n_in:
                    raise DimensionError("slot wiring does not match map arity")
                for src, _ in prod.slot_sources:
                    if not 0 <= src < flat_dim:
                        raise DimensionError("slot source out of range")
            elif n_in != flat_dim:
                raise DimensionError(
                    f"map arity {n_in} does not match child dimensions {flat_dim}")
            if prod.pmap.n_outputs != self.nonterminals[prod.lhs]:
                raise DimensionError(
                    f"map output count does not match dim of {prod.lhs}")
            if prod.pmap.value_ring() != self.ring:
                raise StructureError("production map over a different value ring")
            if prod.twist is not None and not isinstance(
                    self.ring.field, FractionField):
                raise StructureError("twists need a fraction coefficient field")
        if self.ambient is not None and self.ambient.ring != self.ring:
            raise StructureError("ambient ideal over a different ring")

    def dim(self, nt: str) -> int:
        return self.nonterminals[nt]

    def nt_index(self, nt: str) -> int:
        return list(self.nonterminals).index(nt)

    def value_is_zero(self, value: Value) -> bool:
        if self.ambient is None:
            return all(c.is_zero() for c in value)
        return all(self.ambient.member(c) for c in value)

    def produce(self, prod: Production, child_values: Sequence[Value]) -> Value:
        flat: list[Poly] = [c for tup in child_values for c in tup]
        if prod.twist is not None:
            flat = [c.map_coefficients(prod.twist.apply) for c in flat]
        if prod.slot_sources is not None:
            slots = []
            for src, subst in prod.slot_sources:
                v = flat[src]
                if subst is not None:
                    if isinstance(self.ring.field, FractionField):
                        v = v.map_coefficients(subst.apply_ratfunc)
                    else:
                        v = subst.apply_poly(v)
                slots.append(v)
        else:
            slots = flat
        return prod.pmap.apply(tuple(slots))

    def coord_names(self, nt: str) -> tuple[str, ...]:
        k = self.nt_index(nt)
        return tuple(f"_v{k}_{i}" for i in range(self.dim(nt)))

    def cert_ring(self, nt: str) -> PolyRing:
        pairs = [(n, VarKind.ORDINARY) for n in self.coord_names(nt)]
        return PolyRing(
            self.ring.vartable.extended(pairs), self.ring.field, self.ring.mode)


def productive_nonterminals(g: Grammar) -> frozenset[str]:
    """Nonterminals deriving at least one value (least fixpoint)."""
    productive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for prod in g.productions:
            if prod.lhs in productive:
                continue
            if all(r in productive for r in prod.rhs):
                productive.add(prod.lhs)
                changed = True
    return frozenset(productive)


# ---------------------------------------------------------------------------
# derivations and enumeration


@dataclass(frozen=True)
class Derivation:
    """Tree of production applications with the derived value cached."""

    prod_index: int
    children: tuple["Derivation", ...]
    value: Value

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def replay(self, g: Grammar) -> Value:
        prod = g.productions[self.prod_index]
        vals = [c.replay(g) for c in self.children]
        value = g.produce(prod, vals)
        if value != self.value:
            raise StructureError("derivation replay disagrees with cached value")
        return value

    def labels_inside_out(self, g: Grammar) -> list[str]:
        """Production labels from the innermost derivation outwards."""
        out: list[str] = []
        node: Derivation | None = self
        # chains only (each production here has at most one child)
        while node is not None:
            label = g.productions[node.prod_index].label
            if label is not None:
                out.append(label)
            node = node.children[0] if node.children else None
        return list(reversed(out))

    def to_obj(self, g: Grammar) -> dict:
        prod = g.productions[self.prod_index]
        return {"production": self.prod_index, "lhs": prod.lhs,
                "label": prod.label,
                "children": [c.to_obj(g) for c in self.children]}


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All ways to split total into `parts` positive summands, lex order."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class ValueTable:
    """Values of every nonterminal, grouped by derivation tree size."""

    def __init__(self, g: Grammar):
        self.g = g
        self.by_size: dict[str, list[list[tuple[Value, Derivation]]]] = {
            nt: [[]] for nt in g.nonterminals}
        self.max_size = 0

    def grow_to(self, size: int) -> None:
        while self.max_size < size:
            s = self.max_size + 1
            for nt in self.by_size:
                self.by_size[nt].append([])
            for idx, prod in enumerate(self.g.productions):
                k = prod.arity()
                if k == 0:
                    if s == 1:
                        val = self.g.produce(prod, [])
                        self.by_size[prod.lhs][1].append(
                            (val, Derivation(idx, (), val)))
                    continue
                for comp in _compositions(s - 1, k):
                    pools = [self.by_size[r][c] for r, c in zip(prod.rhs, comp)]
                    for combo in itertools.product(*pools):
                        vals = [v for v, _ in combo]
                        ders = tuple(d for _, d in combo)
                        val = self.g.produce(prod, vals)
                        self.by_size[prod.lhs][s].append(
                            (val, Derivation(idx, ders, val)))
            self.max_size = s

    def of_size(self, nt: str, size: int) -> list[tuple[Value, Derivation]]:
        self.grow_to(size)
        return self.by_size[nt][size]


def enumerate_values(g: Grammar, max_size: int,
                     nonterminal: str | None = None) -> Iterator[tuple[Value, Derivation]]:
    """Stream (value, derivation) for the nonterminal, by increasing size."""
    nt = nonterminal if nonterminal is not None else g.initial
    table = ValueTable(g)
    for s in range(1, max_size + 1):
        yield from table.of_size(nt, s)


def collect_samples(g: Grammar, max_size: int, cap: int) -> dict[str, list[Value]]:
    """Deduplicated value samples per productive nonterminal."""
    table = ValueTable(g)
    table.grow_to(max_size)
    out: dict[str, list[Value]] = {}
    for nt in g.nonterminals:
        seen: dict[Value, None] = {}
        for s in range(1, max_size + 1):
            for v, _ in table.by_size[nt][s]:
                if v not in seen:
                    seen[v] = None
                if len(seen) >= cap:
                    break
            if len(seen) >= cap:
                break
        if seen:
            out[nt] = list(seen)
    return out


@dataclass(frozen=True)
class Witness:
    """A derivation whose value is nonzero (modulo the ambient ideal)."""

    derivation: Derivation
    value: Value


def nonzero_search(g: Grammar, max_size: int) -> Witness | None:
    for value, deriv in enumerate_values(g, max_size):
        if not g.value_is_zero(value):
            deriv.replay(g)
            return Witness(deriv, value)
    return None


# ---------------------------------------------------------------------------
# certificates


@dataclass
class InvariantCertificate:
    """Per-nonterminal ideals over (ambient variables + coordinates)."""

    ideals: dict[str, Ideal]
    grammar_name: str | None = None

    def ideal_for(self, nt: str) -> Ideal:
        if nt not in self.ideals:
            raise CertificateError(f"certificate has no ideal for {nt!r}")
        return self.ideals[nt]


@dataclass(frozen=True)
class CertVerdict:
    kind: str  # "zero-proved" | "closure-violation" | "conclusion-violation"
    detail: str = ""

    def proved(self) -> bool:
        return self.kind == "zero-proved"


def _child_block_ring(g: Grammar, prod: Production) -> tuple[PolyRing, list[str]]:
    pairs: list[tuple[str, VarKind]] = []
    flat_names: list[str] = []
    for ci, r in enumerate(prod.rhs):
        for j in range(g.dim(r)):
            n = f"_w{ci}_{j}"
            pairs.append((n, VarKind.ORDINARY))
            flat_names.append(n)
    ring = PolyRing(g.ring.vartable.extended(pairs), g.ring.field, g.ring.mode)
    return ring, flat_names


def _cert_membership(g: Grammar, J: Ideal, h: Poly) -> bool:
    # With an ambient ideal the values are residue classes; only plain
    # membership is sound there (the ambient ideal need not be radical).
    if g.ambient is not None:
        return J.member(h)
    return J.radical_member(h)


def check_production_closure(g: Grammar, cert: InvariantCertificate,
                             prod: Production) -> str | None:
    """None if the production preserves the certificate, else a reason."""
    if prod.slot_sources is not None:
        raise CertificateError(
            "certificates are not defined for slot-substitution productions")
    lhs_ideal = cert.ideal_for(prod.lhs)
    lhs_coords = g.coord_names(prod.lhs)
    if prod.arity() == 0:
        value = g.produce(prod, [])
        cring = g.cert_ring(prod.lhs)
        binding = {c: v.convert(cring) for c, v in zip(lhs_coords, value)}
        for f in lhs_ideal.gens:
            res = f.convert(cring).substitute(binding).convert(g.ring)
            if not (res.is_zero() or
                    (g.ambient is not None and g.ambient.member(res))):
                return (f"base production for {prod.lhs} does not satisfy "
                        f"generator {f}")
        return None
    ring, flat_names = _child_block_ring(g, prod)
    gens: list[Poly] = []
    offset = 0
    for ci, r in enumerate(prod.rhs):
        rename = {old: f"_w{ci}_{j}"
                  for j, old in enumerate(g.coord_names(r))}
        for f in cert.ideal_for(r).gens:
            gens.append(f.convert(ring, rename))
        offset += g.dim(r)
    if g.ambient is not None:
        gens.extend(gp.convert(ring) for gp in g.ambient.gens)
    J = Ideal(ring, gens)
    slot_rename = dict(zip(prod.pmap.slots, flat_names))
    outputs = [p.convert(ring, slot_rename) for p in prod.pmap.outputs]
    binding = dict(zip(lhs_coords, outputs))
    for f in lhs_ideal.gens:
        h = f.substitute(binding, target_ring=ring)
        if prod.twist is not None:
            h = h.map_coefficients(prod.twist.apply_inverse)
        if not _cert_membership(g, J, h):
            return (f"production {prod.lhs} -> {'.'.join(prod.rhs)} does not "
                    f"preserve generator {f}")
    return None


def check_certificate(g: Grammar, cert: InvariantCertificate,
                      require_conclusion: bool = True) -> CertVerdict:
    """Verify base cases, closure under productions, and the conclusion
    that the initial nonterminal's coordinates lie in its ideal."""
    productive = productive_nonterminals(g)
    for nt in productive:
        cert.ideal_for(nt)
    for prod in g.productions:
        if prod.lhs not in productive:
            continue
        if any(r not in productive for r in prod.rhs):
            continue
        reason = check_production_closure(g, cert, prod)
        if reason is not None:
            return CertVerdict("closure-violation", reason)
    if require_conclusion:
        if g.initial not in productive:
            raise EmptyLanguageError(
                f"initial nonterminal {g.initial!r} derives no value")
        cring = g.cert_ring(g.initial)
        I = cert.ideal_for(g.initial)
        amb = (Ideal(cring, [p.convert(cring) for p in g.ambient.gens])
               if g.ambient is not None else None)
        J = I.join(amb) if amb is not None else I
        for c in g.coord_names(g.initial):
            zc = cring.var(c)
            ok = J.member(zc) if g.ambient is not None else J.radical_member(zc)
            if not ok:
                return CertVerdict(
                    "conclusion-violation",
                    f"coordinate {c} of {g.initial} is not forced to zero")
    return CertVerdict("zero-proved")


# ---------------------------------------------------------------------------
# invariant discovery


def _monomials_upto(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent tuples with total degree <= degree, low degree first."""
    def rec(i: int, remaining: int) -> Iterator[tuple[int, ...]]:
        if i == nvars:
            yield ()
            return
        for e in range(remaining + 1):
            for rest in rec(i + 1, remaining - e):
                yield (e,) + rest
    return sorted(rec(0, degree), key=lambda t: (sum(t), t))


def low_degree_vanishing(value_ring: PolyRing, ambient: Ideal | None,
                         cring: PolyRing, coord_names: Sequence[str],
                         samples: Sequence[Value], degree: int,
                         kernel_cap: int = 12) -> list[Poly] | None:
    """Polynomials over cring of bounded degree vanishing on the samples.

    Coordinate variables are bound to the sample components; the
    remaining cring variables stay symbolic, so a candidate vanishes
    when its expansion is zero as a polynomial over the value ring
    (reduced by the ambient ideal first when one is given).  Returns
    None when the solution space is too large to be a useful invariant.
    """
    coord_pos = {n: j for j, n in enumerate(coord_names)}
    names = cring.names()
    monos = _monomials_upto(len(names), degree)
    evals: list[list[Poly]] = []
    for sample in samples:
        row_polys = []
        for exps in monos:
            p = value_ring.one()
            for i, e in enumerate(exps):
                if e == 0:
                    continue
                name = names[i]
                if name in coord_pos:
                    p = p * sample[coord_pos[name]] ** e
                else:
                    p = p * value_ring.var(name, e)
            if ambient is not None:
                p = ambient.reduce(p)
            row_polys.append(p)
        evals.append(row_polys)
    seen: dict[Monomial, None] = {}
    for row_polys in evals:
        for p in row_polys:
            for m in p.terms:
                seen.setdefault(m, None)
    xmonos = sorted(seen, key=lambda m: m.exps)
    field = value_ring.field
    rows = []
    for row_polys in evals:
        for xm in xmonos:
            rows.append([p.coeff_of(xm) for p in row_polys])
    kernel = kernel_basis(rows, len(monos), field)
    if len(kernel) > kernel_cap:
        return None
    out = []
    for vec in kernel:
        terms: dict[Monomial, Coeff] = {}
        for j, c in enumerate(vec):
            if field.is_zero(c):
                continue
            terms[Monomial((i, e) for i, e in enumerate(monos[j]) if e)] = c
        out.append(cring.from_terms(terms))
    return out


def _kleene_rounds(g: Grammar, rounds: int) -> Iterator[InvariantCertificate | None]:
    """Exact forward propagation; yields a candidate only on stabilization.

    Restricted to scalar-valued grammars without ambient ideal or slot
    wiring (the image computation needs maps whose slots exactly cover
    the child coordinates).  Bails out when the intermediate ideals grow
    past crude size bounds, which signals an infinite ascending family
    that only the sampling widening can catch.  Coefficient fields with
    many parameters are skipped outright: without rational-function gcd
    the repeated intersections swell far too quickly there.
    """
    if g.ring.names() or g.ambient is not None:
        return
    if any(p.slot_sources is not None for p in g.productions):
        return
    field = g.ring.field
    if isinstance(field, FractionField) and len(field.param_ring.vartable) > 2:
        return
    productive = productive_nonterminals(g)
    V: dict[str, Ideal] = {}
    for _ in range(rounds):
        prev = dict(V)
        for prod in g.productions:
            if prod.lhs not in productive:
                continue
            out_ring = g.cert_ring(prod.lhs)
            if prod.arity() == 0:
                point = tuple(c.constant_value() for c in g.produce(prod, []))
                img = vanishing_ideal_of_points(out_ring, [point])
            else:
                if any(r not in V for r in prod.rhs):
                    continue
                _, flat_names = _child_block_ring(g, prod)
                block_ring = PolyRing(
                    VarTable.make((n, VarKind.ORDINARY) for n in flat_names),
                    g.ring.field, g.ring.mode)
                gens: list[Poly] = []
                for ci, r in enumerate(prod.rhs):
                    rename = {old: f"_w{ci}_{j}"
                              for j, old in enumerate(g.coord_names(r))}
                    gens.extend(f.convert(block_ring, rename)
                                for f in V[r].gens)
                block_map = PolyMap(block_ring, tuple(flat_names),
                                    tuple(p.convert(block_ring,
                                                    dict(zip(prod.pmap.slots,
                                                             flat_names)))
                                          for p in prod.pmap.outputs))
                img = image_closure(Ideal(block_ring, gens), block_map,
                                    g.coord_names(prod.lhs), alpha=prod.twist)
                img = img.converted(out_ring)
            V[prod.lhs] = (img if prod.lhs not in V
                           else ideal_intersect(V[prod.lhs], img))
            gens_now = V[prod.lhs].gens
            if len(gens_now) > 40 or any(
                    Fraction(f.total_degree()) > 8 for f in gens_now):
                return
        if (set(V) == productive and set(prev) == productive
                and all(V[nt].equal(prev[nt]) for nt in productive)):
            yield InvariantCertificate(dict(V), g.name)
            return
        yield None


def _sampling_rounds(g: Grammar) -> Iterator[InvariantCertificate | None]:
    """Degree-capped widening: vanishing candidates from sampled values."""
    productive = productive_nonterminals(g)
    for i in itertools.count():
        degree = 1 if i % 2 == 0 else 2
        size = 2 + i // 2
        cap = 8 + 4 * (i // 2)
        samples = collect_samples(g, size, cap)
        if any(nt not in samples for nt in productive):
            yield None
            continue
        ideals: dict[str, Ideal] = {}
        degenerate = False
        for nt in g.nonterminals:
            if nt not in productive:
                continue
            gens = low_degree_vanishing(
                g.ring, g.ambient, g.cert_ring(nt), g.coord_names(nt),
                samples[nt], degree)
            if gens is None:
                degenerate = True
                break
            ideals[nt] = Ideal(g.cert_ring(nt), gens)
        if degenerate:
            yield None
            continue
        if not ideals[g.initial].gens and g.ambient is None:
            yield None
            continue
        yield InvariantCertificate(ideals, g.name)


def closure_rounds(g: Grammar,
                   kleene_limit: int = 4) -> Iterator[InvariantCertificate | None]:
    """Candidate invariants, one per round: the whole exact propagation
    is the first round (it is cheap or bails), then sampling rounds with
    a growing degree/size schedule (never ends)."""
    found = None
    for cand in _kleene_rounds(g, kleene_limit):
        if cand is not None:
            found = cand
            break
    yield found
    yield from _sampling_rounds(g)


def forward_closure(g: Grammar, max_iterations: int = 8,
                    kleene_limit: int = 4) -> InvariantCertificate | None:
    """Search for an invariant verified for base cases and closure.

    The conclusion (initial coordinates forced to zero) is *not*
    required here; callers decide what the invariant is for.
    """
    rounds = 0
    for cand in closure_rounds(g, kleene_limit):
        rounds += 1
        if cand is not None and check_certificate(
                g, cand, require_conclusion=False).proved():
            return cand
        if rounds >= max_iterations:
            return None
    return None


# ---------------------------------------------------------------------------
# the zeroness driver


@dataclass(frozen=True)
class Budgets:
    """Work bounds: enumeration tree size, closure rounds, and a hard
    wall-clock abort (the first two keep results machine-independent)."""

    size: int = 12
    iters: int = 8
    seconds: float = 60.0

    def inner(self) -> "Budgets":
        return Budgets(max(4, self.size // 2), max(2, self.iters // 2),
                       self.seconds / 2)


@dataclass
class ZeronessResult:
    verdict: str  # "zero" | "nonzero" | "unknown"
    certificate: InvariantCertificate | None = None
    witness: Witness | None = None
    detail: str = ""


def _enum_rounds(g: Grammar, max_size: int) -> Iterator[Witness | None]:
    table = ValueTable(g)
    for s in range(1, max_size + 1):
        for value, deriv in table.of_size(g.initial, s):
            if not g.value_is_zero(value):
                deriv.replay(g)
                yield Witness(deriv, value)
                return
        yield None


def _zeroness_rr(g: Grammar, budgets: Budgets) -> ZeronessResult:
    deadline = time.monotonic() + budgets.seconds
    enum_iter = _enum_rounds(g, budgets.size)
    clos_iter = closure_rounds(g)
    enum_done = clos_done = False
    clos_count = 0
    while not (enum_done and clos_done):
        if time.monotonic() > deadline:
            return ZeronessResult("unknown", detail="time budget exhausted")
        if not enum_done:
            try:
                w = next(enum_iter)
            except StopIteration:
                enum_done = True
            else:
                if w is not None:
                    return ZeronessResult("nonzero", witness=w,
                                          detail="nonzero value derived")
        if time.monotonic() > deadline:
            return ZeronessResult("unknown", detail="time budget exhausted")
        if not clos_done:
            cand = next(clos_iter)
            clos_count += 1
            if cand is not None:
                verdict = check_certificate(g, cand, require_conclusion=True)
                if verdict.proved():
                    return ZeronessResult("zero", certificate=cand,
                                          detail="invariant certificate found")
            if clos_count >= budgets.iters:
                clos_done = True
    return ZeronessResult("unknown", detail="work budgets exhausted")


def _zeroness_parallel(g: Grammar, budgets: Budgets) -> ZeronessResult:
    stop = threading.Event()
    box: dict[str, ZeronessResult] = {}
    lock = threading.Lock()

    def put(key: str, res: ZeronessResult) -> None:
        with lock:
            box.setdefault(key, res)
        stop.set()

    def enum_task() -> None:
        for w in _enum_rounds(g, budgets.size):
            if w is not None:
                put("nonzero", ZeronessResult(
                    "nonzero", witness=w, detail="nonzero value derived"))
                return
            if stop.is_set():
                return

    def clos_task() -> None:
        count = 0
        for cand in closure_rounds(g):
            count += 1
            if cand is not None:
                verdict = check_certificate(g, cand, require_conclusion=True)
                if verdict.proved():
                    put("zero", ZeronessResult(
                        "zero", certificate=cand,
                        detail="invariant certificate found"))
                    return
            if count >= budgets.iters or stop.is_set():
                return

    threads = [threading.Thread(target=enum_task),
               threading.Thread(target=clos_task)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout=budgets.seconds)
    stop.set()
    for t in threads:
        t.join()
    # ties broken toward the certificate side
    if "zero" in box:
        return box["zero"]
    if "nonzero" in box:
        return box["nonzero"]
    return ZeronessResult("unknown", detail="work budgets exhausted")


def zeroness(g: Grammar, budgets: Budgets = Budgets(),
             certificates: Sequence[InvariantCertificate] = (),
             schedule: str = "rr") -> ZeronessResult:
    """Decide zeroness within budgets: supplied certificates are checked
    first, then witness enumeration and invariant search interleave."""
    if g.initial not in productive_nonterminals(g):
        return ZeronessResult("zero", detail="no derivable values")
    for cert in certificates:
        if check_certificate(g, cert, require_conclusion=True).proved():
            return ZeronessResult("zero", certificate=cert,
                                  detail="supplied certificate verified")
    if schedule == "parallel":
        return _zeroness_parallel(g, budgets)
    if schedule != "rr":
        raise StructureError(f"unknown schedule {schedule!r}")
    return _zeroness_rr(g, budgets)


# ---------------------------------------------------------------------------
# grammar surgery


def attach_polymap(f: PolyMap, g: Grammar, nt_name: str | None = None) -> Grammar:
    """New grammar computing f of the old initial nonterminal's values."""
    if f.n_inputs != g.dim(g.initial):
        raise DimensionError(
            f"map arity {f.n_inputs} does not match dim of {g.initial}")
    if f.ring.field != g.ring.field:
        raise StructureError("attached map over a different coefficient field")
    if set(f.slots) & set(g.ring.names()):
        raise StructureError("attached map slots collide with value variables")
    name = nt_name
    if name is None:
        k = 0
        while f"_q{k}" in g.nonterminals:
            k += 1
        name = f"_q{k}"
    elif name in g.nonterminals:
        raise StructureError(f"nonterminal {name!r} already declared")
    slot_pairs = [(s, f.ring.vartable.kinds[f.ring.vartable.index(s)])
                  for s in f.slots]
    mring = map_ring_over(g.ring, slot_pairs)
    pmap = PolyMap(mring, f.slots, tuple(p.convert(mring) for p in f.outputs))
    nts = dict(g.nonterminals)
    nts[name] = f.n_outputs
    prods = g.productions + (Production(name, (g.initial,), pmap),)
    return Grammar(nts, name, prods, g.ring, g.ambient, g.name)


def to_field_view(g: Grammar) -> Grammar:
    """Move the value variables into the coefficient field.

    Values become scalars of the fraction field, so invariant ideals
    live in the coordinates alone.  Membership certificates found here
    use radical reasoning, which is sound because a fraction field has
    no nilpotents.  Requires plain rational coefficients and no ambient
    ideal.
    """
    if not isinstance(g.ring.field, RationalField):
        raise StructureError("field view needs plain rational coefficients")
    if g.ambient is not None:
        raise StructureError("field view of a quotient grammar")
    if not g.ring.names():
        return g
    field = FractionField(g.ring)
    vring = PolyRing(EMPTY_VARTABLE, field, Mode.FIELD)
    prods = []
    for prod in g.productions:
        slot_pairs = [(s, prod.pmap.ring.vartable.kinds[
            prod.pmap.ring.vartable.index(s)]) for s in prod.pmap.slots]
        mring = PolyRing(VarTable.make(slot_pairs), field, Mode.FIELD)
        outs = tuple(structure_poly(p, mring) for p in prod.pmap.outputs)
        prods.append(Production(prod.lhs, prod.rhs,
                                PolyMap(mring, prod.pmap.slots, outs),
                                prod.twist, prod.slot_sources, prod.label))
    return Grammar(g.nonterminals, g.initial, prods, vring, None, g.name)


def strip_twists(g: Grammar) -> Grammar:
    prods = [Production(p.lhs, p.rhs, p.pmap, None, p.slot_sources, p.label)
             for p in g.productions]
    return Grammar(g.nonterminals, g.initial, prods, g.ring, g.ambient, g.name)


# ---------------------------------------------------------------------------
# zeroness through an independent inner system


@dataclass
class IndepResult:
    verdict: str  # "zero" | "nonzero" | "unknown"
    invariant: InvariantCertificate | None = None
    quotient_result: ZeronessResult | None = None
    witness_pair: tuple[Witness, Witness] | None = None
    detail: str = ""


def indep_zeroness(outer: Grammar, inner: Grammar,
                   budgets: Budgets = Budgets(),
                   certificates: Sequence[InvariantCertificate] = ()
                   ) -> IndepResult:
    """Zeroness of outer(x := v) over all derivable inner values v.

    The outer grammar's value variables stand for the inner value; the
    two systems share no derivation coupling, so it suffices to find an
    inductive invariant containing every inner value and to prove the
    outer grammar zero modulo that variety's ideal.  Refutation side:
    enumerate value pairs and evaluate.

    Supplied certificates describe candidate inner invariants (over the
    inner grammar's field view when it has value variables) and are
    tried before any search.
    """
    if inner.ring.names():
        inner = to_field_view(inner)
    if outer.ambient is not None:
        raise StructureError("outer grammar already has an ambient ideal")
    if outer.dim(outer.initial) != 1:
        raise DimensionError("outer grammar must have a one-dimensional output")
    xnames = outer.ring.names()
    if len(xnames) != inner.dim(inner.initial):
        raise DimensionError(
            "outer value variables do not match the inner dimension")
    if outer.ring.field != inner.ring.field:
        raise StructureError("outer and inner coefficient fields differ")
    if outer.initial not in productive_nonterminals(outer) or \
            inner.initial not in productive_nonterminals(inner):
        return IndepResult("zero", detail="no derivable values")
    deadline = time.monotonic() + budgets.seconds

    def try_invariant(cand: InvariantCertificate) -> IndepResult | None:
        if not check_certificate(inner, cand,
                                 require_conclusion=False).proved():
            return None
        coords = inner.coord_names(inner.initial)
        gens = [f.convert(outer.ring, dict(zip(coords, xnames)))
                for f in cand.ideal_for(inner.initial).gens]
        quotient = Grammar(outer.nonterminals, outer.initial,
                           outer.productions, outer.ring,
                           ambient=Ideal(outer.ring, gens),
                           name=outer.name)
        qr = zeroness(quotient, budgets.inner())
        if qr.verdict == "zero":
            return IndepResult("zero", invariant=cand, quotient_result=qr,
                               detail="inner invariant and quotient proof")
        return None

    for cand in certificates:
        res = try_invariant(cand)
        if res is not None:
            return IndepResult("zero", invariant=res.invariant,
                               quotient_result=res.quotient_result,
                               detail="supplied certificate verified")

    outer_table = ValueTable(outer)
    inner_table = ValueTable(inner)
    outer_seen: list[tuple[Value, Derivation]] = []
    inner_seen: list[tuple[Value, Derivation]] = []

    def try_pairs(size: int) -> tuple[Witness, Witness] | None:
        new_outer = outer_table.of_size(outer.initial, size)
        new_inner = inner_table.of_size(inner.initial, size)
        pairs = [(o, i) for o in new_outer for i in inner_seen]
        pairs += [(o, i) for o in outer_seen + new_outer for i in new_inner]
        for (oval, oder), (ival, ider) in pairs:
            binding = {x: outer.ring.const(c.constant_value())
                       for x, c in zip(xnames, ival)}
            if not oval[0].substitute(binding).is_zero():
                return (Witness(oder, oval), Witness(ider, ival))
        outer_seen.extend(new_outer)
        inner_seen.extend(new_inner)
        return None

    clos_iter = closure_rounds(inner)
    enum_size = 0
    clos_count = 0
    while enum_size < budgets.size or clos_count < budgets.iters:
        if time.monotonic() > deadline:
            return IndepResult("unknown", detail="time budget exhausted")
        if enum_size < budgets.size:
            enum_size += 1
            pair = try_pairs(enum_size)
            if pair is not None:
                return IndepResult("nonzero", witness_pair=pair,
                                   detail="nonzero evaluation found")
        if time.monotonic() > deadline:
            return IndepResult("unknown", detail="time budget exhausted")
        if clos_count < budgets.iters:
            cand = next(clos_iter)
            clos_count += 1
            if cand is None:
                continue
            res = try_invariant(cand)
            if res is not None:
                return res
    return IndepResult("unknown", detail="work budgets exhausted")


# ---------------------------------------------------------------------------
# zeroness through a chain of substitutions


@dataclass
class ChainResult:
    verdict: str  # "zero" | "nonzero" | "unknown"
    invariant_gens: tuple[Poly, ...] = ()
    link_results: tuple["ChainResult", ...] = ()
    quotient_result: ZeronessResult | None = None
    witness_value: Value | None = None
    detail: str = ""


def _dedup_values(pairs: Iterable[tuple[Value, Derivation]],
                  cap: int) -> list[Value]:
    seen: dict[Value, None] = {}
    for v, _ in pairs:
        seen.setdefault(v, None)
        if len(seen) >= cap:
            break
    return list(seen)


def _composed_tail_values(tail: Sequence[Grammar], size: int,
                          cap: int) -> list[Value]:
    """Sampled values of the innermost grammar pushed outwards through
    the substitution chain; always scalar tuples over a variable-free
    ring (deduplicated and capped at each stage)."""
    sring = PolyRing(EMPTY_VARTABLE, tail[-1].ring.field, tail[-1].ring.mode)
    vals = [tuple(sring.const(c.constant_value()) for c in v)
            for v in _dedup_values(enumerate_values(tail[-1], size), cap)]
    for g in reversed(tail[:-1]):
        outer_vals = _dedup_values(enumerate_values(g, size), cap)
        xnames = g.ring.names()
        acc: dict[Value, None] = {}
        for ov in outer_vals:
            for iv in vals:
                binding = {x: g.ring.const(c.constant_value())
                           for x, c in zip(xnames, iv)}
                comp = tuple(sring.const(p.substitute(binding).constant_value())
                             for p in ov)
                acc.setdefault(comp, None)
                if len(acc) >= cap:
                    break
            if len(acc) >= cap:
                break
        vals = list(acc)
    return vals


def chain_zeroness(grammars: Sequence[Grammar],
                   budgets: Budgets = Budgets()) -> ChainResult:
    """Zeroness of g1(g2(... gn ...)) over all derivable value chains.

    Works outside-in: sample composed values of the tail, guess a
    bounded-degree ideal vanishing on them, verify each generator
    recursively as a zeroness problem of the shorter chain, then prove
    the head grammar zero modulo the verified ideal.
    """
    gs = list(grammars)
    if not gs:
        raise StructureError("empty grammar chain")
    if len(gs) == 1:
        r = zeroness(gs[0], budgets)
        return ChainResult(r.verdict, quotient_result=r, detail=r.detail)
    head, tail = gs[0], gs[1:]
    if head.ambient is not None:
        raise StructureError("head grammar already has an ambient ideal")
    for i, g in enumerate(gs[:-1]):
        if len(g.ring.names()) != gs[i + 1].dim(gs[i + 1].initial):
            raise DimensionError(
                "value variables do not match the next grammar's dimension")
        if g.ring.field != gs[i + 1].ring.field:
            raise StructureError("chain grammars over different fields")
    if gs[-1].ring.names():
        raise StructureError("innermost chain grammar must be scalar-valued")
    if any(g.initial not in productive_nonterminals(g) for g in gs):
        return ChainResult("zero", detail="no derivable composed values")
    deadline = time.monotonic() + budgets.seconds
    xnames = head.ring.names()
    coords = tuple(f"_t{i}" for i in range(len(xnames)))
    coordring = PolyRing(VarTable.make((c, VarKind.ORDINARY) for c in coords),
                         head.ring.field, head.ring.mode)
    sring = PolyRing(EMPTY_VARTABLE, head.ring.field, head.ring.mode)
    head_table = ValueTable(head)
    for rnd in range(budgets.iters):
        if time.monotonic() > deadline:
            return ChainResult("unknown", detail="time budget exhausted")
        degree = 1 if rnd % 2 == 0 else 2
        size = 2 + rnd // 2
        cap = 8 + 4 * (rnd // 2)
        composed = _composed_tail_values(tail, size, cap)
        head_size = min(budgets.size, 2 + rnd)
        head_vals = _dedup_values(
            ((v, d) for s in range(1, head_size + 1)
             for v, d in head_table.of_size(head.initial, s)), 4 * cap)
        for hv in head_vals:
            for cv in composed:
                binding = {x: head.ring.const(c.constant_value())
                           for x, c in zip(xnames, cv)}
                evaluated = tuple(p.substitute(binding) for p in hv)
                if any(not p.is_zero() for p in evaluated):
                    value = tuple(sring.const(p.constant_value())
                                  for p in evaluated)
                    return ChainResult("nonzero", witness_value=value,
                                       detail="nonzero composed value found")
        gens = low_degree_vanishing(sring, None, coordring, coords,
                                    composed, degree)
        if gens is None or (not gens and rnd > 0):
            continue
        links = []
        verified = True
        for f in gens:
            fmap = PolyMap(coordring, coords, (f,))
            sub = chain_zeroness([attach_polymap(fmap, gs[1])] + gs[2:],
                                 budgets.inner())
            links.append(sub)
            if sub.verdict != "zero":
                verified = False
                break
        if not verified:
            continue
        quotient = Grammar(head.nonterminals, head.initial, head.productions,
                           head.ring,
                           ambient=Ideal(head.ring,
                                         [f.convert(head.ring,
                                                    dict(zip(coords, xnames)))
                                          for f in gens]),
                           name=head.name)
        qr = zeroness(quotient, budgets.inner())
        if qr.verdict == "zero":
            return ChainResult("zero", invariant_gens=tuple(gens),
                               link_results=tuple(links), quotient_result=qr,
                               detail="tail invariant and quotient proof")
    return ChainResult("unknown", detail="work budgets exhausted")
