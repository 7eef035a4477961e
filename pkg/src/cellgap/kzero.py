"""Representatives of reduced projective classes and the tools around them.

A class is stored as ``sign * (sum [im P_i] - sum [im N_j])`` for idempotent
matrices P_i, N_j over ZG.  Equality in reduced K_0 is only semi-decided:
``class_is_trivial`` answers yes (with a witness or a registry entry) or
unknown.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import intmat
from .complex import FreeChainComplex, restricted_action
from .groupring import (GroupData, GroupRingMatrix, MalformedInputError, chain_action,
                        diagonal_blocks, direct_sum, flatten, hconcat, identify)
from .intmat import AbelianGroup, as_intmat, matmul
from .modules import FPModule
from .silence import SilenceCertificate, find_retraction, silent_in_degree, solve_left_factor

_FILTER_PRIMES = (2, 3)


class NotSilentError(ValueError):
    def __init__(self, certificate: SilenceCertificate):
        super().__init__(f"complex is not silent in degree {certificate.degree}: "
                         f"{certificate.reason}")
        self.certificate = certificate


@dataclass(frozen=True, eq=False)
class KZeroRep:
    group: GroupData
    positive: tuple[GroupRingMatrix, ...] = ()
    negative: tuple[GroupRingMatrix, ...] = ()
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise MalformedInputError("sign must be +1 or -1")
        for e in self.positive + self.negative:
            if e.group != self.group:
                raise MalformedInputError("idempotent over a different group")
            if not e.is_idempotent():
                raise MalformedInputError("class representative entry is not idempotent")

    @classmethod
    def of(cls, e: GroupRingMatrix, sign: int = 1) -> "KZeroRep":
        return cls(e.group, (e,), (), sign)

    @classmethod
    def zero(cls, group: GroupData) -> "KZeroRep":
        return cls(group)

    def normalized(self) -> "KZeroRep":
        """Same class with sign +1."""
        if self.sign == 1:
            return self
        return KZeroRep(self.group, self.negative, self.positive, 1)

    def rank_z(self) -> int:
        """Signed Z-rank: sign times the difference of flattened traces."""
        pos = sum(e.trace_flat() for e in self.positive)
        neg = sum(e.trace_flat() for e in self.negative)
        return self.sign * (pos - neg)

    def to_json(self) -> dict:
        return {"group": self.group.name, "sign": self.sign,
                "positive": [e.to_json() for e in self.positive],
                "negative": [e.to_json() for e in self.negative]}

    @classmethod
    def from_json(cls, group: GroupData, data: dict) -> "KZeroRep":
        pos = tuple(GroupRingMatrix.from_entries(group, e) for e in data.get("positive", []))
        neg = tuple(GroupRingMatrix.from_entries(group, e) for e in data.get("negative", []))
        return cls(group, pos, neg, int(data.get("sign", 1)))


def class_sum(a: KZeroRep, b: KZeroRep) -> KZeroRep:
    if a.group != b.group:
        raise MalformedInputError("classes over different groups")
    a, b = a.normalized(), b.normalized()
    return KZeroRep(a.group, a.positive + b.positive, a.negative + b.negative)


def class_negate(a: KZeroRep) -> KZeroRep:
    return KZeroRep(a.group, a.negative, a.positive, a.sign)


def class_scale(a: KZeroRep, n: int) -> KZeroRep:
    base = a if n >= 0 else class_negate(a)
    base = base.normalized()
    m = abs(n)
    return KZeroRep(a.group, base.positive * m, base.negative * m)


def class_difference(a: KZeroRep, b: KZeroRep) -> KZeroRep:
    return class_sum(a, class_negate(b))


def class_dual(a: KZeroRep) -> KZeroRep:
    """P -> Hom(P, ZG), on idempotents the involute-transpose."""
    return KZeroRep(a.group, tuple(e.involute_transpose() for e in a.positive),
                    tuple(e.involute_transpose() for e in a.negative), a.sign)


def block_form(a: KZeroRep) -> tuple[GroupRingMatrix, GroupRingMatrix]:
    """Block sums of the positive and negative lists (sign ignored)."""
    return direct_sum(*a.positive, group=a.group), direct_sum(*a.negative, group=a.group)


# -------------------------------------------------------------------------
# the obstruction


def obstruction(c: FreeChainComplex, k: int,
                certificate: SilenceCertificate | None = None) -> KZeroRep:
    """(-1)^k [B_{k-1}], represented by the idempotent E = d_k B onto the boundaries."""
    cert = certificate or silent_in_degree(c, k)
    if not cert.silent:
        raise NotSilentError(cert)
    e = c.boundary(k) @ cert.retraction
    return KZeroRep.of(e, -1 if k % 2 else 1)


# -------------------------------------------------------------------------
# projectivity through Tate cohomology over Sylow subgroups


def idempotent_module(e: GroupRingMatrix) -> FPModule:
    """im E inside the flattened free module, as a lattice."""
    g = e.group
    basis = intmat.image_basis(flatten(e))
    if basis.shape[1] == 0:
        return FPModule(g, tuple(intmat.zeros(0, 0) for _ in range(g.order)), intmat.zeros(0, 0))
    act = restricted_action(basis, chain_action(g, e.rows))
    return FPModule(g, act, intmat.zeros(basis.shape[1], 0))


def _fixed_points(mats: Sequence[np.ndarray], m: int) -> np.ndarray:
    rows = [a - intmat.identity(m) for a in mats]
    if not rows:
        return intmat.identity(m)
    return intmat.kernel_basis(intmat.vstack(rows, m))


def tate_h0(action: Sequence[np.ndarray], subgroup: Sequence[int], m: int) -> AbelianGroup:
    """M^P / N M for the subgroup P."""
    fixed = _fixed_points([action[g] for g in subgroup], m)
    norm = intmat.zeros(m, m)
    for g in subgroup:
        norm = norm + action[g]
    return intmat.subquotient(fixed, norm, m).group


def tate_h1(group: GroupData, action: Sequence[np.ndarray], subgroup: Sequence[int],
            m: int) -> AbelianGroup:
    """H^1(P; M) through crossed homomorphisms determined on generators of P."""
    gens = group.minimal_generators(subgroup)
    r = len(gens)
    if r == 0 or m == 0:
        return AbelianGroup()
    width = r * m
    unit = [intmat.zeros(m, width) for _ in gens]
    for i in range(r):
        unit[i][:, i * m:(i + 1) * m] = intmat.identity(m)
    # value of the crossed homomorphism at each element as a linear map of the unknowns
    value = {0: intmat.zeros(m, width)}
    queue = [0]
    constraints = []
    while queue:
        x = queue.pop(0)
        for i, s in enumerate(gens):
            y = group.mult[s][x]
            cand = unit[i] + matmul(action[s], value[x])
            if y in value:
                constraints.append(cand - value[y])
            else:
                value[y] = cand
                queue.append(y)
    cons = intmat.vstack(constraints, width) if constraints else intmat.zeros(0, width)
    cocycles = intmat.kernel_basis(cons) if cons.shape[0] else intmat.identity(width)
    coboundaries = intmat.vstack([action[s] - intmat.identity(m) for s in gens], m)
    return intmat.subquotient(cocycles, coboundaries, width).group


@dataclass
class TateFingerprint:
    entries: dict[tuple[int, int], AbelianGroup]
    torsion_free: bool

    @property
    def projective(self) -> bool:
        return self.torsion_free and all(v.is_zero for v in self.entries.values())

    def to_json(self) -> dict:
        return {"torsion_free": self.torsion_free, "projective": self.projective,
                "entries": {f"p={p},deg={d}": str(v) for (p, d), v in sorted(self.entries.items())}}

    def __eq__(self, other):
        if not isinstance(other, TateFingerprint):
            return NotImplemented
        return self.torsion_free == other.torsion_free and self.entries == other.entries


def projectivity_fingerprint(mod: FPModule) -> TateFingerprint:
    if not mod.is_torsion_free():
        return TateFingerprint({}, False)
    lat = mod.to_lattice()
    m = lat.generators
    entries = {}
    for p, sub in sorted(mod.group.sylow_subgroups().items()):
        entries[(p, 0)] = tate_h0(lat.action, sub, m)
        entries[(p, 1)] = tate_h1(mod.group, lat.action, sub, m)
    return TateFingerprint(entries, True)


def idempotent_fingerprint(e: GroupRingMatrix) -> TateFingerprint:
    return projectivity_fingerprint(idempotent_module(e))


# -------------------------------------------------------------------------
# registry of groups with known reduced K_0


DEFAULT_REGISTRY = Path(__file__).with_name("data") / "registry.json"


@dataclass(frozen=True)
class RegistryEntry:
    group: str
    k0_tilde: AbelianGroup
    involution: tuple[tuple[int, ...], ...]
    source: str


def load_registry(path: str | Path | None = None) -> dict[str, RegistryEntry]:
    data = json.loads(Path(path or DEFAULT_REGISTRY).read_text())
    out = {}
    for item in data:
        rel = as_intmat(item["k0_tilde"]["relations"], shape=(item["k0_tilde"]["generators"], 0))
        grp = intmat.cokernel_group(rel) if rel.shape[0] else AbelianGroup()
        inv = tuple(tuple(int(v) for v in row) for row in item.get("involution", []))
        out[item["group"]] = RegistryEntry(item["group"], grp, inv, item.get("source", ""))
    return out


def registry_involuted_group(entry: RegistryEntry, path: str | Path | None = None):
    data = json.loads(Path(path or DEFAULT_REGISTRY).read_text())
    for item in data:
        if item["group"] == entry.group:
            n = item["k0_tilde"]["generators"]
            return InvolutedAbelianGroup(as_intmat(item["k0_tilde"]["relations"], shape=(n, 0)),
                                         as_intmat(item["involution"], shape=(n, n)))
    raise KeyError(entry.group)


# -------------------------------------------------------------------------
# triviality


@dataclass
class FreeWitness:
    """im(E) is free of rank t: ``Y X = 1_t`` and ``X Y = E``."""

    idempotent: GroupRingMatrix
    x: GroupRingMatrix
    y: GroupRingMatrix

    def verify(self) -> bool:
        t = self.x.cols
        return (self.y @ self.x == GroupRingMatrix.identity(self.x.group, t)
                and self.x @ self.y == self.idempotent)

    def to_json(self) -> dict:
        return {"idempotent": self.idempotent.to_json(), "x": self.x.to_json(),
                "y": self.y.to_json()}


@dataclass
class TrivialityResult:
    verdict: str  # "yes" or "unknown"
    reason: str
    witness: FreeWitness | None = field(default=None, repr=False)
    stabilization: int = 0

    @property
    def trivial(self) -> bool:
        return self.verdict == "yes"

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "reason": self.reason, "stabilization": self.stabilization}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        return out


def _cancel_identical(pos: list[GroupRingMatrix], neg: list[GroupRingMatrix]):
    pos, neg = list(pos), list(neg)
    for e in list(pos):
        for i, f in enumerate(neg):
            if e == f:
                pos.remove(e)
                del neg[i]
                break
    return pos, neg


def _split_blocks(es) -> list[GroupRingMatrix]:
    """[diag(E_1, E_2)] = [E_1] + [E_2]: replace entries by their diagonal blocks."""
    out = []
    for e in es:
        out.extend(e.block(b, b) for b in diagonal_blocks(e))
    return out


def _is_identity(e: GroupRingMatrix) -> bool:
    return e == GroupRingMatrix.identity(e.group, e.rows)


def complete_left_inverse(x: GroupRingMatrix, e: GroupRingMatrix) -> GroupRingMatrix | None:
    """Y with ``Y X = 1`` and ``Y (1 - E) = 0``, or None."""
    g = x.group
    one = GroupRingMatrix.identity(g, e.rows)
    lhs = hconcat([x, one - e], g, e.rows)
    rhs = hconcat([GroupRingMatrix.identity(g, x.cols),
                   GroupRingMatrix.zeros(g, x.cols, e.rows)], g, x.cols)
    yt = solve_left_factor(lhs.involute_transpose(), rhs.involute_transpose())
    return None if yt is None else yt.involute_transpose()


def _candidate_columns(e: GroupRingMatrix, box: int,
                       spanning: GroupRingMatrix | None = None) -> list[GroupRingMatrix]:
    """Columns of ``spanning`` and of E times group elements, then sums and differences of pairs."""
    g = e.group
    n = e.rows
    base = []
    seen = set()
    sources = [spanning] if spanning is not None else []
    sources.append(e)
    cols = [m.block(range(n), [i]) for m in sources for i in range(m.cols)]
    for col in cols:
        if col.is_zero():
            continue
        for h in range(g.order):
            unit = GroupRingMatrix.zeros(g, 1, 1)
            unit.coeffs[0, 0, h] = 1
            v = col @ unit
            key = tuple(v.coeffs.flat)
            if key not in seen:
                seen.add(key)
                base.append(v)
    out = list(base)
    for a, b in itertools.combinations(base, 2):
        for v in (a + b, a - b):
            if v.is_zero() or max(abs(x) for x in v.coeffs.flat) > box:
                continue
            key = tuple(v.coeffs.flat)
            if key not in seen:
                seen.add(key)
                out.append(v)
    return out


def find_free_witness(e: GroupRingMatrix, box: int = 4, max_attempts: int = 4000,
                      spanning: GroupRingMatrix | None = None) -> FreeWitness | None:
    """Search for X, Y exhibiting im E as a free module.

    ``spanning`` may hold extra columns generating im E (a boundary matrix
    whose retraction produced E usually has much smaller entries than E).
    """
    g = e.group
    trace = e.trace_flat()
    if trace % g.order:
        return None
    t = trace // g.order
    if t == 0:
        return FreeWitness(e, GroupRingMatrix.zeros(g, e.rows, 0), GroupRingMatrix.zeros(g, 0, e.rows))
    if _is_identity(e):
        one = GroupRingMatrix.identity(g, e.rows)
        return FreeWitness(e, one, one)
    cands = _candidate_columns(e, box, spanning)
    # [X | 1 - E] must have full rank t|G| + rank(1 - E) mod every prime, and so must every
    # sub-selection of columns of X; a depth-first search prunes failing prefixes early
    comp = flatten(GroupRingMatrix.identity(g, e.rows) - e)
    base = {p: intmat.rank_mod_p(comp, p) for p in _FILTER_PRIMES}
    flat_cands = [flatten(v) for v in cands]

    def passes(prefix):
        stacked = np.concatenate([flat_cands[i] for i in prefix] + [comp], axis=1)
        return all(intmat.rank_mod_p(stacked, p) == base[p] + len(prefix) * g.order
                   for p in _FILTER_PRIMES)

    attempts = 0
    stack = [()]
    while stack:
        prefix = stack.pop()
        if len(prefix) == t:
            x = GroupRingMatrix(g, np.concatenate([cands[i].coeffs for i in prefix], axis=1))
            y = complete_left_inverse(x, e)
            if y is not None:
                w = FreeWitness(e, x, y)
                if w.verify():
                    return w
            continue
        start = prefix[-1] + 1 if prefix else 0
        for i in reversed(range(start, len(cands) - (t - len(prefix)) + 1)):
            attempts += 1
            if attempts > max_attempts:
                return None
            if passes(prefix + (i,)):
                stack.append(prefix + (i,))
    return None


def class_is_trivial(r: KZeroRep, registry: dict[str, RegistryEntry] | None = None,
                     box: int = 4, max_stabilization: int = 2) -> TrivialityResult:
    g = r.group
    if registry is None:
        registry = load_registry()
    name = identify(g)
    entry = registry.get(name) if name else None
    if entry is not None and entry.k0_tilde.is_zero:
        return TrivialityResult("yes", f"reduced K_0 of Z[{name}] vanishes ({entry.source})")
    pos, neg = _cancel_identical(_split_blocks(r.positive), _split_blocks(r.negative))
    if not pos and not neg:
        return TrivialityResult("yes", "formal cancellation")
    pos = [e for e in pos if not _is_identity(e) and not e.is_zero()]
    neg = [e for e in neg if not _is_identity(e) and not e.is_zero()]
    if not pos and not neg:
        return TrivialityResult("yes", "only free summands remain")
    # sum [P] - sum [N] = [im diag(P, 1 - N)] - [free]
    blocks = pos + [GroupRingMatrix.identity(g, e.rows) - e for e in neg]
    e = direct_sum(*blocks)
    for s in range(max_stabilization + 1):
        es = direct_sum(e, GroupRingMatrix.identity(g, s)) if s else e
        w = find_free_witness(es, box)
        if w is not None:
            return TrivialityResult("yes", "stably free witness", w, s)
    return TrivialityResult("unknown", "no witness within the search limits")


# -------------------------------------------------------------------------
# Z/2 Tate cohomology of an abelian group with involution


@dataclass(frozen=True, eq=False)
class InvolutedAbelianGroup:
    relations: np.ndarray  # generators x relations
    involution: np.ndarray

    def __post_init__(self):
        n = self.relations.shape[0]
        if self.involution.shape != (n, n):
            raise MalformedInputError("involution must be square on the generators")

    @property
    def generators(self) -> int:
        return self.relations.shape[0]

    def group(self) -> AbelianGroup:
        return intmat.cokernel_group(self.relations) if self.generators else AbelianGroup()

    def check(self) -> None:
        n = self.generators
        rel = self.relations
        span = rel if rel.shape[1] else intmat.zeros(n, 0)
        moved = matmul(self.involution, rel) if rel.shape[1] else intmat.zeros(n, 0)
        sq = matmul(self.involution, self.involution) - intmat.identity(n)
        for block, what in ((moved, "relations"), (sq, "square")):
            for j in range(block.shape[1]):
                col = block[:, j]
                if span.shape[1] == 0:
                    ok = all(v == 0 for v in col)
                else:
                    ok = intmat.solve_integer_linear(span, col) is not None
                if not ok:
                    raise MalformedInputError(
                        "involution does not preserve the relations" if what == "relations"
                        else "involution is not of order 2 on the quotient")

    def to_json(self) -> dict:
        return {"generators": self.generators,
                "relations": [[int(v) for v in row] for row in self.relations],
                "involution": [[int(v) for v in row] for row in self.involution]}

    @classmethod
    def from_json(cls, data: dict) -> "InvolutedAbelianGroup":
        if "k0_tilde" in data:
            inner = data["k0_tilde"]
            n = int(inner["generators"])
            rel = inner.get("relations", [])
        else:
            n = int(data["generators"])
            rel = data.get("relations", [])
        return cls(as_intmat(rel, shape=(n, 0)), as_intmat(data["involution"], shape=(n, n)))


def parity_sign(parity: str) -> int:
    """"even" selects ker(1 - s)/im(1 + s), "odd" selects ker(1 + s)/im(1 - s)."""
    if parity not in ("even", "odd"):
        raise MalformedInputError("parity must be 'even' or 'odd'")
    return 1 if parity == "even" else -1


def tate_z2(a: InvolutedAbelianGroup, parity: str) -> AbelianGroup:
    a.check()
    eps = parity_sign(parity)
    n = a.generators
    if n == 0:
        return AbelianGroup()
    one = intmat.identity(n)
    plus = one + eps * a.involution
    minus = one - eps * a.involution
    result = intmat.presented_homology(plus, minus, a.relations, a.relations)
    if result.group.free_rank or any(t > 2 for t in result.group.torsion):
        raise AssertionError("Tate group not annihilated by 2")
    return result.group


# -------------------------------------------------------------------------
# self-duality


@dataclass
class SelfDualReport:
    verdict: str  # "consistent" or "unknown"
    triviality: TrivialityResult
    difference: KZeroRep = field(repr=False)

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "triviality": self.triviality.to_json()}


def self_dual_difference(r: KZeroRep, n: int) -> KZeroRep:
    """r - (-1)^(n+1) r*."""
    dual = class_dual(r)
    if (n + 1) % 2 == 0:
        return class_sum(r, class_negate(dual))
    return class_sum(r, dual)


def check_self_dual(r: KZeroRep, n: int, registry=None, box: int = 4,
                    max_stabilization: int = 2) -> SelfDualReport:
    d = self_dual_difference(r, n)
    res = class_is_trivial(d, registry, box, max_stabilization)
    return SelfDualReport("consistent" if res.trivial else "unknown", res, d)


def splitting_idempotent(presentation: GroupRingMatrix) -> GroupRingMatrix | None:
    """Idempotent for the cokernel of a free presentation ``ZG^a -> ZG^n``.

    When R B R = R the cokernel of R is isomorphic to im(1 - R B); otherwise
    the cokernel is not projective and None is returned.
    """
    b = find_retraction(presentation)
    if b is None:
        return None
    return GroupRingMatrix.identity(presentation.group, presentation.rows) - presentation @ b
