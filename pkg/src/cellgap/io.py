"""JSON file formats for groups, complexes, idempotents and classes.

A group reference is either an inline group object, a path to a group file
(relative to the referencing file) or one of the built-in names
``trivial``, ``Cn``, ``Dn``, ``S3``, ``Q8``, ``C2xC2``, ``C2xC2xC2``.
Matrix entries are lists of ``[coeff, element_index]`` pairs.
"""

from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path

from .complex import ComplexPair, FreeChainComplex
from .groupring import (GroupData, GroupRingMatrix, MalformedInputError, cyclic_group,
                        dihedral_group, elementary_abelian_2, group_from_permutations,
                        group_from_table, quaternion_group, symmetric_group_s3, trivial_group)
from .kzero import InvolutedAbelianGroup, KZeroRep
from .modules import FPModule, augmentation_ideal, regular_module, trivial_module


def read_json(path: str | Path):
    """Parse a JSON file, turning syntax errors into MalformedInputError with line/column."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def file_hash(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _field(data: dict, key: str, what: str):
    if not isinstance(data, dict) or key not in data:
        raise MalformedInputError(f"{what}: missing field {key!r}")
    return data[key]


# -------------------------------------------------------------------------
# groups

_BUILTIN = re.compile(r"^(?:(trivial)|C(\d+)|D(\d+)|(S3)|(Q8)|(C2(?:xC2)+))$")


def builtin_group(name: str) -> GroupData | None:
    m = _BUILTIN.match(name)
    if not m:
        return None
    if m.group(1):
        return trivial_group()
    if m.group(2):
        return cyclic_group(int(m.group(2)))
    if m.group(3):
        return dihedral_group(int(m.group(3)))
    if m.group(4):
        return symmetric_group_s3()
    if m.group(5):
        return quaternion_group()
    return elementary_abelian_2(name.count("C2"))


def group_from_json(data: dict) -> GroupData:
    name = str(data.get("name", "G")) if isinstance(data, dict) else "G"
    table = _field(data, "table", "group") if "perm_generators" not in data else None
    gens = data.get("perm_generators")
    if isinstance(table, dict):
        gens = _field(table, "perm_generators", "group")
        table = None
    omega = data.get("omega")
    if gens is not None:
        return group_from_permutations(name, gens, data.get("omega_generators"), omega)
    if omega is not None and len(omega) != len(table):
        raise MalformedInputError("group: omega must have one entry per element")
    try:
        return group_from_table(name, data.get("elements"), table, omega)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MalformedInputError):
            raise
        raise MalformedInputError(f"group: {exc}") from None


def resolve_group(ref, base: Path | None = None) -> GroupData:
    if isinstance(ref, dict):
        return group_from_json(ref)
    if isinstance(ref, GroupData):
        return ref
    if not isinstance(ref, str):
        raise MalformedInputError("group reference must be an object, a path or a name")
    path = (base or Path(".")) / ref
    if path.is_file():
        return group_from_json(read_json(path))
    g = builtin_group(ref)
    if g is None:
        raise MalformedInputError(f"unknown group {ref!r} (not a file or built-in name)")
    return g


def load_group(path: str | Path) -> GroupData:
    return group_from_json(read_json(path))


# -------------------------------------------------------------------------
# matrices and complexes


def matrix_from_json(group: GroupData, data, rows: int, cols: int, what: str) -> GroupRingMatrix:
    if not isinstance(data, list):
        raise MalformedInputError(f"{what}: matrix must be a list of rows")
    if rows == 0 and data in ([], [[]]):
        return GroupRingMatrix.zeros(group, 0, cols)
    try:
        m = GroupRingMatrix.from_entries(group, data, rows, cols)
    except MalformedInputError as exc:
        raise MalformedInputError(f"{what}: {exc}") from None
    except (TypeError, ValueError, IndexError) as exc:
        raise MalformedInputError(f"{what}: bad matrix entry ({exc})") from None
    return m


def complex_from_json(data: dict, base: Path | None = None,
                      group: GroupData | None = None) -> FreeChainComplex:
    grp = group or resolve_group(_field(data, "group", "complex"), base)
    bottom = int(data.get("bottom_degree", 0))
    ranks = [int(r) for r in _field(data, "ranks", "complex")]
    if any(r < 0 for r in ranks):
        raise MalformedInputError("complex: ranks must be nonnegative")
    bds = data.get("boundaries", [])
    if len(bds) != max(len(ranks) - 1, 0):
        raise MalformedInputError(
            f"complex: expected {max(len(ranks) - 1, 0)} boundary matrices, got {len(bds)}")
    boundaries = {}
    for i, m in enumerate(bds):
        d = bottom + i + 1
        boundaries[d] = matrix_from_json(grp, m, ranks[i], ranks[i + 1], f"boundary out of degree {d}")
    rank_map = {bottom + i: r for i, r in enumerate(ranks)}
    return FreeChainComplex.from_degrees(grp, rank_map, boundaries)


def complex_to_json(c: FreeChainComplex, group_ref=None) -> dict:
    ref = c.group.to_json() if group_ref is None else group_ref
    if c.is_empty:
        return {"group": ref, "bottom_degree": 0, "ranks": [], "boundaries": []}
    return {"group": ref, "bottom_degree": c.bottom_degree, "ranks": list(c.ranks),
            "boundaries": [m.to_json() for m in c.boundaries]}


def load_complex(path: str | Path, group: GroupData | None = None) -> FreeChainComplex:
    path = Path(path)
    return complex_from_json(read_json(path), path.parent, group)


def load_pair(path: str | Path) -> ComplexPair:
    """``{"total": complex (inline or path), "sub": {degree: [basis indices]}}``."""
    path = Path(path)
    data = read_json(path)
    total = _field(data, "total", "pair")
    t = load_complex(path.parent / total) if isinstance(total, str) else \
        complex_from_json(total, path.parent)
    sub = {int(d): tuple(int(i) for i in idx) for d, idx in _field(data, "sub", "pair").items()}
    for d, idx in sub.items():
        if any(not 0 <= i < t.rank(d) for i in idx):
            raise MalformedInputError(f"pair: basis index out of range in degree {d}")
    return ComplexPair(t, sub)


# -------------------------------------------------------------------------
# idempotents, classes, coefficient modules


def load_idempotent(path: str | Path, group: GroupData | None = None) -> GroupRingMatrix:
    """``{"group": ref, "matrix": [[entry]]}``; the result is checked to be idempotent."""
    path = Path(path)
    data = read_json(path)
    grp = group or resolve_group(_field(data, "group", "idempotent"), path.parent)
    rows = _field(data, "matrix", "idempotent")
    n = len(rows)
    e = matrix_from_json(grp, rows, n, n, "idempotent")
    if not e.is_idempotent():
        raise MalformedInputError("idempotent: matrix does not satisfy E E = E")
    return e


def load_class(path: str | Path) -> KZeroRep:
    path = Path(path)
    data = read_json(path)
    grp = resolve_group(_field(data, "group", "class"), path.parent)
    try:
        return KZeroRep.from_json(grp, data)
    except (TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, MalformedInputError):
            raise
        raise MalformedInputError(f"class: {exc}") from None


def load_involuted_group(path: str | Path) -> InvolutedAbelianGroup:
    data = read_json(path)
    try:
        return InvolutedAbelianGroup.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, MalformedInputError):
            raise
        raise MalformedInputError(f"involuted group: {exc}") from None


def coefficient_module(spec: str, group: GroupData) -> FPModule:
    """Named module (``trivial``, ``regular``, ``augmentation``) or a module file."""
    named = {"trivial": trivial_module, "regular": regular_module,
             "augmentation": augmentation_ideal}
    if spec in named:
        return named[spec](group)
    data = read_json(spec)
    try:
        mod = FPModule.from_json(group, data)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, MalformedInputError):
            raise
        raise MalformedInputError(f"module: {exc}") from None
    mod.check()
    return mod
