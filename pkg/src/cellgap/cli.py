"""Command-line front end.

Every subcommand prints a JSON report (or writes it to ``--report``).  Exit
status is 0 whenever an answer was computed, including "not silent",
"unknown" and refused preconditions, and 2 for malformed input.  Reports
contain only content derived from the inputs, so repeated runs are
byte-identical; ``--timing`` prints the elapsed time to stderr instead.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .complex import (InvalidComplexError, cohomology_local, homology,
                      require_valid, validate)
from .config import Config, load_config
from .groupring import GroupData, GroupRingMatrix, MalformedInputError
from .io import (coefficient_module, complex_from_json, complex_to_json, dumps, file_hash,
                 load_class, load_complex, load_idempotent, load_involuted_group, load_pair,
                 read_json)
from .kzero import (FreeWitness, NotSilentError, check_self_dual, class_is_trivial,
                    idempotent_fingerprint, load_registry, obstruction, tate_z2)
from .modules import FPModule
from .realize import RealizationInput, realize_finite, realize_stage
from .silence import (CounterexampleCocycle, SilenceCertificate, silent_in_degree,
                      silent_in_range, verify_certificate)
from .transform import (HomotopyCertificate, PreconditionError, cancel_gap, dualize,
                        pair_additivity, poincare_self_duality_check, product_formula_check,
                        relative_duality_check, tensor_product)

EXIT_OK = 0
EXIT_MALFORMED = 2


class _Run:
    """Per-invocation context: config, registry and the hashed input list."""

    def __init__(self, args):
        self.args = args
        self.config: Config = load_config(getattr(args, "config", None))
        self.inputs: dict[str, str] = {}
        self._registry = None

    @property
    def registry(self):
        if self._registry is None:
            self._registry = load_registry(self.config.registry)
        return self._registry

    @property
    def limits(self) -> dict:
        return {"box": self.config.box, "max_stabilization": self.config.max_stabilization}

    def note(self, name: str, path) -> Path:
        path = Path(path)
        if not path.is_file():
            raise MalformedInputError(f"{name}: no such file {path}")
        self.inputs[name] = file_hash(path)
        return path

    def complex(self, name: str = "complex"):
        return load_complex(self.note(name, getattr(self.args, name.replace("-", "_"))))


# -------------------------------------------------------------------------
# subcommands


def cmd_validate(run: _Run) -> dict:
    c = run.complex()
    return {"verdict": validate(c).to_json(), "ranks": {str(d): r for d, r in c.rank_dict().items()}}


def cmd_homology(run: _Run) -> dict:
    c = run.complex()
    require_valid(c)
    degs = [run.args.degree] if run.args.degree is not None else list(c.degrees())
    return {"homology": [homology(c, d).to_json() for d in degs]}


def cmd_cohomology(run: _Run) -> dict:
    c = run.complex()
    require_valid(c)
    spec = run.args.module
    if spec not in ("trivial", "regular", "augmentation"):
        run.note("module", spec)
    mod = coefficient_module(spec, c.group)
    res = cohomology_local(c, mod, run.args.degree)
    return {"degree": run.args.degree, "module": spec if not Path(spec).is_file() else "file",
            "group": str(res.group), "invariants": res.group.to_json()}


def cmd_silence(run: _Run) -> dict:
    c = run.complex()
    k = run.args.degree
    l = run.args.upto if run.args.upto is not None else k
    if k < 1:
        raise MalformedInputError("silence is decided only in degrees >= 1")
    rep = silent_in_range(c, k, l)
    out = rep.to_json()
    out["verdict"] = "silent" if rep.silent else "not-silent"
    return out


def cmd_obstruction(run: _Run) -> dict:
    c = run.complex()
    k = run.args.degree
    if k < 1:
        raise MalformedInputError("the obstruction is defined only in degrees >= 1")
    cert = silent_in_degree(c, k)
    r = obstruction(c, k, cert)
    e = r.positive[0]
    triv = class_is_trivial(r, run.registry, **run.limits)
    return {"class": r.to_json(), "silence": cert.to_json(), "rank_z": r.rank_z(),
            "fingerprint": idempotent_fingerprint(e).to_json(),
            "triviality": triv.to_json()}


def cmd_realize(run: _Run) -> dict:
    y = load_complex(run.note("base", run.args.base))
    e = load_idempotent(run.note("idempotent", run.args.idempotent), y.group)
    inp = RealizationInput(y, e, run.args.k, run.args.l)
    if run.args.stage is not None:
        out = realize_stage(inp, run.args.stage)
    else:
        out = realize_finite(inp)
    return {"complex": complex_to_json(out)}


def cmd_dualize(run: _Run) -> dict:
    c = run.complex()
    return {"complex": complex_to_json(dualize(c, run.args.dim, signed=run.args.signed))}


def cmd_product(run: _Run) -> dict:
    x = run.complex()
    a = run.complex("other")
    t = tensor_product(x, a)
    out = {"complex": complex_to_json(t),
           "euler_flat": {"x": x.euler_characteristic_flat(), "a": a.euler_characteristic_flat(),
                          "product": t.euler_characteristic_flat()}}
    if run.args.k is not None:
        if run.args.l is None:
            raise MalformedInputError("--k needs --l")
        out["formula"] = product_formula_check(x, run.args.k, run.args.l, a, run.registry,
                                               **run.limits).to_json()
    return out


def cmd_cancel(run: _Run) -> dict:
    c = run.complex()
    res = cancel_gap(c, run.args.k, run.args.l, stabilize=not run.args.no_stabilize, **run.limits)
    out = res.to_json()
    out["complex"] = complex_to_json(res.complex)
    out["certificate"] = res.certificate.to_json()
    return out


def cmd_pair_check(run: _Run) -> dict:
    pair = load_pair(run.note("pair", run.args.pair))
    return pair_additivity(pair, run.args.degree, run.registry, **run.limits).to_json()


def cmd_rel_duality(run: _Run) -> dict:
    w = run.complex()
    return relative_duality_check(w, run.args.dim, run.args.k, run.registry,
                                  **run.limits).to_json()


def cmd_tate(run: _Run) -> dict:
    a = load_involuted_group(run.note("group-data", run.args.group_data))
    grp = tate_z2(a, run.args.parity)
    return {"parity": run.args.parity, "group": str(grp), "invariants": grp.to_json()}


def cmd_self_dual(run: _Run) -> dict:
    if run.args.cls is not None:
        r = load_class(run.note("class", run.args.cls))
        return check_self_dual(r, run.args.dim, run.registry, **run.limits).to_json()
    if run.args.complex is None or run.args.degree is None:
        raise MalformedInputError("self-dual needs --class, or --complex with --degree")
    c = run.complex()
    return poincare_self_duality_check(c, run.args.dim, run.args.degree, run.registry,
                                       **run.limits).to_json()


def cmd_verify_certificate(run: _Run) -> dict:
    c = run.complex()
    report = read_json(run.note("certificate", run.args.certificate))
    checks = verify_report(c, report)
    return {"checks": checks, "verified": all(ok for _, ok in checks)}


# -------------------------------------------------------------------------
# certificate re-verification (matrix arithmetic only)


def _matrix(group: GroupData, data, rows: int, cols: int) -> GroupRingMatrix:
    if rows == 0 or cols == 0:
        return GroupRingMatrix.zeros(group, rows, cols)
    return GroupRingMatrix.from_entries(group, data, rows, cols)


def silence_certificate_from_json(c, data: dict) -> SilenceCertificate:
    g, k = c.group, int(data["degree"])
    if data["kind"] == "silent":
        b = _matrix(g, data["retraction"], c.rank(k), c.rank(k - 1))
        a = _matrix(g, data["contraction"], c.rank(k + 1), c.rank(k))
        return SilenceCertificate(k, True, retraction=b, contraction=a)
    cx = data["counterexample"]
    mod = FPModule.from_json(g, cx["module"])
    counter = CounterexampleCocycle(
        mod, np.array(cx["cocycle"], dtype=object), np.array(cx["relation_coeffs"], dtype=object),
        np.array(cx["functional"], dtype=object), int(cx["modulus"]), cx["origin"])
    witness = sep = None
    if "homology_witness" in data:
        witness = np.array(data["homology_witness"], dtype=object)
        sep = (np.array(data["homology_functional"]["row"], dtype=object),
               int(data["homology_functional"]["modulus"]))
    return SilenceCertificate(k, False, homology_witness=witness, homology_functional=sep,
                              counterexample=counter)


def _homotopy_from_json(source, target, data: dict) -> HomotopyCertificate:
    g = source.group

    def dec(maps, rows_of, cols_of):
        return {int(d): _matrix(g, m, rows_of(int(d)), cols_of(int(d))) for d, m in maps.items()}

    return HomotopyCertificate(
        source, target,
        dec(data["f"], target.rank, source.rank),
        dec(data["g"], source.rank, target.rank),
        dec(data["h"], lambda d: source.rank(d + 1), source.rank),
        dec(data["h_prime"], lambda d: target.rank(d + 1), target.rank))


def _witnesses(obj, path=""):
    """Yield (path, witness dict) for every free-module witness in a report."""
    if isinstance(obj, dict):
        if {"idempotent", "x", "y"} <= set(obj):
            yield path, obj
        for k in sorted(obj):
            yield from _witnesses(obj[k], f"{path}/{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _witnesses(v, f"{path}/{i}")


def _verify_witness(group: GroupData, w: dict) -> bool:
    n = len(w["idempotent"])
    t = len(w["y"])
    e = _matrix(group, w["idempotent"], n, n)
    x = _matrix(group, w["x"], n, t)
    y = _matrix(group, w["y"], t, n)
    return FreeWitness(e, x, y).verify()


def verify_report(c, report: dict) -> list[tuple[str, bool]]:
    """Re-check every certificate found in a report against complex ``c``."""
    result = report.get("result", report)
    checks: list[tuple[str, bool]] = []
    try:
        if "degrees" in result:
            for cert in result["degrees"]:
                ok = verify_certificate(c, silence_certificate_from_json(c, cert))
                checks.append((f"silence degree {cert['degree']}", ok))
        if "silence" in result and isinstance(result["silence"], dict):
            cert = result["silence"]
            checks.append((f"silence degree {cert['degree']}",
                           verify_certificate(c, silence_certificate_from_json(c, cert))))
        if "certificate" in result and "complex" in result:
            target = complex_from_json(result["complex"], group=c.group)
            hc = _homotopy_from_json(c, target, result["certificate"])
            checks.append(("homotopy equivalence", hc.verify()))
        for path, w in _witnesses(result):
            checks.append((f"free witness {path}", _verify_witness(c.group, w)))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, MalformedInputError):
            raise
        raise MalformedInputError(f"certificate: {exc!r}") from None
    if not checks:
        raise MalformedInputError("no certificate found in the report")
    return checks


# -------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cellgap", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"cellgap {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with search limits")
    common.add_argument("--report", help="write the JSON report here instead of stdout")
    common.add_argument("--out", help="write the resulting complex here (where applicable)")
    common.add_argument("--timing", action="store_true", help="print elapsed time to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("validate", cmd_validate, "check dimensions and d d = 0")
    sp.add_argument("--complex", required=True)
    sp = add("homology", cmd_homology, "homology modules and their abelian groups")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--degree", type=int)
    sp = add("cohomology", cmd_cohomology, "cohomology with local coefficients")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--module", default="trivial",
                    help="trivial, regular, augmentation or a module file")
    sp = add("silence", cmd_silence, "decide cohomology silence with certificates")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--upto", type=int, help="last degree of a range")
    sp = add("obstruction", cmd_obstruction, "projective class of the boundaries")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--degree", type=int, required=True)
    sp = add("realize", cmd_realize, "build a complex realizing an idempotent")
    sp.add_argument("--base", required=True, help="complex file for Y")
    sp.add_argument("--idempotent", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--stage", type=int)
    sp = add("dualize", cmd_dualize, "dual complex in formal dimension n")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--signed", action="store_true", help="apply the coboundary sign")
    sp = add("product", cmd_product, "tensor product, optionally with the product formula")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--other", required=True)
    sp.add_argument("--k", type=int)
    sp.add_argument("--l", type=int)
    sp = add("cancel", cmd_cancel, "remove gap cells with a homotopy certificate")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--no-stabilize", action="store_true")
    sp = add("pair-check", cmd_pair_check, "additivity over a subcomplex pair")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--degree", type=int, required=True)
    sp = add("rel-duality", cmd_rel_duality, "duality of the end homology modules")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--k", type=int)
    sp = add("tate", cmd_tate, "Z/2 Tate cohomology of an involuted abelian group")
    sp.add_argument("--group-data", required=True)
    sp.add_argument("--parity", choices=["even", "odd"], required=True)
    sp = add("self-dual", cmd_self_dual, "self-duality of a class or of a complex")
    sp.add_argument("--class", dest="cls")
    sp.add_argument("--complex")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--degree", type=int)
    sp = add("verify-certificate", cmd_verify_certificate,
             "re-check the certificates in a report by matrix arithmetic")
    sp.add_argument("--complex", required=True)
    sp.add_argument("--certificate", required=True, help="report file to check")
    return p


def run(argv=None) -> tuple[int, str, argparse.Namespace]:
    """Execute a command line; returns the exit code, the report text and the arguments."""
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        ctx = _Run(args)
        try:
            result = args.func(ctx)
            status = "ok"
        except (PreconditionError, NotSilentError) as exc:
            result = {"reason": str(exc), "degree": getattr(exc, "degree", None)}
            if isinstance(exc, NotSilentError):
                result["degree"] = exc.certificate.degree
                result["silence"] = exc.certificate.to_json()
            status = "precondition-failed"
        report = {"command": args.command, "inputs": ctx.inputs,
                  "parameters": _parameters(args), "config": ctx.config.to_json(),
                  "status": status, "result": result}
        code = EXIT_OK
    except (MalformedInputError, InvalidComplexError) as exc:
        report = {"command": args.command, "status": "malformed-input", "error": str(exc)}
        code = EXIT_MALFORMED
    text = dumps(report)
    if args.timing:
        print(f"elapsed {time.perf_counter() - start:.3f}s", file=sys.stderr)
    if code == EXIT_OK and args.out and "complex" in report["result"]:
        Path(args.out).write_text(dumps(report["result"]["complex"]))
    return code, text, args


def _parameters(args) -> dict:
    skip = {"func", "config", "report", "out", "timing", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv=None) -> int:
    code, text, args = run(argv)
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
