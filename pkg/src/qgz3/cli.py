"""Command line front end.

    qgz3 build    --rep 5,2,0 --l 3
    qgz3 verify   --rep 8,4,0 --l 5 --m 2
    qgz3 analyze  --rep 4,2,0 --l 3
    qgz3 export   --rep 6,3,0 --l 5 --out bundle.json
    qgz3 plotdata --rep 5,2,0 --l 3 --format csv

Exit status: 0 when every requested check passes, 1 on a failed check,
2 on invalid input, 3 when the output cannot be written.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from .gzbasis import RepLabel, coordinates, enumerate_basis
from .qarith import DEFAULT_ANGLE, QParam
from .repgeneric import GENERATORS, build_all, verify_generic
from .rootlimit import (
    DEFAULT_EPS,
    NonFiniteEntry,
    boundary_audit,
    casimir_structure,
    limit_oracle,
    regularize,
    verify_root,
)
from .structure import SPLITS_IN_TWO, analyze, classify, subrep_image

SCHEMA = "qgz3/1"
COMMANDS = ("build", "verify", "analyze", "export", "plotdata")
ORACLE_TOL = 1e-6

log = logging.getLogger("qgz3")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    label: RepLabel
    l: int | None
    mode: str
    m: int
    angle: float
    eps: tuple[float, ...]
    out: str | None
    fmt: str

    def to_dict(self) -> dict:
        return {
            "rep": list(self.label.top),
            "l": self.l,
            "mode": self.mode,
            "m": self.m,
            "angle": self.angle,
            "eps": list(self.eps),
        }


# --- serialization ------------------------------------------------------------


def _num(x: float) -> str:
    if math.isfinite(x):
        s = format(x, ".17g")
        return s if any(ch in s for ch in ".en") else s + ".0"
    return json.dumps(str(x))


def _encode(obj, out: list[str]):
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_num(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        out.append(f"[{_num(obj.real)}, {_num(obj.imag)}]")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for k, key in enumerate(sorted(obj, key=str)):
            if k:
                out.append(", ")
            out.append(json.dumps(str(key)) + ": ")
            _encode(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for k, item in enumerate(obj):
            if k:
                out.append(", ")
            _encode(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def serialize(artifact: dict) -> bytes:
    """Deterministic JSON: sorted keys, 17 significant digits, complex as [re, im]."""
    out: list[str] = []
    _encode({"schema": SCHEMA, **artifact}, out)
    return ("".join(out) + "\n").encode()


def operator_payload(ops: dict, basis, primed=frozenset()) -> dict:
    return {
        "basis": [[*p.key, int(i in primed)] for i, p in enumerate(basis)],
        "operators": {
            g: {"nnz": op.nnz, "entries": [[i, j, complex(v)] for i, j, v in op.sorted_entries()]}
            for g, op in ops.items()
        },
    }


def write_atomic(path: str, data: bytes):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".qgz3-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- commands ---------------------------------------------------------------


def _build(cfg: RunConfig) -> tuple[dict, bool]:
    if cfg.mode == "root":
        rep = regularize(cfg.label, cfg.l, cfg.m)
        payload = operator_payload(rep.ops, rep.mixed.patterns, rep.mixed.primed)
        payload["census"] = rep.mixed.census()
    else:
        ops = build_all(cfg.label, QParam.generic(cfg.angle))
        payload = operator_payload(ops, enumerate_basis(cfg.label))
    return payload, True


def _verify(cfg: RunConfig) -> tuple[dict, bool]:
    if cfg.mode == "generic":
        rep = verify_generic(cfg.label, QParam.generic(cfg.angle))
        return {"relations": rep.to_dict(), "passed": rep.passed}, rep.passed
    rep = regularize(cfg.label, cfg.l, cfg.m)
    root = verify_root(cfg.label, cfg.l, cfg.m, rep)
    oracle = {}
    for g in GENERATORS:
        try:
            o = limit_oracle(g, cfg.label, cfg.l, cfg.eps, cfg.m).toarray()
            oracle[g] = float(np.abs(o - rep.ops[g].toarray()).max()) if o.size else 0.0
        except NonFiniteEntry as exc:
            log.error("%s", exc)
            oracle[g] = float("inf")
    cas = casimir_structure(cfg.label, cfg.l, cfg.m, rep)
    bnd = boundary_audit(cfg.label, cfg.l, cfg.m, rep)
    oracle_ok = all(v <= ORACLE_TOL for v in oracle.values())
    passed = root.passed and oracle_ok and cas.passed and bnd["passed"]
    report = {
        "root": root.to_dict(),
        "oracle": {"max_abs_diff": oracle, "tol": ORACLE_TOL, "passed": oracle_ok},
        "casimir": cas.to_dict(),
        "boundary": bnd,
        "census": rep.mixed.census(),
        "passed": passed,
    }
    return report, passed


def _analyze(cfg: RunConfig) -> tuple[dict, bool]:
    rep = analyze(cfg.label, cfg.l if cfg.mode == "root" else None, cfg.m)
    return {"structure": rep.to_dict()}, rep.passed


def plot_rows(label: RepLabel, l: int | None, m: int = 1) -> list[dict]:
    basis = enumerate_basis(label)
    cls = ["regular"] * len(basis)
    if l is not None:
        from .rootlimit import build_mixed_basis

        mb = build_mixed_basis(label, l)
        for i in mb.self_paired:
            cls[i] = "teepee-selfpaired"
        for i in mb.primed:
            cls[i] = "primed"
        if classify(label, l) == SPLITS_IN_TWO:
            for i in subrep_image(label, l):
                cls[i] = "subrep-image"
    rows = []
    for p, c in zip(basis, cls):
        x, y, z = coordinates(p)
        rows.append({"p12": p.p12, "p22": p.p22, "p11": p.p11, "x": x, "y": y, "z": z, "class": c})
    return rows


PLOT_FIELDS = ("p12", "p22", "p11", "x", "y", "z", "class")


def _plotdata(cfg: RunConfig) -> tuple[dict, bool]:
    return {"rows": plot_rows(cfg.label, cfg.l if cfg.mode == "root" else None, cfg.m)}, True


def _export(cfg: RunConfig) -> tuple[dict, bool]:
    parts = {}
    ok = True
    for name, fn in (("build", _build), ("verify", _verify), ("analyze", _analyze), ("plotdata", _plotdata)):
        payload, passed = fn(cfg)
        parts[name] = payload
        ok = ok and passed
    parts["passed"] = ok
    return parts, ok


HANDLERS = {"build": _build, "verify": _verify, "analyze": _analyze, "export": _export, "plotdata": _plotdata}


def _csv_bytes(rows: list[dict]) -> bytes:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=PLOT_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue().encode()


# --- argument handling --------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qgz3", description=__doc__.split("\n")[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--rep", required=True, help="top row p13,p23,p33")
    ap.add_argument("--l", type=int, default=None, help="odd root order l > 2")
    ap.add_argument("--m", type=int, default=1, help="root selector, zeta = exp(2 pi i m/l)")
    ap.add_argument("--mode", choices=("generic", "root"), default=None)
    ap.add_argument("--angle", type=float, default=DEFAULT_ANGLE, help="generic q = exp(2 pi i angle)")
    ap.add_argument("--eps", default=None, help="oracle eps schedule, comma separated, decreasing")
    ap.add_argument("--out", default=None, help="output file (stdout if omitted)")
    ap.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def make_config(ns: argparse.Namespace) -> RunConfig:
    mode = ns.mode or ("root" if ns.l is not None else "generic")
    if mode == "root" and ns.l is None:
        raise UsageError("--mode root needs --l")
    try:
        label = RepLabel.parse(ns.rep, l=ns.l)
        if ns.l is not None:
            QParam.root(ns.l, ns.m)
        if mode == "generic":
            QParam.generic(ns.angle)
        eps = DEFAULT_EPS if ns.eps is None else tuple(float(x) for x in ns.eps.split(","))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if len(eps) < 2 or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise UsageError("--eps must be at least two positive, strictly decreasing values")
    if ns.fmt == "csv" and ns.command != "plotdata":
        raise UsageError("csv output is only available for plotdata")
    return RunConfig(label.with_l(None), ns.l, mode, ns.m, ns.angle, eps, ns.out, ns.fmt)


def run(command: str, cfg: RunConfig) -> int:
    payload, passed = HANDLERS[command](cfg)
    if cfg.fmt == "csv":
        data = _csv_bytes(payload["rows"])
    else:
        data = serialize({"command": command, "config": cfg.to_dict(), **payload})
    try:
        if cfg.out:
            write_atomic(cfg.out, data)
        else:
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
    except OSError as exc:
        print(f"qgz3: cannot write output: {exc}", file=sys.stderr)
        return 3
    return 0 if passed else 1


def main(argv=None) -> int:
    ap = _parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = make_config(ns)
    except UsageError as exc:
        print(f"qgz3: {exc}", file=sys.stderr)
        return 2
    return run(ns.command, cfg)


if __name__ == "__main__":
    sys.exit(main())
