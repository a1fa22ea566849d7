"""Command-line front end.

Usage::

    ultraspace audit|conjugate|expand|nuclearity --config FILE --out DIR [--threads N] [--seed S]

Configs are JSON documents with ``"schema": 1``.  Every run writes
``report.json`` and one or more CSV tables into ``--out``.  The exit code is
0 when no report entry carries a ``VIOLATED`` verdict, 1 when one does and 2
for malformed input.  See ``docs/config.md`` for the config schema.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .core import ConditionReport, Verdict, combine_verdicts, to_jsonable
from .expansion import (DEFAULT_H_GRID, analyze, classify_sequence, verify_T_continuity,
                        verify_Tinv_continuity)
from .hermite import HermiteExpansion, random_expansion
from .nuclearity import DEFAULT_CAPS, nuclearity_verdict
from .weight_func import (WeightFunction, audit_weight_matrix, from_points, gevrey, growth_class, log_power,
                          matrix_from_weight, sandwich_check, validate_weight_function, young_conjugate)
from .weight_matrix import (MATRIX_CONDITIONS, HypothesisError, WeightMatrix, check_matrix_condition,
                            constant_matrix, hermite_membership_test, matrix_from_tables)
from .weight_seq import (SEQUENCE_CONDITIONS, WeightSequence, check_condition, exp_poly, factorial_power,
                         from_index_table, from_order_table, ones)

SCHEMA = 1
WEIGHT_PROPERTIES = ("doubling", "quadratic_bound", "log_dominance", "log_convexity")
EXTRA_AUDITS = ("weight_function", "matrix_audit", "sandwich", "membership_roumieu", "membership_beurling",
                "growth_little_o_t2")

# environment overrides for grid caps
ENV_MAX_ORDER = "ULTRASPACE_MAX_ORDER"
ENV_SERIES_CAP = "ULTRASPACE_SERIES_CAP"
ENV_CONJUGATE_POINTS = "ULTRASPACE_CONJUGATE_POINTS"
ENV_INDEX_CAP = "ULTRASPACE_INDEX_CAP"


class ConfigError(ValueError):
    """The config file is malformed."""


# ---------------------------------------------------------------------------
# serialization


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj: Any, indent: int = 0) -> str:
    """JSON with floats written to 17 significant digits and sorted keys.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    pad, nxt = "  " * indent, "  " * (indent + 1)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{nxt}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, str, bool)) or v is None for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(nxt + dumps(v, indent + 1) for v in obj) + "\n" + pad + "]"
    return dumps(to_jsonable(obj), indent)


def _csv_cell(v: Any) -> str:
    if isinstance(v, float):
        return _fmt_float(v).strip('"')
    if isinstance(v, (list, tuple)):
        return " ".join(str(int(x)) for x in v)
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_csv_cell(v) for v in r])


def _env_int(name: str, default: int | None) -> int | None:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"environment variable {name} must be an integer") from exc


# ---------------------------------------------------------------------------
# object builders


def _kind(desc: dict) -> Any:
    if not isinstance(desc, dict):
        raise ConfigError("definition must be a JSON object")
    return desc.get("kind", desc.get("family"))


def build_weight(desc: dict) -> WeightFunction:
    """Weight definition: ``{"kind": "gevrey", "s": 2}``, ``{"kind": "log_power", "beta": 2}``
    or ``{"kind": "table", "points": [[t, omega], ...]}``."""
    kind = _kind(desc)
    if kind == "gevrey":
        return gevrey(float(desc["s"]))
    if kind == "log_power":
        return log_power(float(desc["beta"]))
    if kind in ("table", "points"):
        return from_points(desc["points"], name=desc.get("name", "table"))
    raise ConfigError(f"unknown weight kind {kind!r}")


def build_sequence(desc: dict, d: int = 1) -> WeightSequence:
    """Sequence definition: ``factorial_power`` (``s``), ``exp_poly`` (``exponents`` as
    ``[[k, c_k], ...]`` meaning ``log M_p = sum c_k p^k``), ``ones`` or ``table``
    (``entries`` as ``[[alpha, log M_alpha], ...]``)."""
    kind = _kind(desc)
    d = int(desc.get("d", d))
    if kind == "factorial_power":
        return factorial_power(float(desc["s"]), d)
    if kind == "exp_poly":
        return exp_poly(desc.get("exponents", desc.get("terms")), d)
    if kind == "ones":
        return ones(d)
    if kind == "table":
        entries = desc["entries"]
        if entries and not isinstance(entries[0], (list, tuple)):
            return from_order_table(entries, d, name=desc.get("name", "table"))
        return from_index_table([(a, v) for a, v in entries], d, name=desc.get("name", "table"))
    raise ConfigError(f"unknown sequence kind {kind!r}")


FIXTURES: dict[str, dict] = {
    "gevrey1": {"kind": "from_weight", "weight": {"kind": "gevrey", "s": 1}},
    "gevrey2": {"kind": "from_weight", "weight": {"kind": "gevrey", "s": 2}},
    "gevrey3": {"kind": "from_weight", "weight": {"kind": "gevrey", "s": 3}},
    "log_power1.5": {"kind": "from_weight", "weight": {"kind": "log_power", "beta": 1.5}},
    "log_power2": {"kind": "from_weight", "weight": {"kind": "log_power", "beta": 2}},
    "exp_p3": {"kind": "constant", "sequence": {"kind": "exp_poly", "exponents": [[3, 1]]}},
    "factorial": {"kind": "constant", "sequence": {"kind": "factorial_power", "s": 1}},
    "ones": {"kind": "constant", "sequence": {"kind": "ones"}},
}


class Subject:
    """Weight, sequence or matrix described by a config entry; the matrix is built lazily.

    Accepted forms are a fixture reference ``{"fixture": name}``, a matrix
    definition (``from_weight``, ``constant``, ``per_lambda_table``), a bare
    ``{"kind": "weight", "weight": ...}`` or ``{"kind": "sequence", "sequence": ...}``.
    Fixture references may override ``d`` and ``lambda_grid``.
    """

    def __init__(self, desc: dict):
        if not isinstance(desc, dict):
            raise ConfigError("subject must be an object")
        if "fixture" in desc:
            name = desc["fixture"]
            if name not in FIXTURES:
                raise ConfigError(f"unknown fixture {name!r}; known: {sorted(FIXTURES)}")
            desc = {**FIXTURES[name], **{k: v for k, v in desc.items() if k != "fixture"}}
        self.desc = desc
        self.kind = desc.get("kind")
        if self.kind not in ("from_weight", "weight", "constant", "sequence", "per_lambda_table"):
            raise ConfigError("subject kind must be 'from_weight', 'constant', 'per_lambda_table', "
                              "'weight' or 'sequence'")
        self.d = int(desc.get("d", 1))
        lams = desc.get("lambda_grid", desc.get("lambdas"))
        self.lambdas = None if lams is None else [float(v) for v in lams]
        self.weight = build_weight(desc["weight"]) if self.kind in ("from_weight", "weight") else None
        self.seq = build_sequence(desc["sequence"], self.d) if self.kind in ("constant", "sequence") else None
        self._matrix: WeightMatrix | None = None

    @property
    def matrix(self) -> WeightMatrix:
        if self._matrix is None:
            if self.kind == "sequence":
                raise ConfigError("a plain sequence subject has no matrix; use kind 'constant'")
            if self.weight is not None:
                kw = {} if self.lambdas is None else {"lambda_grid": self.lambdas}
                self._matrix = matrix_from_weight(self.weight, d=self.d, **kw)
            elif self.kind == "per_lambda_table":
                tables = {float(k): build_sequence({"kind": "table", "entries": v}, self.d)
                          for k, v in self.desc["tables"].items()}
                self._matrix = matrix_from_tables(tables, self.d)
            else:
                self._matrix = constant_matrix(self.seq, self.lambdas or (1.0,))
        return self._matrix

    def describe(self) -> dict:
        return {"desc": self.desc, "d": self.d}


def build_function(desc: dict, seed: int | None) -> HermiteExpansion:
    """An expansion file ``{"d": d, "coeffs": [[gamma, re, im], ...]}`` or a generator
    ``{"type": "basis", "gamma": ...}``, ``{"type": "zero", "d": ...}``,
    ``{"type": "random", "d": ..., "degree": ...}`` (seeded by ``--seed``)."""
    if "coeffs" in desc:
        return HermiteExpansion.from_json(desc)
    typ = desc.get("type")
    if typ == "basis":
        return HermiteExpansion.basis(desc["gamma"])
    if typ == "zero":
        return HermiteExpansion.zero(int(desc.get("d", 1)))
    if typ == "random":
        s = desc.get("seed", seed)
        return random_expansion(int(desc.get("d", 1)), int(desc["degree"]), np.random.default_rng(s))
    raise ConfigError(f"unknown function type {typ!r}")


# ---------------------------------------------------------------------------
# helpers


def _map(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _error_report(cid: str, exc: Exception) -> ConditionReport:
    return ConditionReport(cid, Verdict.INCONCLUSIVE, details={"error": f"{type(exc).__name__}: {exc}"})


def _summary(entries: Sequence[tuple[str, Verdict]]) -> dict:
    counts = {v.value: 0 for v in Verdict}
    for _, v in entries:
        counts[v.value] += 1
    return {"counts": counts, "violated": counts["VIOLATED"] > 0, "warning": counts["INCONCLUSIVE"] > 0}


def _finish(out: Path, command: str, config: dict, args, body: dict, entries) -> int:
    summary = _summary(entries)
    report = {"schema": SCHEMA, "command": command, "version": __version__, "config": config,
              "run": {"threads": args.threads, "seed": args.seed}, "summary": summary, **body}
    (out / "report.json").write_text(dumps(to_jsonable(report)) + "\n", encoding="utf-8")
    if summary["warning"]:
        print("warning: some verdicts are INCONCLUSIVE", file=sys.stderr)
    return 1 if summary["violated"] else 0


# ---------------------------------------------------------------------------
# commands


def _sandwich_samples(d: int, n: int = 1000) -> np.ndarray:
    """``n`` points with log-spaced norms in ``[1e-2, 1e12]`` along fixed positive directions."""
    radii = np.geomspace(1e-2, 1e12, n)
    if d == 1:
        return radii.reshape(-1, 1)
    dirs = np.abs(np.random.default_rng(0).normal(size=(n, d)))
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True) * radii[:, None]


def _audit_one(subject: Subject, cond: str, lambdas: list[float], max_order: int | None) -> ConditionReport:
    try:
        if cond in WEIGHT_PROPERTIES or cond == "weight_function":
            if subject.weight is None:
                raise ConfigError(f"{cond} needs a weight subject")
            rep = validate_weight_function(subject.weight)
            if cond == "weight_function":
                return rep
            return next(r for r in rep.sub_reports if r.condition_id == cond)
        if cond in SEQUENCE_CONDITIONS:
            kw = {} if max_order is None else {"max_order": max_order}
            if subject.kind == "sequence":
                return check_condition(subject.seq, cond, **kw)
            subs = [check_condition(subject.matrix.sequence(lam), cond, **kw) for lam in lambdas]
            for lam, r in zip(lambdas, subs):
                r.tested_range["lambda"] = lam
            return ConditionReport(cond, combine_verdicts([r.verdict for r in subs], "all"),
                                   tested_range={"lambdas": lambdas}, sub_reports=subs)
        if cond in MATRIX_CONDITIONS:
            return check_matrix_condition(subject.matrix, cond, max_order=max_order, lambdas=lambdas)
        if cond == "matrix_audit":
            return audit_weight_matrix(subject.matrix, lambdas=lambdas)
        if cond == "sandwich":
            if subject.weight is None:
                raise ConfigError("sandwich needs a weight subject")
            ts = _sandwich_samples(subject.d)
            subs = [sandwich_check(subject.weight, subject.matrix, lam, ts) for lam in lambdas]
            wit = {}
            if all("B" in r.witnesses for r in subs):
                wit = {"B_max": max(r.witnesses["B"] for r in subs), "C_max": max(r.witnesses["C"] for r in subs)}
            return ConditionReport("sandwich", combine_verdicts([r.verdict for r in subs], "all"), wit,
                                   tested_range={"lambdas": lambdas, "samples": 1000}, sub_reports=subs)
        if cond in ("membership_roumieu", "membership_beurling"):
            return hermite_membership_test(subject.matrix, cond.split("_")[1])
        if cond == "growth_little_o_t2":
            if subject.weight is None:
                raise ConfigError("growth_little_o_t2 needs a weight subject")
            cls, rep = growth_class(subject.weight, 0.5)
            rep.witnesses["class"] = None if cls is None else cls.value
            return rep
    except (ConfigError, KeyError):
        raise
    except (ValueError, HypothesisError, ArithmeticError) as exc:
        return _error_report(cond, exc)
    raise ConfigError(f"unknown condition {cond!r}")


def cmd_audit(config: dict, out: Path, args) -> int:
    subject = Subject(config.get("subject", {}))
    conds = list(config.get("conditions", []))
    known = set(SEQUENCE_CONDITIONS) | set(MATRIX_CONDITIONS) | set(WEIGHT_PROPERTIES) | set(EXTRA_AUDITS)
    bad = [c for c in conds if c not in known]
    if bad:
        raise ConfigError(f"unknown conditions {bad}; known: {sorted(known)}")
    lambdas = [float(v) for v in config.get("lambdas", [1.0])]
    max_order = _env_int(ENV_MAX_ORDER, config.get("max_order"))
    reports = _map(lambda c: _audit_one(subject, c, lambdas, max_order), conds, args.threads)
    rows = []
    for r in reports:
        for k, v in sorted(to_jsonable(r.witnesses).items()):
            # structured witnesses (per-probe tables) live in report.json only
            rows.append([r.condition_id, r.verdict.value, k, "report.json" if isinstance(v, (dict, list)) else v])
        if not r.witnesses:
            rows.append([r.condition_id, r.verdict.value, "", ""])
    write_csv(out / "witnesses.csv", ["condition", "verdict", "witness", "value"], rows)
    body = {"subject": subject.describe(), "grids": {"lambdas": lambdas, "max_order": max_order},
            "reports": [r.to_dict() for r in reports]}
    return _finish(out, "audit", config, args, body, [(r.condition_id, r.verdict) for r in reports])


def cmd_conjugate(config: dict, out: Path, args) -> int:
    desc = config.get("weight")
    if desc is None:
        raise ConfigError("conjugate needs a 'weight' entry")
    w = build_weight(desc)
    rep = validate_weight_function(w)
    if rep.verdict == Verdict.VIOLATED:
        raise ValueError(f"weight {w.name} fails validation: "
                         + ", ".join(r.condition_id for r in rep.sub_reports if r.violated))
    s_max = float(config.get("s_max", 10.0))
    n = _env_int(ENV_CONJUGATE_POINTS, int(config.get("points", 101)))
    if s_max <= 0 or n < 2:
        raise ConfigError("s_max must be positive and points at least 2")
    s = np.linspace(0.0, s_max, n)
    vals = w.conjugate(s)
    u = w.conjugate.argmax(s)
    table = young_conjugate(w, s_max)
    write_csv(out / "conjugate.csv", ["s", "phi_star", "argmax_t"],
              [[float(a), float(b), float(math.exp(c))] for a, b, c in zip(s, vals, u)])
    body = {"weight": {"name": w.name, "family": w.family, "params": w.params},
            "grids": {"s_max": s_max, "points": n, "table_points": int(table.s_grid.size)},
            "convexified": bool(table.convexified), "max_convexification_change": table.max_change,
            "reports": [rep.to_dict()]}
    return _finish(out, "conjugate", config, args, body, [(rep.condition_id, rep.verdict)])


def cmd_expand(config: dict, out: Path, args) -> int:
    fspec = config.get("function")
    if fspec is None:
        raise ConfigError("expand needs a 'function' entry")
    f = build_function(fspec, args.seed)
    subject = Subject(config.get("matrix", {}))
    M = subject.matrix
    if M.d != f.d:
        raise ConfigError("function and matrix dimensions differ")
    mode = config.get("mode", "roumieu")
    if mode not in ("roumieu", "beurling"):
        raise ConfigError("mode must be 'roumieu' or 'beurling'")
    lam = float(config.get("lambda", 1.0))
    index_cap = _env_int(ENV_INDEX_CAP, config.get("index_cap"))
    hs = [float(v) for v in config.get("hs", DEFAULT_H_GRID)]
    xi = analyze(f)
    coeffs = [[list(g), complex(c)] for g, c in sorted(xi.coeffs.items())]
    write_csv(out / "coefficients.csv", ["gamma", "re", "im", "abs"],
              [[g, c.real, c.imag, abs(c)] for g, c in coeffs])
    units = [
        lambda: classify_sequence(xi, M, mode, hs=hs),
        lambda: verify_T_continuity(f, M, mode, lam=lam, index_cap=index_cap),
        lambda: verify_Tinv_continuity(xi, M, mode, lam=lam, index_cap=index_cap),
    ]

    def run(u):
        try:
            return u()
        except (ValueError, HypothesisError, ArithmeticError) as exc:
            return _error_report("expand", exc)

    member, t_rep, tinv_rep = _map(run, units, args.threads)
    margins = [[r.condition_id, r.verdict.value, r.witnesses.get("min_log_margin", r.witnesses.get("log_margin"))]
               for r in (t_rep, tinv_rep)]
    write_csv(out / "margins.csv", ["check", "verdict", "log_margin"], margins)
    body = {"function": {"d": f.d, "max_degree": f.max_degree, "desc": fspec}, "subject": subject.describe(),
            "grids": {"lambda": lam, "hs": hs, "index_cap": index_cap,
                      "lambdas": [float(v) for v in M.lambda_grid]},
            "coefficients": [[g, c.real, c.imag] for g, c in coeffs],
            "membership": member.verdict.value, "reports": [member.to_dict(), t_rep.to_dict(), tinv_rep.to_dict()]}
    entries = [(r.condition_id, r.verdict) for r in (member, t_rep, tinv_rep)]
    return _finish(out, "expand", config, args, body, entries)


def cmd_nuclearity(config: dict, out: Path, args) -> int:
    subject = Subject(config.get("matrix", {}))
    mode = config.get("mode", "beurling")
    if mode not in ("roumieu", "beurling"):
        raise ConfigError("mode must be 'roumieu' or 'beurling'")
    j_values = [int(v) for v in config.get("j_values", [1, 2, 3])]
    cap = _env_int(ENV_SERIES_CAP, config.get("cap"))
    rep = nuclearity_verdict(subject.matrix, mode, j_values, cap)
    rows = []
    for r in rep.reports:
        if not r.condition_id.startswith("series_"):
            continue
        j = r.tested_range["j"]
        for sub in r.sub_reports:
            ell = sub.details["ell"]
            for n, m in enumerate(sub.details["per_order_log_mass"]):
                rows.append([j, ell, n, float(m)])
    write_csv(out / "series.csv", ["j", "ell", "order", "log_mass"], rows)
    body = {"subject": subject.describe(), "nuclearity": _strip(rep.to_dict(), _TABLE_KEYS),
            "grids": {**rep.grids, "default_caps": DEFAULT_CAPS}}
    # top-level verdicts of each audit; per-candidate series rows are diagnostics
    entries = [(r.condition_id, r.verdict) for r in rep.reports]
    if rep.verdict.value == "NOT_NUCLEAR":
        entries.append(("nuclearity", Verdict.VIOLATED))
    return _finish(out, "nuclearity", config, args, body, entries)


_TABLE_KEYS = ("per_order_log_mass", "log_partial_sums")


def _strip(obj: Any, keys: Sequence[str]) -> Any:
    """Drop bulky per-order arrays that are written to CSV instead."""
    if isinstance(obj, dict):
        return {k: _strip(v, keys) for k, v in obj.items() if k not in keys}
    if isinstance(obj, list):
        return [_strip(v, keys) for v in obj]
    return obj


COMMANDS = {"audit": cmd_audit, "conjugate": cmd_conjugate, "expand": cmd_expand, "nuclearity": cmd_nuclearity}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ultraspace", description="Audits and diagnostics for weight matrices, "
                                "Hermite expansions and nuclearity.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        q = sub.add_parser(name)
        q.add_argument("--config", required=True, type=Path, help="JSON config file")
        q.add_argument("--out", required=True, type=Path, help="output directory")
        q.add_argument("--threads", type=int, default=1, help="worker threads")
        q.add_argument("--seed", type=int, default=0, help="seed for random inputs")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = json.loads(args.config.read_text(encoding="utf-8"))
        if not isinstance(config, dict):
            raise ConfigError("config must be a JSON object")
        if config.get("schema", SCHEMA) != SCHEMA:
            raise ConfigError(f"unsupported schema {config.get('schema')!r}")
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](config, args.out, args)
    except (OSError, json.JSONDecodeError, ConfigError, KeyError, TypeError) as exc:
        print(f"ultraspace {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"ultraspace {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
