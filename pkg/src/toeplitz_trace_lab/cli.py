"""``toeplitz-trace-lab <command> --config <path> [--out <dir>] [--seed <int>]``.

Configs are YAML mappings. Keys shared by all commands:

``command``
    optional; when present it must match the command on the command line.
``seed``
    integer, default 0; ``--seed`` overrides it.
``quad``
    quadrature settings (``panels_per_decade``, ``nodes_per_panel``,
    ``grading_ratio``, ``abs_floor``, ``rel_tol``).

Symbols are written ``{family: PurePower, alpha: 0.2}`` (``Farima`` takes
``d``; ``PowerTimesSmooth`` also takes ``smooth_coeffs``; every family takes an
optional ``scale``). A product of pairs is given either as ``pairs: [{g: ...,
h: ...}, ...]`` or as ``g``, ``h`` and ``p`` for ``p`` equal pairs.

Per command:

* ``coeffs``: ``symbol``, ``max_lag``.
* ``trace``: pairs, ``n``, ``method`` (``exact`` or ``hutchinson``), ``probes``.
* ``limit``: pairs.
* ``rate``: pairs, ``n_grid`` (a list, or ``{dyadic: [lo, hi]}``), ``method``,
  ``probes``, ``epsilon`` (0.01), ``margin`` (0.1).
* ``verify``: ``suites`` (default all), ``c`` (2), ``options`` (per-suite
  keyword arguments).
* ``report``: ``inputs``, JSON files from earlier runs, relative to the
  config file.

The exit status is 0 exactly when every ``pass`` flag written is true, 1
when some flag is false and 2 on any error, in which case a JSON error
record goes to stdout and to ``error.json`` in the output directory.
"""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from importlib import metadata

import yaml

from .exceptions import ParseError, TraceLabError, ValidationError
from .fourier import fourier_coefficients_batch
from .io import dumps, write_csv, write_json
from .limits import exponents, limit_integral
from .proofcheck.suites import SUITES, run_suites
from .quadrature import DEFAULT_QUAD, QuadConfig
from .rates import DEFAULT_MARGIN, Method, RateExperiment, dyadic_grid, run_rate_experiment
from .symbols import SymbolPairSet, SymbolSpec
from .toeplitz import tables_for, trace_product_exact, trace_product_stochastic

log = logging.getLogger(__name__)

COMMANDS = ("coeffs", "trace", "limit", "rate", "verify", "report")
DEFAULT_SEED = 0

_COMMON = {"command", "seed", "quad"}
_PAIR_KEYS = {"pairs", "g", "h", "p"}
_ALLOWED = {
    "coeffs": _COMMON | {"symbol", "max_lag"},
    "trace": _COMMON | _PAIR_KEYS | {"n", "method", "probes"},
    "limit": _COMMON | _PAIR_KEYS,
    "rate": _COMMON | _PAIR_KEYS | {"n_grid", "method", "probes", "epsilon", "margin"},
    "verify": _COMMON | {"suites", "c", "options"},
    "report": _COMMON | {"inputs"},
}


@dataclass
class ExperimentConfig:
    command: str
    seed: int = DEFAULT_SEED
    quad: QuadConfig = DEFAULT_QUAD
    symbol: SymbolSpec = None
    max_lag: int = None
    pairs: SymbolPairSet = None
    n: int = None
    n_grid: tuple = ()
    method: Method = None
    epsilon: float = 0.01
    margin: float = DEFAULT_MARGIN
    c: float = 2.0
    suites: tuple = ()
    options: dict = field(default_factory=dict)
    inputs: tuple = ()
    base_dir: str = "."


def _key_lines(text):
    """First line (1-based) on which each top-level key appears."""
    lines = {}
    try:
        node = yaml.compose(text)
    except yaml.YAMLError:
        return lines
    if isinstance(node, yaml.MappingNode):
        for key, _ in node.value:
            lines[str(key.value)] = key.start_mark.line + 1
    return lines


class _Fields:
    """Reads fields from the raw mapping, tagging failures with key and line."""

    def __init__(self, raw, lines):
        self.raw = raw
        self.lines = lines

    def fail(self, key, message):
        raise ParseError(f"{key}: {message}", line=self.lines.get(key), field=key)

    def get(self, key, kind, default=None, required=False):
        if key not in self.raw:
            if required:
                raise ParseError(f"missing required key {key!r}", field=key)
            return default
        value = self.raw[key]
        try:
            if kind is int and (isinstance(value, bool) or float(value) != int(value)):
                raise TypeError
            return kind(value)
        except (TypeError, ValueError):
            self.fail(key, f"expected {kind.__name__}, got {value!r}")

    def build(self, key, fn, value):
        try:
            return fn(value)
        except (TraceLabError, ValueError, TypeError, KeyError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ValidationError(f"{key}: {exc}") from exc


def _symbol(fields, key, value):
    if not isinstance(value, dict):
        fields.fail(key, "a symbol is a mapping with a 'family' key")
    return fields.build(key, SymbolSpec.from_dict, value)


def _pairs(fields):
    raw = fields.raw
    if "pairs" in raw:
        if _PAIR_KEYS - {"pairs"} & set(raw):
            fields.fail("pairs", "give either 'pairs' or 'g'/'h'/'p', not both")
        records = raw["pairs"]
        if not isinstance(records, list) or not records:
            fields.fail("pairs", "expected a nonempty list of {g, h} records")
        for r in records:
            if not isinstance(r, dict) or set(r) != {"g", "h"}:
                fields.fail("pairs", "each pair is a mapping with exactly 'g' and 'h'")
        return fields.build("pairs", SymbolPairSet.from_list, records)
    if "g" not in raw or "h" not in raw:
        raise ParseError("missing 'pairs' (or 'g' and 'h')", field="pairs")
    g = _symbol(fields, "g", raw["g"])
    h = _symbol(fields, "h", raw["h"])
    p = fields.get("p", int, 1)
    if p < 1:
        fields.fail("p", "p must be at least 1")
    return fields.build("p", lambda v: SymbolPairSet.repeated(g, h, v), p)


def _method(fields, seed):
    kind = fields.get("method", str, "exact")
    probes = fields.get("probes", int, 0)
    if kind == "hutchinson":
        return fields.build("method", lambda _: Method.hutchinson(probes, seed), kind)
    return fields.build("method", lambda k: Method(k), kind)


def _n_grid(fields):
    value = fields.raw.get("n_grid")
    if value is None:
        raise ParseError("missing required key 'n_grid'", field="n_grid")
    if isinstance(value, dict):
        if set(value) != {"dyadic"} or len(value["dyadic"]) != 2:
            fields.fail("n_grid", "the mapping form is {dyadic: [lo, hi]}")
        lo, hi = value["dyadic"]
        return dyadic_grid(int(lo), int(hi))
    if not isinstance(value, list):
        fields.fail("n_grid", "expected a list of sizes or {dyadic: [lo, hi]}")
    try:
        return tuple(int(v) for v in value)
    except (TypeError, ValueError):
        fields.fail("n_grid", "sizes must be integers")


def parse_config(text, command, base_dir=".", seed=None):
    """Validate config ``text`` for ``command`` and fill in defaults."""
    if command not in COMMANDS:
        raise ValidationError(f"unknown command {command!r}; choose from {COMMANDS}")
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ParseError(f"not valid YAML: {exc}", line=line) from exc
    raw = {} if raw is None else raw
    if not isinstance(raw, dict):
        raise ParseError("the config must be a mapping of keys to values", line=1)
    fields = _Fields(raw, _key_lines(text))

    unknown = sorted(set(map(str, raw)) - _ALLOWED[command])
    if unknown:
        fields.fail(unknown[0], f"unknown key for '{command}' (unknown: {unknown})")
    if "command" in raw and raw["command"] != command:
        fields.fail("command", f"config is for {raw['command']!r}, not {command!r}")

    cfg = ExperimentConfig(command, base_dir=base_dir)
    cfg.seed = fields.get("seed", int, DEFAULT_SEED) if seed is None else int(seed)
    if cfg.seed < 0:
        fields.fail("seed", "seeds are nonnegative")
    if "quad" in raw:
        if not isinstance(raw["quad"], dict):
            fields.fail("quad", "expected a mapping")
        cfg.quad = fields.build("quad", lambda q: QuadConfig(**q), raw["quad"])

    if command == "coeffs":
        cfg.symbol = _symbol(fields, "symbol", raw.get("symbol"))
        cfg.max_lag = fields.get("max_lag", int, required=True)
        if cfg.max_lag < 0:
            fields.fail("max_lag", "must be nonnegative")
    elif command in ("trace", "limit", "rate"):
        cfg.pairs = _pairs(fields)
    if command == "trace":
        cfg.n = fields.get("n", int, required=True)
        if cfg.n < 1:
            fields.fail("n", "must be positive")
        cfg.method = _method(fields, cfg.seed)
    if command == "rate":
        cfg.n_grid = _n_grid(fields)
        cfg.method = _method(fields, cfg.seed)
        cfg.epsilon = fields.get("epsilon", float, 0.01)
        cfg.margin = fields.get("margin", float, DEFAULT_MARGIN)
        fields.build("n_grid", lambda _: _rate_experiment(cfg), None)
    if command == "verify":
        suites = raw.get("suites", list(SUITES))
        if not isinstance(suites, list) or any(s not in SUITES for s in suites):
            fields.fail("suites", f"expected a list drawn from {sorted(SUITES)}")
        cfg.suites = tuple(suites)
        cfg.c = fields.get("c", float, 2.0)
        if not cfg.c > 1.0:
            fields.fail("c", "c must exceed 1")
        options = raw.get("options", {}) or {}
        if not isinstance(options, dict) or any(k not in SUITES for k in options):
            fields.fail("options", "expected a mapping from suite name to keyword arguments")
        cfg.options = {k: dict(v or {}) for k, v in options.items()}
    if command == "report":
        inputs = raw.get("inputs")
        if not isinstance(inputs, list) or not inputs:
            fields.fail("inputs", "expected a nonempty list of JSON paths")
        cfg.inputs = tuple(str(v) for v in inputs)
    return cfg


def load_config(path, command, seed=None):
    """Read and validate the config file at ``path``."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text, command, os.path.dirname(os.path.abspath(path)), seed)


def _rate_experiment(cfg):
    return RateExperiment(cfg.pairs, cfg.n_grid, cfg.method, cfg.epsilon, cfg.quad, cfg.margin)


# --- commands ----------------------------------------------------------------


def _run_coeffs(cfg, out):
    table = fourier_coefficients_batch(cfg.symbol, cfg.max_lag, cfg.quad)
    path = os.path.join(out, "coeffs.csv")
    table.to_csv(path)
    return [path], []


def _run_trace(cfg, out):
    tables = tables_for(cfg.pairs, cfg.n, cfg.quad)
    if cfg.method.kind == "exact":
        result = trace_product_exact(cfg.pairs, cfg.n, tables)
    else:
        result = trace_product_stochastic(cfg.pairs, cfg.n, tables, cfg.method.probes,
                                          cfg.method.seed)
    path = os.path.join(out, "trace.json")
    write_json(path, result.to_dict())
    return [path], []


def _run_limit(cfg, out):
    summary = exponents(cfg.pairs)
    record = {"I": limit_integral(cfg.pairs, cfg.quad), "psi": summary.psi,
              "psi_bar": summary.psi_bar}
    path = os.path.join(out, "limit.json")
    write_json(path, record)
    return [path], []


def _run_rate(cfg, out):
    report = run_rate_experiment(_rate_experiment(cfg))
    path = os.path.join(out, "rate.json")
    write_json(path, report.to_dict())
    csv_path = os.path.join(out, "rate_errors.csv")
    report.write_errors_csv(csv_path)
    return [path, csv_path], [report.passed]


def _run_verify(cfg, out):
    options = {k: dict(v) for k, v in cfg.options.items()}
    options.setdefault("domain", {}).setdefault("c", cfg.c)
    for name in ("domain", "representation", "parts"):
        if name in cfg.suites:
            options.setdefault(name, {}).setdefault("seed", cfg.seed)
    options = {k: v for k, v in options.items() if k in cfg.suites}
    try:
        records = run_suites(cfg.suites, **options)
    except TypeError as exc:
        raise ValidationError(f"options: {exc}") from exc
    flags = [r["pass"] for r in records]
    path = os.path.join(out, "verify.json")
    write_json(path, {"checks": records, "pass": all(flags)})
    return [path], flags


def _report_rows(source, record):
    rows = []
    if "checks" in record:
        for check in record["checks"]:
            rows.append((source, check["name"], "", "pass", int(check["pass"])))
        return rows
    if "errors" in record:
        stderr = record.get("stderr") or [None] * len(record["errors"])
        for (n, err), se in zip(record["errors"], stderr):
            rows.append((source, "rate", n, "E_n", err))
            if se is not None:
                rows.append((source, "rate", n, "stderr", se))
    n = record.get("n", "")
    for key, value in sorted(record.items()):
        if isinstance(value, bool):
            rows.append((source, "summary", n, key, int(value)))
        elif isinstance(value, (int, float)) and key != "n":
            rows.append((source, "summary", n, key, value))
    return rows


def _run_report(cfg, out):
    rows, flags = [], []
    for rel in cfg.inputs:
        path = rel if os.path.isabs(rel) else os.path.join(cfg.base_dir, rel)
        try:
            with open(path) as fh:
                record = json.load(fh)
        except OSError as exc:
            raise ValidationError(f"inputs: cannot read {rel}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"{rel} is not JSON: {exc.msg}", line=exc.lineno,
                             field="inputs") from exc
        if not isinstance(record, dict):
            raise ValidationError(f"inputs: {rel} does not hold a JSON object")
        if "pass" in record:
            flags.append(bool(record["pass"]))
        rows.extend(_report_rows(os.path.basename(rel), record))
    path = os.path.join(out, "report.csv")
    write_csv(path, ["source", "record", "n", "quantity", "value"],
              [tuple(float(v) if isinstance(v, float) else v for v in r) for r in rows])
    return [path], flags


RUNNERS = {
    "coeffs": _run_coeffs,
    "trace": _run_trace,
    "limit": _run_limit,
    "rate": _run_rate,
    "verify": _run_verify,
    "report": _run_report,
}


def dispatch(cfg, out="."):
    """Run ``cfg.command``, writing artifacts under ``out``.

    Returns ``(exit_status, written_paths)``; the status is 0 iff every pass
    flag produced is true.
    """
    os.makedirs(out, exist_ok=True)
    paths, flags = RUNNERS[cfg.command](cfg, out)
    meta = {
        "command": cfg.command,
        "seed": cfg.seed,
        "version": _version(),
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    # wall-clock data lives here so the artifacts above stay byte-stable
    write_json(os.path.join(out, "metadata.json"), meta)
    return (0 if all(flags) else 1), paths


def _version():
    try:
        return metadata.version("toeplitz-trace-lab")
    except metadata.PackageNotFoundError:
        return "unknown"


def _error_record(exc):
    record = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ParseError):
        record["line"] = exc.line
        record["field"] = exc.field
    return record


def build_parser():
    parser = argparse.ArgumentParser(
        prog="toeplitz-trace-lab",
        description="Traces of Toeplitz products with singular symbols: "
                    "coefficients, limits, convergence rates and checks.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="YAML experiment config")
    parser.add_argument("--out", default=".", help="output directory (default: .)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.command, args.seed)
        status, paths = dispatch(cfg, args.out)
    except (TraceLabError, ValueError, ArithmeticError, RuntimeError) as exc:
        record = _error_record(exc)
        sys.stdout.write(dumps(record))
        try:
            os.makedirs(args.out, exist_ok=True)
            write_json(os.path.join(args.out, "error.json"), record)
        except OSError:
            pass
        return 2
    sys.stdout.write(dumps({"command": args.command, "outputs": paths,
                            "pass": status == 0}))
    return status


if __name__ == "__main__":
    sys.exit(main())
