"""Command-line front end.

Field specifications are flat ``key=value`` tokens, for example::

    p=2 f=1 e=2 theta=[-1]

Keys: p, f (default 1), m (modulus of F_q, constant term first), e, theta
(coefficients of θ, constant term first), and optional precision overrides
N, M, D.  Exit status: 0 pass, 1 a check failed, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
import time
from dataclasses import asdict, dataclass, field

from .bkring import TCMinusElement, TPElement, frobenius_phi, tc_to_tp
from .checks import DEFAULT_SEED, CheckResult, FieldRun, run_field, run_global
from .coeff import PrimeParams
from .errors import TpfglError, ValidationError
from .fgl import FormalGroupLaw, n_series, p_height_mod_p
from .localfield import LocalFieldData, validate_eisenstein
from .orientation import (
    Precision,
    build_tc_fgl_mod_p,
    build_tp_fgl_mod_p,
    default_suite,
    precision_policy,
    s_ring,
    v1_image_tc,
)
from .series import BaseSeries, _MultiSeries, format_z_poly

SCHEMA_VERSION = 1

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


# field specs ------------------------------------------------------------------


class SpecSyntaxError(ValidationError):
    """A field specification that does not parse; carries a 1-based location."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line, self.column = line, column


@dataclass(frozen=True)
class FieldSpec:
    p: int
    e: int
    theta: tuple
    f: int = 1
    m: tuple | None = None
    N: int | None = None
    M: int | None = None
    D: int | None = None

    def precision(self) -> Precision:
        policy = precision_policy(self.p, self.e, self.D)
        return Precision(
            self.N if self.N is not None else policy.N,
            self.M if self.M is not None else policy.M,
            policy.D,
        )

    def field(self, N: int | None = None) -> LocalFieldData:
        """The validated field data at p-adic precision N (default: what the run needs)."""
        if N is None:
            N = max(self.precision().N, precision_policy(self.p, self.e, self.D).N)
        return validate_eisenstein(PrimeParams(self.p, N, self.f, self.m), self.e, list(self.theta))

    def echo(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items() if v is not None}

    def text(self) -> str:
        parts = [f"p={self.p}", f"f={self.f}"]
        if self.m is not None:
            parts.append(f"m=[{','.join(map(str, self.m))}]")
        parts += [f"e={self.e}", f"theta=[{','.join(map(str, self.theta))}]"]
        parts += [f"{k}={getattr(self, k)}" for k in "NMD" if getattr(self, k) is not None]
        return " ".join(parts)


_TOKEN = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)=(-?\d+|\[[^\]\n]*\])")
_INT = re.compile(r"\s*(-?\d+)\s*")
_SCALAR_KEYS = {"p", "f", "e", "N", "M", "D"}
_LIST_KEYS = {"theta", "m"}


def _location(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def _parse_list(text: str, raw: str, start: int) -> tuple:
    inner = raw[1:-1]
    if not inner.strip():
        raise SpecSyntaxError("empty list", *_location(text, start))
    out, offset = [], start + 1
    for piece in inner.split(","):
        m = _INT.fullmatch(piece)
        if not m:
            col = offset + len(piece) - len(piece.lstrip())
            raise SpecSyntaxError(f"expected an integer, found {piece.strip()!r}", *_location(text, col))
        out.append(int(m.group(1)))
        offset += len(piece) + 1
    return tuple(out)


def parse_field_spec(text: str) -> FieldSpec:
    """Parse and validate a field specification.

    Syntax problems raise SpecSyntaxError with line and column; semantic
    problems (p not prime, θ(0) not a unit, ...) raise ValidationError.
    """
    values: dict = {}
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            end = pos
            while end < len(text) and not text[end].isspace():
                end += 1
            raise SpecSyntaxError(f"expected key=value, found {text[pos:end]!r}", *_location(text, pos))
        key, raw = m.group(1), m.group(2)
        if key in values:
            raise SpecSyntaxError(f"duplicate key {key!r}", *_location(text, pos))
        if key in _SCALAR_KEYS:
            if raw.startswith("["):
                raise SpecSyntaxError(f"{key} takes an integer, not a list", *_location(text, m.start(2)))
            values[key] = int(raw)
        elif key in _LIST_KEYS:
            if not raw.startswith("["):
                raise SpecSyntaxError(f"{key} takes a bracketed list like [1,2]", *_location(text, m.start(2)))
            values[key] = _parse_list(text, raw, m.start(2))
        else:
            raise SpecSyntaxError(f"unknown key {key!r}", *_location(text, pos))
        pos = m.end()
        if pos < len(text) and not text[pos].isspace():
            raise SpecSyntaxError("expected whitespace between tokens", *_location(text, pos))
    for key in ("p", "e", "theta"):
        if key not in values:
            raise SpecSyntaxError(f"missing required key {key!r}", *_location(text, len(text)))
    spec = FieldSpec(**values)
    for key in ("N", "M", "D"):
        v = getattr(spec, key)
        if v is not None and v < (0 if key == "M" else 1):
            raise ValidationError(f"{key} = {v} is out of range")
    if spec.D is not None and spec.D < spec.p:
        raise ValidationError(f"D = {spec.D} must be at least p = {spec.p}")
    spec.field(1)  # prime, modulus and Eisenstein checks
    return spec


# result documents ----------------------------------------------------------------


def _sorted_entries(entries: list) -> list:
    # descending lexicographic order on exponent tuples, so X comes before Y
    return sorted(entries, key=lambda item: item[0], reverse=True)


def encode_series(s: _MultiSeries) -> list:
    return _sorted_entries([[list(mono), str(c)] for mono, c in s.coefficient_map().items()])


def encode_base(s: BaseSeries) -> str:
    return format_z_poly(s.terms)


def encode_element(el: TCMinusElement | TPElement) -> list:
    return _sorted_entries(
        [[list(m) if isinstance(m, tuple) else [m], encode_base(c)] for m, c in el.terms.items()]
    )


@dataclass
class ResultDocument:
    command: str
    inputs: dict = field(default_factory=dict)
    precision: dict | None = None
    series: dict = field(default_factory=dict)
    elements: dict = field(default_factory=dict)
    reports: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    fields: list = field(default_factory=list)
    timing: dict | None = None
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks) and all(f.get("passed", True) for f in self.fields)

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["timing"] is None:
            del d["timing"]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ResultDocument:
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {d.get('schema_version')!r}")
        return cls(**{k: d.get(k) for k in cls.__dataclass_fields__ if k in d})


def export(doc: ResultDocument, fmt: str = "json") -> bytes:
    """Deterministic serialization; identical documents give identical bytes."""
    if fmt != "json":
        raise ValueError(f"unsupported format {fmt!r}")
    text = json.dumps(doc.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def parse_document(data: bytes | str) -> ResultDocument:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return ResultDocument.from_dict(json.loads(data))


def _checks(results: list[CheckResult]) -> list:
    return [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in results]


def _height_entry(law: FormalGroupLaw) -> str:
    h = p_height_mod_p(law)
    return h.status + (f", leading coefficient {encode_base(h.leading)}" if h.leading is not None else "")


def fgl_document(spec: FieldSpec, target: str) -> ResultDocument:
    L, prec = spec.field(), spec.precision()
    F = build_tc_fgl_mod_p(L, prec=prec)
    law = F if target == "tc" else build_tp_fgl_mod_p(L, prec=prec, F=F)
    return ResultDocument(
        command=f"fgl --target {target}",
        inputs=spec.echo(),
        precision=prec.as_dict(),
        series={"F" if target == "tc" else "G": encode_series(law.F)},
        reports={"ring": law.ring.describe(), "height": _height_entry(law)},
    )


def pseries_document(spec: FieldSpec, target: str, n: int | None) -> ResultDocument:
    L, prec = spec.field(), spec.precision()
    F = build_tc_fgl_mod_p(L, prec=prec)
    law = F if target == "tc" else build_tp_fgl_mod_p(L, prec=prec, F=F)
    n = spec.p if n is None else n
    s = n_series(law, n)
    return ResultDocument(
        command=f"pseries --target {target} -n {n}",
        inputs=spec.echo(),
        precision=prec.as_dict(),
        series={f"[{n}]": encode_series(s)},
        reports={"ring": law.ring.describe(), "height": _height_entry(law)},
    )


def phi_document(spec: FieldSpec) -> ResultDocument:
    L, prec = spec.field(), spec.precision()
    ring = s_ring(L, prec)
    v1 = v1_image_tc(L, ring)
    x, t = TCMinusElement.x(L, ring), TCMinusElement.t(L, ring)
    return ResultDocument(
        command="phi",
        inputs=spec.echo(),
        precision=prec.as_dict(),
        elements={
            "E_L": encode_element(TCMinusElement.scalar(L, ring, L.eisenstein_in(ring))),
            "phi(x)": encode_element(frobenius_phi(x)),
            "phi(t)": encode_element(frobenius_phi(t)),
            "v1_tc": encode_element(v1),
            "v1_tp_via_phi": encode_element(frobenius_phi(v1)),
            "v1_tp_via_localization": encode_element(tc_to_tp(v1)),
        },
    )


def _field_entry(run: FieldRun, with_series: bool) -> dict:
    entry = {
        "label": run.label,
        "field": run.field.describe(),
        "passed": run.passed,
        "checks": _checks(run.checks),
    }
    r = run.report
    if r is not None:
        entry["precision"] = r.precision.as_dict()
        entry["heights"] = {"F": _height_entry(r.F), "G": _height_entry(r.G)}
        entry["elements"] = {
            "v1_tc": encode_element(r.v1_tc),
            "v1_tp_via_phi": encode_element(r.v1_tp),
            "v1_tp_via_localization": encode_element(r.v1_tp_localization),
        }
        if with_series:
            entry["series"] = {
                "F": encode_series(r.F.F),
                "G": encode_series(r.G.F),
                "[p]_F": encode_series(n_series(r.F, r.F.ring.params.p)),
                "[p]_G": encode_series(n_series(r.G, r.G.ring.params.p)),
            }
    return entry


def verify_document(
    specs: list[tuple[str, FieldSpec]],
    seed: int = DEFAULT_SEED,
    corrupt: bool = False,
    with_series: bool = False,
    timing: bool = False,
) -> ResultDocument:
    """Run the global suites and every field; fields are reported in input order."""
    times = {}
    start = time.perf_counter()
    global_checks = run_global(seed)
    times["global"] = time.perf_counter() - start
    fields = []
    for label, spec in specs:
        start = time.perf_counter()
        run = run_field(spec.field(), label, seed, corrupt=corrupt, prec=spec.precision())
        times[label] = time.perf_counter() - start
        fields.append(_field_entry(run, with_series))
    return ResultDocument(
        command="verify",
        inputs={"seed": seed, "corrupt": corrupt, "fields": [spec.text() for _, spec in specs]},
        checks=_checks(global_checks),
        fields=fields,
        timing={k: round(v, 3) for k, v in times.items()} if timing else None,
    )


def suite_specs() -> list[tuple[str, FieldSpec]]:
    return [(s.label, FieldSpec(p=s.p, e=s.e, theta=s.theta, f=s.f)) for s in default_suite()]


# argument handling -------------------------------------------------------------


def _read_spec(args) -> FieldSpec:
    if args.spec_file:
        with open(args.spec_file, encoding="utf-8") as fh:
            text = fh.read()
    elif args.spec == "-":
        text = sys.stdin.read()
    elif args.spec is not None:
        text = args.spec
    else:
        raise SpecSyntaxError("no field specification given", 1, 1)
    return parse_field_spec(text)


def _print_checks(doc: ResultDocument, out) -> None:
    for c in doc.checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}" + (f"  ({c['detail']})" if not c["passed"] else ""), file=out)
    for f in doc.fields:
        print(f"== {f['label']}  [{f['field']}]", file=out)
        if "heights" in f:
            print(f"   F: {f['heights']['F']}", file=out)
            print(f"   G: {f['heights']['G']}", file=out)
        for c in f["checks"]:
            line = f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}"
            if not c["passed"] and c["detail"]:
                line += f"  ({c['detail']})"
            print("   " + line, file=out)


def _first_failure(doc: ResultDocument) -> str | None:
    for c in doc.checks:
        if not c["passed"]:
            return f"{c['name']}: {c['detail']}"
    for f in doc.fields:
        for c in f["checks"]:
            if not c["passed"]:
                return f"{f['label']}: {c['name']}: {c['detail']}"
    return None


def _emit(doc: ResultDocument, args, out) -> None:
    data = export(doc)
    if getattr(args, "output", None):
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        out.write(data.decode("utf-8"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tpfgl",
        description="Graded rings, Frobenius and mod-p formal group laws for rings of integers O_L.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a field spec")
    p.add_argument("spec", nargs="?", help="field spec text, or - for stdin")
    p.add_argument("--spec-file")

    p = sub.add_parser("fgl", help="build F (tc) or G (tp) and report its height")
    p.add_argument("spec", nargs="?")
    p.add_argument("--spec-file")
    p.add_argument("--target", choices=("tc", "tp"), default="tc")
    p.add_argument("--json", action="store_true", help="print the result document")

    p = sub.add_parser("pseries", help="the [n]-series (default n = p) of F or G")
    p.add_argument("spec", nargs="?")
    p.add_argument("--spec-file")
    p.add_argument("--target", choices=("tc", "tp"), default="tc")
    p.add_argument("-n", type=int, default=None)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("phi", help="φ and the localization map on x, t and the image of x_(p-1)")
    p.add_argument("spec", nargs="?")
    p.add_argument("--spec-file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("verify", help="run every check on a field or on the built-in suite")
    p.add_argument("spec", nargs="?")
    p.add_argument("--spec-file")
    p.add_argument("--suite", action="store_true", help="use the built-in suite of seven fields")
    p.add_argument("--corrupt", action="store_true", help="add a deliberately broken fixture (self-test)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--json", action="store_true")
    p.add_argument("--timing", action="store_true", help="include wall-clock timings (not byte-stable)")

    p = sub.add_parser("export", help="write the full verification document for a field or the suite")
    p.add_argument("spec", nargs="?")
    p.add_argument("--spec-file")
    p.add_argument("--suite", action="store_true")
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("-o", "--output", help="write to a file instead of stdout")
    return parser


def _print_document(doc: ResultDocument, out) -> None:
    for key, value in doc.reports.items():
        print(f"{key}: {value}", file=out)
    for name, entries in doc.series.items():
        ordered = sorted(entries, key=lambda item: (sum(item[0]), [-e for e in item[0]]))
        print(f"{name} = " + (" + ".join(f"({c})*{_mono(m, 'XYZ')}" for m, c in ordered) or "0"), file=out)
    for name, entries in doc.elements.items():
        names = "xt" if all(len(m) == 2 for m, _ in entries) else "t"
        print(f"{name} = " + (" + ".join(f"({c})*{_mono(m, names)}" for m, c in entries) or "0"), file=out)


def _mono(exps, names: str) -> str:
    parts = [f"{n}^{e}" if e != 1 else n for n, e in zip(names, exps) if e]
    return "*".join(parts) or "1"


def main(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command in ("verify", "export") and (args.suite or (args.spec is None and not args.spec_file)):
            specs = suite_specs()
        else:
            spec = _read_spec(args)
            specs = [(spec.text(), spec)]
    except (ValidationError, OSError) as exc:
        where = "spec" if not getattr(args, "spec_file", None) else args.spec_file
        print(f"{where}:{exc}" if isinstance(exc, SpecSyntaxError) else f"{where}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    spec = specs[0][1]
    try:
        if args.command == "validate":
            L = spec.field()
            print(f"ok: {L.describe()}  (precision N={spec.precision().N} M={spec.precision().M} D={spec.precision().D})", file=out)
            return EXIT_PASS
        if args.command == "fgl":
            doc = fgl_document(spec, args.target)
        elif args.command == "pseries":
            doc = pseries_document(spec, args.target, args.n)
        elif args.command == "phi":
            doc = phi_document(spec)
        elif args.command == "verify":
            doc = verify_document(specs, args.seed, args.corrupt, timing=args.timing)
            if args.json:
                _emit(doc, args, out)
            else:
                _print_checks(doc, out)
            failure = _first_failure(doc)
            if failure:
                print(f"FAILED: {failure}", file=sys.stderr)
                return EXIT_FAIL
            return EXIT_PASS
        else:
            doc = verify_document(specs, args.seed, with_series=True)
            _emit(doc, args, out)
            return EXIT_PASS if doc.passed else EXIT_FAIL
    except TpfglError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.json:
        _emit(doc, args, out)
    else:
        _print_document(doc, out)
    return EXIT_PASS


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
