"""Command-line front end.

Usage:
    crrigid check-grassmannian --n 3 --p 2
    crrigid check-bochner --input form.json --emit-witness --output report.json
    crrigid check-bochner --catalog plucker --n 2 --p 2 --point random --seed 7
    crrigid check-weyl --diagonal 1,2,-3,0,0
    crrigid check-whitney --n 3
    crrigid replay report.json

Every command builds one JSON report; the text summary printed to stdout is
rendered from that report.  Set CRRIGID_LOG=DEBUG (or INFO, ...) for logs.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
import time
from fractions import Fraction

from . import __version__
from .embed import (
    NonGenericPointError,
    base_point,
    catalog,
    fundamental_forms,
    grassmannian_reference_forms,
    random_point,
    span_equal,
    whitney_pullback_check,
)
from .exactnum import ExactMatrix, format_rational
from .polyalg import GramPair, VectorForm
from .rigidity import (
    NotNormalFormError,
    PreconditionError,
    RealSymForm,
    bochner_flat,
    bochner_rigid,
    iwatani_check,
    iwatani_normal_form,
    lemma1_solve,
    verify_witness,
    weyl_rigid,
)

log = logging.getLogger("crrigid")

COMMANDS = (
    "check-bochner",
    "check-weyl",
    "fundamental-forms",
    "check-grassmannian",
    "check-whitney",
    "lemma1",
    "bochner-flat",
    "iwatani",
)

# catalog params understood on the command line
_CATALOG_PARAMS = ("n", "p", "d", "degree")


class InputError(ValueError):
    """Request does not validate; message carries the offending field path."""


# ---------------------------------------------------------------------------
# request parsing


def _field(obj, key, path):
    if not isinstance(obj, dict):
        raise InputError(f"{path}: expected an object")
    if key not in obj:
        raise InputError(f"{path}.{key}: missing")
    return obj[key]


def _parse(fn, data, path):
    try:
        return fn(data)
    except InputError:
        raise
    except (ValueError, TypeError, KeyError, ZeroDivisionError) as exc:
        msg = str(exc)
        if isinstance(exc, KeyError):
            msg = f"missing field {exc}"
        sep = "" if msg.startswith("[") else ": "
        raise InputError(f"{path}{sep}{msg}") from exc


def _load_form(payload, path="input") -> VectorForm:
    return _parse(VectorForm.from_json, _field(payload, "form", path), f"{path}.form")


def _load_grams(payload, H: VectorForm, path="input") -> GramPair | None:
    grams = payload.get("grams")
    if grams is None:
        return None
    g = _parse(ExactMatrix.from_json, _field(grams, "g", f"{path}.grams"), f"{path}.grams.g")
    G = _parse(ExactMatrix.from_json, _field(grams, "G", f"{path}.grams"), f"{path}.grams.G")
    if g.rows != H.n or G.rows != H.r:
        raise InputError(f"{path}.grams: expected g {H.n}x{H.n} and G {H.r}x{H.r}")
    return _parse(lambda _: GramPair(g, G), None, f"{path}.grams")


def build_request(args) -> dict:
    """Normalize parsed arguments into the request dict echoed in the report."""
    payload = None
    if args.input is not None:
        try:
            with open(args.input) if args.input != "-" else sys.stdin as fh:
                payload = json.load(fh)
        except OSError as exc:
            raise InputError(f"--input: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"--input: invalid JSON ({exc})") from exc
    if getattr(args, "diagonal", None):
        if payload is not None:
            raise InputError("give either --input or --diagonal, not both")
        try:
            values = [format_rational(Fraction(v)) for v in args.diagonal.split(",")]
        except ValueError as exc:
            raise InputError(f"--diagonal: {exc}") from exc
        n = len(values)
        diag = [[values[i] if i == j else "0" for j in range(n)] for i in range(n)]
        payload = {"form": {"n": n, "r": 1, "components": [diag]}}
    params = {k: getattr(args, k) for k in _CATALOG_PARAMS if getattr(args, k, None) is not None}
    cat = None
    if args.catalog is not None:
        cat = {"name": args.catalog, "params": params}
    req = {
        "command": args.command,
        "input": payload,
        "catalog": cat,
        "params": params if cat is None else {},
        "point": args.point,
        "seed": args.seed,
        "emit_witness": bool(args.emit_witness),
    }
    validate_request(req)
    return req


def validate_request(req: dict) -> None:
    cmd = req.get("command")
    if cmd not in COMMANDS:
        raise InputError(f"command: unknown command {cmd!r}")
    has_input = req.get("input") is not None
    has_cat = req.get("catalog") is not None
    if cmd in ("check-grassmannian", "check-whitney"):
        if has_input or has_cat:
            raise InputError(f"{cmd} takes --n (and --p), not --input/--catalog")
        need = ("n", "p") if cmd == "check-grassmannian" else ("n",)
        for k in need:
            if k not in req.get("params", {}):
                raise InputError(f"params.{k}: missing")
        return
    if has_input == has_cat:
        raise InputError("exactly one input source required: --input or --catalog")
    if cmd == "fundamental-forms" and not has_cat:
        raise InputError("fundamental-forms needs --catalog")
    if cmd == "check-weyl" and has_cat:
        raise InputError("check-weyl takes --input or --diagonal")
    if req.get("point") not in ("base", "random"):
        raise InputError("point: must be 'base' or 'random'")


# ---------------------------------------------------------------------------
# dispatch


def _systems(verdict) -> list:
    return [dict(name=k, **s.to_json()) for k, s in verdict.systems.items()]


def _verdict_entry(verdict, H, grams, emit_witness: bool, label: str) -> dict:
    entry = {"label": label, **verdict.to_json(emit_witness)}
    entry.pop("systems")
    if emit_witness and verdict.witness is not None:
        entry["form"] = H.to_json()
        if grams is not None:
            entry["grams"] = grams.to_json()
    return entry


def _tower(req):
    cat = req["catalog"]
    try:
        F = catalog(cat["name"], **cat["params"])
    except (ValueError, TypeError) as exc:
        raise InputError(f"catalog: {exc}") from exc
    p = base_point(F) if req["point"] == "base" else random_point(F, req["seed"])
    try:
        T = fundamental_forms(F, p, seed=req["seed"])
    except NonGenericPointError as exc:
        raise InputError(f"point: {exc}") from exc
    except ValueError as exc:
        raise InputError(f"point: {exc}") from exc
    return F, T


def _inline_or_level2(req):
    """(H, grams) from the inline form or from F^2 of the catalog embedding."""
    if req["input"] is not None:
        H = _load_form(req["input"])
        return H, _load_grams(req["input"], H)
    _, T = _tower(req)
    if not T.forms:
        raise InputError("catalog: embedding has no second fundamental form")
    return T.level(2), T.gram(2)


def _cmd_check_bochner(req, out):
    if req["input"] is not None:
        H = _load_form(req["input"])
        levels = [("input", H, _load_grams(req["input"], H))]
    else:
        _, T = _tower(req)
        out["flag"] = T.flag.to_json()
        levels = [(f"F{l}", T.level(l), T.gram(l)) for l in range(2, T.flag.height + 1)]
    out["verdicts"] = []
    for label, H, grams in levels:
        v = bochner_rigid(H, grams)
        out["verdicts"].append(_verdict_entry(v, H, grams, req["emit_witness"], label))
        out["systems"] += [dict(level=label, **s) for s in _systems(v)]


def _cmd_check_weyl(req, out):
    H = _parse(RealSymForm.from_json, _field(req["input"], "form", "input"), "input.form")
    v = weyl_rigid(H)
    out["verdicts"] = [{"label": "input", **v.to_json(False)}]
    out["verdicts"][0].pop("systems")
    out["systems"] += _systems(v)


def _cmd_fundamental_forms(req, out):
    F, T = _tower(req)
    out["flag"] = T.flag.to_json()
    out["forms"] = {f"F{l}": T.level(l).to_json() for l in range(2, T.flag.height + 1)}
    out["grams"] = {f"F{l}": T.gram(l).to_json() for l in range(2, T.flag.height + 1)}


def _cmd_check_grassmannian(req, out):
    n, p = req["params"]["n"], req["params"]["p"]
    sub = dict(req, catalog={"name": "plucker", "params": {"n": n, "p": p}}, input=None)
    _, T = _tower(sub)
    out["flag"] = T.flag.to_json()
    refs = grassmannian_reference_forms(n, p)
    out["verdicts"] = []
    for l in range(2, T.flag.height + 1):
        H, grams = T.level(l), T.gram(l)
        v = bochner_rigid(H, grams)
        entry = _verdict_entry(v, H, grams, req["emit_witness"], f"F{l}")
        entry["matches_reference"] = span_equal([H], [refs[l]]) if l in refs else None
        out["verdicts"].append(entry)
        out["systems"] += [dict(level=f"F{l}", **s) for s in _systems(v)]


def _cmd_check_whitney(req, out):
    n = req["params"]["n"]
    if n < 1:
        raise InputError("params.n: must be >= 1")
    ok, factor = whitney_pullback_check(n)
    out["pullback_identity"] = ok
    out["factor"] = factor.pretty()


def _cmd_lemma1(req, out):
    H, grams = _inline_or_level2(req)
    if H.k < 2:
        raise InputError("input.form.k: lemma1 needs degree >= 2")
    res = lemma1_solve(H, grams)
    out["lemma1"] = res.to_json()
    out["systems"].append(dict(name="lemma1", **res.system.to_json()))


def _cmd_bochner_flat(req, out):
    if req["catalog"] is not None and req["catalog"]["name"] == "iwatani_normal":
        H, grams = _normal_form(req), None
    else:
        H, grams = _inline_or_level2(req)
    out["bochner_flat"] = bochner_flat(H, grams)


def _normal_form(req) -> VectorForm:
    n = req["catalog"]["params"].get("n")
    if n is None:
        raise InputError("catalog.params.n: missing")
    return iwatani_normal_form(n)


def _cmd_iwatani(req, out):
    if req["catalog"] is not None:
        if req["catalog"]["name"] != "iwatani_normal":
            raise InputError("catalog: iwatani only knows 'iwatani_normal'")
        H, G = _normal_form(req), None
    else:
        H = _load_form(req["input"])
        G = None
        if "G" in req["input"]:
            G = _parse(ExactMatrix.from_json, req["input"]["G"], "input.G")
    try:
        res = iwatani_check(H, G)
    except NotNormalFormError as exc:
        raise InputError(f"input.form: {exc}") from exc
    out["iwatani"] = {
        "ok": res.ok,
        "r_squared": format_rational(res.r_squared) if res.r_squared is not None else None,
    }


_HANDLERS = {
    "check-bochner": _cmd_check_bochner,
    "check-weyl": _cmd_check_weyl,
    "fundamental-forms": _cmd_fundamental_forms,
    "check-grassmannian": _cmd_check_grassmannian,
    "check-whitney": _cmd_check_whitney,
    "lemma1": _cmd_lemma1,
    "bochner-flat": _cmd_bochner_flat,
    "iwatani": _cmd_iwatani,
}


def run(request: dict) -> dict:
    """Execute a validated request and return the report dict."""
    validate_request(request)
    t0 = time.perf_counter()
    result: dict = {"systems": []}
    try:
        _HANDLERS[request["command"]](request, result)
    except PreconditionError as exc:
        raise InputError(str(exc)) from exc
    systems = result.pop("systems")
    return {
        "tool": "crrigid",
        "version": __version__,
        "request": request,
        "result": result,
        "systems": systems,
        "timings": {"total_seconds": round(time.perf_counter() - t0, 6)},
    }


def verify_report_witnesses(report: dict) -> bool:
    """Reload every emitted witness and re-check gamma(H, witness) in S1 minus 0."""
    for entry in report.get("result", {}).get("verdicts", []):
        if entry.get("witness") is None:
            continue
        H = VectorForm.from_json(entry["form"])
        P = VectorForm.from_json(entry["witness"])
        grams = None
        if "grams" in entry:
            grams = GramPair(ExactMatrix.from_json(entry["grams"]["g"]), ExactMatrix.from_json(entry["grams"]["G"]))
        if not verify_witness(H, P, grams):
            return False
    return True


# ---------------------------------------------------------------------------
# output


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def render_summary(report: dict) -> str:
    """Plain-text view of a report."""
    req, res = report["request"], report["result"]
    lines = [f"crrigid {report['version']} :: {req['command']}"]
    if req.get("catalog"):
        cat = req["catalog"]
        params = ", ".join(f"{k}={v}" for k, v in sorted(cat["params"].items()))
        lines.append(f"  embedding: {cat['name']}({params}) at {req['point']} point (seed {req['seed']})")
    elif req.get("params"):
        lines.append("  params: " + ", ".join(f"{k}={v}" for k, v in sorted(req["params"].items())))
    if "flag" in res:
        f = res["flag"]
        lines.append(
            f"  flag: tangent dim {f['tangent_dim']}, type numbers {f['type_numbers']}, "
            f"height {f['height']} [{f['status']}]"
        )
    for v in res.get("verdicts", []):
        extra = ""
        if v.get("matches_reference") is not None:
            extra = ", matches reference" if v["matches_reference"] else ", DIFFERS from reference"
        lines.append(
            f"  {v['label']}: {v['status']} (solutions {v['solution_dim']}, trivial {v['kernel_dim']}{extra})"
        )
        if v.get("witness") is not None:
            lines.append(f"    witness emitted ({len(v['witness']['components'])} components)")
    if "forms" in res:
        for k, f in res["forms"].items():
            lines.append(f"  {k}: {len(f['components'])} components of degree {f['k']} in {f['n']} variables")
    if "pullback_identity" in res:
        lines.append(f"  pullback identity: {res['pullback_identity']} (factor {res['factor']})")
    if "lemma1" in res:
        lines.append(f"  lemma1: solution dim {res['lemma1']['solution_dim']}")
    if "bochner_flat" in res:
        lines.append(f"  bochner flat: {res['bochner_flat']}")
    if "iwatani" in res:
        lines.append(f"  iwatani: ok={res['iwatani']['ok']} r^2={res['iwatani']['r_squared']}")
    for s in report.get("systems", []):
        tag = f"{s['level']}/" if "level" in s else ""
        lines.append(f"  system {tag}{s['name']}: {s['rows']} x {s['cols']}, rank {s['rank']}")
    lines.append(f"  time: {report['timings']['total_seconds']:.3f}s")
    return "\n".join(lines)


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".crrigid-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--input", help="JSON payload file ('-' for stdin)")
    sp.add_argument("--catalog", help="embedding name (plucker, whitney_ball, whitney_hat, linear, veronese)")
    sp.add_argument("--n", type=int)
    sp.add_argument("--p", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--degree", type=int)
    sp.add_argument("--point", default="base", choices=("base", "random"))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--emit-witness", action="store_true", help="include witness forms in the report")
    sp.add_argument("--output", help="write the JSON report here (atomically)")
    sp.add_argument("--json", action="store_true", help="print the JSON report instead of the summary")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crrigid", description="Exact rigidity checks for CR embeddings.")
    parser.add_argument("--version", action="version", version=f"crrigid {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        sp = sub.add_parser(cmd)
        _add_common(sp)
        if cmd == "check-weyl":
            sp.add_argument("--diagonal", help="comma-separated eigenvalues of a single diagonal form")
    rp = sub.add_parser("replay", help="re-run the request echoed in a report")
    rp.add_argument("report")
    rp.add_argument("--output")
    rp.add_argument("--json", action="store_true")
    return parser


def _configure_logging() -> None:
    level = os.environ.get("CRRIGID_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.command == "replay":
            try:
                with open(args.report) as fh:
                    request = json.load(fh)["request"]
            except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
                raise InputError(f"report: cannot read request ({exc})") from exc
        else:
            request = build_request(args)
        log.info("running %s", request["command"])
        report = run(request)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - top-level guard maps to exit code 2
        log.debug("internal error", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    text = dumps(report)
    if args.output:
        write_atomic(args.output, text)
    print(text if args.json else render_summary(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
