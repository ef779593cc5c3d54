"""Command-line interface.

Exit status is 0 on success, 1 when a file fails to parse or validate (or a
suite expectation fails), and 2 when a computation needs data beyond a
degree cap.  With ``--json`` every outcome, including failures, is printed
as a schema-versioned JSON object.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .dgl import homology_data
from .errors import CapTooLow, ParseError, ValidationError, WhiteheadError
from .function_space import (component_classes, component_complex, component_product,
                             component_whitehead_length, format_cycle, lie_whitehead_length, sphere_classify)
from .graded_lie import format_scalar
from .modelfile import ModelFile, parse_model
from .whitehead import whitehead_length_search

SCHEMA = 1
EXIT_OK, EXIT_INVALID, EXIT_CAP = 0, 1, 2


class UsageError(WhiteheadError):
    """Bad command-line arguments."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _q(x) -> str:
    return format_scalar(Fraction(x))


def _degrees(text: str) -> tuple:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            return int(a), int(b)
        return int(text), int(text)
    except ValueError:
        raise UsageError(f"degrees must look like a..b, got {text!r}") from None


def _load(path: str):
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise ParseError("the file is not valid UTF-8") from None
    return parse_model(text), hashlib.sha256(raw).hexdigest()


# ----------------------------------------------------------------------------
# commands; each returns (exit status, result dict, text lines)


def cmd_validate(model: ModelFile, args) -> tuple:
    objects = {}
    for name, A in model.algebras.items():
        objects[name] = {"kind": type(A).__name__, "generators": len(A.generators)}
    for name, f in model.maps.items():
        objects[name] = {"kind": "map", "source": f.source.name, "target": f.target.name}
    for name in model.filtrations:
        objects[name] = {"kind": "filtration", "length": model.filtrations[name].length}
    for name in model.spheres:
        objects[name] = {"kind": "sphere-problem", "n": model.spheres[name].n}
    ok = not model.problems
    lines = [f"{name}: {obj['kind']}" for name, obj in objects.items()]
    lines += [f"problem: {p}" for p in model.problems]
    lines.append("valid" if ok else "INVALID")
    return (EXIT_OK if ok else EXIT_INVALID), {"valid": ok, "problems": list(model.problems),
                                                "objects": objects}, lines


def cmd_homology(model: ModelFile, args) -> tuple:
    model.check()
    lo, hi = _degrees(args.degrees)
    out, lines = {}, []
    if args.mode == "algebra":
        A = model.algebra(args.algebra)
        for n in range(max(lo, 1), hi + 1):
            data = homology_data(A, n)
            reps = [A.format(A.element(v, n)) for v in data.representatives]
            out[str(n)] = {"dimension": data.dimension, "representatives": reps}
            lines.append(f"H_{n}({A.name}) = {data.dimension}" + (f"  {reps}" if reps else ""))
        return EXIT_OK, {"object": A.name, "mode": "algebra", "homology": out}, lines
    f = model.map(args.map)
    for n in range(max(lo, 2), hi + 1):
        _, classes = component_complex(f, args.mode).homology(n)
        reps = [format_cycle(c.representative) for c in classes]
        out[str(n)] = {"dimension": len(classes), "representatives": reps}
        lines.append(f"H_{n} ({args.mode}) = {len(classes)}")
        lines += [f"  {n}.{k}: {r}" for k, r in enumerate(reps)]
    return EXIT_OK, {"object": f.name, "mode": args.mode, "homology": out}, lines


def _pick(classes: list, token: str):
    token = token.strip()
    for c in classes:
        if c.label == token:
            return c
    try:
        return classes[int(token)]
    except (ValueError, IndexError):
        raise UsageError(f"no class {token!r}; available: {', '.join(c.label for c in classes)}") from None


def cmd_product(model: ModelFile, args) -> tuple:
    model.check()
    f = model.map(args.map)
    cap = args.cap
    classes = component_classes(f, args.mode, (2, cap))
    parts = args.classes.split(",")
    if len(parts) != 2:
        raise UsageError("--classes takes two class labels or indices, e.g. 2.0,3.1")
    a, b = (_pick(classes, t) for t in parts)
    n = a.degree + b.degree - 1
    if n > cap:
        raise CapTooLow(f"the product lives in degree {n} beyond the cap {cap}", needed=n, cap=cap)
    z = component_product(f, args.mode, a.representative, b.representative)
    cx = component_complex(f, args.mode)
    coords = cx.class_coordinates(z)
    test = cx.is_boundary(z)
    result = {
        "left": {"label": a.label, "representative": format_cycle(a.representative)},
        "right": {"label": b.label, "representative": format_cycle(b.representative)},
        "degree": n,
        "product": format_cycle(z),
        "coordinates": [_q(x) for x in coords],
        "nonzero": not test.is_boundary,
        "certificate": {"witness": format_cycle(test.witness)} if test.is_boundary else
        {"left_null_vector": [_q(x) for x in test.certificate]},
    }
    lines = [f"[{a.label}, {b.label}] in degree {n} ({args.mode})",
             f"  product: {result['product']}",
             f"  coordinates: {result['coordinates']}",
             "  nonzero (not a boundary)" if result["nonzero"] else "  zero (a boundary)"]
    return EXIT_OK, result, lines


def cmd_wl(model: ModelFile, args) -> tuple:
    model.check()
    f = model.map(args.map)
    search = whitehead_length_search(f, "Der" if args.mode == "based" else "Rel", args.cap)
    result = {"length": search.length, "exhausted": search.exhausted,
              "levels": [[list(x) for x in level] for level in search.levels],
              "witness": None if search.witness is None else
              {"degree": search.witness[0], "representative": format_cycle(search.witness[1])}}
    bound = "exact" if search.exhausted else "lower bound"
    lines = [f"WL ({args.mode}) >= {search.length}" if not search.exhausted else
             f"WL ({args.mode}) = {search.length}", f"  {bound} within degrees <= {args.cap}"]
    if search.witness is not None and search.length > 1:
        lines.append(f"  witness in degree {search.witness[0]}: {result['witness']['representative']}")
    return EXIT_OK, result, lines


def cmd_sphere(model: ModelFile, args) -> tuple:
    model.check()
    problem = model.sphere(args.name)
    c = sphere_classify(problem)
    result = c.to_dict()
    lines = [f"based WL = {c.based}", f"free WL = {c.free}"]
    if c.certificate.get("based_witness"):
        lines.append(f"  based witness pair: {c.certificate['based_witness']['pair']}")
    if args.cross_check:
        cap = args.cap if args.cap is not None else model.cap
        if cap is None:
            raise UsageError("--cross-check needs --cap or a 'cap' line in the file")
        _, _, f = problem.to_model()
        based = component_whitehead_length(f, "based", cap)
        free = component_whitehead_length(f, "free", cap)
        result["cross_check"] = {"based": list(based), "free": list(free),
                                 "agrees": based.length == c.based and free.length == c.free}
        lines.append(f"  machinery: based {tuple(based)}, free {tuple(free)}")
    return EXIT_OK, result, lines


# ----------------------------------------------------------------------------
# suites


def _want_int(words, k):
    try:
        return int(words[k])
    except (IndexError, ValueError):
        raise ValidationError(f"malformed expectation {' '.join(words)!r}") from None


def _flag_ok(words, k, exhausted: bool) -> bool:
    if len(words) <= k:
        return True
    if words[k] not in ("exhausted", "open"):
        raise ValidationError(f"expected 'exhausted' or 'open' in {' '.join(words)!r}")
    return exhausted == (words[k] == "exhausted")


def _need_cap(model):
    if model.cap is None:
        raise ValidationError("this expectation needs a 'cap' line")
    return model.cap


def check_expectation(model: ModelFile, words: list) -> tuple:
    """``(passed, observed)`` for one ``expect`` line."""
    kind = words[0]
    if kind in ("valid", "invalid"):
        ok = not model.problems
        return ok == (kind == "valid"), {"problems": list(model.problems)}
    model.check()
    if kind == "homology":
        name = words[1]
        if name in model.algebras:
            n, want = _want_int(words, 2), _want_int(words, 4)
            got = homology_data(model.algebras[name], n).dimension
        else:
            f = model.map(name)
            n, want = _want_int(words, 3), _want_int(words, 5)
            got = component_complex(f, words[2]).homology_data(n).dimension
        return got == want, {"dimension": got}
    if kind == "wl":
        f = model.map(words[1])
        want = _want_int(words, 4)
        wl = component_whitehead_length(f, words[2], _need_cap(model))
        return wl.length == want and _flag_ok(words, 5, wl.exhausted), {"length": wl.length,
                                                                        "exhausted": wl.exhausted}
    if kind == "lie-wl":
        want = _want_int(words, 3)
        wl = lie_whitehead_length(model.algebra(words[1]), _need_cap(model))
        return wl.length == want and _flag_ok(words, 4, wl.exhausted), {"length": wl.length,
                                                                        "exhausted": wl.exhausted}
    if kind == "product":
        f, mode = model.map(words[1]), words[2]
        cap = _need_cap(model)
        classes = component_classes(f, mode, (2, cap))
        a, b = _pick(classes, words[3]), _pick(classes, words[4])
        z = component_product(f, mode, a.representative, b.representative)
        nonzero = not component_complex(f, mode).is_boundary(z).is_boundary
        if words[5] not in ("zero", "nonzero"):
            raise ValidationError(f"expected 'zero' or 'nonzero' in {' '.join(words)!r}")
        return nonzero == (words[5] == "nonzero"), {"nonzero": nonzero}
    if kind == "sphere":
        c = sphere_classify(model.sphere(words[1]))
        want = dict(zip(words[2::3], words[4::3]))
        got = {"based": c.based, "free": c.free}
        ok = all(str(got.get(k)) == v for k, v in want.items()) and set(want) <= {"based", "free"}
        return ok, got
    raise ValidationError(f"unknown expectation {kind!r}")  # pragma: no cover


def run_suite_file(path: Path) -> dict:
    entry = {"file": path.name}
    try:
        model, digest = _load(str(path))
    except WhiteheadError as exc:
        entry.update({"passed": False, "error": _error_object(exc)})
        return entry
    entry["sha256"] = digest
    checks = []
    for e in model.expectations:
        item = {"line": e.line, "expect": " ".join(e.words)}
        try:
            ok, observed = check_expectation(model, e.words)
            item.update({"passed": ok, "observed": observed})
        except WhiteheadError as exc:
            item.update({"passed": False, "error": _error_object(exc)})
        checks.append(item)
    entry["checks"] = checks
    entry["passed"] = all(c["passed"] for c in checks)
    return entry


def cmd_suite(args) -> tuple:
    root = Path(args.directory)
    if not root.is_dir():
        raise UsageError(f"{args.directory} is not a directory")
    files = sorted(p for p in root.iterdir() if p.suffix in (".dgl", ".prob"))
    entries = [run_suite_file(p) for p in files]
    lines = []
    for e in entries:
        lines.append(f"{'PASS' if e['passed'] else 'FAIL'} {e['file']}")
        for c in e.get("checks", []):
            if not c["passed"]:
                lines.append(f"  line {c['line']}: expect {c['expect']} -> {c.get('observed', c.get('error'))}")
        if "error" in e:
            lines.append(f"  {e['error']['type']}: {e['error']['message']}")
    ok = all(e["passed"] for e in entries)
    lines.append(f"{sum(e['passed'] for e in entries)}/{len(entries)} files pass")
    return (EXIT_OK if ok else EXIT_INVALID), {"files": entries, "passed": ok}, lines


# ----------------------------------------------------------------------------
# plumbing


def _error_object(exc: Exception) -> dict:
    out = {"type": type(exc).__name__, "message": str(exc)}
    for attr in ("line", "column", "expected", "needed", "cap", "degree"):
        v = getattr(exc, attr, None)
        if v is not None:
            out[attr] = v
    if getattr(exc, "violations", None):
        out["violations"] = list(exc.violations)
    return out


def exit_code_for(exc: Exception) -> int:
    return EXIT_CAP if isinstance(exc, CapTooLow) else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="whitehead-dgl", description="Whitehead products and Whitehead length of "
                                                  "function-space components from Quillen models.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="print a JSON report")
        sp.add_argument("--report-dir", help="also write the JSON report into this directory")

    sp = sub.add_parser("validate", help="parse a model file and check d∘d, maps and filtrations")
    sp.add_argument("file")
    common(sp)
    sp = sub.add_parser("homology", help="homology dimensions and representatives")
    sp.add_argument("file")
    sp.add_argument("--degrees", required=True, help="range a..b")
    sp.add_argument("--mode", choices=("algebra", "based", "free"), default="algebra")
    sp.add_argument("--algebra", help="algebra to use in algebra mode (default: the target of the only map, else the last algebra)")
    sp.add_argument("--map", help="map to use in based/free mode (default: the only one)")
    common(sp)
    sp = sub.add_parser("product", help="Whitehead product of two homology classes")
    sp.add_argument("file")
    sp.add_argument("--mode", choices=("based", "free"), required=True)
    sp.add_argument("--classes", required=True, help="two class labels (2.0,3.1) or indices (0,1)")
    sp.add_argument("--cap", type=int, required=True)
    sp.add_argument("--map")
    common(sp)
    sp = sub.add_parser("wl", help="Whitehead length search")
    sp.add_argument("file")
    sp.add_argument("--mode", choices=("based", "free"), required=True)
    sp.add_argument("--cap", type=int, required=True)
    sp.add_argument("--map")
    common(sp)
    sp = sub.add_parser("sphere", help="classify components of maps into an even sphere")
    sp.add_argument("file")
    sp.add_argument("--name", help="sphere block or map to use (default: the only sphere block)")
    sp.add_argument("--cross-check", action="store_true", help="compare with the general computation")
    sp.add_argument("--cap", type=int, help="degree cap for --cross-check (default: the file's cap line)")
    common(sp)
    sp = sub.add_parser("suite", help="check the expect lines of every model file in a directory")
    sp.add_argument("directory")
    common(sp)
    return p


COMMANDS = {"validate": cmd_validate, "homology": cmd_homology, "product": cmd_product, "wl": cmd_wl,
            "sphere": cmd_sphere}


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("json", "report_dir") and v is not None}


def render(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    report = {"schema": SCHEMA, "kernel": {"name": "whitehead-dgl", "version": __version__}}
    want_json = "--json" in argv
    args = None
    try:
        args = build_parser().parse_args(argv)
        report["command"] = _echo(args)
        if args.command == "suite":
            status, result, lines = cmd_suite(args)
        else:
            model, digest = _load(args.file)
            report["input"] = {"sha256": digest}
            status, result, lines = COMMANDS[args.command](model, args)
        report["result"] = result
        report["status"] = status
    except WhiteheadError as exc:
        status = exit_code_for(exc)
        report["error"] = _error_object(exc)
        report["status"] = status
        lines = [f"error ({report['error']['type']}): {exc}"]
        lines += [f"  {v}" for v in report["error"].get("violations", [])]
    text = render(report)
    if args is not None and getattr(args, "report_dir", None):
        d = Path(args.report_dir)
        d.mkdir(parents=True, exist_ok=True)
        stem = Path(getattr(args, "file", None) or args.directory).stem
        (d / f"{args.command}-{stem}.json").write_text(text, encoding="utf-8")
    if want_json:
        out.write(text)
    else:
        out.write("\n".join(lines) + "\n")
    return status


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
