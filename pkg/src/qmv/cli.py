"""Command-line front end: ``qmv build | class | check | oracle``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from .errors import CapExceededError, QMVError, UnsupportedQuiverError
from .fileformat import (
    build,
    dims_from,
    parse_quiver,
    render_quiver,
    render_translation_quiver,
    resolve_vertex,
)
from .nakajima import (
    dim_framed,
    fermionic_class,
    fermionic_nilpotent_class,
    framed_class_bb,
    framed_class_recursion,
    nilpotent_class_bb,
    nilpotent_from_framed,
)
from .oracle import count_mesh_points
from .quiver import DimVector, Quiver, StabilityParam
from .report import ClassReport
from .ring import evaluate, parse_class, render
from .stackmotive import as_localized_double, mesh_rep_class, stack_class
from .translation import TranslationQuiver, pullback_theta, tau_twist
from .wallcross import semistable_stack_class, stable_variety_class

ALGORITHMS = ("fermionic", "bb", "recursion", "stack", "wallcross")
NAKAJIMA_ALGORITHMS = ("fermionic", "bb", "recursion")
WALLCROSS_CAP = 8
FERMIONIC_CAP = 4


class UsageError(QMVError):
    pass


# -- helpers ----------------------------------------------------------------


def _threads(args):
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get("QMV_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"QMV_THREADS must be an integer, got {env!r}") from None
    return 1


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _parse_assignments(items, base_vertices, what):
    out = {}
    for item in items or ():
        for piece in item.split(","):
            piece = piece.strip()
            if not piece:
                continue
            if "=" not in piece:
                raise UsageError(f"--{what} expects vertex=value, got {piece!r}")
            key, val = piece.split("=", 1)
            try:
                out[resolve_vertex(key, base_vertices)] = int(val)
            except ValueError:
                raise UsageError(f"--{what} value must be an integer, got {val!r}") from None
    return out


def _parse_window(text):
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"--window expects LO:HI, got {text!r}") from None


def _base_gamma(qf):
    """The translation quiver before framing: frame/stabilize lines are dropped."""
    kept = [(n, p) for n, p in qf.constructions if n not in ("frame", "stabilize")]
    return build(replace(qf, constructions=kept))


class Problem:
    """A parsed input plus dimension and framing vectors."""

    def __init__(self, text, dim_overrides=(), framing_overrides=()):
        self.qf = parse_quiver(text)
        base = set(self.qf.vertices)
        self.v = dims_from(self.qf)
        if dim_overrides:
            self.v = DimVector(_parse_assignments(dim_overrides, base, "dim"))
        w = {resolve_vertex(k, base): n for k, n in self.qf.framing.items()}
        if framing_overrides:
            w = _parse_assignments(framing_overrides, base, "framing")
        self.w = DimVector(w)
        self.qf.framing = dict(self.w)

    @property
    def gamma(self):
        return _base_gamma(self.qf)

    @property
    def built(self):
        return build(self.qf)

    def theta(self):
        table = {resolve_vertex(k, set(self.qf.vertices)): v for k, v in self.qf.theta.items()}
        if table and all(k in set(self.qf.vertices) for k in table):
            return pullback_theta(StabilityParam(table))
        return StabilityParam(table)


def compute_class(problem, algo, nilpotent=False, stable=False, threads=1, binding="inverse"):
    gamma, v, w = problem.gamma, problem.v, problem.w
    if algo in NAKAJIMA_ALGORITHMS:
        if isinstance(gamma, Quiver):
            raise UnsupportedQuiverError("apply a construction (double or repetition) first")
        if v.is_zero():
            return ClassReport(1, algo, {"v": "", "w": w.render()}, {"dim": 0})
        if algo == "fermionic":
            if v.total > FERMIONIC_CAP:
                raise CapExceededError(f"fermionic box cap: sum of v is {v.total} > {FERMIONIC_CAP}")
            fn = fermionic_nilpotent_class if nilpotent else fermionic_class
            return fn(gamma, v, w, binding)
        if v.total > WALLCROSS_CAP:
            raise CapExceededError(f"wall-crossing cap: sum of v is {v.total} > {WALLCROSS_CAP}")
        if algo == "bb":
            fn = nilpotent_class_bb if nilpotent else framed_class_bb
            return fn(gamma, v, w, workers=threads)
        rep = framed_class_recursion(gamma, v, w)
        if nilpotent:
            dim = rep.extras["dim"]
            return ClassReport(nilpotent_from_framed(rep.value, dim), rep.algorithm,
                               rep.fingerprint, {"dim": dim, "variety": "nilpotent"})
        return rep
    if algo in ("stack", "wallcross"):
        gamma = problem.built
        as_localized_double(gamma)
        if algo == "stack":
            rep = stack_class(gamma, v)
        else:
            if v.total > WALLCROSS_CAP:
                raise CapExceededError(f"wall-crossing cap: sum of v is {v.total} > {WALLCROSS_CAP}")
            fn = stable_variety_class if stable else semistable_stack_class
            rep = fn(gamma, problem.theta(), v)
        return ClassReport(rep.value, rep.algorithm, rep.fingerprint,
                           dict(rep.extras, dimension_vector=v.render()))
    raise UsageError(f"unknown algorithm {algo!r}")


def _emit(payload, as_json, text):
    if as_json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


# -- subcommands ------------------------------------------------------------


def cmd_build(args):
    qf = parse_quiver(_read(args.file))
    gamma = build(qf)
    if isinstance(gamma, Quiver):
        text = render_quiver(gamma)
    elif isinstance(gamma, TranslationQuiver):
        text = render_translation_quiver(gamma)
    else:
        lo, hi = _parse_window(args.window)
        window = gamma.materialize(gamma.window(lo, hi))
        text = render_translation_quiver(window)
    if args.json:
        print(json.dumps({"rendering": text}, sort_keys=True))
    else:
        sys.stdout.write(text)
    return 0


def cmd_class(args):
    problem = Problem(_read(args.file), args.dim, args.framing)
    rep = compute_class(problem, args.algo, args.nilpotent, args.stable, _threads(args), args.binding)
    _emit(rep.to_dict(), args.json, render(rep.value))
    return 0


def cmd_oracle(args):
    problem = Problem(_read(args.file), args.dim, args.framing)
    gamma = problem.built
    if isinstance(gamma, Quiver):
        raise UnsupportedQuiverError("the oracle counts mesh representations of a translation quiver")
    out = {"q": args.q, "count": count_mesh_points(gamma, problem.v, args.q)}
    try:
        value = mesh_rep_class(gamma, problem.v).value
        out["class"] = render(value)
        out["evaluated"] = str(evaluate(value, args.q))
    except UnsupportedQuiverError:
        pass
    text = f"count at q={args.q}: {out['count']}"
    if "class" in out:
        text += f"\nclass: {out['class']} (at q={args.q}: {out['evaluated']})"
    _emit(out, args.json, text)
    return 0


# -- check ------------------------------------------------------------------


class Checker:
    def __init__(self, threads=1):
        self.results = []
        self.threads = threads

    def record(self, case, invariant, ok, detail=""):
        self.results.append({"case": case, "invariant": invariant, "ok": bool(ok), "detail": detail})

    def run_case(self, name, text, kind=None, expect=None):
        expect = expect or {}
        try:
            problem = Problem(text)
        except QMVError as exc:
            self.record(name, "parse", False, str(exc))
            return
        if not problem.qf.vertices:
            self.record(name, "empty", True, "no vertices")
            return
        if kind is None:
            kind = "nakajima" if problem.w else "mesh"
        try:
            if kind == "nakajima":
                self._nakajima(name, problem, expect)
            elif kind == "mesh":
                self._mesh(name, problem, expect)
            else:
                self.record(name, "kind", False, f"unknown kind {kind!r}")
        except QMVError as exc:
            self.record(name, "compute", False, f"{type(exc).__name__}: {exc}")

    def _nakajima(self, name, problem, expect):
        gamma, v, w = problem.gamma, problem.v, problem.w
        dim = dim_framed(gamma, v, w)
        values, nil = {}, {}
        fermionic_ok = (isinstance(gamma, TranslationQuiver) and gamma.double_of is not None
                        and gamma.double_of[1].is_identity() and v.total <= FERMIONIC_CAP)
        algos = ["bb", "recursion"] + (["fermionic"] if fermionic_ok else [])
        for algo in algos:
            values[algo] = compute_class(problem, algo, threads=self.threads).value
            nil[algo] = compute_class(problem, algo, nilpotent=True, threads=self.threads).value
        first = values[algos[0]]
        agree = all(val == first for val in values.values())
        self.record(name, "cross-algorithm", agree,
                    "; ".join(f"{a}={render(val)}" for a, val in values.items()))
        nil_agree = all(val == nil[algos[0]] for val in nil.values())
        self.record(name, "nilpotent-cross-algorithm", nil_agree,
                    "; ".join(f"{a}={render(val)}" for a, val in nil.items()))
        m, l_ = first, nil[algos[0]]
        self.record(name, "duality", l_.dual() == m.shift(-dim), f"dim={dim}")
        if m.is_zero():
            self.record(name, "degree", True, "empty variety")
        else:
            poly = m.num if m.is_laurent() else None
            ok = (poly is not None and poly.low_degree >= 0 and poly.degree == dim
                  and all(c > 0 for _, c in poly.terms()))
            self.record(name, "degree", ok, f"top degree {poly.degree if poly is not None else '?'}, dim {dim}")
        tau_vw = (tau_twist(gamma, v), tau_twist(gamma, w))
        if tau_vw != (v, w):
            other = framed_class_bb(gamma, tau_vw[0], tau_vw[1]).value
            self.record(name, "tau-symmetry", other == m, render(other))
        if "class" in expect:
            self.record(name, "golden-class", parse_class(expect["class"]) == m,
                        f"expected {expect['class']}, got {render(m)}")
        if "nilpotent" in expect:
            self.record(name, "golden-nilpotent", parse_class(expect["nilpotent"]) == l_,
                        f"expected {expect['nilpotent']}, got {render(l_)}")
        if "dim" in expect:
            self.record(name, "golden-dim", int(expect["dim"]) == dim, f"dim={dim}")

    def _mesh(self, name, problem, expect):
        gamma, v = problem.built, problem.v
        value = mesh_rep_class(gamma, v).value
        self.record(name, "tate", value.is_laurent(), render(value))
        for q in (2, 3):
            try:
                count = count_mesh_points(gamma, v, q)
            except CapExceededError as exc:
                self.record(name, f"oracle-q{q}", True, f"skipped: {exc}")
                continue
            ev = evaluate(value, q)
            self.record(name, f"oracle-q{q}", ev == count, f"count {count}, class gives {ev}")
            key = f"count_q{q}"
            if key in expect:
                self.record(name, f"golden-count-q{q}", int(expect[key]) == count,
                            f"expected {expect[key]}, got {count}")
        if "class" in expect:
            self.record(name, "golden-class", parse_class(expect["class"]) == value,
                        f"expected {expect['class']}, got {render(value)}")

    @property
    def failed(self):
        return [r for r in self.results if not r["ok"]]


def _golden_cases(path):
    path = Path(path)
    files = sorted(path.rglob("*")) if path.is_dir() else [path]
    for f in files:
        if f.suffix == ".json":
            try:
                data = json.loads(f.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                yield f.stem, None, None, {"_error": f"bad JSON: {exc}"}
                continue
            items = data if isinstance(data, list) else [data]
            for i, item in enumerate(items):
                name = item.get("name", f"{f.stem}-{i}")
                yield name, item.get("quiver", ""), item.get("kind"), item.get("expect", {})
        elif f.suffix == ".qmv":
            yield f.stem, f.read_text(encoding="utf-8"), None, {}


def cmd_check(args):
    checker = Checker(_threads(args))
    start = time.perf_counter()
    for name, text, kind, expect in _golden_cases(args.path):
        if "_error" in expect:
            checker.record(name, "parse", False, expect["_error"])
            continue
        checker.run_case(name, text, kind, expect)
    failed = checker.failed
    if args.json:
        summary = {"passed": len(checker.results) - len(failed), "failed": len(failed),
                   "results": checker.results}
        print(json.dumps(summary, sort_keys=True))
    else:
        for r in checker.results:
            status = "PASS" if r["ok"] else "FAIL"
            print(f"{status} {r['case']} {r['invariant']}" + (f" ({r['detail']})" if not r["ok"] else ""))
        print(f"{len(checker.results) - len(failed)} passed, {len(failed)} failed")
    if args.timing:
        print(f"elapsed {time.perf_counter() - start:.2f}s", file=sys.stderr)
    return 1 if failed else 0


# -- entry point ------------------------------------------------------------


def _parser():
    p = argparse.ArgumentParser(prog="qmv", description="Exact motivic classes of quiver moduli over translation quivers.")
    p.add_argument("--threads", type=int, default=None, help="worker count (also QMV_THREADS)")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="render the constructed translation quiver")
    b.add_argument("file")
    b.add_argument("--window", default="0:1", help="level window LO:HI for Z-indexed constructions")
    b.add_argument("--json", action="store_true")

    c = sub.add_parser("class", help="compute a motivic class")
    c.add_argument("file")
    c.add_argument("--algo", choices=ALGORITHMS, required=True)
    c.add_argument("--dim", action="append", help="override dims, e.g. --dim 1=2,2=1")
    c.add_argument("--framing", action="append", help="override framing, e.g. --framing 1=2")
    c.add_argument("--nilpotent", action="store_true", help="the nilpotent variety L(v, w)")
    c.add_argument("--stable", action="store_true", help="wallcross: stable moduli instead of the semistable stack")
    c.add_argument("--binding", choices=("inverse", "direct"), default="inverse",
                   help="fermionic: how r(w, L, z) is read off the q-series")
    c.add_argument("--json", action="store_true")

    k = sub.add_parser("check", help="run invariants over a golden corpus or quiver file")
    k.add_argument("path")
    k.add_argument("--json", action="store_true")
    k.add_argument("--timing", action="store_true")

    o = sub.add_parser("oracle", help="count F_q-points of a mesh representation space")
    o.add_argument("file")
    o.add_argument("--q", type=int, default=2, choices=(2, 3, 5, 7))
    o.add_argument("--dim", action="append")
    o.add_argument("--framing", action="append")
    o.add_argument("--json", action="store_true")

    for sp in (b, c, k, o):
        sp.add_argument("--threads", type=int, default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    return p


COMMANDS = {"build": cmd_build, "class": cmd_class, "check": cmd_check, "oracle": cmd_oracle}


def main(argv=None):
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return COMMANDS[args.command](args)
    except QMVError as exc:
        print(f"qmv: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
