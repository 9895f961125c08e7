"""Command-line front end.

Exit codes: 0 every checked property holds, 1 a property fails (the report
names it), 2 input or schema error, 3 inconclusive within the budget.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Any

from . import __version__
from .errors import Inconclusive, InputError, PrecisionError

OK, VIOLATION, BAD_INPUT, INCONCLUSIVE = 0, 1, 2, 3

DEFAULT_TEST_GROUPS = ["Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "S3", "D4", "Q8", "A4"]


@dataclass
class RunConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    depth: int = 6
    catalog_bound: int = 200
    budget: int = 2_000_000
    prec: int = 20
    seed: int = 0
    fmt: str = "json"

    def __post_init__(self):
        for name in ("depth", "catalog_bound", "budget", "prec"):
            if getattr(self, name) <= 0:
                raise InputError(f"--{name.replace('_', '-')} must be positive")


@dataclass
class Report:
    status: str  # "ok", "violation" or "inconclusive"
    result: dict[str, Any]
    violation: str | None = None

    @property
    def code(self) -> int:
        return {"ok": OK, "violation": VIOLATION, "inconclusive": INCONCLUSIVE}[self.status]


def _verdict(result: dict, failed: str | None, unsure: bool = False) -> Report:
    if failed:
        return Report("violation", result, failed)
    return Report("inconclusive" if unsure else "ok", result)


# -- subcommands ---------------------------------------------------------------------


def _load_inputs(cfg: RunConfig, digests: dict) -> list:
    from .schema import read_json

    out = []
    for path in cfg.inputs:
        data, dg = read_json(path)
        digests[path] = dg
        out.append(data)
    return out


def _presentation_of(data):
    from .schema import load_complex, load_group_data, load_presentation
    from .vankampen import build_presentation

    if isinstance(data, dict) and ("complex" in data or "E0" in data):
        cx = load_complex(data)
        return build_presentation(cx, load_group_data(cx, data))
    return load_presentation(data)


def _test_groups(names):
    from .groups import group_from_name

    out = []
    for n in names:
        g = group_from_name(n)
        g.name = n
        out.append(g)
    return out


def _homcounts(p, groups, budget) -> tuple[dict, bool]:
    from .vankampen import count_homs

    counts, unsure = {}, False
    for g in groups:
        try:
            counts[g.name] = count_homs(p, g, budget)
        except Inconclusive:
            counts[g.name] = None
            unsure = True
    return counts, unsure


def cmd_present(cfg: RunConfig, args, digests) -> Report:
    from .vankampen import presentation_to_json

    (data,) = _load_inputs(cfg, digests)
    p = _presentation_of(data)
    out = presentation_to_json(p)
    counts, unsure = _homcounts(p, _test_groups(args.groups or []), cfg.budget)
    out["homcounts"] = counts
    return _verdict(out, None, unsure)


def cmd_homcount(cfg: RunConfig, args, digests) -> Report:
    (data,) = _load_inputs(cfg, digests)
    p = _presentation_of(data)
    counts, unsure = _homcounts(p, _test_groups(args.groups or DEFAULT_TEST_GROUPS), cfg.budget)
    return _verdict({"homcounts": counts}, None, unsure)


def cmd_equiv(cfg: RunConfig, args, digests) -> Report:
    from .vankampen import presentation_equiv

    a, b = _load_inputs(cfg, digests)
    rep = presentation_equiv(_presentation_of(a), _presentation_of(b),
                             _test_groups(args.groups or DEFAULT_TEST_GROUPS), cfg.budget)
    res = {"verdict": rep.verdict, "counts": {k: list(v) for k, v in rep.counts.items()}}
    if rep.verdict == "inconsistent":
        return Report("violation", res, f"hom counts differ at {rep.first_mismatch}")
    return _verdict(res, None, rep.verdict == "inconclusive")


def cmd_dict_check(cfg: RunConfig, args, digests) -> Report:
    from .groups import small_group_corpus
    from .gsets import (check_dense_iff_connected, check_embedding, check_kernel_exactness,
                        check_normal_image)
    from .samples import dictionary_cases
    from .schema import load_group, load_hom

    fns = {"embedding": check_embedding, "dense": check_dense_iff_connected,
           "normal_image": check_normal_image, "exactness": check_kernel_exactness}
    if cfg.inputs:
        (data,) = _load_inputs(cfg, digests)
        src, tgt = load_group(data["source"]), load_group(data["target"])
        hp = load_hom(data["hom"], src, tgt)
        cases = [(k, (hp,)) for k in ("embedding", "dense", "normal_image")]
        if "next" in data:
            far = load_group(data["next"]["target"])
            cases.append(("exactness", (hp, load_hom(data["next"]["hom"], tgt, far))))
    else:
        corpus = small_group_corpus(args.max_order)
        cases = list(dictionary_cases(random.Random(cfg.seed), args.samples, corpus))
    rows, failed, unsure = [], None, False
    for item, fargs in cases:
        r = fns[item](*fargs, bound=cfg.catalog_bound)
        rows.append({"item": r.item, "group_side": r.left, "gset_side": r.right, "agree": r.agree,
                     "complete": r.complete})
        if not r.agree and failed is None:
            failed = f"{r.item}: group side {r.left}, G-set side {r.right}"
        unsure |= not r.complete
    summary = {"cases": len(rows), "mismatches": sum(not r["agree"] for r in rows)}
    return _verdict({"summary": summary, "cases": rows}, failed, unsure)


def cmd_lcs(cfg: RunConfig, args, digests) -> Report:
    from .complexes import decompose_system, is_connected_system, q_functor, validate_lcs
    from .schema import load_lcs

    (data,) = _load_inputs(cfg, digests)
    m = load_lcs(data)
    problems = validate_lcs(m)
    if problems:
        return Report("violation", {"problems": problems}, problems[0])
    q = q_functor(m)
    parts = decompose_system(m)
    orbits = q.action.orbits()[0]
    res = {"sizes": m.sizes(), "components": len(parts), "q_orbits": len(orbits),
           "connected": is_connected_system(m), "q_transitive": len(orbits) == 1}
    failed = None
    if len(parts) != len(orbits):
        failed = "Q orbits and components differ in number"
    elif res["connected"] != res["q_transitive"]:
        failed = "Q does not preserve connectedness"
    return _verdict(res, failed)


def cmd_descent(cfg: RunConfig, args, digests) -> Report:
    from .complexes import (DescentDatum, check_descent, descent_equal, discretize_descent,
                            ordered_cocycle_holds, ordered_reduction, rebuild, reconstruct,
                            round_trip_isomorphism, system_isomorphism, validate_lcs)
    from .schema import load_descent

    (data,) = _load_inputs(cfg, digests)
    d = load_descent(data)
    if not isinstance(d, DescentDatum):
        ok = ordered_cocycle_holds(d)
        back = reconstruct(d)
        again = ordered_reduction(back)
        same = all((again.phi[k] == d.phi[k]).all() for k in d.phi)
        res = {"kind": "ordered", "cocycle": ok, "reconstruct_round_trip": bool(same)}
        return _verdict(res, None if ok and same else ("cocycle fails" if not ok else "round trip differs"))
    problems = check_descent(d)
    if problems:
        return Report("violation", {"kind": "complex", "problems": problems}, problems[0])
    m = discretize_descent(d)
    lcs_problems = validate_lcs(m)
    back = rebuild(m)
    iso = round_trip_isomorphism(m)
    res = {"kind": "complex", "system_valid": not lcs_problems,
           "rebuild_equal": descent_equal(d, back),
           "system_round_trip": system_isomorphism(m, discretize_descent(rebuild(m)), iso)}
    failed = next((k for k, v in res.items() if v is False), None)
    return _verdict(res, failed)


def cmd_looplike(cfg: RunConfig, args, digests) -> Report:
    from .looplike import (DistContext, family_from_gset, is_looplike, verify_phi_identities,
                           verify_relation_stability)
    from .schema import load_action_set, load_arithmetic, load_family
    from .words import format_word
    from .words import from_json as word_from_json

    (data,) = _load_inputs(cfg, digests)
    arith = load_arithmetic(data)
    bad = arith.check_equivariance()
    if bad:
        raise InputError(f"raw maps do not commute with the Galois action at {bad}")
    cx = arith.complex
    ctx = DistContext.of(cx)
    eta = arith.eta(ctx)
    verts = {v: arith.groups[v] for v in cx.E0}
    words = [word_from_json(w, verts) for w in data.get("words", [])]
    rng = random.Random(cfg.seed)
    if not words:
        from .words import Atom

        free = ctx.graph.non_tree_edges()
        for _ in range(args.samples):
            w = []
            for _ in range(rng.randint(1, 4)):
                if free and rng.random() < 0.4:
                    w.append(Atom.edge(rng.choice(free), rng.choice((1, -1))))
                else:
                    v = rng.choice(sorted(verts))
                    w.append(Atom.vertex(v, rng.randrange(verts[v].order)))
            words.append(tuple(w))
    res: dict[str, Any] = {}
    failed, unsure = None, False
    cocycle = eta.check_cocycle()
    res["cocycle_failures"] = len(cocycle)
    ident = verify_phi_identities(eta, words)
    res["phi_identities"] = {"checked": ident.checked, "failures": len(ident.failures)}
    if cocycle:
        failed = "eta cocycle fails"
    elif ident.failures:
        failed = f"phi identity fails: {ident.failures[0]}"
    if cx.E2:
        st = verify_relation_stability(arith, budget=cfg.budget)
        res["relation_stability"] = {"verified": len(st.verified), "failures": [list(x) for x in st.failures],
                                     "inconclusive": len(st.inconclusive)}
        unsure |= bool(st.inconclusive)
        if st.failures and failed is None:
            failed = f"relation not stable: {st.failures[0]}"
    family = None
    acts = {v: arith.actions[v] for v in verts}
    if "family" in data:
        family = load_family(data["family"], verts, acts)
    elif "action_set" in data:
        s = load_action_set(data["action_set"], verts)
        family = family_from_gset(s, int(data.get("base", 0)), cfg.depth, acts)
    if family is not None:
        rows = []
        for w in words:
            try:
                ok, why = is_looplike(w, family, ctx)
            except InputError as exc:
                ok, why = False, str(exc)
            except Inconclusive as exc:
                ok, why = False, f"inconclusive: {exc}"
                unsure = True
            row = {"word": format_word(w, verts), "looplike": ok, "reason": why}
            if ok and "action_set" in data:
                fixed = s.act_word(w, int(data.get("base", 0))) == int(data.get("base", 0))
                row["fixes_base"] = fixed
                if not fixed and failed is None:
                    failed = f"looplike word {row['word']} moves the base point"
            rows.append(row)
        res["words"] = rows
        problems = family.validate()
        if problems and failed is None:
            failed = problems[0]
    return _verdict(res, failed, unsure)


def cmd_counterexample(cfg: RunConfig, args, digests) -> Report:
    from . import counterexamples as ce

    kind = args.kind
    if kind == "matrices":
        r = ce.borel_obstruction(args.ell, args.p, args.n, prec=cfg.prec)
        res = r.to_json()
        res["summary"] = (f"obstruction found, v={r.corner_valuation}" if r.obstruction
                          else "no obstruction at this precision")
        if not r.untwisted_in_u:
            return Report("violation", res, "untwisted word leaves the integral Borel")
        if r.corner_valuation != r.predicted_valuation:
            return Report("violation", res, "corner valuation differs from the prediction")
        return Report("ok", res)
    if kind == "picture":
        s = ce.build_interval_gset(args.ell, cfg.depth)
        out = ce.frobenius_obstruction(s, args.q)
        if isinstance(out, ce.ContradictionReport):
            res = {"contradiction": out.to_json(),
                   "summary": f"no semilinear map: {out.values[0]} vs {out.values[1]} mod {out.modulus}"}
            return Report("ok", res)
        res = {"consistent": {"multiplier": out.multiplier, "window": out.window, "reaches_level": out.reaches_level}}
        if not out.reaches_level:
            return Report("inconclusive", res)
        return Report("violation", res, "a semilinear map survives the whole window")
    if kind == "nodal":
        from .groups import group_from_name
        from .vankampen import direct_product_with_z, presentation_equiv

        gal = group_from_name(args.gal)
        p = ce.nodal_presentation(gal)
        tests = _test_groups(args.groups or DEFAULT_TEST_GROUPS)
        rep = presentation_equiv(p, direct_product_with_z(gal), tests, cfg.budget)
        closed = {f.name: ce.product_with_z_count(gal, f) for f in tests}
        res = {"verdict": rep.verdict, "counts": {k: list(v) for k, v in rep.counts.items()}, "closed_form": closed}
        mism = [k for k, (a, _) in rep.counts.items() if a is not None and a != closed[k]]
        if rep.verdict == "inconsistent" or mism:
            return Report("violation", res, f"counts differ at {rep.first_mismatch or mism[0]}")
        return _verdict(res, None, rep.verdict == "inconclusive")
    if kind == "wedge":
        from .groups import group_from_name

        gal = group_from_name(args.gal)
        factors = [_wedge_factor(name, gal, args.action) for name in args.kernels]
        p = ce.wedge_presentation(factors, args.loops, gal)
        tests = _test_groups(args.groups or ["Z2", "Z3", "Z4", "Z6", "S3", "D4"])
        counts, unsure = _homcounts(p, tests, cfg.budget)
        closed = {f.name: ce.wedge_count(factors, args.loops, gal, f) for f in tests}
        res = {"counts": counts, "closed_form": closed}
        mism = [k for k, v in counts.items() if v is not None and v != closed[k]]
        return _verdict(res, f"counts differ at {mism[0]}" if mism else None, unsure)
    raise InputError(f"unknown counterexample {kind}")


def _wedge_factor(name: str, gal, action: str):
    from .counterexamples import SemidirectFactor
    from .groups import group_from_name

    k = group_from_name(name)
    if action == "trivial":
        return SemidirectFactor(k, [list(k.elements) for _ in gal.elements])
    if not k.is_abelian():
        raise InputError("inversion action needs an abelian kernel")
    # elements of gal outside a fixed index-2 subgroup invert
    homs = [h for h in gal.homs_to(group_from_name("Z2")) if len(h.image()) == 2]
    if not homs:
        raise InputError(f"{gal.name} has no index-2 subgroup for the inversion action")
    sign = homs[0]
    return SemidirectFactor(k, [[k.inv(x) if sign(s) else x for x in k.elements] for s in gal.elements])


COMMANDS = {"present": cmd_present, "homcount": cmd_homcount, "equiv": cmd_equiv,
            "dict-check": cmd_dict_check, "lcs": cmd_lcs, "descent": cmd_descent,
            "looplike": cmd_looplike, "counterexample": cmd_counterexample}


# -- argument parsing and output -------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=6, help="tower / test-set depth")
    common.add_argument("--catalog-bound", type=int, default=200, help="largest G-set in catalogs")
    common.add_argument("--budget", type=int, default=2_000_000, help="search budget")
    common.add_argument("--prec", type=int, default=20, help="l-adic precision")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "text"), default="json", dest="fmt")

    p = argparse.ArgumentParser(prog="noohi", description="Van Kampen presentations and their finite checks.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    for name in ("present", "homcount"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("input", help="presentation or complex-with-group-data JSON")
        s.add_argument("--groups", nargs="*", help="test groups by name")
    s = sub.add_parser("equiv", parents=[common])
    s.add_argument("input", nargs=2)
    s.add_argument("--groups", nargs="*")
    s = sub.add_parser("dict-check", parents=[common])
    s.add_argument("input", nargs="?", help="homomorphism JSON; omit to sample the corpus")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--max-order", type=int, default=24)
    for name in ("lcs", "descent"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("input")
    s = sub.add_parser("looplike", parents=[common])
    s.add_argument("input", help="arithmetic data JSON")
    s.add_argument("--samples", type=int, default=20, help="random words when the file lists none")
    s = sub.add_parser("counterexample", parents=[common])
    s.add_argument("kind", choices=("picture", "matrices", "nodal", "wedge"))
    s.add_argument("--ell", type=int, default=3)
    s.add_argument("--q", type=int, default=19)
    s.add_argument("--p", type=int, default=5)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--gal", default="Z2")
    s.add_argument("--groups", nargs="*")
    s.add_argument("--kernels", nargs="*", default=["Z3"])
    s.add_argument("--loops", type=int, default=1)
    s.add_argument("--action", choices=("trivial", "inversion"), default="inversion")
    return p


def _text(report: dict) -> str:
    lines = [f"{report['command']}: {report['status']} (exit {report['exit_code']})",
             f"seed {report['seed']}"]
    for path, dg in report["inputs"].items():
        lines.append(f"input {path} sha256 {dg}")
    if report.get("violation"):
        lines.append(f"violation: {report['violation']}")
    if report.get("error"):
        lines.append(f"error: {report['error']}")
    for k, v in (report.get("result") or {}).items():
        lines.append(f"{k}: {json.dumps(v, default=str)}")
    return "\n".join(lines)


def run(cfg: RunConfig, args) -> tuple[int, dict]:
    digests: dict[str, str] = {}
    out: dict[str, Any] = {"command": cfg.command, "seed": cfg.seed, "config": asdict(cfg), "inputs": digests}
    t0 = time.perf_counter()
    try:
        rep = COMMANDS[cfg.command](cfg, args, digests)
        code = rep.code
        out.update(status=rep.status, result=rep.result, violation=rep.violation)
    except (InputError, KeyError, TypeError, ValueError) as exc:
        code = BAD_INPUT
        out.update(status="input_error", error=f"{type(exc).__name__}: {exc}")
    except (Inconclusive, PrecisionError) as exc:
        code = INCONCLUSIVE
        out.update(status="inconclusive", error=str(exc))
    out["exit_code"] = code
    out["seconds"] = round(time.perf_counter() - t0, 4)
    return code, out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    raw = getattr(args, "input", None)
    inputs = raw if isinstance(raw, list) else ([raw] if raw else [])
    try:
        cfg = RunConfig(args.command, inputs, args.depth, args.catalog_bound, args.budget, args.prec,
                        args.seed, args.fmt)
    except InputError as exc:
        print(json.dumps({"status": "input_error", "error": str(exc), "exit_code": BAD_INPUT}))
        return BAD_INPUT
    code, report = run(cfg, args)
    if cfg.fmt == "json":
        print(json.dumps(report, indent=2, default=str))
    else:
        print(_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
