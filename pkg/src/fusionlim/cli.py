"""Command line front end: ``fusionlim <command> [options]``.

Exit codes: 0 ok, 2 input error, 3 assertion failure, 4 resource cap.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import gfp
from .catalg import (CatModule, IntCatModule, constant_module, d2_closed_form, higher_limits,
                     integral_higher_limits, random_module)
from .category import FiniteCategory, Morphism, dn_category, poset_category
from .dwyer import FAMILY_KINDS, family_of, random_oracle_cases, run_oracle
from .errors import (DegreeTooLarge, DimensionBlowup, FusionLimError, GroupTooLarge, HypothesisFailed,
                     InputError, OrderBoundExceeded)
from .grouptheory import ORDER_BOUND, group_from_json, validate_perm
from .mackey import CohomologyData, MackeyFunctor, cohomology_mackey, fixed_point_mackey
from .theorem_a import build_amalgam_fusion, load_amalgam, verify_exact_sequence

log = logging.getLogger("fusionlim")

EXIT_OK, EXIT_INPUT, EXIT_ASSERT, EXIT_CAP = 0, 2, 3, 4


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    prime: int | None
    maxdeg: int
    cap_order: int
    cap_dim: int
    skeleton: bool
    integral: bool
    seed: int
    out: str | None

    def check(self) -> None:
        if self.cap_order <= 0 or self.cap_dim <= 0:
            raise InputError("caps must be positive")
        if self.maxdeg < 0:
            raise InputError("--maxdeg must be nonnegative")
        if self.prime is not None:
            gfp.check_prime(self.prime)


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def _emit(cfg: RunConfig, obj: dict, markdown: str | None = None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if cfg.out is None:
        sys.stdout.write(text)
        return
    out = Path(cfg.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    if markdown is not None:
        out.with_suffix(".md").write_text(markdown)


# ---------------------------------------------------------------------------
# fusion-build


def cmd_fusion_build(cfg: RunConfig, args: argparse.Namespace) -> int:
    spec = load_amalgam(args.spec)
    am = build_amalgam_fusion(spec)
    F = am.F
    classes = [[F.subgroups[i].order for i in cls] for cls in F.classes()]
    centric_classes = [cls for cls in F.classes() if cls[0] in set(am.centric)]
    summary = {
        "name": spec.name,
        "p": spec.p,
        "order_S": F.S.order,
        "n_subgroups": len(F.subgroups),
        "n_morphisms": F.n_morphisms,
        "class_orders": classes,
        "centric": [F.subgroups[i].to_json() for i in am.centric],
        "centric_classes": len(centric_classes),
    }
    _emit(cfg, {"summary": summary, "fusion": F.to_json()})
    return EXIT_OK


# ---------------------------------------------------------------------------
# limits


def category_from_json(obj: dict) -> FiniteCategory:
    """``{"kind": "dn", "n": k}``, ``{"kind": "poset", "objects", "relations"}`` or
    ``{"kind": "explicit", "objects", "morphisms", "identities", "compose"}``."""
    kind = obj.get("kind")
    try:
        if kind == "dn":
            return dn_category(int(obj["n"]))
        if kind == "poset":
            objs = list(obj["objects"])
            pos = {o: i for i, o in enumerate(objs)}
            n = len(objs)
            reach = [[i == j for j in range(n)] for i in range(n)]
            for a, b in obj["relations"]:
                reach[pos[a]][pos[b]] = True
            for k in range(n):
                for i in range(n):
                    if reach[i][k]:
                        for j in range(n):
                            reach[i][j] = reach[i][j] or reach[k][j]
            for i in range(n):
                for j in range(n):
                    if i != j and reach[i][j] and reach[j][i]:
                        raise InputError("poset relations contain a cycle")
            return poset_category(objs, lambda a, b: reach[pos[a]][pos[b]], name=obj.get("name", "poset"))
        if kind == "explicit":
            objs = list(obj["objects"])
            mors = [Morphism(int(s), int(t), i) for i, (s, t) in enumerate(obj["morphisms"])]
            table = {(int(g), int(f)): int(h) for g, f, h in obj["compose"]}
            return FiniteCategory(objs, mors, [int(i) for i in obj["identities"]], table,
                                  name=obj.get("name", "explicit"))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed category JSON: {exc}") from exc
    raise InputError(f"unknown category kind {kind!r}; expected dn, poset or explicit")


def module_from_json(cat: FiniteCategory, obj: dict, cfg: RunConfig) -> CatModule:
    """A full module, ``{"constant": true}``, or ``{"random": {"dims": [...]}}`` (posets only)."""
    p = cfg.prime if cfg.prime is not None else int(obj.get("p", 2))
    if obj.get("constant"):
        return constant_module(cat, p)
    if "random" in obj:
        dims = obj["random"].get("dims")
        if not isinstance(dims, list) or len(dims) != cat.n_objects:
            raise InputError("random module needs one dimension per object")
        return random_module(cat, p, dims, np.random.default_rng(cfg.seed))
    return CatModule.from_json(cat, obj)


def _limits_markdown(rows: list[tuple[str, list]]) -> str:
    width = max(len(v) for _, v in rows)
    lines = ["| | " + " | ".join(f"n={n}" for n in range(width)) + " |",
             "|---|" + "---|" * width]
    for name, vals in rows:
        lines.append(f"| {name} | " + " | ".join(str(v) for v in vals) + " |")
    return "\n".join(lines) + "\n"


def cmd_limits(cfg: RunConfig, args: argparse.Namespace) -> int:
    cat = category_from_json(_read_json(args.category))
    M = module_from_json(cat, _read_json(args.module), cfg) if args.module else \
        constant_module(cat, cfg.prime or 2)
    dims = higher_limits(cat, M, cfg.maxdeg, use_skeleton=cfg.skeleton, cap=cfg.cap_dim)
    out: dict = {"category": cat.name, "p": M.p, "module_dims": M.dims, "lim": dims}
    rows: list[tuple[str, list]] = [("dim lim^n", dims)]
    status = EXIT_OK
    if cat.name == "D2":
        closed = d2_closed_form(M)
        out["closed_form"] = list(closed)
        expected = [closed[0], closed[1]] + [0] * (cfg.maxdeg - 1)
        if dims != expected[:cfg.maxdeg + 1]:
            log.error("closed form %s disagrees with %s", expected, dims)
            status = EXIT_ASSERT
        out["closed_form_match"] = status == EXIT_OK
    if cfg.integral:
        groups = integral_higher_limits(cat, IntCatModule.from_fp(M), cfg.maxdeg)
        out["integral_invariant_factors"] = groups
        rows.append(("invariant factors", [groups[n] for n in range(len(groups))]))
    _emit(cfg, out, _limits_markdown(rows))
    return status


# ---------------------------------------------------------------------------
# theorem-a


def _broken_functor(M: MackeyFunctor) -> MackeyFunctor:
    """Negative control: zero out every non-identity restriction (not functorial when
    the orbit category has a nontrivial automorphism)."""
    C = M.contravariant
    mats = []
    for f in range(C.cat.n_morphisms):
        A = C.act(f).copy()
        if f not in C.cat.identities and A.size:
            A[:] = 0
        mats.append(A)
    if all(f in C.cat.identities for f in range(C.cat.n_morphisms)):
        raise InputError("the broken control needs a non-identity morphism")
    broken = CatModule(C.cat, C.p, C.dims, mats, check=False, name=C.name + "-broken")
    return MackeyFunctor(M.base, broken, M.trans, name=M.name + "-broken")


def cmd_theorem_a(cfg: RunConfig, args: argparse.Namespace) -> int:
    spec = load_amalgam(args.spec)
    if cfg.prime is not None and cfg.prime != spec.p:
        raise InputError(f"--prime {cfg.prime} disagrees with the amalgam's prime {spec.p}")
    if spec.G1.order > cfg.cap_order or spec.G2.order > cfg.cap_order:
        raise OrderBoundExceeded(f"group order exceeds --cap-order {cfg.cap_order}")
    am = build_amalgam_fusion(spec)
    base = am.full_orbit()
    degrees = args.degree if args.degree else [1]
    data = CohomologyData(am.F.subgroups, spec.p, max(degrees))
    functors = []
    for kind in args.functor:
        if kind == "fixed-point":
            functors.append(fixed_point_mackey(am.F, base=base))
        elif kind == "cohomology":
            functors += [cohomology_mackey(am.F, j, base=base, data=data) for j in degrees]
        else:
            functors.append(_broken_functor(fixed_point_mackey(am.F, base=base)))
    reports, md, status = [], [], EXIT_OK
    for M in functors:
        try:
            rep = verify_exact_sequence(am, M, cfg.maxdeg)
        except HypothesisFailed as exc:
            log.error("%s: %s", M.name, exc)
            rep = getattr(exc, "report", None)
            status = EXIT_ASSERT
            reports.append({"functor": M.name, "error": "HypothesisFailed", "detail": str(exc),
                            **({"report": rep.to_json()} if rep is not None else {})})
            continue
        if not rep.ok:
            status = EXIT_ASSERT
        reports.append(rep.to_json())
        md.append(rep.to_markdown())
    _emit(cfg, {"spec": spec.name, "p": spec.p, "maxdeg": cfg.maxdeg, "reports": reports}, "\n".join(md))
    return status


# ---------------------------------------------------------------------------
# dwyer-oracle


def cmd_dwyer_oracle(cfg: RunConfig, args: argparse.Namespace) -> int:
    if args.random:
        cases = random_oracle_cases(np.random.default_rng(cfg.seed), args.random, maxdeg=cfg.maxdeg)
    else:
        if not args.group:
            raise InputError("give --group or --random")
        try:
            gref = json.loads(args.group)
        except json.JSONDecodeError:
            gref = args.group
        if isinstance(gref, str) and Path(gref).is_file():
            gref = {"file": gref}
        G = group_from_json(gref)
        if G.order > cfg.cap_order:
            raise OrderBoundExceeded(f"|G| = {G.order} exceeds --cap-order {cfg.cap_order}")

        def sub(gens_json: str | None):
            if gens_json is None:
                return G.whole
            gens = json.loads(gens_json)
            return G.subgroup([validate_perm(g, G.degree) for g in gens])

        H = sub(args.H)
        N = sub(args.normal) if args.normal else None
        p = cfg.prime or 2
        fam = family_of(G, args.family, p, N)
        Ps = [sub(x) for x in args.P] if args.P else fam
        cases = [run_oracle(G, H, P, fam, p, cfg.maxdeg, family_name=args.family) for P in Ps]
    status = EXIT_OK
    for c in cases:
        if not c.asserted:
            log.warning("family %s is not product-closed or misses P; not asserting", c.family)
        elif not c.ok:
            status = EXIT_ASSERT
    md = ["| G | H | P | family | p | H_n | predicted H_0 | ok |", "|---|---|---|---|---|---|---|---|"]
    for c in cases:
        md.append(f"| {c.group} | {c.H.order} | {c.P.order} | {c.family} | {c.p} | {c.homology} "
                  f"| {c.predicted} | {c.ok if c.asserted else 'not asserted'} |")
    _emit(cfg, {"cases": [c.to_json() for c in cases], "all_ok": status == EXIT_OK}, "\n".join(md) + "\n")
    return status


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, default=None)
    common.add_argument("--maxdeg", type=int, default=4)
    common.add_argument("--cap-order", type=int, default=ORDER_BOUND)
    common.add_argument("--cap-dim", type=int, default=gfp.DIM_CAP)
    common.add_argument("--skeleton", action=argparse.BooleanOptionalAction, default=True)
    common.add_argument("--integral", action="store_true")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="JSON output path; a markdown twin is written next to it")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="fusionlim", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fusion-build", parents=[common], help="build the fusion system of an amalgam spec")
    p.add_argument("spec")
    p.set_defaults(func=cmd_fusion_build)

    p = sub.add_parser("limits", parents=[common], help="higher limits of a module over a finite category")
    p.add_argument("category")
    p.add_argument("module", nargs="?")
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("theorem-a", parents=[common], help="verify the exact sequence on an amalgam spec")
    p.add_argument("spec")
    p.add_argument("--functor", action="append", choices=["fixed-point", "cohomology", "broken"])
    p.add_argument("--degree", type=int, action="append", help="cohomology degree (repeatable)")
    p.set_defaults(func=cmd_theorem_a)

    p = sub.add_parser("dwyer-oracle", parents=[common], help="coset-poset homology against predicted counts")
    p.add_argument("--group", help="group name, inline JSON, or group file")
    p.add_argument("--H", help="generators of H as JSON (default: G)")
    p.add_argument("--family", choices=FAMILY_KINDS, default="all")
    p.add_argument("--normal", help="generators of N for the overgroup family")
    p.add_argument("--P", action="append", help="generators of P as JSON (repeatable; default: every member)")
    p.add_argument("--random", type=int, default=0, help="run this many random cases instead")
    p.set_defaults(func=cmd_dwyer_oracle)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if getattr(args, "functor", None) is None and args.command == "theorem-a":
        args.functor = ["fixed-point", "cohomology"]
    inputs = [x for x in (getattr(args, k, None) for k in ("spec", "category", "module", "group")) if x]
    cfg = RunConfig(args.command, inputs, args.prime, args.maxdeg, args.cap_order, args.cap_dim,
                    args.skeleton, args.integral, args.seed, args.out)
    try:
        cfg.check()
        return args.func(cfg, args)
    except (OrderBoundExceeded, DimensionBlowup, DegreeTooLarge, GroupTooLarge) as exc:
        log.error("resource cap: %s", exc)
        return EXIT_CAP
    except InputError as exc:
        log.error("input error: %s", exc)
        return EXIT_INPUT
    except (HypothesisFailed, AssertionError) as exc:
        log.error("assertion failed: %s", exc)
        return EXIT_ASSERT
    except FusionLimError as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
