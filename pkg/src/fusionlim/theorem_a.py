"""Harness for the four-term exact sequence attached to an amalgam ``G1 *_S G2``.

The amalgam is never built.  Its fusion system is generated from the two
group fusion systems, and the ``C_G(P)/Z(P)`` data enters through the
coset-graph module of :mod:`fusionlim.dwyer`.
"""

from __future__ import annotations

import json
import time
from collections import deque
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from . import gfp
from .catalg import (CatModule, embedded_limit, ext_dims, hom_module, higher_limits, restrict_module,
                     skeleton_of)
from .category import inclusion_by_labels
from .dwyer import cgpc_module
from .errors import HypothesisFailed, InputError, NotFunctorial, NotSylow
from .fusion import FusionSystem, OrbitCategory, fusion_of_group, generate_fusion, orbit_category
from .grouptheory import FiniteGroup, Perm, Subgroup, compose, group_from_json, is_sylow, validate_perm
from .mackey import MackeyFunctor

DEFAULT_MAXDEG = 4


@dataclass
class AmalgamSpec:
    name: str
    p: int
    G1: FiniteGroup
    G2: FiniteGroup
    S: Subgroup                    # inside G1
    embedding: dict[Perm, Perm]    # S -> G2

    def check(self) -> None:
        if not is_sylow(self.G1, self.S, self.p):
            raise NotSylow(f"S is not a Sylow {self.p}-subgroup of G1")
        image = Subgroup(self.G2, self.embedding.values())
        if not is_sylow(self.G2, image, self.p):
            raise NotSylow(f"the image of S is not a Sylow {self.p}-subgroup of G2")


def _extend_embedding(S: Subgroup, gens: Sequence[Perm], images: Sequence[Perm]) -> dict[Perm, Perm]:
    """Extend ``gens -> images`` to a homomorphism on ``S``; fail if ill-defined or not injective."""
    ident_img = tuple(range(len(images[0]))) if images else None
    theta = {S.identity: ident_img}
    queue = deque([S.identity])
    while queue:
        x = queue.popleft()
        for g, h in zip(gens, images):
            y = compose(x, g)
            hy = compose(theta[x], h)
            if y in theta:
                if theta[y] != hy:
                    raise InputError("generator images do not define a homomorphism")
            else:
                theta[y] = hy
                queue.append(y)
    if len(theta) != S.order or len(set(theta.values())) != S.order:
        raise InputError("generator images do not define an injective homomorphism on S")
    return theta


def amalgam_from_json(obj: dict, base_dir: Path | None = None) -> AmalgamSpec:
    try:
        p = int(obj["p"])
        G1 = group_from_json(obj["G1"], base_dir)
        G2 = group_from_json(obj["G2"], base_dir)
        s1 = [validate_perm(g, G1.degree) for g in obj["S_in_G1"]]
        s2 = [validate_perm(g, G2.degree) for g in obj["S_in_G2"]]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed amalgam spec: {exc}") from exc
    if len(s1) != len(s2):
        raise InputError("S_in_G1 and S_in_G2 must list the same number of generators")
    gfp.check_prime(p)
    S = G1.subgroup(s1)
    for h in s2:
        if h not in G2:
            raise InputError("S_in_G2 contains a non-element of G2")
    if not s1:
        theta = {S.identity: G2.identity}
    else:
        theta = _extend_embedding(S, s1, s2)
    spec = AmalgamSpec(str(obj.get("name", "")), p, G1, G2, S, theta)
    spec.check()
    return spec


def load_amalgam(path: str | Path) -> AmalgamSpec:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except OSError as exc:
        raise InputError(f"{path}: cannot read: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise InputError(f"{path}: expected a JSON object")
    if not obj.get("name"):
        obj["name"] = path.stem
    return amalgam_from_json(obj, base_dir=path.parent)


def corpus_paths() -> list[Path]:
    root = resources.files("fusionlim") / "data" / "amalgams"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".json"))


def load_corpus() -> list[AmalgamSpec]:
    return [load_amalgam(p) for p in corpus_paths()]


@dataclass
class AmalgamFusion:
    spec: AmalgamSpec
    F: FusionSystem
    F1: FusionSystem
    F2: FusionSystem
    F3: FusionSystem
    centric: list[int]

    _orbit: dict = field(default_factory=dict, repr=False)

    @property
    def systems(self) -> tuple[FusionSystem, FusionSystem, FusionSystem]:
        return self.F1, self.F2, self.F3

    def full_orbit(self) -> OrbitCategory:
        if "full" not in self._orbit:
            self._orbit["full"] = orbit_category(self.F, name="O(F)")
        return self._orbit["full"]

    def centric_orbit(self, i: int = 0) -> OrbitCategory:
        """``O_C(F)`` for ``i = 0``, ``O_C(F_i)`` for ``i = 1, 2, 3``."""
        if i not in self._orbit:
            sys = (self.F, self.F1, self.F2, self.F3)[i]
            self._orbit[i] = orbit_category(sys, self.centric, name=f"O_C(F{i or ''})")
        return self._orbit[i]


def build_amalgam_fusion(spec: AmalgamSpec) -> AmalgamFusion:
    spec.check()
    S, p = spec.S, spec.p
    F1 = fusion_of_group(S, spec.G1, p, name=f"F_S({spec.G1.name or 'G1'})")
    F2 = fusion_of_group(S, spec.G2, p, embedding=spec.embedding, subgroups=F1.subgroups,
                         name=f"F_S({spec.G2.name or 'G2'})")
    F3 = fusion_of_group(S, S, p, subgroups=F1.subgroups, name="F_S(S)")
    F = generate_fusion(S, [F1, F2], name=f"<{F1.name}, {F2.name}>")
    return AmalgamFusion(spec, F, F1, F2, F3, F.centric_family())


def _check_functor(M: MackeyFunctor, amalgam: AmalgamFusion) -> None:
    if M.fusion is not amalgam.F and M.fusion != amalgam.F:
        raise InputError("Mackey functor is not defined over the amalgam's fusion system")
    M.contravariant.check_functorial()


def restricted(M: MackeyFunctor, amalgam: AmalgamFusion, i: int = 0) -> CatModule:
    """``M^*`` restricted to ``O_C(F)`` (``i = 0``) or ``O_C(F_i)``."""
    sub = amalgam.centric_orbit(i)
    inc = inclusion_by_labels(sub, M.base)
    return restrict_module(M.contravariant, inc)


@dataclass
class HypothesisReport:
    ok: bool
    limits: dict[int, list[int]]  # i -> [lim^1, ..., lim^maxdeg] over O_C(F_i)
    error: str = ""


def verify_hypotheses(amalgam: AmalgamFusion, M: MackeyFunctor, maxdeg: int = DEFAULT_MAXDEG) -> HypothesisReport:
    try:
        _check_functor(M, amalgam)
    except NotFunctorial as exc:
        return HypothesisReport(False, {}, f"functor rejected: {exc}")
    limits = {}
    ok = True
    for i in (1, 2, 3):
        Mi = restricted(M, amalgam, i)
        dims = higher_limits(Mi.cat, Mi, maxdeg)[1:]
        limits[i] = dims
        ok = ok and not any(dims)
    return HypothesisReport(ok, limits)


def stable_elements(M: MackeyFunctor, amalgam: AmalgamFusion, i: int) -> np.ndarray:
    """``M^{F_i}`` as a subspace of ``M(S)`` (columns)."""
    Mi = restricted(M, amalgam, i)
    sink = Mi.cat.object_of_subgroup(amalgam.F.S)
    return embedded_limit(Mi.cat, Mi, sink)


def stable_quotient(amalgam: AmalgamFusion, M: MackeyFunctor) -> int:
    """``dim M(S) / (M^{F_1} + M^{F_2})``."""
    A, B = stable_elements(M, amalgam, 1), stable_elements(M, amalgam, 2)
    d = M.dims[M.base.object_of_subgroup(amalgam.F.S)]
    both = np.concatenate([A, B], axis=1)
    return d - (gfp.rank(both, M.p) if both.size else 0)


@dataclass
class SharpnessReport:
    spec: str
    functor: str
    p: int
    maxdeg: int
    limits: list[int]
    stable_quotient: int | None = None
    hom_cgpc: int | None = None
    ext_cgpc: dict[int, int] = field(default_factory=dict)
    cgpc_dims: list[int] = field(default_factory=list)
    hypotheses: dict[int, list[int]] = field(default_factory=dict)
    hypotheses_ok: bool = True
    checks: dict[str, bool] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.hypotheses_ok and all(self.checks.values())

    def to_json(self, include_timings: bool = False) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        d["ext_cgpc"] = {str(k): v for k, v in sorted(self.ext_cgpc.items())}
        d["hypotheses"] = {str(k): v for k, v in sorted(self.hypotheses.items())}
        if not include_timings:
            d.pop("timings")
        return d

    def to_markdown(self) -> str:
        lines = [f"## {self.spec} / {self.functor} (p = {self.p})", ""]
        lines.append("| n | " + " | ".join(str(n) for n in range(len(self.limits))) + " |")
        lines.append("|---|" + "---|" * len(self.limits))
        lines.append("| dim lim^n | " + " | ".join(str(x) for x in self.limits) + " |")
        if self.ext_cgpc:
            lines.append("| dim Ext^(n-2)(C_GpC, M) | " + " | ".join(
                str(self.ext_cgpc.get(n - 2, "")) if n >= 3 else "" for n in range(len(self.limits))) + " |")
        lines.append("")
        if self.stable_quotient is not None:
            lines.append(f"- stable quotient: {self.stable_quotient}")
            lines.append(f"- dim Hom(C_GpC, M): {self.hom_cgpc}")
            lines.append(f"- C_GpC dims: {self.cgpc_dims}")
        for i, dims in sorted(self.hypotheses.items()):
            lines.append(f"- lim^1..{self.maxdeg} over O_C(F{i}): {dims}")
        for k, v in sorted(self.checks.items()):
            lines.append(f"- check ({k}): {'pass' if v else 'FAIL'}")
        lines.append(f"- verdict: {'pass' if self.ok else 'FAIL'}")
        return "\n".join(lines) + "\n"


def verify_exact_sequence(amalgam: AmalgamFusion, M: MackeyFunctor, maxdeg: int = DEFAULT_MAXDEG,
                          strict: bool = True) -> SharpnessReport:
    """Check (a) the Euler identity, (b)(c) the positional inequalities and
    (d) the Ext shift; raises :class:`HypothesisFailed` (``strict``) when the
    vanishing hypotheses fail."""
    t0 = time.perf_counter()
    hyp = verify_hypotheses(amalgam, M, maxdeg)
    rep = SharpnessReport(amalgam.spec.name, M.name, M.p, maxdeg, [], hypotheses=hyp.limits,
                          hypotheses_ok=hyp.ok)
    rep.timings["hypotheses"] = time.perf_counter() - t0
    if not hyp.ok:
        if strict:
            err = HypothesisFailed(hyp.error or f"higher limits over O_C(F_i) do not vanish: {hyp.limits}")
            err.report = rep
            raise err
        return rep
    t1 = time.perf_counter()
    Mp = restricted(M, amalgam, 0)
    cat = Mp.cat
    rep.limits = higher_limits(cat, Mp, maxdeg)
    rep.stable_quotient = stable_quotient(amalgam, M)
    C = cgpc_module(amalgam.F, amalgam.F1, amalgam.F2, base=cat, p=M.p)
    rep.cgpc_dims = C.dims
    rep.hom_cgpc = hom_module(C, Mp).shape[1]
    sk = skeleton_of(cat)
    Cs, Ms = restrict_module(C, sk.inclusion), restrict_module(Mp, sk.inclusion)
    if maxdeg >= 3:
        e = ext_dims(Cs, Ms, maxdeg - 2)
        rep.ext_cgpc = {n: e[n] for n in range(1, maxdeg - 1)}
    rep.timings["sequence"] = time.perf_counter() - t1
    lim1 = rep.limits[1] if maxdeg >= 1 else 0
    lim2 = rep.limits[2] if maxdeg >= 2 else 0
    rep.checks = {
        "a": lim1 - rep.stable_quotient + rep.hom_cgpc - lim2 == 0,
        "b": lim1 <= rep.stable_quotient,
        "c": lim2 <= rep.hom_cgpc,
        "d": all(rep.ext_cgpc[n] == rep.limits[n + 2] for n in rep.ext_cgpc),
    }
    return rep


def sharpness_scan(F: FusionSystem, M: MackeyFunctor, maxdeg: int = DEFAULT_MAXDEG,
                   family: Sequence[int] | None = None) -> dict:
    """``dim lim^n`` of ``M^*`` over the centric orbit category; nonzero ``n >= 1`` is flagged."""
    fam = F.centric_family() if family is None else list(family)
    sub = orbit_category(F, fam)
    inc = inclusion_by_labels(sub, M.base)
    Mp = restrict_module(M.contravariant, inc)
    dims = higher_limits(sub, Mp, maxdeg)
    flagged = [n for n in range(1, maxdeg + 1) if dims[n]]
    return {"fusion": F.name, "functor": M.name, "limits": dims, "flagged": flagged, "sharp": not flagged}
