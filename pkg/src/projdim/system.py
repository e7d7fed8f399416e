"""Loading and validating self-projective systems; hole enumeration.

A system is a family of non-negative unimodular integer generators N_j acting
on the unit simplex by x -> N x / |N x|, together with hole matrices M_k whose
simplex images are the first-level holes of the attractor.  The flagship
preset is the Rauzy gasket (d = 2, three parabolic generators, one hole).
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .geometry import Simplex, image_simplex, standard_simplex, volume_ratio
from .words import (
    ExtendedWord,
    GeneratorMatrix,
    HoleMatrix,
    MatrixProduct,
    MaxDepth,
    NormCap,
    PruningPolicy,
    TraversalSummary,
    VolumeFloor,
    Word,
    compose,
    l1_operator_norm,
)

_POWER_RE = re.compile(
    r"^\s*(?:(?P<coef>-?\d+(?:/\d+)?)\s*\*\s*)?"
    r"(?P<base>\d+(?:/\d+)?)\s*\^\s*\(\s*(?P<exp>-?\d+(?:/\d+)?)\s*\)\s*$"
)


def parse_entry(value) -> float:
    """Parse a config matrix entry.

    Accepts plain numbers, exact rationals "p/q", and whitelisted power
    expressions "b^(p/q)" (optionally "c*b^(p/q)") with rational b, c, p/q.
    """
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ValueError("matrix entry must be a number or string, got %r" % (value,))
    text = value.strip()
    m = _POWER_RE.match(text)
    if m:
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        base = Fraction(m.group("base"))
        exp = Fraction(m.group("exp"))
        return float(coef) * float(base) ** float(exp)
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError("cannot parse matrix entry %r" % (value,)) from exc


@dataclass(frozen=True)
class IfsSystem:
    """A validated bundle of generators and hole matrices in dimension d."""

    d: int
    generators: tuple[GeneratorMatrix, ...]
    holes: tuple[HoleMatrix, ...]
    name: str = ""

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("dimension must be >= 2")
        if len(self.generators) < 1:
            raise ValueError("need at least one generator (m >= 1)")
        if len(self.holes) < 1:
            raise ValueError("need at least one hole matrix (K >= 1)")
        size = self.d + 1
        for g in self.generators:
            if g.size != size:
                raise ValueError("generator size does not match dimension")
        for h in self.holes:
            if h.size != size:
                raise ValueError("hole matrix size does not match dimension")
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "holes", tuple(self.holes))

    @property
    def m(self) -> int:
        return len(self.generators)

    @property
    def num_holes(self) -> int:
        return len(self.holes)

    @property
    def simplex(self) -> Simplex:
        return standard_simplex(self.d)

    def fingerprint(self) -> tuple:
        return (
            self.d,
            tuple(g.entries for g in self.generators),
            tuple(h.entries for h in self.holes),
        )


def rauzy_system() -> IfsSystem:
    n1 = GeneratorMatrix(((1, 1, 1), (0, 1, 0), (0, 0, 1)))
    n2 = GeneratorMatrix(((1, 0, 0), (1, 1, 1), (0, 0, 1)))
    n3 = GeneratorMatrix(((1, 0, 0), (0, 1, 0), (1, 1, 1)))
    alpha = 2.0 ** (-1.0 / 3.0)
    m = HoleMatrix(((0, alpha, alpha), (alpha, 0, alpha), (alpha, alpha, 0)))
    return IfsSystem(d=2, generators=(n1, n2, n3), holes=(m,), name="rauzy")


PRESETS: dict[str, Callable[[], IfsSystem]] = {"rauzy": rauzy_system}


def load_system(source) -> IfsSystem:
    """Load a system from a preset name, a config dict, or a JSON file path."""
    if isinstance(source, IfsSystem):
        return source
    if isinstance(source, str):
        if source in PRESETS:
            return PRESETS[source]()
        with open(source, "r", encoding="utf-8") as fh:
            try:
                source = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError("malformed config JSON: %s" % (exc,)) from exc
    if not isinstance(source, dict):
        raise ValueError("config must be a preset name, path, or dict")
    try:
        name = source.get("name", "")
        d = int(source["dimension"])
        gen_specs = source["generators"]
        hole_specs = source["holes"]
    except KeyError as exc:
        raise ValueError("config missing required key %s" % (exc,)) from exc
    if not gen_specs:
        raise ValueError("config has no generators")
    if not hole_specs:
        raise ValueError("config has no hole matrices")
    generators = []
    for g in gen_specs:
        rows = tuple(tuple(int(v) for v in row) for row in g)
        generators.append(GeneratorMatrix(rows))
    holes = []
    for h in hole_specs:
        rows = tuple(tuple(parse_entry(v) for v in row) for row in h)
        holes.append(HoleMatrix(rows))
    return IfsSystem(d=d, generators=tuple(generators), holes=tuple(holes), name=name)


@dataclass
class TilingReport:
    """Result of the first-level tiling checks."""

    volume_ratios: list
    additivity_defect: float
    additivity_ok: bool
    interior_collisions: int
    disjoint_ok: bool
    holes_nondegenerate: bool
    samples: int

    @property
    def passed(self) -> bool:
        return self.additivity_ok and self.disjoint_ok and self.holes_nondegenerate

    def failures(self) -> list[str]:
        out = []
        if not self.additivity_ok:
            out.append("volume additivity defect %.3e exceeds 1e-9" % self.additivity_defect)
        if not self.disjoint_ok:
            out.append("%d interior collisions in %d samples" % (self.interior_collisions, self.samples))
        if not self.holes_nondegenerate:
            out.append("a first-level hole is degenerate")
        return out


def validate_tiling(system: IfsSystem, samples: int = 100_000, seed: int = 0) -> TilingReport:
    """Check the first-level tiling hypotheses.

    (a) sum of image and hole volume ratios equals 1 (within 1e-9);
    (b) the m + K first-level cells have disjoint interiors, certified by
        uniform sampling (zero interior collisions allowed);
    (c) every hole simplex is non-degenerate.
    Boundary contacts do not trigger (b): a sampled point lands on a cell
    boundary with probability 0, and membership uses a strict interior margin.
    """
    delta = system.simplex
    cells = [image_simplex(g, delta) for g in system.generators]
    cells += [image_simplex(h, delta) for h in system.holes]
    ratios = [volume_ratio(g, delta) for g in system.generators]
    ratios += [volume_ratio(h, delta) for h in system.holes]
    defect = abs(sum(ratios) - 1.0)

    holes_ok = all(not image_simplex(h, delta).is_degenerate for h in system.holes)

    rng = np.random.default_rng(seed)
    pts = delta.sample_uniform(samples, rng)
    inside = np.zeros(samples, dtype=np.int64)
    for cell in cells:
        lam = cell.barycentric(pts)
        inside += (lam.min(axis=1) > 1e-9).astype(np.int64)
    collisions = int((inside > 1).sum())

    return TilingReport(
        volume_ratios=ratios,
        additivity_defect=defect,
        additivity_ok=defect <= 1e-9,
        interior_collisions=collisions,
        disjoint_ok=collisions == 0,
        holes_nondegenerate=holes_ok,
        samples=samples,
    )


@dataclass(frozen=True)
class HoleRecord:
    """One enumerated hole: the simplex T_i(hole_k) with cached statistics."""

    word: ExtendedWord
    simplex: Simplex
    log_volume: float
    inradius: float

    @property
    def volume(self) -> float:
        return math.exp(self.log_volume)


@dataclass
class HoleSummary(TraversalSummary):
    level_volume_sums: dict = field(default_factory=dict)

    def record_hole(self, level: int, volume: float):
        self.level_volume_sums[level] = self.level_volume_sums.get(level, 0.0) + volume


def enumerate_holes(
    system: IfsSystem,
    policy: PruningPolicy,
    visitor: Callable[[HoleRecord], None] | None = None,
) -> HoleSummary:
    """Visit every hole simplex T_i(hole_k) under the pruning policy.

    Hole volumes come from the product formula vol = vol(simplex) * prod of
    inverse column sums of N_i M_k, evaluated on the exact word product; the
    image simplex is never re-triangulated to get its volume.
    """
    delta = system.simplex
    log_vol_delta = delta.log_volume
    hole_arrays = [h.as_array() for h in system.holes]
    m = len(system.generators)

    if isinstance(policy, VolumeFloor):
        # image volume of the word itself bounds every hole below it
        def img_volume(prod: MatrixProduct) -> float:
            cols = np.array(prod.entries, dtype=np.float64).sum(axis=0)
            return math.exp(log_vol_delta - np.log(cols).sum())
    elif not isinstance(policy, (MaxDepth, NormCap)):
        raise ValueError("unsupported pruning policy %r" % (policy,))

    summary = HoleSummary()
    stack = [MatrixProduct.identity(system.d + 1)]
    while stack:
        prod = stack.pop()
        level = len(prod.word)
        summary.record(level, max(max(r) for r in prod.entries))
        p_arr = prod.as_array()
        for k, h_arr in enumerate(hole_arrays, start=1):
            full = p_arr @ h_arr
            col = full.sum(axis=0)
            log_vol = log_vol_delta - float(np.log(col).sum())
            simplex = Simplex((full / col).T)
            record = HoleRecord(
                word=ExtendedWord(prod.word, k),
                simplex=simplex,
                log_volume=log_vol,
                inradius=simplex.inradius,
            )
            summary.record_hole(level, math.exp(log_vol))
            if visitor is not None:
                visitor(record)
        if isinstance(policy, MaxDepth) and level >= policy.depth:
            continue
        for letter in range(m, 0, -1):
            child = compose(prod, letter, system.generators)
            if isinstance(policy, NormCap) and l1_operator_norm(child) > policy.cap:
                continue
            if isinstance(policy, VolumeFloor) and img_volume(child) < policy.floor:
                continue
            stack.append(child)
    return summary
