"""System assembly and structural checks.

A system couples a directed multigraph with one compact seed set plus open
working neighborhood per vertex and one contraction map per edge (the map
carries points of the terminal vertex's seed into the initial vertex's
seed).  This module validates the defining conditions, certifies separation
of sibling edge images, estimates summability thresholds for infinite
alphabets, and reduces multigraph systems to simple ones.

Symbolic conventions used throughout the package: words are tuples of EDGE
labels read left to right; a word (e0, ..., en) is admissible when
terminal(e_i) == initial(e_{i+1}); its enclosure is the set
T_{e0} o ... o T_{en} (seed of terminal(e_n)), computed exactly for ball
seeds under the supported map families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import maps as mapslib
from .errors import (
    ConditionViolation,
    DomainViolation,
    NonAdmissibleWord,
)
from .graphs import (
    DirectedMultigraph,
    Enumeration,
    build_edge_transition,
)
from .shapes import (
    GEOM_TOL,
    diameter,
    interior_margin,
    overlap_witness_point,
    separation_gap,
)

DEFAULT_VERTEX_HORIZON = 64
DEFAULT_EDGE_HORIZON = 4096


@dataclass(frozen=True)
class SeedSet:
    """Compact seed plus open working neighborhood of one vertex."""

    vertex: object
    seed: object
    neighborhood: object


@dataclass(frozen=True)
class ContractionBound:
    """Uniform contraction certificate.

    depth=1: every edge map has derivative sup <= rate < 1 on the working
    neighborhoods.  depth=2: only pairwise compositions are certified below
    rate; single steps may reach 1.  effective_rate is the per-step decay
    usable in geometric estimates (rate, or sqrt(rate) at depth 2) and
    comparison >= 1 is the constant in sup-of-n-step-products <=
    comparison * effective_rate**n.
    """

    depth: int
    rate: float
    effective_rate: float
    comparison: float

    def __post_init__(self):
        if self.depth not in (1, 2):
            raise ValueError("depth must be 1 or 2")
        if not (0.0 < self.rate < 1.0):
            raise ValueError(f"rate {self.rate} outside (0,1)")


@dataclass(frozen=True)
class TailWitness:
    """Family-declared bound on sums beyond a horizon.

    unit: "vertex" sums per-vertex out-edge sups (simple systems), "edge"
    sums per-edge sups.  bound(k, s) must upper-bound the sum of unit terms
    strictly beyond the first k units of the enumeration, or +inf when no
    finite bound is available at that exponent.  diverges_below marks the
    exponent under which the full sum provably diverges (None if unknown).
    pressure_upper, when set, is a callable s -> certified upper bound for
    the untruncated pressure; families prove it by hand, see the scenario
    docstrings.
    """

    kind: str
    unit: str
    bound: object
    diverges_below: float = None
    description: str = ""
    pressure_upper: object = None

    def __post_init__(self):
        if self.unit not in ("vertex", "edge"):
            raise ValueError(f"unknown unit {self.unit}")


def finite_tail(unit="edge"):
    return TailWitness(
        kind="finite",
        unit=unit,
        bound=lambda k, s: 0.0,
        diverges_below=None,
        description="finite alphabet, empty tail",
    )


class GifsSystem:
    """Graph plus seeds plus edge maps, with cached derivative ranges.

    seeds/maps may be dicts (finite systems) or callables (countable ones).
    vertex_bound, when given, must return sup over ALL out-edges of a vertex
    of the derivative sup on the terminal seed; it is required for vertices
    of infinite out-degree.
    """

    def __init__(self, graph, seeds, maps, ambient_dim, contraction=None,
                 tail=None, vertex_bound=None, beta=1.0, c_mt=1.0,
                 name="system", reduction=None, edge_horizon_cap=None):
        self.graph = graph
        self._seed_fn = seeds.__getitem__ if hasattr(seeds, "__getitem__") else seeds
        self._map_fn = maps.__getitem__ if hasattr(maps, "__getitem__") else maps
        self.ambient_dim = int(ambient_dim)
        self.contraction = contraction
        self.tail = tail
        self.vertex_bound = vertex_bound
        self.beta = float(beta)
        self.c_mt = float(c_mt)
        self.name = name
        self.reduction = reduction
        # deepest materialization that stays inside float64 (seed radii or
        # map ratios of countable families can underflow); None = no cap
        self.edge_horizon_cap = edge_horizon_cap
        self._seed_cache = {}
        self._map_cache = {}
        self._range_cache = {}
        self._image_cache = {}
        self._transition = None
        self._adjacency = None
        self._adjacency_horizon = 0
        self._distortion_cache = {}

    # ---- basic accessors -------------------------------------------------

    def seed(self, v):
        if v not in self._seed_cache:
            got = self._seed_fn(v)
            if not isinstance(got, SeedSet):
                raise TypeError(f"seed callback returned {type(got).__name__}")
            self._seed_cache[v] = got
        return self._seed_cache[v]

    def map_of(self, e):
        if e not in self._map_cache:
            self._map_cache[e] = self._map_fn(e)
        return self._map_cache[e]

    def letters(self, count):
        return self.graph.edge_prefix(self.clamp_edges(count))

    def clamp_edges(self, count):
        if self.edge_horizon_cap is None:
            return count
        return min(count, self.edge_horizon_cap)

    def vertices_prefix(self, count):
        return self.graph.vertex_prefix(count)

    @property
    def is_finite(self):
        return self.graph.edges.is_finite

    def transition(self):
        if self._transition is None:
            self._transition = build_edge_transition(self.graph)
        return self._transition

    # ---- derivative data -------------------------------------------------

    def letter_range(self, e, on="seed"):
        """Certified derivative range of the edge map over the terminal
        vertex's seed (default) or neighborhood."""
        key = (e, on)
        if key not in self._range_cache:
            ss = self.seed(self.graph.terminal(e))
            shape = ss.seed if on == "seed" else ss.neighborhood
            self._range_cache[key] = mapslib.derivative_range_over_set(
                self.map_of(e), shape
            )
        return self._range_cache[key]

    def seed_image(self, e):
        """(enclosure of T_e(seed of terminal), exact flag)."""
        if e not in self._image_cache:
            ss = self.seed(self.graph.terminal(e))
            self._image_cache[e] = mapslib.image_enclosure(self.map_of(e), ss.seed)
        return self._image_cache[e]

    def enclosure(self, word):
        """Exact-or-super set for the cylinder of an edge word."""
        if not word:
            raise NonAdmissibleWord("empty word")
        for a, b in zip(word, word[1:]):
            if self.graph.terminal(a) != self.graph.initial(b):
                raise NonAdmissibleWord(f"{a} cannot precede {b}")
        shape = self.seed(self.graph.terminal(word[-1])).seed
        for e in reversed(word):
            shape, _ = mapslib.image_enclosure(self.map_of(e), shape)
        return shape

    # ---- adjacency over a materialized horizon ---------------------------

    def _ensure_adjacency(self, horizon_edges):
        if self._adjacency is None or self._adjacency_horizon < horizon_edges:
            adj = {}
            for e in self.letters(horizon_edges):
                adj.setdefault(self.graph.initial(e), []).append(e)
            self._adjacency = adj
            self._adjacency_horizon = horizon_edges

    def out_edges(self, v, horizon_edges=DEFAULT_EDGE_HORIZON):
        self._ensure_adjacency(horizon_edges)
        return self._adjacency.get(v, [])

    def vertex_sup(self, v, horizon_edges=DEFAULT_EDGE_HORIZON):
        """sup over out-edges of the derivative sup on the terminal seed;
        the declared vertex_bound wins (it covers unmaterialized edges)."""
        if self.vertex_bound is not None:
            return float(self.vertex_bound(v))
        outs = self.out_edges(v, horizon_edges)
        if not outs:
            return None
        return max(self.letter_range(e).upper for e in outs)

    # ---- distortion ------------------------------------------------------

    def distortion(self, horizon_edges=256):
        if horizon_edges in self._distortion_cache:
            return self._distortion_cache[horizon_edges]
        edges = self.letters(horizon_edges)
        fams = [self.map_of(e) for e in edges]
        nbhds = []
        seen = set()
        for e in edges:
            v = self.graph.terminal(e)
            if v not in seen:
                seen.add(v)
                nbhds.append(self.seed(v).neighborhood)
        cb = self.contraction or contraction_certificate(self, horizon_edges)
        prof = mapslib.distortion_profile(
            fams, nbhds, cb.effective_rate, beta=self.beta, c_mt=self.c_mt
        )
        self._distortion_cache[horizon_edges] = prof
        return prof


# ---------------------------------------------------------------------------
# contraction certificates


def contraction_certificate(system, horizon_edges=DEFAULT_EDGE_HORIZON,
                            pair_budget=300000):
    """Certify uniform contraction on working neighborhoods over the
    materialized edges: depth 1 when the plain sup is below 1, else depth 2
    via pairwise composition bounds sup||(T_e o T_f)'|| <=
    sup_{T_f(O)}||T_e'|| * sup_O||T_f'||."""
    edges = system.letters(horizon_edges)
    if not edges:
        raise ConditionViolation("no edges to certify")
    g = system.graph
    sups = {e: system.letter_range(e, on="neighborhood").upper for e in edges}
    r1 = max(sups.values())
    if r1 < 1.0:
        return ContractionBound(1, r1, r1, 1.0)
    by_initial = {}
    for e in edges:
        by_initial.setdefault(g.initial(e), []).append(e)
    rho = 0.0
    checked = 0
    for f in edges:
        nb = system.seed(g.terminal(f)).neighborhood
        image, _ = mapslib.image_enclosure(system.map_of(f), nb)
        for e in by_initial.get(g.terminal(f), ()):
            inner = mapslib.derivative_range_over_set(system.map_of(e), image)
            rho = max(rho, inner.upper * sups[f])
            checked += 1
            if checked > pair_budget:
                raise ConditionViolation(
                    f"pair budget {pair_budget} exhausted at rho={rho:.4g}"
                )
    if rho >= 1.0:
        raise ConditionViolation(
            f"no contraction at depth 2: pairwise bound {rho:.6g} >= 1"
        )
    return ContractionBound(2, rho, math.sqrt(rho), 1.0 / math.sqrt(rho))


# ---------------------------------------------------------------------------
# condition validation


@dataclass(frozen=True)
class CheckEntry:
    status: str          # satisfied | violated | inconclusive | skipped
    detail: str
    witness: object = None


@dataclass(frozen=True)
class ConditionReport:
    checks: dict
    horizon_vertices: int
    horizon_edges: int

    @property
    def passed(self):
        return all(c.status != "violated" for c in self.checks.values())

    def summary_lines(self):
        out = []
        for name in sorted(self.checks):
            c = self.checks[name]
            out.append(f"{name}: {c.status} ({c.detail})")
        return out


@dataclass(frozen=True)
class SeparationReport:
    mode: str            # "SSC" or "OSC"
    verdict: str         # certified-separated | overlap-witness | inconclusive
    pairs_checked: int
    min_gap: float
    witness: object = None
    horizon_edges: int = 0


def check_separation(system, mode="SSC", horizon_edges=DEFAULT_EDGE_HORIZON,
                     tol=GEOM_TOL):
    """Pairwise disjointness of sibling seed images.

    Sibling = same initial vertex.  The seed images stand in for the
    limit-set-restricted images, which makes a `certified-separated` SSC
    verdict conservative (stronger than needed).  Touching images
    (gap within tol of 0) still certify the open variant, since interiors
    of touching closed balls/boxes are disjoint, but leave the strong
    variant inconclusive.  An `overlap-witness` needs exact enclosures;
    overlap of a conservative enclosure proves nothing.
    """
    if mode not in ("SSC", "OSC"):
        raise ValueError(f"mode {mode} is not SSC or OSC")
    edges = system.letters(horizon_edges)
    groups = {}
    for e in edges:
        groups.setdefault(system.graph.initial(e), []).append(e)
    verdict = "certified-separated"
    min_gap = math.inf
    witness = None
    pairs = 0
    for group in groups.values():
        shapes = [system.seed_image(e) for e in group]
        for i in range(len(group)):
            si, exact_i = shapes[i]
            for j in range(i + 1, len(group)):
                sj, exact_j = shapes[j]
                pairs += 1
                gap = separation_gap(si, sj)
                min_gap = min(min_gap, gap)
                if gap < -tol:
                    if exact_i and exact_j:
                        point = overlap_witness_point(si, sj)
                        return SeparationReport(
                            mode, "overlap-witness", pairs, gap,
                            (group[i], group[j], point), horizon_edges,
                        )
                    if verdict != "overlap-witness":
                        verdict = "inconclusive"
                        witness = (group[i], group[j], None)
                elif mode == "SSC" and gap <= tol:
                    # touching closed images: cannot certify strong disjointness
                    if verdict == "certified-separated":
                        verdict = "inconclusive"
                        witness = (group[i], group[j], None)
    if pairs == 0:
        min_gap = math.inf
    return SeparationReport(mode, verdict, pairs, min_gap, witness, horizon_edges)


def validate_conditions(system, horizon_vertices=DEFAULT_VERTEX_HORIZON,
                        horizon_edges=DEFAULT_EDGE_HORIZON):
    """Evaluate the defining conditions on a finite horizon.

    Violations are report entries with witnesses, never exceptions."""
    checks = {}
    g = system.graph
    verts = system.vertices_prefix(horizon_vertices)
    edges = system.letters(horizon_edges)

    # compact seeds with uniformly bounded diameter, inside their open
    # neighborhoods with positive margin
    sup_diam = 0.0
    min_margin = math.inf
    bad_seed = bad_margin = None
    for v in verts:
        ss = system.seed(v)
        d = diameter(ss.seed)
        sup_diam = max(sup_diam, d)
        if not (d > 0.0) or not math.isfinite(d):
            bad_seed = v
        m = interior_margin(ss.neighborhood, ss.seed)
        min_margin = min(min_margin, m)
        if m <= 0.0:
            bad_margin = v
    checks["seed-geometry"] = CheckEntry(
        "violated" if bad_seed is not None else "satisfied",
        f"{len(verts)} vertices, sup seed diameter {sup_diam:.6g}",
        bad_seed,
    )
    checks["seed-inside-neighborhood"] = CheckEntry(
        "violated" if bad_margin is not None else "satisfied",
        f"min margin {min_margin:.6g}",
        bad_margin,
    )

    # every edge map sends the terminal seed into the initial seed and the
    # terminal neighborhood into the initial neighborhood
    bad_edge = None
    worst = math.inf
    for e in edges:
        try:
            img, _ = system.seed_image(e)
        except DomainViolation:
            bad_edge = e    # singular set meets the seed itself
            break
        m = interior_margin(system.seed(g.initial(e)).seed, img)
        worst = min(worst, m)
        if m < -GEOM_TOL:
            bad_edge = e
            break
    checks["maps-into-seeds"] = CheckEntry(
        "violated" if bad_edge is not None else "satisfied",
        f"{len(edges)} edges, min containment margin {worst:.3g}",
        bad_edge,
    )
    # every edge map must be well-defined with finite derivative on the whole
    # working neighborhood of its terminal vertex (its singular set, if any,
    # must stay clear); strict image-in-neighborhood containment is NOT
    # required -- the hub letter of the continued-fraction family genuinely
    # spills over while every quantity we compute stays sound
    bad_nb = None
    detail_nb = "all derivative ranges over neighborhoods finite"
    for e in edges:
        try:
            rng = system.letter_range(e, on="neighborhood")
        except DomainViolation as err:
            bad_nb = e
            detail_nb = str(err)
            break
        if not math.isfinite(rng.upper):
            bad_nb = e
            detail_nb = "infinite derivative bound"
            break
    checks["neighborhood-domain"] = CheckEntry(
        "violated" if bad_nb is not None else "satisfied",
        detail_nb,
        bad_nb,
    )

    # uniform contraction (or the declared certificate re-checked)
    declared = system.contraction
    try:
        if declared is not None and declared.depth == 1:
            offender = None
            for e in edges:
                rng = system.letter_range(e, on="neighborhood")
                if rng.upper > declared.rate + GEOM_TOL:
                    offender = e
                    break
            checks["uniform-contraction"] = CheckEntry(
                "violated" if offender is not None else "satisfied",
                f"declared depth-1 rate {declared.rate}",
                offender,
            )
        else:
            cb = declared or contraction_certificate(system, horizon_edges)
            checks["uniform-contraction"] = CheckEntry(
                "satisfied" if cb.rate < 1.0 else "violated",
                f"depth-{cb.depth} rate {cb.rate:.6g} "
                f"(effective {cb.effective_rate:.6g})",
                None,
            )
    except (ConditionViolation, DomainViolation) as err:
        checks["uniform-contraction"] = CheckEntry("violated", str(err), None)

    # separation, both flavors
    for mode, key in (("SSC", "separation-strong"), ("OSC", "separation-open")):
        rep = check_separation(system, mode, horizon_edges)
        status = {
            "certified-separated": "satisfied",
            "overlap-witness": "violated",
            "inconclusive": "inconclusive",
        }[rep.verdict]
        checks[key] = CheckEntry(
            status,
            f"{rep.pairs_checked} sibling pairs, min gap {rep.min_gap:.3g}",
            rep.witness,
        )

    # seed contractibility: diam J_v <= c * sup over out-edges of the
    # derivative sup; reports the smallest admissible constant
    c_cj = 0.0
    skipped = 0
    degenerate = None
    for v in verts:
        sup = system.vertex_sup(v, horizon_edges)
        if sup is None:
            skipped += 1
            continue
        if sup <= 0.0:
            degenerate = v
            break
        c_cj = max(c_cj, diameter(system.seed(v).seed) / sup)
    checks["seed-contractibility"] = CheckEntry(
        "violated" if degenerate is not None else "satisfied",
        f"c_CJ = {c_cj:.6g} over {len(verts) - skipped} vertices "
        f"({skipped} without materialized out-edges)",
        degenerate,
    )

    return ConditionReport(checks, len(verts), len(edges))


# ---------------------------------------------------------------------------
# multigraph -> simple reduction


@dataclass(frozen=True)
class ReductionNotes:
    base_name: str
    dead_ends: tuple


def reduce_to_simple(system):
    """Rebuild a (finite) multigraph system as a simple one.

    New vertices are the old edges; the new edge (e, f) exists when
    terminal(e) == initial(f) and carries the old map T_e; the new seed of
    vertex e is the exact image T_e(old seed of terminal(e)); the new
    neighborhood is the old neighborhood of initial(e).  Edge words
    translate one-to-one: the base word (e0, ..., en) becomes the pair word
    ((e0,e1), ..., (e_{n-1},e_n)) with anchors pushed through T_{e_n}; see
    translate_word.
    """
    if not system.is_finite:
        raise ConditionViolation("reduction needs a materializable edge set")
    g = system.graph
    base_edges = g.edges.prefix(10 ** 9)
    # containment sanity before rebuilding
    for e in base_edges:
        img, _ = system.seed_image(e)
        if interior_margin(system.seed(g.initial(e)).seed, img) < -GEOM_TOL:
            raise ConditionViolation(f"edge {e} image escapes its seed")
    pairs = [
        (e, f)
        for e in base_edges
        for f in base_edges
        if g.terminal(e) == g.initial(f)
    ]
    succ = {e: [f for (a, f) in pairs if a == e] for e in base_edges}
    dead = tuple(e for e in base_edges if not succ[e])

    seeds = {}
    for e in base_edges:
        img, _ = system.seed_image(e)
        seeds[e] = SeedSet(e, img, system.seed(g.initial(e)).neighborhood)
    maps = {p: system.map_of(p[0]) for p in pairs}
    graph = DirectedMultigraph(
        vertices=Enumeration(items=tuple(base_edges)),
        edges=Enumeration(items=tuple(pairs)),
        initial=lambda p: p[0],
        terminal=lambda p: p[1],
        simple=True,
        has_edge=lambda v, u: g.terminal(v) == g.initial(u),
    )
    return GifsSystem(
        graph, seeds, maps, system.ambient_dim,
        contraction=system.contraction,
        tail=finite_tail("vertex"),
        beta=system.beta, c_mt=system.c_mt,
        name=system.name + "-reduced",
        reduction=ReductionNotes(system.name, dead),
    )


def translate_word(word, system):
    """Map a base edge word to the reduced system's edge word plus an
    anchor translator; the translated coding point is bitwise equal to the
    base coding point because exactly the same map applications run."""
    if len(word) < 2:
        raise NonAdmissibleWord("need at least two letters to translate")
    reduced_word = tuple((word[i], word[i + 1]) for i in range(len(word) - 1))
    last = word[-1]

    def push_anchor(anchor):
        return mapslib.apply(system.map_of(last), anchor)

    return reduced_word, push_anchor


# ---------------------------------------------------------------------------
# summability


@dataclass(frozen=True)
class SummabilityEstimate:
    selector: str
    unit: str
    theta_low: float
    theta_high: float
    declared_floor: float
    verdicts: tuple
    horizons: tuple


def _unit_terms(system, unit, count, s, selector):
    del selector  # conorm == norm for every supported family
    if unit == "vertex":
        out = []
        for v in system.vertices_prefix(count):
            sup = system.vertex_sup(v)
            out.append(0.0 if sup is None else sup ** s)
        return out
    return [system.letter_range(e).upper ** s for e in system.letters(count)]


def summability_verdict(system, s, horizons, unit, selector="norm",
                        divergence_threshold=1e3, increment_tol=0.05):
    """One exponent: `summable` (finite tail witness), `divergent`
    (partial sums past the threshold with nondecreasing increments), or
    `inconclusive`."""
    witness = system.tail
    if witness is not None and witness.unit == unit:
        t = witness.bound(horizons[-1], s)
        if math.isfinite(t):
            return "summable"
    terms = _unit_terms(system, unit, horizons[-1], s, selector)
    partial = []
    acc = 0.0
    idx = 0
    for h in horizons:
        while idx < min(h, len(terms)):
            acc += terms[idx]
            idx += 1
        partial.append(acc)
    increments = [b - a for a, b in zip(partial, partial[1:])]
    if partial[-1] > divergence_threshold and increments:
        ok = all(
            b >= a * (1.0 - increment_tol)
            for a, b in zip(increments, increments[1:])
        )
        if ok and increments[-1] > 0:
            return "divergent"
    return "inconclusive"


def summability_interval(system, selector="norm", horizons=None, unit=None,
                         s_max=None, resolution=1e-3,
                         divergence_threshold=1e3):
    """Estimate the summability threshold by bisecting the exponent line.

    theta_high is the infimum of exponents certified summable (via the tail
    witness); theta_low the supremum of exponents with a numeric divergence
    verdict.  A declared divergence floor from the witness is reported
    separately; it is family knowledge, not a computation.
    """
    if unit is None:
        if system.tail is not None:
            unit = system.tail.unit
        else:
            unit = "vertex" if system.graph.simple else "edge"
    if horizons is None:
        horizons = (256, 1024, DEFAULT_EDGE_HORIZON)
    if s_max is None:
        s_max = system.ambient_dim + 1.0
    verdicts = []

    def classify(s):
        v = summability_verdict(
            system, s, horizons, unit, selector, divergence_threshold
        )
        verdicts.append((s, v))
        return v

    lo_div, hi_sum = 0.0, math.inf
    # coarse scan, then bisection between the extreme verdicts
    grid = [s_max * i / 8 for i in range(1, 9)]
    for s in grid:
        v = classify(s)
        if v == "divergent":
            lo_div = max(lo_div, s)
        elif v == "summable":
            hi_sum = min(hi_sum, s)
    if math.isfinite(hi_sum):
        lo, hi = lo_div, hi_sum
        while hi - lo > resolution:
            mid = 0.5 * (lo + hi)
            v = classify(mid)
            if v == "summable":
                hi = mid
            else:
                lo = mid
                if v == "divergent":
                    lo_div = max(lo_div, mid)
        hi_sum = hi
    declared = math.nan
    if system.tail is not None and system.tail.diverges_below is not None:
        declared = system.tail.diverges_below
    return SummabilityEstimate(
        selector, unit, lo_div,
        hi_sum if math.isfinite(hi_sum) else math.inf,
        declared, tuple(verdicts), tuple(horizons),
    )


# ---------------------------------------------------------------------------
# subsystems


def subsystem(system, vertices=None, edges=None, name=None):
    """Restriction to a finite vertex and/or edge subset.

    Keeps seeds and maps; the restricted graph enumerates the kept edges in
    the parent's enumeration order (parent must be able to materialize
    them).  The parent's declared contraction stays valid (fewer maps);
    tails become trivially finite.
    """
    g = system.graph
    if edges is None:
        if vertices is None:
            raise ValueError("need vertices or edges to restrict")
        vset = set(vertices)
        pool = g.edge_prefix(DEFAULT_EDGE_HORIZON)
        edges = [e for e in pool if g.initial(e) in vset and g.terminal(e) in vset]
    edges = tuple(edges)
    if vertices is None:
        seen = []
        for e in edges:
            for v in (g.initial(e), g.terminal(e)):
                if v not in seen:
                    seen.append(v)
        vertices = seen
    vertices = tuple(vertices)
    eset = set(edges)
    graph = DirectedMultigraph(
        vertices=Enumeration(items=vertices),
        edges=Enumeration(items=edges),
        initial=g.initial,
        terminal=g.terminal,
        simple=g.simple,
        has_edge=(
            (lambda v, u: g.has_edge(v, u) and (v, u) in eset)
            if g.simple and g.has_edge is not None and all(isinstance(e, tuple) for e in edges)
            else None
        ),
    )
    return GifsSystem(
        graph, system._seed_fn, system._map_fn, system.ambient_dim,
        contraction=system.contraction,
        tail=finite_tail("vertex" if g.simple else "edge"),
        beta=system.beta, c_mt=system.c_mt,
        name=name or (system.name + "-sub"),
    )
