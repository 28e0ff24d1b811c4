"""Certified two-sided brackets for the pressure of derivative-weighted shifts.

Three routes, each valid at every finite stage rather than only in the limit:

* word sums: the sup-weight partition sum over admissible n-letter words is
  submultiplicative (enclosures only shrink when a word grows), so
  (1/n) log Z_n upper-bounds the truncated pressure at every n; inf-weight
  sums over returning words sharing a fixed first letter are
  supermultiplicative and give the matching lower bound.
* spectral: depth-m word states with interval transition weights; the inf
  and sup weight matrices sandwich the cylinder potential entrywise, so
  their spectral radii (enclosed per strongly connected component by
  Collatz-Wielandt ratios around a power iteration) bracket the pressure.
* full-system uppers: countable alphabets are exhausted from below by their
  finite truncations, so every truncated lower stands; uppers for the
  untruncated system fold in the declared tail witness (per-letter bound
  sums for edge-unit tails, a family-proved spectral bound otherwise).
"""

import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse as sp

from . import maps as mapslib
from .errors import (
    ConditionViolation,
    DomainViolation,
    IterationStall,
    MixedFamily,
    NoAdmissibleWords,
    NonAdmissibleWord,
)
from .graphs import FiniteTransition, admissible_words, strongly_connected_components
from .shapes import Ball
from .systems import subsystem

__all__ = [
    "PotentialSpec",
    "PressureEstimate",
    "WeightedMatrix",
    "cylinder_weight",
    "pressure_word_sum",
    "build_weighted_matrix",
    "pressure_spectral",
    "pressure_scc_max",
    "truncation_ladder",
]

CW_TOL = 1e-10
CW_MAX_ITER = 100000


def _xlog(s, value):
    """s * log(value) with the 0 -> -inf convention (weights may vanish)."""
    if value <= 0.0:
        return -math.inf
    return s * math.log(value)


def _safe_log(x):
    if x <= 0.0:
        return -math.inf
    return math.log(x)


@dataclass(frozen=True)
class PotentialSpec:
    """Exponent and norm selector for the derivative potential.

    A word is weighted by the product of ||T'||**s factors (operator norm;
    the conorm selector switches to the smallest singular value, which
    coincides with the norm for conformal families).  epsilon is metadata
    carried into result records by perturbation sweeps; it never changes a
    weight.
    """

    s: float
    conorm: bool = False
    epsilon: object = None

    def __post_init__(self):
        s = self.s
        if not (isinstance(s, (int, float)) and math.isfinite(s) and s >= 0):
            raise ValueError(f"exponent must be finite and nonnegative, got {s!r}")
        if self.epsilon is not None and not (0.0 < self.epsilon < 1.0):
            raise ValueError(f"perturbation parameter outside (0,1): {self.epsilon!r}")

    @property
    def selector(self):
        return "conorm" if self.conorm else "norm"


@dataclass(frozen=True)
class PressureEstimate:
    """Certified pressure bracket plus the knobs that produced it.

    scope "truncated": the bracket holds for the materialized subsystem.
    scope "full": it holds for the untruncated system (lowers come from
    truncations, which exhaust the full pressure from below; the upper folds
    in the tail witness).  lower may be -inf (no returning word at the
    probed length) and upper +inf (no usable tail bound at this exponent).
    divergence marks exponents where the witness proves the level-1 tail
    sum infinite.  stalled marks a power iteration that hit its budget; the
    bracket is still certified, just wide.
    """

    lower: float
    upper: float
    s: float
    epsilon: object = None
    word_length: object = None
    horizon: object = None
    depth: object = None
    scope: str = "truncated"
    divergence: bool = False
    stalled: bool = False
    component: object = None
    components: tuple = ()
    tail_term: float = 0.0

    def __post_init__(self):
        if self.lower > self.upper:
            # both sides are individually certified, so a crossing can only
            # be roundoff; collapse tiny ones, refuse real ones
            gap = self.lower - self.upper
            tol = 1e-9 * max(1.0, abs(self.lower), abs(self.upper))
            if not gap <= tol:
                raise ValueError(
                    f"bracket crossed: lower {self.lower} > upper {self.upper}"
                )
            mid = 0.5 * (self.lower + self.upper)
            object.__setattr__(self, "lower", mid)
            object.__setattr__(self, "upper", mid)

    @property
    def width(self):
        return self.upper - self.lower

    @property
    def lambda_lower(self):
        return math.exp(self.lower) if self.lower > -math.inf else 0.0

    @property
    def lambda_upper(self):
        try:
            return math.exp(self.upper)
        except OverflowError:
            return math.inf

    def record(self):
        """JSON-style result record with stable key order."""
        rec = {"s": float(self.s)}
        if self.epsilon is not None:
            rec["epsilon"] = float(self.epsilon)
        rec["n"] = self.word_length
        rec["k"] = self.horizon
        rec["m"] = self.depth
        rec["lower"] = self.lower
        rec["upper"] = self.upper
        rec["scope"] = self.scope
        if self.component is not None:
            rec["component"] = [repr(state) for state in self.component]
        rec["divergence_flag"] = bool(self.divergence)
        if self.stalled:
            rec["stalled"] = True
        return rec


@dataclass(frozen=True)
class WeightedMatrix:
    """Depth-m word states with inf/sup transition weight matrices.

    States are admissible m-letter words over the materialized alphabet;
    u -> w is admissible when u[1:] == w[:-1] (and the junction matches at
    depth 1).  The entry is the derivative range of u's first letter over
    the enclosure of w (all m maps applied), raised to s, so transition
    products sandwich true cylinder weights: inf products below, sup
    products above.
    """

    states: tuple
    inf_weights: object
    sup_weights: object
    transitions: object
    depth: int
    horizon: int
    potential: PotentialSpec


def _letter_transition(system, letters):
    """FiniteTransition over exactly these letters (enumeration order)."""
    g = system.graph
    by_initial = {}
    for j, f in enumerate(letters):
        by_initial.setdefault(g.initial(f), []).append(j)
    succ = [by_initial.get(g.terminal(e), []) for e in letters]
    return FiniteTransition(list(letters), succ)


def cylinder_weight(system, word, potential):
    """Certified range of the weight of a cylinder, given as an interval.

    The word's final letter only localizes the cylinder; each earlier letter
    contributes one factor, the derivative range of its map over the
    enclosure of the strict suffix behind it, raised to s.  Two routes are
    intersected: interval products over the nested suffix enclosures, and
    evaluation along the orbit of the terminal seed's anchor point widened
    by the family's distortion envelope.  Either alone is certified; the
    intersection is the reported range.
    """
    w = tuple(word)
    if len(w) < 2:
        raise NonAdmissibleWord("cylinder weights need at least two letters")
    g = system.graph
    for a, b in zip(w, w[1:]):
        if g.terminal(a) != g.initial(b):
            raise NonAdmissibleWord(f"{a} cannot precede {b}")
    s = potential.s
    if s == 0.0:
        return (1.0, 1.0)

    last = w[-1]
    shape, _ = system.seed_image(last)
    lo_log = 0.0
    hi_log = 0.0
    for i in range(len(w) - 2, -1, -1):
        rng = mapslib.derivative_range_over_set(
            system.map_of(w[i]), shape, conorm=potential.conorm
        )
        lo_log += _xlog(s, rng.lower)
        hi_log += _xlog(s, rng.upper)
        if i > 0:
            shape, _ = mapslib.image_enclosure(system.map_of(w[i]), shape)

    slack = _distortion_slack(system, s)
    if slack is not None:
        try:
            anchor = _anchor_point(system.seed(g.terminal(last)).seed)
            pt = mapslib.apply(system.map_of(last), anchor)
            point_log = 0.0
            for i in range(len(w) - 2, -1, -1):
                # degenerate ball = exact derivative at the orbit point
                rng = mapslib.derivative_range_over_set(
                    system.map_of(w[i]),
                    Ball(tuple(pt), 0.0),
                    conorm=potential.conorm,
                )
                point_log += _xlog(s, rng.upper)
                if i > 0:
                    pt = mapslib.apply(system.map_of(w[i]), pt)
        except DomainViolation:
            point_log = None
        if point_log is not None:
            cand_lo = point_log - slack
            cand_hi = point_log + slack
            # keep whichever side is tighter; fall back wholesale if
            # rounding makes the two certified routes cross
            new_lo = max(lo_log, cand_lo)
            new_hi = min(hi_log, cand_hi)
            if new_lo <= new_hi:
                lo_log, hi_log = new_lo, new_hi

    lo = math.exp(lo_log) if lo_log > -math.inf else 0.0
    try:
        hi = math.exp(hi_log)
    except OverflowError:
        hi = math.inf
    return (lo, hi)


def _distortion_slack(system, s):
    """s * log of the family's certified sup/inf product ratio, or None."""
    try:
        prof = system.distortion()
    except (MixedFamily, ConditionViolation, DomainViolation, ValueError):
        return None
    if not math.isfinite(prof.log_product_ratio):
        return None
    return s * prof.log_product_ratio


def _anchor_point(shape):
    if not hasattr(shape, "center"):
        raise TypeError(f"no anchor point for {type(shape).__name__}")
    return tuple(shape.center)


def pressure_word_sum(system, potential, n, k, scope="truncated", a_star=32):
    """Word-sum pressure bracket at word length n over the first k letters.

    upper: (1/n) log of the sup-weight sum over admissible n-letter words
    (each letter's factor ranges over the enclosure of the strict suffix
    behind it, the last over its terminal seed).  Valid at every n: growing
    a word only shrinks the enclosures its prefix factors range over, so
    sup-sums are submultiplicative.
    lower: the better of two certified routes.  Route one sums inf-weights
    over words that share a fixed first letter a and return to a's initial
    vertex; gluing two such words at the shared letter keeps admissibility
    and only deepens enclosures, so these sums are supermultiplicative and
    (1/n) log of them never exceeds the pressure, at the cost of the fixed
    anchor's weight spread over n.  Route two takes the returning-word
    ratio bound per diagonal block: the depth-1 inf-weight matrix,
    Collatz-Wielandt enclosed per strongly connected component, which has
    no anchor cost and is exact for similarity weights.  -inf when neither
    route certifies anything at this length.

    scope "full" keeps the truncated lower (truncations exhaust the full
    pressure from below) and replaces the upper by the tail-corrected bound.
    """
    if n < 1:
        raise ValueError(f"word length must be >= 1, got {n}")
    if k < 1:
        raise ValueError(f"alphabet horizon must be >= 1, got {k}")
    if scope not in ("truncated", "full"):
        raise ValueError(f"unknown scope {scope!r}")
    letters = system.letters(k)
    if not letters:
        raise NoAdmissibleWords(f"no letters within horizon {k}")
    g = system.graph
    s = potential.s
    preds = {}
    for f in letters:
        preds.setdefault(g.terminal(f), []).append(f)

    sup_total = -math.inf
    anchor_sums = {}
    seen_any = False

    def grow(first, depth, shape, logsup, loginf, return_vertex):
        nonlocal sup_total, seen_any
        if depth == n:
            seen_any = True
            sup_total = float(np.logaddexp(sup_total, logsup))
            if return_vertex == g.initial(first):
                prev = anchor_sums.get(first, -math.inf)
                anchor_sums[first] = float(np.logaddexp(prev, loginf))
            return
        for f in preds.get(g.initial(first), ()):
            rng = mapslib.derivative_range_over_set(
                system.map_of(f), shape, conorm=potential.conorm
            )
            if depth + 1 < n:
                nshape, _ = mapslib.image_enclosure(system.map_of(f), shape)
            else:
                nshape = None
            grow(
                f,
                depth + 1,
                nshape,
                logsup + _xlog(s, rng.upper),
                loginf + _xlog(s, rng.lower),
                return_vertex,
            )

    for e in letters:
        seed = system.seed(g.terminal(e)).seed
        rng = mapslib.derivative_range_over_set(
            system.map_of(e), seed, conorm=potential.conorm
        )
        shape = system.seed_image(e)[0] if n > 1 else None
        grow(e, 1, shape, _xlog(s, rng.upper), _xlog(s, rng.lower), g.terminal(e))

    if not seen_any:
        raise NoAdmissibleWords(
            f"no admissible {n}-letter words over {len(letters)} letters"
        )
    upper = sup_total / n
    lower = max(anchor_sums.values()) / n if anchor_sums else -math.inf
    spectral = pressure_spectral(system, potential, k, 1)
    if spectral.lower > lower:
        lower = spectral.lower
    if lower > upper:
        # the two routes bound the same quantity, so any crossing is
        # rounding noise at the last-digit scale
        lower = upper

    divergence = False
    tail_term = 0.0
    if scope == "full":
        upper, tail_term, divergence = _full_upper(
            system, potential, k, a_star, exhausted_upper=upper
        )
    return PressureEstimate(
        lower=lower,
        upper=upper,
        s=s,
        epsilon=potential.epsilon,
        word_length=n,
        horizon=len(letters),
        scope=scope,
        divergence=divergence,
        tail_term=tail_term,
    )


def build_weighted_matrix(system, potential, k, m=1):
    """Assemble the depth-m word-state transition matrices over letters(k)."""
    if m < 1:
        raise ValueError(f"refinement depth must be >= 1, got {m}")
    letters = system.letters(k)
    if not letters:
        raise NoAdmissibleWords(f"no letters within horizon {k}")
    g = system.graph
    if m == 1:
        states = [(e,) for e in letters]
    else:
        fin = _letter_transition(system, letters)
        states = list(admissible_words(fin, m, letters))
    if not states:
        raise NoAdmissibleWords(
            f"no admissible words of length {m} over {len(letters)} letters"
        )
    index = {w: i for i, w in enumerate(states)}

    if m == 1:
        by_initial = {}
        for w, j in index.items():
            by_initial.setdefault(g.initial(w[0]), []).append(j)
        succ = [by_initial.get(g.terminal(w[0]), []) for w in states]
    else:
        by_prefix = {}
        for w, j in index.items():
            by_prefix.setdefault(w[:-1], []).append(j)
        succ = [by_prefix.get(w[1:], []) for w in states]

    # enclosure of a word = image of the terminal seed under all its maps;
    # shared suffixes are memoized since sibling states reuse them
    memo = {}

    def enclosure(word):
        shape = memo.get(word)
        if shape is not None:
            return shape
        if len(word) == 1:
            shape = system.seed_image(word[0])[0]
        else:
            shape, _ = mapslib.image_enclosure(
                system.map_of(word[0]), enclosure(word[1:])
            )
        memo[word] = shape
        return shape

    s = potential.s
    rows, cols, los, his = [], [], [], []
    for i, u in enumerate(states):
        spec = system.map_of(u[0])
        for j in succ[i]:
            rng = mapslib.derivative_range_over_set(
                spec, enclosure(states[j]), conorm=potential.conorm
            )
            rows.append(i)
            cols.append(j)
            if s == 0.0:
                los.append(1.0)
                his.append(1.0)
            else:
                los.append(rng.lower**s)
                his.append(rng.upper**s)

    nstates = len(states)
    inf_mat = sp.csr_matrix(
        (np.asarray(los), (rows, cols)), shape=(nstates, nstates)
    )
    sup_mat = sp.csr_matrix(
        (np.asarray(his), (rows, cols)), shape=(nstates, nstates)
    )
    transitions = FiniteTransition(states, succ)
    return WeightedMatrix(
        states=tuple(states),
        inf_weights=inf_mat,
        sup_weights=sup_mat,
        transitions=transitions,
        depth=m,
        horizon=len(letters),
        potential=potential,
    )


def _equilibrate_scales(nstates, row, col, logw):
    """Diagonal scales from a max-plus eigenvector estimate.

    Long-chain systems have Perron vectors spanning thousands of orders of
    magnitude, far past float64, which zeroes components of the power
    iterate.  Conjugating by a positive diagonal preserves the spectrum and
    every Collatz-Wielandt certificate, so a partially converged estimate
    is still safe; quality only affects conditioning.
    """
    d = np.zeros(nstates)
    for _ in range(min(nstates, 512)):
        nxt = np.full(nstates, -np.inf)
        np.maximum.at(nxt, row, logw + d[col])
        nxt -= nxt.max()
        finite = np.isfinite(nxt)
        if not finite.all():
            fill = nxt[finite].min() if finite.any() else 0.0
            nxt[~finite] = fill
        if np.allclose(nxt, d, rtol=0.0, atol=1e-9):
            return nxt
        d = nxt
    return d


def _cw_bracket(mat, tol=CW_TOL, max_iter=CW_MAX_ITER):
    """Certified spectral-radius bracket for a nonnegative matrix.

    Power iteration on I + B/theta (the shift keeps iterates strictly
    positive and defeats periodicity).  Every iterate gives Collatz-
    Wielandt bounds min_i (Mv)_i/v_i <= rho(M) <= max_i (Mv)_i/v_i -- the
    lower via a nonnegative left Perron vector u (u(Mv) >= min_ratio * uv
    and uv > 0 since v > 0), the upper likewise -- so the running
    intersection over iterations stays certified.  Returns
    (lo, hi, stalled, iterations).
    """
    nstates = mat.shape[0]
    if nstates == 0:
        return 0.0, 0.0, False, 0
    coo = mat.tocoo()
    keep = coo.data > 0.0
    row, col = coo.row[keep], coo.col[keep]
    logw = np.log(coo.data[keep])
    if logw.size == 0:
        return 0.0, 0.0, False, 0
    d = _equilibrate_scales(nstates, row, col, logw)
    data = np.exp(logw + d[col] - d[row])
    if not np.isfinite(data).all():
        d = np.zeros(nstates)
        data = np.exp(logw)
    theta = float(data.max())
    scaled = sp.csr_matrix(
        (data / theta, (row, col)), shape=(nstates, nstates)
    )
    v = np.ones(nstates)
    best_lo = 0.0
    best_hi = math.inf
    stalled = True
    iterations = 0
    for iterations in range(1, max_iter + 1):
        w = scaled @ v + v
        ratios = w / v
        cur_lo = float(ratios.min())
        cur_hi = float(ratios.max())
        if cur_lo > best_lo:
            best_lo = cur_lo
        if cur_hi < best_hi:
            best_hi = cur_hi
        if best_hi - best_lo <= tol:
            stalled = False
            break
        # the floor keeps v strictly positive even if a component still
        # underflows; any positive test vector certifies, just loosely
        v = np.maximum(w / w.max(), 1e-300)
    lo = max(best_lo - 1.0, 0.0) * theta
    hi = max(best_hi - 1.0, 0.0) * theta
    if lo > hi:
        lo = hi
    return lo, hi, stalled, iterations


def pressure_spectral(
    system,
    potential,
    k,
    m=1,
    tol=CW_TOL,
    max_iter=CW_MAX_ITER,
    strict_convergence=False,
):
    """Spectral pressure bracket of the truncated subsystem at depth m.

    The inf/sup weight matrices dominate/are dominated by the true cylinder
    potential entrywise, and the spectral radius is monotone in nonnegative
    entries, so log of their radii bracket the pressure; radii are enclosed
    per strongly connected component of the state graph and combined by max
    (block-triangular spectral radius).  All components trivial means no
    periodic word at this depth: bracket (-inf, -inf).
    """
    wm = build_weighted_matrix(system, potential, k, m)
    dec = strongly_connected_components(wm.transitions, wm.transitions.n)
    lower = -math.inf
    upper = -math.inf
    best = None
    comps = []
    stalled = False
    for cls, trivial in zip(dec.classes, dec.trivial):
        if trivial:
            continue
        idx = np.array(sorted(wm.transitions.index[st] for st in cls), dtype=int)
        sub_inf = wm.inf_weights[idx][:, idx]
        sub_sup = wm.sup_weights[idx][:, idx]
        lo_inf, _, st_a, _ = _cw_bracket(sub_inf, tol, max_iter)
        _, hi_sup, st_b, _ = _cw_bracket(sub_sup, tol, max_iter)
        c_lower = _safe_log(lo_inf)
        c_upper = _safe_log(hi_sup)
        comps.append((cls, c_lower, c_upper))
        stalled = stalled or st_a or st_b
        if c_upper > upper:
            upper = c_upper
            best = cls
        if c_lower > lower:
            lower = c_lower
    if strict_convergence and stalled:
        raise IterationStall(
            f"power iteration hit {max_iter} iterations before gap {tol}"
        )
    return PressureEstimate(
        lower=lower,
        upper=upper,
        s=potential.s,
        epsilon=potential.epsilon,
        horizon=wm.horizon,
        depth=m,
        scope="truncated",
        stalled=stalled,
        component=best,
        components=tuple(comps),
    )


def pressure_scc_max(
    system,
    potential,
    k,
    m=1,
    tol=CW_TOL,
    max_iter=CW_MAX_ITER,
):
    """Pressure of the truncation as the max over its letter-level
    strongly connected components, with per-component attribution.

    Each nontrivial component is restricted to a subsystem and bracketed by
    pressure_spectral at depth m; the max of lowers and max of uppers
    bracket the max of the true component pressures.  component holds the
    argmax class (first in dependency order on ties); components holds
    (class, lower, upper) for every nontrivial class.
    """
    letters = system.letters(k)
    if not letters:
        raise NoAdmissibleWords(f"no letters within horizon {k}")
    fin = _letter_transition(system, letters)
    dec = strongly_connected_components(fin, fin.n)
    lower = -math.inf
    upper = -math.inf
    best = None
    comps = []
    stalled = False
    for cls, trivial in zip(dec.classes, dec.trivial):
        if trivial:
            continue
        sub = subsystem(system, edges=cls, name=f"{system.name}-scc")
        est = pressure_spectral(sub, potential, len(cls), m, tol, max_iter)
        comps.append((cls, est.lower, est.upper))
        stalled = stalled or est.stalled
        if est.upper > upper:
            upper = est.upper
            best = cls
        if est.lower > lower:
            lower = est.lower
    return PressureEstimate(
        lower=lower,
        upper=upper,
        s=potential.s,
        epsilon=potential.epsilon,
        horizon=len(letters),
        depth=m,
        scope="truncated",
        stalled=stalled,
        component=best,
        components=tuple(comps),
    )


def _fekete_edge_upper(system, potential, k, a_star=32):
    """(upper, tail_term) for edge-unit tails: log(Lambda + C*T).

    A_l = sum over admissible l-letter words over the truncation of the
    product of per-letter seed sups ** s.  Splitting a word and forgetting
    the junction shows A_{p+q} <= A_p * A_q, so with Lambda = A_{a*}^(1/a*)
    and C = max(1, max_{1<=t<a*} A_t / Lambda**t) every A_l <= C*Lambda**l.
    A word of the full system with j letters beyond the truncation, grouped
    by the positions of those letters with all junction constraints
    dropped, contributes at most (products of run sums) * T**j with T the
    witness tail bound, so

        Z_n <= sum_j binom(n, j) C**(j+1) Lambda**(n-j) (C T)**j / C**j
            <= C (Lambda + C T)**n,

    which bounds every finite subsystem's pressure and hence their
    supremum.  If A_{a*} vanishes (nilpotent truncation) the variant
    Lambda' = max_t A_t^(1/t), C = 1 is used instead.
    """
    letters = system.letters(k)
    count = len(letters)
    witness = system.tail
    tail = float(witness.bound(count, potential.s))
    if tail < 0.0:
        raise ValueError(f"tail witness returned a negative bound {tail}")
    if not math.isfinite(tail):
        return math.inf, tail
    g = system.graph
    s = potential.s
    weights = np.array(
        [
            mapslib.derivative_range_over_set(
                system.map_of(e),
                system.seed(g.terminal(e)).seed,
                conorm=potential.conorm,
            ).upper
            for e in letters
        ]
    )
    weights = weights**s if s != 0.0 else np.ones_like(weights)

    verts = {}
    for e in letters:
        for v in (g.initial(e), g.terminal(e)):
            verts.setdefault(v, len(verts))
    ini = np.array([verts[g.initial(e)] for e in letters], dtype=int)
    ter = np.array([verts[g.terminal(e)] for e in letters], dtype=int)

    log_a = []
    x = weights.copy()
    shift = 0.0
    for level in range(1, a_star + 1):
        total = float(x.sum())
        log_a.append(_safe_log(total) + shift if total > 0.0 else -math.inf)
        if level == a_star or total <= 0.0:
            break
        sums = np.zeros(len(verts))
        np.add.at(sums, ini, x)
        x = weights * sums[ter]
        peak = float(x.max(initial=0.0))
        if peak > 0.0 and not (1e-100 < peak < 1e100):
            x = x / peak
            shift += math.log(peak)

    while len(log_a) < a_star:
        log_a.append(-math.inf)

    if log_a[a_star - 1] > -math.inf:
        log_lam = log_a[a_star - 1] / a_star
        log_c = 0.0
        for t in range(1, a_star):
            log_c = max(log_c, log_a[t - 1] - t * log_lam)
    else:
        log_lam = max(
            (log_a[t - 1] / t for t in range(1, a_star + 1)), default=-math.inf
        )
        log_c = 0.0

    log_tail = _safe_log(tail)
    upper = float(np.logaddexp(log_lam, log_c + log_tail))
    return upper, tail


def _full_upper(system, potential, k, a_star=32, exhausted_upper=None):
    """(upper, tail_term, divergence) for the untruncated system.

    Finite alphabets that the horizon exhausts need no correction.  Edge-
    unit witnesses get the Fekete-composition bound; any witness may also
    declare a family-proved pressure_upper(s), and the minimum of the
    available certified uppers is reported.  No witness, or no finite route,
    means upper = +inf.
    """
    letters = system.letters(k)
    count = len(letters)
    exhausted = system.is_finite and len(system.letters(2 * k + 16)) == count
    if exhausted and exhausted_upper is not None:
        return exhausted_upper, 0.0, False
    witness = system.tail
    if witness is None:
        return math.inf, math.inf, False
    s = potential.s
    if witness.diverges_below is not None and s < witness.diverges_below:
        return math.inf, math.inf, True
    candidates = []
    tail_term = math.inf
    # an empty-tail witness only certifies a sum once the horizon covers
    # the whole alphabet, and that case returned above
    if witness.unit == "edge" and witness.kind != "finite":
        upper, tail = _fekete_edge_upper(system, potential, k, a_star)
        candidates.append(upper)
        tail_term = tail
    declared = getattr(witness, "pressure_upper", None)
    if declared is not None:
        candidates.append(float(declared(s)))
    if not candidates:
        return math.inf, math.inf, False
    upper = min(candidates)
    if upper == math.inf:
        return math.inf, tail_term, False
    if math.isfinite(tail_term) and upper != candidates[0]:
        # the declared bound won; the edge tail term was not used
        tail_term = 0.0
    if not math.isfinite(tail_term):
        tail_term = 0.0
    return upper, tail_term, False


def truncation_ladder(
    system,
    potential,
    horizons,
    depth=1,
    tol=CW_TOL,
    max_iter=CW_MAX_ITER,
    a_star=32,
):
    """Pressure brackets along nested truncations plus a closing full entry.

    Reported lowers are running maxima over completed stages: a smaller
    truncation is a subsystem of every later one, and each subsystem
    pressure lower-bounds the full pressure, so the running max stays
    certified at every stage and is nondecreasing by construction.  The
    final entry (scope "full") pairs the best lower with the tail-corrected
    upper from the largest horizon.
    """
    hs = list(horizons)
    if not hs:
        raise ValueError("need at least one horizon")
    if hs[0] < 1 or any(b <= a for a, b in zip(hs, hs[1:])):
        raise ValueError(f"horizons must be positive and strictly increasing: {hs}")
    out = []
    running = -math.inf
    last = None
    for k in hs:
        est = pressure_scc_max(system, potential, k, depth, tol, max_iter)
        last = est
        if est.lower < running:
            est = replace(est, lower=running)
        else:
            running = est.lower
        out.append(est)
    upper, tail_term, divergence = _full_upper(
        system, potential, hs[-1], a_star, exhausted_upper=last.upper
    )
    out.append(
        PressureEstimate(
            lower=running,
            upper=upper,
            s=potential.s,
            epsilon=potential.epsilon,
            horizon=hs[-1],
            depth=depth,
            scope="full",
            divergence=divergence,
            tail_term=tail_term,
            component=last.component,
        )
    )
    return out
