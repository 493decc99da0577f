"""Kesten-side machinery: the symmetrized word-weight walk, spectral-radius
estimates from return probabilities, co-growth counting, and Folner search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (BallTooLarge, EmptyWordSet, FolnerStageFailed,
                     NotSymmetric)
from .extension import ExtensionSystem, psi_n
from .groups import (FiniteGroup, FreeGroup, Group, GroupElement,
                     Homomorphism, LamplighterGroup, ZdGroup,
                     ball as group_ball)
from .potentials import birkhoff_log_weight
from .sft import Word, dagger_word, enumerate_words


# ---------------------------------------------------------------------------
# symmetrized anchored walk


@dataclass(frozen=True)
class KestenWalk:
    group: Group
    weights: dict[GroupElement, float]   # unnormalized symmetric measure m_n
    anchor: Word
    xi_word: Word                        # repeating block of the anchor point
    n: int
    total: float                         # mass of the constant function

    def normalized(self) -> dict[GroupElement, float]:
        return {g: w / self.total for g, w in self.weights.items()}


def default_xi_word(extension: ExtensionSystem, anchor: Word) -> Word:
    """Lexicographically least repeating block giving a periodic point in the
    daggered-anchor cylinder: starts with the daggered anchor and closes up."""
    shift = extension.shift
    adag = dagger_word(extension.involution, anchor) if anchor else ()
    length = max(len(adag), 1)
    while length <= len(adag) + shift.alphabet_size:
        for w in enumerate_words(shift, length, start=adag or None):
            if shift.admissible(w[-1], w[0]):
                return w
        length += 1
    raise EmptyWordSet("no periodic point found in the anchor cylinder")


def build_kesten_walk(extension: ExtensionSystem, anchor: Word, n: int,
                      xi_word: Word | None = None) -> KestenWalk:
    """The measure m_n: enumerate length-n words w starting with the anchor
    and continuable by xi, weight each by the symmetrized Birkhoff product
    pi(xi, w) = (Phi_n(w xi) + Phi_n(iota(w) xi)) / 2, and aggregate by the
    cocycle value.  Symmetry m_n(g) = m_n(g^-1) holds to the last bit because
    iota swaps the two summands of pi.
    """
    if extension.involution is None:
        raise NotSymmetric("walk needs an involution on the alphabet")
    shift, pot, grp = extension.shift, extension.potential, extension.group
    inv = extension.involution
    if anchor:
        shift.require_word(anchor)
        if psi_n(extension, anchor) != grp.identity():
            raise NotSymmetric("anchor word must have trivial cocycle image")
        if n <= len(anchor):
            raise ValueError("n must exceed the anchor length")
    if xi_word is None:
        xi_word = default_xi_word(extension, anchor)
    shift.require_word(xi_word)
    if not shift.admissible(xi_word[-1], xi_word[0]):
        raise ValueError("xi block does not close periodically")
    adag = dagger_word(inv, anchor) if anchor else ()
    if xi_word[:len(adag)] != adag:
        raise ValueError("xi must lie in the daggered-anchor cylinder")

    tail_len = max(pot.memory - 1, 1)
    reps = -(-tail_len // len(xi_word))
    xi_tail = (xi_word * reps)[:tail_len]

    words = enumerate_words(shift, n, start=anchor or None,
                            end_letter=xi_word[0])
    if not words:
        raise EmptyWordSet(f"no admissible words of length {n} for this anchor")
    word_set = set(words)
    la = len(anchor)
    weights: dict[GroupElement, float] = {}
    total = 0.0
    for w in words:
        iw = anchor + dagger_word(inv, w[la:])
        if iw not in word_set:
            raise NotSymmetric(
                f"involution image {iw} of {w} leaves the word set")
        pi = 0.5 * (math.exp(birkhoff_log_weight(shift, pot, w, tail=xi_tail))
                    + math.exp(birkhoff_log_weight(shift, pot, iw, tail=xi_tail)))
        g = psi_n(extension, w)
        weights[g] = weights.get(g, 0.0) + pi
        total += pi
    return KestenWalk(group=grp, weights=weights, anchor=anchor,
                      xi_word=xi_word, n=n, total=total)


def self_adjoint_check(walk: KestenWalk, ball_radius: int) -> float:
    """max over ball pairs (x, y) of |<1_x, P 1_y> - <P 1_x, 1_y>|; these
    matrix entries are m(x^-1 y) and m(y^-1 x), so symmetry of m is what is
    being probed."""
    grp = walk.group
    elements = group_ball(grp, ball_radius)
    m = {g.key: w for g, w in walk.normalized().items()}
    worst = 0.0
    for x in elements:
        xinv = grp.inverse(x)
        for y in elements:
            a = m.get(grp.multiply(xinv, y).key, 0.0)
            b = m.get(grp.multiply(grp.inverse(y), x).key, 0.0)
            worst = max(worst, abs(a - b))
    return worst


# ---------------------------------------------------------------------------
# spectral radius via return probabilities


@dataclass(frozen=True)
class SpectralRadiusEstimate:
    rho_sequence: tuple[tuple[int, float], ...]   # (k, u_{2k}^{1/2k})
    lower_bound: float                            # last entry; certified lower bound
    rayleigh: float       # quotient on the truncated operator (also a lower-bound-style estimate)
    ball_radius: int | None
    radial: bool
    escaped_mass: float


def _radial_walk(walk: KestenWalk) -> int | None:
    """Rank r when the normalized walk is uniform on the 2r free generators."""
    grp = walk.group
    if not isinstance(grp, FreeGroup):
        return None
    m = walk.normalized()
    keys = {g.key for g in m}
    if keys != {(s * i,) for i in range(1, grp.rank + 1) for s in (1, -1)}:
        return None
    vals = set(m.values())
    return grp.rank if len(vals) == 1 else None


def _radial_returns(rank: int, steps: int) -> list[float]:
    """u_j for the uniform walk on F_rank via the distance chain; exact."""
    q = 2 * rank
    v = [0.0] * (steps + 2)
    v[0] = 1.0
    out = []
    for _ in range(steps):
        nxt = [0.0] * len(v)
        nxt[1] += v[0]
        for d in range(1, steps + 1):
            if v[d] == 0.0:
                continue
            nxt[d - 1] += v[d] / q
            nxt[d + 1] += v[d] * (q - 1) / q
        v = nxt
        out.append(v[0])
    return out


def spectral_radius_estimate(walk: KestenWalk, k_max: int,
                             ball_radius: int | None = None,
                             ball_cap: int = 2_000_000) -> SpectralRadiusEstimate:
    """rho_k = <1_id, P^{2k} 1_id>^{1/2k} for the probability-normalized walk.

    Convolution powers over a truncated ball; dropped mass only lowers the
    return probabilities, so every rho_k and the final bound are certified
    lower bounds.  The Rayleigh quotient of the final vector against the
    ball-compressed operator is reported as a companion estimate (it is a
    quotient of a compression, hence also bounded by the true norm).
    """
    rank = _radial_walk(walk)
    if rank is not None:
        returns = _radial_returns(rank, 2 * k_max)
        rho = tuple((k, returns[2 * k - 1] ** (1.0 / (2 * k)))
                    for k in range(1, k_max + 1))
        # Rayleigh from the distance profile at time 2k_max is not tracked in
        # the radial reduction; reuse the last return-based bound.
        return SpectralRadiusEstimate(rho_sequence=rho, lower_bound=rho[-1][1],
                                      rayleigh=rho[-1][1], ball_radius=None,
                                      radial=True, escaped_mass=0.0)

    if ball_radius is None:
        raise ValueError("ball_radius required for the generic estimate")
    grp = walk.group
    elements = group_ball(grp, ball_radius, cap=ball_cap)
    gidx = {g.key: i for i, g in enumerate(elements)}
    id_idx = gidx[grp.identity().key]
    m = sorted(walk.normalized().items())
    support = [(g, w) for g, w in m if w != 0.0]
    # right-multiplication tables, one per support element (-1 = escape)
    tables = []
    for s, w in support:
        tables.append(([gidx.get(grp.multiply(g, s).key, -1) for g in elements], w))

    f = [0.0] * len(elements)
    f[id_idx] = 1.0
    rho: list[tuple[int, float]] = []
    escaped = 0.0
    for step in range(1, 2 * k_max + 1):
        nxt = [0.0] * len(elements)
        for tab, w in tables:
            for i, x in enumerate(f):
                if x == 0.0:
                    continue
                j = tab[i]
                if j >= 0:
                    nxt[j] += w * x
                else:
                    escaped += w * x
        f = nxt
        if step % 2 == 0:
            k = step // 2
            u = f[id_idx]
            rho.append((k, u ** (1.0 / step) if u > 0 else 0.0))

    # ||P f|| / ||f|| on the ball compression (robust to bipartite walks,
    # where <f, P f> vanishes by parity)
    pf = [0.0] * len(elements)
    for tab, w in tables:
        for i, x in enumerate(f):
            if x != 0.0 and tab[i] >= 0:
                pf[tab[i]] += w * x
    num = math.sqrt(sum(a * a for a in pf))
    den = math.sqrt(sum(a * a for a in f))
    rayleigh = num / den if den > 0 else 0.0
    return SpectralRadiusEstimate(rho_sequence=tuple(rho),
                                  lower_bound=rho[-1][1] if rho else 0.0,
                                  rayleigh=rayleigh, ball_radius=ball_radius,
                                  radial=False, escaped_mass=escaped)


def walk_from_measure(group: Group, measure: dict[GroupElement, float],
                      label: str = "direct") -> KestenWalk:
    """Wrap a hand-specified symmetric measure as a walk (for direct SRWs)."""
    for g, w in measure.items():
        gi = group.inverse(g)
        if not math.isclose(measure.get(gi, 0.0), w, rel_tol=0, abs_tol=0):
            raise NotSymmetric(f"measure not symmetric at {g}")
    total = sum(measure.values())
    return KestenWalk(group=group, weights=dict(measure), anchor=(),
                      xi_word=(), n=0, total=total)


# ---------------------------------------------------------------------------
# co-growth


def cogrowth_series(rank: int, hom: Homomorphism, n_max: int,
                    max_states: int = 5_000_000) -> list[tuple[int, int]]:
    """c_n = number of reduced words of length n in F_rank whose image is
    trivial; exact integers via a DP over (last letter, image) states.
    """
    target = hom.target
    ident = target.identity().key
    letters = [s * i for i in range(1, rank + 1) for s in (1, -1)]
    layer: dict[tuple[int, object], int] = {}
    for l in letters:
        key = (l, hom.apply((l,)).key)
        layer[key] = layer.get(key, 0) + 1
    out = []
    for n in range(1, n_max + 1):
        out.append((n, sum(c for (l, g), c in layer.items() if g == ident)))
        if n == n_max:
            break
        nxt: dict[tuple[int, object], int] = {}
        for (l, gkey), c in layer.items():
            for l2 in letters:
                if l2 == -l:
                    continue
                g2 = target.multiply(GroupElement(target, gkey),
                                     hom.apply((l2,)))
                key = (l2, g2.key)
                nxt[key] = nxt.get(key, 0) + c
        if len(nxt) > max_states:
            raise BallTooLarge(f"co-growth DP exceeded {max_states} states")
        layer = nxt
    return out


def cogrowth_brute(rank: int, hom: Homomorphism, n: int) -> int:
    """Reference enumeration of all reduced words (test oracle, exponential)."""
    count = 0
    letters = [(l, hom.apply((l,))) for i in range(1, rank + 1)
               for l in (i, -i)]
    ident = hom.target.identity().key
    target = hom.target

    def rec(depth, last, acc):
        nonlocal count
        if depth == n:
            if acc.key == ident:
                count += 1
            return
        for l, img in letters:
            if l == -last:
                continue
            rec(depth + 1, l, target.multiply(acc, img))

    rec(0, 0, target.identity())
    return count


# ---------------------------------------------------------------------------
# Folner search


@dataclass(frozen=True)
class FolnerCertificate:
    elements: tuple[GroupElement, ...]
    constraint: tuple[GroupElement, ...]
    defect: float
    strategy: str


@dataclass(frozen=True)
class FolnerResult:
    found: bool
    certificate: FolnerCertificate | None
    best_defect: float
    best_strategy: str


def folner_defect(candidate, constraint) -> float:
    """sum_{h in K} |A h symdiff A| / |A|, exact on canonical keys."""
    keys = {g.key for g in candidate}
    if not keys:
        raise ValueError("candidate set must be nonempty")
    total = 0
    for h in constraint:
        shifted = {g.group.multiply(g, h).key for g in candidate}
        total += len(shifted ^ keys)
    return total / len(keys)


def _zd_box_defect(d: int, s: int, constraint) -> float:
    """Exact defect of the box {0..s-1}^d: the symmetric difference with the
    translate by v has size 2(s^d - prod max(0, s-|v_i|))."""
    vol = s ** d
    total = 0
    for h in constraint:
        inter = 1
        for v in h.key:
            inter *= max(0, s - abs(v))
        total += 2 * (vol - inter)
    return total / vol


def _zd_box_elements(group: ZdGroup, s: int):
    coords = [()]
    for _ in range(group.d):
        coords = [c + (x,) for c in coords for x in range(s)]
    return [group.element(c) for c in coords]


def _lamplighter_box_defect(length: int, constraint) -> float:
    """Exact defect of A = {(lamps, pos): lamps in [0,len), pos in [0,len)}.

    Right-translating (f,p) by h=(k,t) gives (f xor (k+p), p+t); the result
    stays in A for all 2^len choices of f exactly when p+t lands back in
    [0,len) and k+p stays inside [0,len), so intersections count in whole
    2^len-sized fibers.
    """
    vol = length * (2 ** length)
    total = 0
    for h in constraint:
        k, t = h.key
        good = 0
        for p in range(length):
            if not 0 <= p + t < length:
                continue
            if all(0 <= x + p < length for x in k):
                good += 1
        total += 2 * (vol - good * 2 ** length)
    return total / vol


def _lamplighter_box_elements(group: LamplighterGroup, length: int):
    sets = [()]
    for p in range(length):
        sets = sets + [tuple(sorted(t + (p,))) for t in sets]
    return [group.element((lamps, pos))
            for lamps in sorted(sets) for pos in range(length)]


def _box_strategies(group: Group, budget: int):
    """Yield (name, set size, exact-defect function, materializer) per box."""
    if isinstance(group, ZdGroup):
        s = 1
        while s ** group.d <= budget:
            yield (f"box-{s}", s ** group.d,
                   lambda c, s=s: _zd_box_defect(group.d, s, c),
                   lambda s=s: _zd_box_elements(group, s))
            s += 1
    elif isinstance(group, LamplighterGroup):
        length = 1
        while length * 2 ** length <= budget:
            yield (f"box-{length}", length * 2 ** length,
                   lambda c, ln=length: _lamplighter_box_defect(ln, c),
                   lambda ln=length: _lamplighter_box_elements(group, ln))
            length += 1


def folner_search(group: Group, constraint, epsilon: float,
                  budget: int = 20000, trace: list | None = None) -> FolnerResult:
    """Try candidate families in a fixed order (intervals/boxes, the whole
    group when finite, balls, greedy growth) and return the first set whose
    defect is at most epsilon.  NotFound is a value carrying the best defect.
    When a `trace` list is supplied, every examined candidate is appended as
    (strategy, size, defect).
    """
    constraint = list({g.key: g for g in constraint}.values())
    ckeys = {g.key for g in constraint}
    for g in constraint:
        if group.inverse(g).key not in ckeys:
            raise ValueError("constraint set must be closed under inverse")
    best = math.inf
    best_strategy = "none"

    def consider(name, candidate):
        nonlocal best, best_strategy
        d = folner_defect(candidate, constraint)
        if trace is not None:
            trace.append((name, len(candidate), d))
        if d < best:
            best, best_strategy = d, name
        if d <= epsilon:
            return FolnerCertificate(elements=tuple(sorted(candidate)),
                                     constraint=tuple(constraint),
                                     defect=d, strategy=name)
        return None

    for name, size, defect_fn, materialize in _box_strategies(group, budget):
        d = defect_fn(constraint)
        if trace is not None:
            trace.append((name, size, d))
        if d < best:
            best, best_strategy = d, name
        if d <= epsilon:
            candidate = materialize()
            assert math.isclose(folner_defect(candidate, constraint), d,
                                rel_tol=1e-12)
            cert = FolnerCertificate(elements=tuple(sorted(candidate)),
                                     constraint=tuple(constraint),
                                     defect=d, strategy=name)
            return FolnerResult(True, cert, d, name)

    if isinstance(group, FiniteGroup):
        cert = consider("whole-group", group.elements())
        if cert:
            return FolnerResult(True, cert, cert.defect, "whole-group")

    radius, prev_size = 1, 1
    while radius <= 64:
        try:
            b = group_ball(group, radius, cap=budget)
        except BallTooLarge:
            break
        if len(b) > budget:
            break
        cert = consider(f"ball-{radius}", b)
        if cert:
            return FolnerResult(True, cert, cert.defect, cert.strategy)
        if len(b) == prev_size:
            break   # group exhausted
        prev_size = len(b)
        radius += 1

    cert = _greedy_folner(group, constraint, epsilon,
                          min(budget, 64), consider)
    if cert:
        return FolnerResult(True, cert, cert.defect, cert.strategy)
    return FolnerResult(False, None, best, best_strategy)


def _greedy_folner(group, constraint, epsilon, max_size, consider):
    """Grow a set one boundary element at a time, always picking the element
    that minimizes the resulting defect.  The defect numerator is maintained
    incrementally: adding x changes each |A h symdiff A| only at x h and x.
    """
    ident = group.identity()
    current = [ident]
    keys = {ident.key}
    numerator = sum(0 if h.key == ident.key else 2 for h in constraint)

    def delta(x):
        d = 0
        for h in constraint:
            xh = group.multiply(x, h)
            if xh.key == x.key:
                continue
            d += -1 if xh.key in keys else 1
            xhinv = group.multiply(x, group.inverse(h))
            d += -1 if xhinv.key in keys else 1
        return d

    while len(current) < max_size:
        boundary = {}
        for g in current:
            for h in constraint:
                cand = group.multiply(g, h)
                if cand.key not in keys:
                    boundary[cand.key] = cand
        if not boundary:
            break
        best_el, best_num = None, None
        for cand in sorted(boundary.values()):
            num = numerator + delta(cand)
            if best_num is None or num < best_num:
                best_el, best_num = cand, num
        current.append(best_el)
        keys.add(best_el.key)
        numerator = best_num
        cert = consider(f"greedy-{len(current)}", current)
        if cert:
            return cert
    return None


def folner_sequence(group: Group, constraint_schedule, epsilon_schedule,
                    budget: int = 20000) -> list[FolnerCertificate]:
    """Iterated search: each stage must be Folner for the accumulated
    constraints plus every previously certified set (closed under inverse)."""
    if len(constraint_schedule) != len(epsilon_schedule):
        raise ValueError("schedules must have equal length")
    accumulated: dict = {}
    certificates: list[FolnerCertificate] = []
    for stage, (kset, eps) in enumerate(zip(constraint_schedule,
                                            epsilon_schedule), start=1):
        for g in kset:
            accumulated[g.key] = g
            gi = group.inverse(g)
            accumulated[gi.key] = gi
        constraint = sorted(accumulated.values())
        result = folner_search(group, constraint, eps, budget=budget)
        if not result.found:
            raise FolnerStageFailed(stage, result.best_defect)
        certificates.append(result.certificate)
        for g in result.certificate.elements:
            accumulated[g.key] = g
            gi = group.inverse(g)
            accumulated[gi.key] = gi
    return certificates
