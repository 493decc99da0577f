"""Group extensions T(x,g) = (theta x, g psi(x)) of a topological Markov chain.

The cocycle psi is constant on 1-cylinders, so every finite word carries a
well-defined group element.  The return-weight dynamic program tracks
(mu-mass, block state, group element) triples over a truncated group ball
with explicit escaped-mass accounting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (BallTooLarge, InadmissibleWord, NegativeInput,
                     TruncationDominates)
from .groups import FreeGroup, Group, GroupElement, ball as group_ball
from .potentials import (GibbsMeasure, Potential, state_length,
                         transfer_matrix, validate_potential)
from .sft import Involution, Shift, Word, enumerate_words

NEG_INF = float("-inf")


@dataclass(frozen=True)
class Cocycle:
    letter_images: tuple[GroupElement, ...]

    @property
    def group(self) -> Group:
        return self.letter_images[0].group

    def of_letter(self, c: int) -> GroupElement:
        return self.letter_images[c]


@dataclass(frozen=True)
class ExtensionSystem:
    shift: Shift
    potential: Potential
    cocycle: Cocycle
    involution: Involution | None = None

    def __post_init__(self):
        if len(self.cocycle.letter_images) != self.shift.alphabet_size:
            raise ValueError("cocycle must assign one group element per letter")
        validate_potential(self.shift, self.potential)
        if self.involution is not None:
            grp = self.group
            for c in range(self.shift.alphabet_size):
                img = self.cocycle.of_letter(c)
                dag = self.cocycle.of_letter(self.involution.apply(c))
                if grp.inverse(img) != dag:
                    raise ValueError(
                        f"psi(dagger {c}) is not psi({c})^-1; extension not symmetric")

    @property
    def group(self) -> Group:
        return self.cocycle.group

    def symmetric(self) -> bool:
        return self.involution is not None


def psi_n(extension: ExtensionSystem, word: Word) -> GroupElement:
    """psi(w_1) psi(w_2) ... psi(w_n); identity for the empty word."""
    grp = extension.group
    if word:
        extension.shift.require_word(word)
    out = grp.identity()
    for c in word:
        out = grp.multiply(out, extension.cocycle.of_letter(c))
    return out


def _effective_table(extension: ExtensionSystem):
    """(states, index, table on (m+1)-blocks, stationary nu) for the DP."""
    shift, pot = extension.shift, extension.potential
    m = state_length(pot)
    states = tuple(enumerate_words(shift, m))
    idx = {s: i for i, s in enumerate(states)}
    table = {b: pot.log_weight(b[:pot.memory])
             for b in enumerate_words(shift, m + 1)}
    return m, states, idx, table


def _closed_weights(extension: ExtensionSystem, a: int, n: int,
                    max_states: int = 2_000_000) -> dict[GroupElement, float]:
    """Total Birkhoff weight of closed words in [a] of length n, by psi-value.

    Closure is periodic, so the group element accumulated along the block
    path is a psi(u0)-conjugate of psi_n; each starting block is unwound
    separately to keep the bookkeeping exact.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    grp = extension.group
    m, states, _, table = _effective_table(extension)
    out: dict[GroupElement, float] = {}
    for u0 in states:
        if u0[0] != a:
            continue
        psi_u0 = psi_n(extension, u0)
        layer: dict[tuple[Word, GroupElement], float] = {(u0, grp.identity()): 1.0}
        for _ in range(n):
            nxt: dict[tuple[Word, GroupElement], float] = {}
            for (u, g), w in layer.items():
                for c in range(extension.shift.alphabet_size):
                    b = u + (c,)
                    logw = table.get(b)
                    if logw is None:
                        continue
                    key = (b[1:], grp.multiply(g, extension.cocycle.of_letter(c)))
                    nxt[key] = nxt.get(key, 0.0) + w * math.exp(logw)
            if len(nxt) > max_states:
                raise BallTooLarge(f"closed-word DP exceeded {max_states} states")
            layer = nxt
        inv_u0 = grp.inverse(psi_u0)
        for (u, g), w in layer.items():
            if u != u0 or w == 0.0:
                continue
            # accumulated product is psi(u0)^-1 psi_n psi(u0)
            total = grp.multiply(psi_u0, grp.multiply(g, inv_u0))
            out[total] = out.get(total, 0.0) + w
    return out


def extension_partition_function(extension: ExtensionSystem, a: int, g: GroupElement | None,
                                 n: int) -> float:
    """log of the partition function of the extension over [a] x {g}.

    Counts closed base words whose cocycle product equals g; -inf marker
    when no such word exists.
    """
    if g is None:
        g = extension.group.identity()
    weights = _closed_weights(extension, a, n)
    w = weights.get(g, 0.0)
    return math.log(w) if w > 0.0 else NEG_INF


def extension_partition_spectrum(extension: ExtensionSystem, a: int,
                                 n: int) -> dict[GroupElement, float]:
    """All nonzero extension partition functions at once, in log-space."""
    return {g: math.log(w) for g, w in _closed_weights(extension, a, n).items()
            if w > 0.0}


@dataclass(frozen=True)
class SeriesFits:
    exp_rate: float          # alpha in log r_n ~ c - alpha n
    exp_residual: float
    poly_rate: float         # beta in log r_n ~ c - beta log n
    poly_residual: float
    joint_rate: float        # alpha in log r_n ~ c - alpha n - beta log n
    joint_poly_rate: float


@dataclass(frozen=True)
class ReturnSeries:
    samples: tuple[tuple[int, float], ...]   # (n, log r_n); -inf kept as marker
    truncation_loss: dict[int, float] = field(compare=False)  # cumulative escaped mass
    ball_radius: int | None = None
    radial: bool = False

    def finite_samples(self, lo: int | None = None, hi: int | None = None):
        return [(n, y) for n, y in self.samples
                if math.isfinite(y)
                and (lo is None or n >= lo) and (hi is None or n <= hi)]

    def estimate(self, lo: int, hi: int) -> float:
        """Exponential decay rate of r_n over [lo, hi] (joint fit)."""
        return fit_series(self.finite_samples(lo, hi)).joint_rate


def fit_series(points) -> SeriesFits:
    """Least-squares fits of log r_n against n, log n, and both."""
    if len(points) < 4:
        raise ValueError("need at least 4 finite samples to fit")
    ns = np.array([p[0] for p in points], dtype=float)
    ys = np.array([p[1] for p in points], dtype=float)
    ones = np.ones_like(ns)

    def lstsq(cols):
        a = np.column_stack(cols)
        coef, _, _, _ = np.linalg.lstsq(a, ys, rcond=None)
        resid = float(np.sqrt(np.mean((a @ coef - ys) ** 2)))
        return coef, resid

    coef_exp, res_exp = lstsq([ones, ns])
    coef_poly, res_poly = lstsq([ones, np.log(ns)])
    coef_joint, _ = lstsq([ones, ns, np.log(ns)])
    return SeriesFits(exp_rate=-float(coef_exp[1]), exp_residual=res_exp,
                      poly_rate=-float(coef_poly[1]), poly_residual=res_poly,
                      joint_rate=-float(coef_joint[1]),
                      joint_poly_rate=-float(coef_joint[2]))


def _radial_applicable(extension: ExtensionSystem) -> bool:
    """True when the extension collapses exactly to a distance-indexed walk:
    free-group target, full shift, letter-bijective cocycle, constant weight.
    """
    grp = extension.group
    if not isinstance(grp, FreeGroup):
        return False
    shift = extension.shift
    if any(x != 1 for row in shift.transitions for x in row):
        return False
    if shift.alphabet_size != 2 * grp.rank:
        return False
    keys = {extension.cocycle.of_letter(c).key for c in range(shift.alphabet_size)}
    if keys != {(s * i,) for i in range(1, grp.rank + 1) for s in (1, -1)}:
        return False
    logs = set(extension.potential.log_weights.values())
    return len(logs) == 1


def _radial_return_series(extension: ExtensionSystem, n_max: int) -> ReturnSeries:
    """Exact distance DP for the uniform free-group case (no truncation)."""
    grp: FreeGroup = extension.group
    q = 2 * grp.rank
    v = np.zeros(n_max + 2)
    v[1] = 1.0   # after the first letter the walk sits on a generator
    samples = [(1, NEG_INF)] if n_max >= 1 else []
    for n in range(2, n_max + 1):
        nxt = np.zeros_like(v)
        nxt[1] += v[0]
        nxt[:-2] += v[1:-1] / q          # step toward the identity
        nxt[2:] += v[1:-1] * ((q - 1) / q)   # step away
        v = nxt
        samples.append((n, math.log(v[0]) if v[0] > 0 else NEG_INF))
    return ReturnSeries(samples=tuple(samples),
                        truncation_loss={n: 0.0 for n, _ in samples},
                        ball_radius=None, radial=True)


def return_weight_series(extension: ExtensionSystem, n_max: int,
                         ball_radius: int | None = None,
                         ball_cap: int = 2_000_000,
                         radial: bool | None = None) -> ReturnSeries:
    """r_n = mu({psi_n = id}) by dynamic programming over (block, group) states.

    Requires a normalized potential (checked through the Gibbs machinery).
    States outside the group ball are dropped and accounted as escaped mass,
    so each r_n is exact when nothing escapes and a lower bound otherwise.
    The uniform free-group case switches to an exact radial DP.
    """
    if radial is None:
        radial = _radial_applicable(extension)
    if radial:
        if not _radial_applicable(extension):
            raise ValueError("radial DP not valid for this extension")
        return _radial_return_series(extension, n_max)
    if ball_radius is None:
        raise ValueError("ball_radius required for the generic DP")

    shift, pot, grp = extension.shift, extension.potential, extension.cocycle.group
    mu = GibbsMeasure(shift, pot)   # validates normalization
    m, states, idx, table = _effective_table(extension)

    elements = group_ball(grp, ball_radius, cap=ball_cap)
    gidx = {g.key: i for i, g in enumerate(elements)}
    nball = len(elements)
    id_col = gidx[grp.identity().key]

    # right-multiplication action of each letter image on the ball (-1 = escape)
    act = np.full((nball, shift.alphabet_size), -1, dtype=np.int64)
    images = [extension.cocycle.of_letter(c) for c in range(shift.alphabet_size)]
    for i, g in enumerate(elements):
        for c, img in enumerate(images):
            act[i, c] = gidx.get(grp.multiply(g, img).key, -1)

    # transition probabilities p(u -> u') = phi'(u + c) nu(u') / nu(u)
    moves = []
    for b, logw in sorted(table.items()):
        u, up = b[:m], b[1:]
        p = math.exp(logw) * mu.nu[idx[up]] / mu.nu[idx[u]]
        moves.append((idx[u], b[-1], idx[up], p))

    wt = np.zeros((len(states), nball))
    for u in states:
        j = gidx.get(psi_n(extension, u).key)
        if j is None:
            raise BallTooLarge("initial block images outside the group ball")
        wt[idx[u], j] += float(mu.nu[idx[u]])

    samples = [(m, _log_or_neginf(float(wt[:, id_col].sum())))]
    losses = {m: 0.0}
    escaped = 0.0
    for n in range(m + 1, n_max + 1):
        nxt = np.zeros_like(wt)
        for ui, c, vi, p in moves:
            row = wt[ui]
            cols = act[:, c]
            ok = cols >= 0
            nxt[vi, cols[ok]] += p * row[ok]
            escaped += p * float(row[~ok].sum())
        wt = nxt
        samples.append((n, _log_or_neginf(float(wt[:, id_col].sum()))))
        losses[n] = escaped
    return ReturnSeries(samples=tuple(samples), truncation_loss=losses,
                        ball_radius=ball_radius, radial=False)


def _log_or_neginf(x: float) -> float:
    return math.log(x) if x > 0.0 else NEG_INF


@dataclass(frozen=True)
class Verdict:
    verdict: str                     # amenable_consistent | pressure_drop | inconclusive
    rate: float                      # exponential decay rate of r_n (joint fit)
    fits: SeriesFits
    window: tuple[int, int]
    threshold: float
    max_loss: float


def amenability_verdict(series: ReturnSeries, window: tuple[int, int],
                        threshold: float = 0.02,
                        loss_budget: float = 0.5) -> Verdict:
    """Classify the decay of the return series over the window.

    Both an exponential and a sub-exponential (log n) model are fitted; the
    decay rate comes from the joint fit so polynomial prefactors do not
    pollute it.  The verdict refuses to fire when escaped mass is material.
    """
    lo, hi = int(window[0]), int(window[1])
    loss = max((v for n, v in series.truncation_loss.items() if n <= hi), default=0.0)
    if loss > loss_budget:
        raise TruncationDominates(
            f"escaped mass {loss:.3f} exceeds budget {loss_budget}")
    pts = series.finite_samples(lo, hi)
    if len(pts) < 4:
        return Verdict("inconclusive", math.nan, None, (lo, hi), threshold, loss)
    fits = fit_series(pts)
    rate = fits.joint_rate
    if fits.poly_residual <= fits.exp_residual or rate < threshold:
        verdict = "amenable_consistent"
    else:
        verdict = "pressure_drop"
    return Verdict(verdict, rate, fits, (lo, hi), threshold, loss)


@dataclass(frozen=True)
class ConnectorReport:
    connectors: dict[tuple[int, int], Word]
    missing: tuple[tuple[int, int], ...]
    max_len: int


def trivial_connectors(extension: ExtensionSystem, max_len: int,
                       letters=None) -> ConnectorReport:
    """For each pair of b.i.p. letters, a word from one to the other whose
    cocycle product is trivial; shortest-then-lexicographic via BFS.
    Pairs not reachable within max_len are reported, not fatal.
    """
    from .sft import check_bip
    shift, grp = extension.shift, extension.group
    if letters is None:
        letters = check_bip(shift).witness
    connectors: dict[tuple[int, int], Word] = {}
    missing: list[tuple[int, int]] = []
    for beta in letters:
        found = _connector_bfs(extension, beta, set(letters), max_len)
        for betap in letters:
            word = found.get(betap)
            if word is None:
                missing.append((beta, betap))
            else:
                connectors[(beta, betap)] = word
    return ConnectorReport(connectors=connectors, missing=tuple(missing),
                           max_len=max_len)


def _connector_bfs(extension, beta: int, goals: set[int], max_len: int):
    grp = extension.group
    start_g = extension.cocycle.of_letter(beta)
    ident = grp.identity().key
    found: dict[int, Word] = {}
    if start_g.key == ident and beta in goals:
        found[beta] = (beta,)
    layer = {(beta, start_g.key): (beta,)}
    seen = set(layer)
    for _ in range(max_len - 1):
        if len(found) == len(goals):
            break
        nxt = {}
        for (last, gkey), word in layer.items():
            for c in range(extension.shift.alphabet_size):
                if not extension.shift.admissible(last, c):
                    continue
                g2 = grp.multiply(GroupElement(grp, gkey),
                                  extension.cocycle.of_letter(c))
                key = (c, g2.key)
                if key in seen:
                    continue
                seen.add(key)
                nxt[key] = word + (c,)
                if g2.key == ident and c in goals and c not in found:
                    found[c] = word + (c,)
        layer = nxt
    return found


def hnorm_1(f: dict[GroupElement, float]) -> float:
    """The mixed l2-over-l1 norm of a nonnegative f in H_c (mu a probability,
    so the inner L1 norm is just the constant value on each fiber)."""
    for g, v in f.items():
        if v < 0:
            raise NegativeInput(f"f({g}) = {v} < 0")
    return math.sqrt(sum(v * v for v in f.values()))


def psi_distribution(extension: ExtensionSystem, k: int,
                     max_states: int = 5_000_000) -> dict[GroupElement, float]:
    """mu-law of psi_k: total cylinder mass of length-k words by cocycle value."""
    shift, pot, grp = extension.shift, extension.potential, extension.group
    mu = GibbsMeasure(shift, pot)
    m, states, idx, table = _effective_table(extension)
    if k < m:
        raise ValueError(f"k must be >= {m}")
    layer: dict[tuple[Word, GroupElement], float] = {}
    for u in states:
        key = (u, psi_n(extension, u))
        layer[key] = layer.get(key, 0.0) + float(mu.nu[idx[u]])
    for _ in range(k - m):
        nxt: dict[tuple[Word, GroupElement], float] = {}
        for (u, g), w in layer.items():
            for c in range(shift.alphabet_size):
                b = u + (c,)
                logw = table.get(b)
                if logw is None:
                    continue
                p = math.exp(logw) * mu.nu[idx[b[1:]]] / mu.nu[idx[u]]
                key = (b[1:], grp.multiply(g, extension.cocycle.of_letter(c)))
                nxt[key] = nxt.get(key, 0.0) + w * p
        if len(nxt) > max_states:
            raise BallTooLarge(f"psi distribution exceeded {max_states} states")
        layer = nxt
    out: dict[GroupElement, float] = {}
    for (_, g), w in layer.items():
        out[g] = out.get(g, 0.0) + w
    return out


def lambda_k(extension: ExtensionSystem, f: dict[GroupElement, float], k: int) -> float:
    """Norm ratio of the k-th transfer image of a fiber-constant function."""
    base = hnorm_1(f)
    if base == 0.0:
        raise ValueError("f must be nonzero")
    grp = extension.group
    q = psi_distribution(extension, k)
    out: dict[GroupElement, float] = {}
    for s, fv in f.items():
        for h, qv in q.items():
            g = grp.multiply(s, h)
            out[g] = out.get(g, 0.0) + qv * fv
    return hnorm_1(out) / base
