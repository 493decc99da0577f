"""Locally constant potentials and their thermodynamic machinery.

A potential of memory k is a table of log-weights on admissible k-blocks.
All combination happens in log-space; partition functions use transfer
matrix powers with explicit scaling (brute-force enumeration is kept as a
test oracle only, since it blows up past n ~ 16).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (InadmissibleContext, InadmissibleWord, InvolutionMissing,
                     NoConvergence)
from .sft import Involution, Shift, Word, dagger_word, enumerate_words

NEG_INF = float("-inf")


@dataclass(frozen=True)
class Potential:
    memory: int
    log_weights: dict[Word, float] = field(compare=False)

    def log_weight(self, block: Word) -> float:
        try:
            return self.log_weights[block]
        except KeyError:
            raise InadmissibleWord(f"no weight for block {block}") from None


def constant_potential(shift: Shift, value: float) -> Potential:
    """Memory-1 potential with phi == value on every letter."""
    if value <= 0:
        raise ValueError("potential must be strictly positive")
    logv = math.log(value)
    return Potential(1, {(c,): logv for c in range(shift.alphabet_size)})


def validate_potential(shift: Shift, potential: Potential) -> Potential:
    """Every admissible memory-block must carry a finite log-weight."""
    k = potential.memory
    if k < 1:
        raise ValueError("memory must be >= 1")
    for block in enumerate_words(shift, k):
        v = potential.log_weight(block)
        if not math.isfinite(v):
            raise ValueError(f"non-finite log-weight at block {block}")
    return potential


def _lifted_table(shift: Shift, potential: Potential, length: int) -> dict[Word, float]:
    """Potential re-indexed on admissible blocks of the given length >= memory."""
    k = potential.memory
    assert length >= k
    return {b: potential.log_weight(b[:k]) for b in enumerate_words(shift, length)}


def state_length(potential: Potential) -> int:
    """Length of the block states the transfer matrix acts on."""
    return max(potential.memory - 1, 1)


def birkhoff_log_weight(shift: Shift, potential: Potential, word: Word,
                        tail: Word | None = None, periodic: bool = False) -> float:
    """Birkhoff sum of log phi along the first |word| positions.

    The k-block at the last positions sticks out of the word; either a tail
    of k-1 following symbols is supplied, or `periodic` wraps the word onto
    itself (theta^n(x) = x literally).
    """
    shift.require_word(word)
    n, k = len(word), potential.memory
    if periodic:
        if not shift.admissible(word[-1], word[0]):
            raise InadmissibleContext("word does not close up periodically")
        ext = word + tuple(word[i % n] for i in range(k - 1))
    else:
        tail = tuple(tail or ())
        if len(tail) < k - 1:
            raise InadmissibleContext(f"need a tail of {k - 1} symbols")
        ext = word + tail[:k - 1]
        if not shift.is_word(ext):
            raise InadmissibleContext(f"tail {tail} not admissible after word")
    return sum(potential.log_weight(ext[j:j + k]) for j in range(n))


@dataclass(frozen=True)
class TransferMatrix:
    states: tuple[Word, ...]      # admissible blocks of length state_length
    matrix: np.ndarray            # matrix[u, v] = phi(v-block preceding u)
    forward: np.ndarray           # forward[u, u'] for path/partition sums

    def index(self, block: Word) -> int:
        return self.states.index(block)


def transfer_matrix(shift: Shift, potential: Potential) -> TransferMatrix:
    """Ruelle operator restricted to functions of state_length coordinates.

    matrix[u, v] = phi(b) for each admissible (m+1)-block b with v = b[:m]
    and u = b[1:]; exact for memory-k potentials.  `forward` is the same
    weight arranged along the direction of time for partition sums.
    """
    validate_potential(shift, potential)
    m = state_length(potential)
    states = tuple(enumerate_words(shift, m))
    idx = {s: i for i, s in enumerate(states)}
    table = _lifted_table(shift, potential, m + 1)
    mat = np.zeros((len(states), len(states)))
    fwd = np.zeros((len(states), len(states)))
    for block, logw in table.items():
        w = math.exp(logw)
        v, u = block[:m], block[1:]
        mat[idx[u], idx[v]] = w
        fwd[idx[v], idx[u]] = w
    return TransferMatrix(states=states, matrix=mat, forward=fwd)


def leading_eigen(matrix: np.ndarray, tol: float = 1e-13,
                  max_iter: int = 100_000) -> tuple[float, np.ndarray, np.ndarray]:
    """Power iteration for the Perron data of a primitive matrix.

    Returns (lam, h, nu) with M h = lam h, nu M = lam nu, h and nu
    entrywise positive and <nu, h> = 1.
    """
    n = matrix.shape[0]
    h = np.ones(n)
    nu = np.ones(n)
    lam = 1.0
    for _ in range(max_iter):
        h_next = matrix @ h
        nu_next = matrix.T @ nu
        lam = float(np.max(h_next))
        if lam <= 0:
            raise NoConvergence("matrix power collapsed to zero")
        h_next /= lam
        nu_next /= np.max(nu_next)
        done = (np.max(np.abs(h_next - h)) < tol
                and np.max(np.abs(nu_next - nu)) < tol)
        h, nu = h_next, nu_next
        if done:
            break
    else:
        raise NoConvergence(f"no convergence after {max_iter} iterations")
    lam = float((nu @ (matrix @ h)) / (nu @ h))
    residual = float(np.max(np.abs(matrix @ h - lam * h)))
    if residual > max(tol * 100, 1e-10) * max(lam, 1.0):
        raise NoConvergence(f"residual {residual} too large (non-primitive matrix?)")
    if np.any(h <= 0) or np.any(nu <= 0):
        raise NoConvergence("eigenvectors not strictly positive")
    nu = nu / (nu @ h)
    return lam, h, nu


def _try_reduce_memory(shift: Shift, table: dict[Word, float], length: int,
                       tol: float = 1e-12) -> Potential:
    """Collapse a block table to the smallest memory it actually depends on."""
    for k in range(1, length):
        groups: dict[Word, float] = {}
        ok = True
        for block, v in table.items():
            prefix = block[:k]
            if prefix in groups and abs(groups[prefix] - v) > tol:
                ok = False
                break
            groups.setdefault(prefix, v)
        if ok:
            admissible = set(enumerate_words(shift, k))
            if set(groups) == admissible:
                return Potential(k, groups)
    return Potential(length, dict(table))


def normalize(shift: Shift, potential: Potential) -> Potential:
    """Conjugate by the Perron eigendata so that L_phi'(1) = 1.

    phi'(b) = phi(b) * h(b[:m]) / (lam * h(b[1:])) on (m+1)-blocks; the
    result is reduced back to lower memory when the table allows it (e.g.
    an already-normalized potential comes back unchanged).
    """
    if not shift.mixing:
        raise ValueError("normalization requires a mixing shift")
    tm = transfer_matrix(shift, potential)
    lam, h, _ = leading_eigen(tm.matrix)
    m = state_length(potential)
    idx = {s: i for i, s in enumerate(tm.states)}
    logh = np.log(h)
    loglam = math.log(lam)
    table = {}
    for block, logw in _lifted_table(shift, potential, m + 1).items():
        table[block] = float(logw + logh[idx[block[:m]]] - loglam - logh[idx[block[1:]]])
    return _try_reduce_memory(shift, table, m + 1)


def partition_function(shift: Shift, potential: Potential, a: int, n: int) -> float:
    """log Z_a^n: periodic points in [a], Birkhoff weights with periodic closure.

    Computed as a transfer-matrix power (identical to closed-word enumeration
    for locally constant potentials); returns -inf when no closed word exists.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    validate_potential(shift, potential)
    tm = transfer_matrix(shift, potential)
    power = np.eye(len(tm.states))
    log_scale = 0.0
    for _ in range(n):
        power = power @ tm.forward
        s = float(np.max(power))
        if s <= 0.0:
            return NEG_INF
        power /= s
        log_scale += math.log(s)
    total = sum(float(power[i, i]) for i, st in enumerate(tm.states) if st[0] == a)
    if total <= 0.0:
        return NEG_INF
    return log_scale + math.log(total)


@dataclass(frozen=True)
class PressureEstimate:
    samples: tuple[tuple[int, float], ...]   # (n, (1/n) log Z_a^n)
    eigenvalue_estimate: float
    orbit_slope: float
    discrepancy: float


def pressure_estimate(shift: Shift, potential: Potential, a: int,
                      n_range) -> PressureEstimate:
    """Gurevic pressure two ways: log of the Perron eigenvalue (exact for
    finite memory) and the least-squares slope of log Z_a^n over n_range.
    """
    if not shift.mixing:
        raise ValueError("pressure estimation requires a mixing shift")
    ns = sorted(set(int(n) for n in n_range))
    if not ns:
        raise ValueError("n_range must be nonempty")
    tm = transfer_matrix(shift, potential)
    lam, _, _ = leading_eigen(tm.matrix)
    eig = math.log(lam)
    pts = []
    samples = []
    for n in ns:
        logz = partition_function(shift, potential, a, n)
        if math.isfinite(logz):
            pts.append((n, logz))
            samples.append((n, logz / n))
    if len(pts) < 2:
        raise ValueError("not enough nonempty partition functions to fit")
    xs = np.array([p[0] for p in pts], dtype=float)
    ys = np.array([p[1] for p in pts], dtype=float)
    slope = float(np.polyfit(xs, ys, 1)[0])
    return PressureEstimate(samples=tuple(samples), eigenvalue_estimate=eig,
                            orbit_slope=slope, discrepancy=abs(eig - slope))


class GibbsMeasure:
    """Cylinder measure built from the eigendata of a normalized potential."""

    def __init__(self, shift: Shift, potential: Potential):
        self.shift = shift
        self.potential = potential
        tm = transfer_matrix(shift, potential)
        lam, h, nu = leading_eigen(tm.matrix)
        if abs(lam - 1.0) > 1e-9:
            raise ValueError(f"potential not normalized (lambda = {lam})")
        self.states = tm.states
        self._idx = {s: i for i, s in enumerate(tm.states)}
        self.m = state_length(potential)
        # conformal distribution on m-blocks: nu M = nu, sum nu = 1
        self.nu = nu / nu.sum()
        self._table = _lifted_table(shift, potential, self.m + 1)

    def log_cylinder(self, word: Word) -> float:
        self.shift.require_word(word)
        m = self.m
        if len(word) < m:
            mass = sum(float(self.nu[self._idx[s]])
                       for s in self.states if s[:len(word)] == word)
            return math.log(mass)
        total = math.log(float(self.nu[self._idx[word[-m:]]]))
        for j in range(len(word) - m):
            total += self._table[word[j:j + m + 1]]
        return total

    def cylinder(self, word: Word) -> float:
        return math.exp(self.log_cylinder(word))

    def shifted_cylinder_mass(self, letter: int) -> float:
        """mu(theta([letter])): mass of the image of a 1-cylinder."""
        return sum(self.cylinder((c,))
                   for c in range(self.shift.alphabet_size)
                   if self.shift.admissible(letter, c))


def gibbs_cylinder_measure(shift: Shift, potential: Potential, word: Word) -> float:
    return GibbsMeasure(shift, potential).cylinder(word)


@dataclass(frozen=True)
class VariationReport:
    n_max: int
    log_c: dict[int, float]            # log C_n per word length
    log_d: dict[int, float] | None     # log D_n, when an involution is given

    def c(self, n: int) -> float:
        return math.exp(self.log_c[n])


def _birkhoff_range(shift: Shift, potential: Potential, word: Word) -> tuple[float, float]:
    """(min, max) of the Birkhoff log-weight over all admissible tail contexts."""
    k = potential.memory
    if k == 1:
        v = birkhoff_log_weight(shift, potential, word, tail=())
        return v, v
    lo, hi = math.inf, -math.inf
    for tail in enumerate_words(shift, k - 1, start=None):
        if not shift.admissible(word[-1], tail[0]):
            continue
        v = birkhoff_log_weight(shift, potential, word, tail=tail)
        lo, hi = min(lo, v), max(hi, v)
    return lo, hi


def variation_constants(shift: Shift, potential: Potential,
                        involution: Involution | None = None,
                        n_max: int = 6) -> VariationReport:
    """Exact distortion constants C_n (and symmetry defects D_n, if asked).

    C_n ranges x, y over the same n-cylinder; D_n pairs each word with its
    dagger.  Both are exact sups since the potential has finite memory.
    """
    validate_potential(shift, potential)
    log_c: dict[int, float] = {}
    log_d: dict[int, float] | None = {} if involution is not None else None
    for n in range(1, n_max + 1):
        worst_c = 0.0
        worst_d = -math.inf
        for word in enumerate_words(shift, n):
            lo, hi = _birkhoff_range(shift, potential, word)
            worst_c = max(worst_c, hi - lo)
            if involution is not None:
                dlo, _ = _birkhoff_range(shift, potential,
                                         dagger_word(involution, word))
                worst_d = max(worst_d, hi - dlo)
        log_c[n] = worst_c
        if log_d is not None:
            log_d[n] = worst_d
    return VariationReport(n_max=n_max, log_c=log_c, log_d=log_d)


def symmetry_defects(shift: Shift, potential: Potential, involution: Involution | None,
                     n_max: int = 6) -> dict[int, float]:
    if involution is None:
        raise InvolutionMissing("D_n requested without an involution")
    report = variation_constants(shift, potential, involution, n_max)
    return report.log_d


@dataclass(frozen=True)
class ConformalReport:
    n_max: int
    max_conformal_ratio: float       # max of r, 1/r with r = (mu([w])/Phi)/mu(theta[w_last])
    max_conformal_violation: float   # max ratio relative to the C_n bracket; <= 1 means ok
    max_gibbs_ratio: float           # max of mu([w])/Phi and its reciprocal
    max_gibbs_violation: float       # relative to B = C_k; <= 1 means ok


def conformal_check(shift: Shift, potential: Potential, n_max: int) -> ConformalReport:
    """Exhaustive check of the conformal bracket and the Gibbs inequality.

    For every word w up to length n_max and every tail context, the ratio
    mu([w]) / Phi_|w|(x) must lie within C_|w| times mu(theta([w_last]))
    either way, and within C_k of 1 (Gibbs, memory-k potential).
    Violations are reported as ratios, not raised.
    """
    mu = GibbsMeasure(shift, potential)
    k = potential.memory
    var = variation_constants(shift, potential, n_max=max(n_max, k))
    log_ck = var.log_c[k]
    worst_conf_ratio = 1.0
    worst_conf = 0.0
    worst_gibbs_ratio = 1.0
    worst_gibbs = 0.0
    for length in range(1, n_max + 1):
        log_cn = var.log_c[length]
        for word in enumerate_words(shift, length):
            log_mu = mu.log_cylinder(word)
            lo, hi = _birkhoff_range(shift, potential, word)
            # Gibbs: B^-1 <= mu([w]) / Phi_n(x) <= B with B = C_k, n = |w|
            for excess in (log_mu - lo, hi - log_mu):
                worst_gibbs_ratio = max(worst_gibbs_ratio, math.exp(excess))
                worst_gibbs = max(worst_gibbs, math.exp(excess - log_ck))
            # conformal: compare against the shifted last-letter cylinder
            log_img = math.log(mu.shifted_cylinder_mass(word[-1]))
            for excess in (log_mu - lo - log_img, log_img - (log_mu - hi)):
                worst_conf_ratio = max(worst_conf_ratio, math.exp(excess))
                worst_conf = max(worst_conf, math.exp(excess - log_cn))
    return ConformalReport(n_max=n_max,
                           max_conformal_ratio=worst_conf_ratio,
                           max_conformal_violation=worst_conf,
                           max_gibbs_ratio=worst_gibbs_ratio,
                           max_gibbs_violation=worst_gibbs)
