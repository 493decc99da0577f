"""Finite-alphabet topological Markov chains.

A shift is described by a 0/1 transition matrix over a finite alphabet.
Words are tuples of letter indices; all enumeration is lexicographic so
repeated runs produce identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import InadmissibleWord, InvalidInvolution, NotMixing, NotSquare, ZeroRow

Word = tuple[int, ...]


@dataclass(frozen=True)
class Shift:
    alphabet_size: int
    transitions: tuple[tuple[int, ...], ...]
    period: int
    mixing: bool
    transitive: bool

    def admissible(self, i: int, j: int) -> bool:
        return self.transitions[i][j] == 1

    def is_word(self, word: Word) -> bool:
        if any(not 0 <= c < self.alphabet_size for c in word):
            return False
        return all(self.admissible(a, b) for a, b in zip(word, word[1:]))

    def require_word(self, word: Word) -> None:
        if len(word) == 0 or not self.is_word(word):
            raise InadmissibleWord(f"not an admissible word: {word}")


def _strongly_connected(matrix) -> bool:
    n = len(matrix)

    def reach(start, mat):
        seen = {start}
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(n):
                if mat[i][j] and j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen

    transposed = [[matrix[j][i] for j in range(n)] for i in range(n)]
    return len(reach(0, matrix)) == n and len(reach(0, transposed)) == n


def _graph_period(matrix) -> int:
    # gcd of cycle lengths, via BFS level differences from node 0.
    n = len(matrix)
    level = {0: 0}
    queue = [0]
    period = 0
    while queue:
        i = queue.pop(0)
        for j in range(n):
            if matrix[i][j]:
                if j in level:
                    period = gcd(period, level[i] + 1 - level[j])
                else:
                    level[j] = level[i] + 1
                    queue.append(j)
    return abs(period) if period else 1


def validate_shift(alphabet_size: int, transitions) -> Shift:
    """Build a Shift, computing period and mixing flags.

    Rejects non-square matrices and rows of zeros (every letter must have
    at least one successor).
    """
    rows = [tuple(int(bool(x)) for x in row) for row in transitions]
    if len(rows) != alphabet_size or any(len(r) != alphabet_size for r in rows):
        raise NotSquare(f"expected a {alphabet_size}x{alphabet_size} matrix")
    for i, row in enumerate(rows):
        if sum(row) == 0:
            raise ZeroRow(f"row {i} has no admissible successor")
    transitive = _strongly_connected(rows)
    period = _graph_period(rows) if transitive else 1
    mixing = transitive and period == 1
    return Shift(
        alphabet_size=alphabet_size,
        transitions=tuple(rows),
        period=period,
        mixing=mixing,
        transitive=transitive,
    )


def full_shift(alphabet_size: int) -> Shift:
    ones = [[1] * alphabet_size for _ in range(alphabet_size)]
    return validate_shift(alphabet_size, ones)


def enumerate_words(shift: Shift, n: int, start: Word | int | None = None,
                    end_letter: int | None = None) -> list[Word]:
    """All admissible words of length n, lexicographic.

    `start` is a prefix (letter or word); `end_letter` keeps only words w
    with (w_n, end_letter) admissible, i.e. the set of words that can be
    continued by that letter.
    """
    if n < 1:
        raise ValueError("word length must be >= 1")
    if isinstance(start, int):
        start = (start,)
    prefix: Word = tuple(start) if start else ()
    if len(prefix) > n:
        raise ValueError("prefix longer than requested length")
    if prefix and not shift.is_word(prefix):
        return []

    out: list[Word] = []

    def extend(word: Word):
        if len(word) == n:
            if end_letter is None or shift.admissible(word[-1], end_letter):
                out.append(word)
            return
        pos = len(word)
        for c in range(shift.alphabet_size):
            if pos < len(prefix):
                if c != prefix[pos]:
                    continue
            if pos > 0 and not shift.admissible(word[-1], c):
                continue
            extend(word + (c,))

    extend(())
    return out


@dataclass(frozen=True)
class BipReport:
    mixing: bool
    witness: tuple[int, ...]


def check_bip(shift: Shift) -> BipReport:
    """b.i.p. check: mixing plus a letter set covering all rows and columns.

    For finite alphabets the witness always exists once the shift is mixing;
    we report a greedy minimal-cardinality choice (ties by letter index).
    """
    if not shift.mixing:
        raise NotMixing("shift is not topologically mixing")
    m = shift.alphabet_size
    uncovered_rows = set(range(m))   # rows needing a successor in the witness
    uncovered_cols = set(range(m))   # letters needing a predecessor in the witness
    witness: list[int] = []
    while uncovered_rows or uncovered_cols:
        best, best_gain = None, -1
        for b in range(m):
            gain = sum(1 for i in uncovered_rows if shift.transitions[i][b])
            gain += sum(1 for j in uncovered_cols if shift.transitions[b][j])
            if gain > best_gain:
                best, best_gain = b, gain
        witness.append(best)
        uncovered_rows = {i for i in uncovered_rows if not shift.transitions[i][best]}
        uncovered_cols = {j for j in uncovered_cols if not shift.transitions[best][j]}
    return BipReport(mixing=True, witness=tuple(sorted(witness)))


@dataclass(frozen=True)
class Involution:
    dagger: tuple[int, ...]

    def apply(self, letter: int) -> int:
        return self.dagger[letter]


def validate_involution(shift: Shift, dagger) -> Involution:
    """Check the two structural properties of an alphabet involution:
    it is self-inverse, and (vw) is admissible iff (w† v†) is.
    """
    perm = tuple(int(x) for x in dagger)
    m = shift.alphabet_size
    if sorted(perm) != list(range(m)):
        raise InvalidInvolution("dagger is not a permutation of the alphabet")
    for w in range(m):
        if perm[perm[w]] != w:
            raise InvalidInvolution(f"dagger not involutive at letter {w}")
    for v in range(m):
        for w in range(m):
            if shift.transitions[v][w] != shift.transitions[perm[w]][perm[v]]:
                raise InvalidInvolution(
                    f"admissibility not reversed for pair ({v},{w})")
    return Involution(dagger=perm)


def dagger_word(involution: Involution, word: Word) -> Word:
    """Reverse the word and dagger each letter."""
    return tuple(involution.apply(c) for c in reversed(word))
