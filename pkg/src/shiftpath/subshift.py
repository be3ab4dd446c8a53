"""Subshifts of finite type and functions of finitely many coordinates.

The state space is the set of one-sided symbol sequences (s1, s2, ...)
over the alphabet {1, ..., k} in which every consecutive pair (a, b)
satisfies matrix[a, b] == 1.  The dynamics drop the first symbol, so a
point has one preimage per admissible leading symbol.  Everything the
library computes lives on finite cylinder resolutions: a depth-d
function is a table with one value per admissible word of length d,
kept in lexicographic word order.
"""

import numpy as np

from .errors import (
    DepthDowngrade,
    InadmissibleWord,
    NegativeWeight,
    NonBinaryEntry,
    ZeroColumn,
)


def word_string(word):
    """Render a word tuple as a digit string, e.g. (1, 2, 1) -> "121"."""
    return "".join(str(s) for s in word)


class Subshift:
    """Transition-matrix model of the symbol space and its shift map.

    Parameters
    ----------
    matrix : array_like
        Square 0/1 matrix.  matrix[a-1, b-1] == 1 means symbol b may
        follow symbol a.  Every column must contain a 1 so that every
        point has at least one preimage under the shift.

    Notes
    -----
    Instances are immutable after construction and safe for concurrent
    reads.  Word tables per depth are cached lazily.
    """

    def __init__(self, matrix):
        m = np.asarray(matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError("transition matrix must be square and non-empty")
        vals = np.unique(m)
        if not np.isin(vals, (0, 1)).all():
            raise NonBinaryEntry(f"matrix entries must be 0 or 1, got {vals.tolist()}")
        a = m.astype(np.int64)
        cols = a.sum(axis=0)
        for j, cj in enumerate(cols):
            if cj == 0:
                raise ZeroColumn(j + 1)
        self.k = int(a.shape[0])
        self.matrix = a
        self.matrix.setflags(write=False)
        self.column_sums = cols
        self.column_sums.setflags(write=False)
        self._preimages = tuple(
            tuple(int(i) + 1 for i in np.flatnonzero(a[:, j]))
            for j in range(self.k)
        )
        self._successors = tuple(
            tuple(int(j) + 1 for j in np.flatnonzero(a[i, :]))
            for i in range(self.k)
        )
        self._words = {1: [(s,) for s in range(1, self.k + 1)]}
        self._parent = {1: None}
        self._index = {}
        self._sym = {}

    def __repr__(self):
        return f"Subshift(k={self.k})"

    @property
    def irreducible(self):
        """True when the transition digraph is strongly connected."""
        closure = np.linalg.matrix_power(
            np.eye(self.k, dtype=np.int64) + self.matrix, self.k
        )
        return bool((closure > 0).all())

    def preimage_symbols(self, j):
        """Symbols a with matrix[a, j] == 1, i.e. the inverse branches at [j...]."""
        if not 1 <= j <= self.k:
            raise InadmissibleWord(f"symbol {j} outside 1..{self.k}")
        return self._preimages[j - 1]

    def branch_count(self, j):
        """Number of preimages of any point whose first symbol is j."""
        return int(self.column_sums[j - 1])

    def _grow(self, depth):
        have = max(self._words)
        while have < depth:
            prev = self._words[have]
            nxt = []
            parent = []
            for i, w in enumerate(prev):
                for b in self._successors[w[-1] - 1]:
                    nxt.append(w + (b,))
                    parent.append(i)
            self._words[have + 1] = nxt
            self._parent[have + 1] = np.asarray(parent, dtype=np.int64)
            have += 1

    def words(self, depth):
        """Admissible words of the given length, lexicographically ordered."""
        if depth < 1:
            raise ValueError("depth must be >= 1")
        self._grow(depth)
        return self._words[depth]

    def word_count(self, depth):
        return len(self.words(depth))

    def word_index(self, depth):
        """Dict mapping each admissible word of this length to its position."""
        if depth not in self._index:
            self._index[depth] = {w: i for i, w in enumerate(self.words(depth))}
        return self._index[depth]

    def symbols_array(self, depth):
        """Admissible words as an int array of shape (count, depth)."""
        if depth not in self._sym:
            arr = np.asarray(self.words(depth), dtype=np.int64).reshape(-1, depth)
            arr.setflags(write=False)
            self._sym[depth] = arr
        return self._sym[depth]

    def is_admissible(self, word):
        if len(word) == 0:
            return False
        a = self.matrix
        for s in word:
            if not 1 <= s <= self.k:
                return False
        for i in range(len(word) - 1):
            if a[word[i] - 1, word[i + 1] - 1] == 0:
                return False
        return True

    def require_admissible(self, word):
        if not self.is_admissible(tuple(word)):
            raise InadmissibleWord(f"word {word_string(word)} is not admissible")

    def prefix_indices(self, depth, prefix_depth):
        """For each depth-`depth` word, the index of its length-`prefix_depth` prefix."""
        if prefix_depth > depth:
            raise ValueError("prefix depth exceeds word depth")
        self._grow(depth)
        idx = np.arange(self.word_count(depth), dtype=np.int64)
        for d in range(depth, prefix_depth, -1):
            idx = self._parent[d][idx]
        return idx

    def suffix_indices(self, depth):
        """For each depth-`depth` word w, the index of w[1:] among depth-(depth-1) words."""
        if depth < 2:
            raise ValueError("need depth >= 2 to drop the first symbol")
        index = self.word_index(depth - 1)
        out = np.empty(self.word_count(depth), dtype=np.int64)
        for i, w in enumerate(self.words(depth)):
            out[i] = index[w[1:]]
        return out


class CylinderFunction:
    """A function of the first `depth` coordinates: one value per admissible word.

    Values are stored in the lexicographic order of `shift.words(depth)`.
    Instances are immutable; arithmetic returns new objects and promotes
    both operands to the deeper of the two resolutions first.
    """

    __slots__ = ("shift", "depth", "values")

    def __init__(self, shift, depth, values):
        vals = np.asarray(values)
        expected = shift.word_count(depth)
        if vals.shape != (expected,):
            raise ValueError(
                f"expected {expected} values for depth {depth}, got shape {vals.shape}"
            )
        if np.iscomplexobj(vals):
            vals = vals.astype(np.complex128)
        else:
            vals = vals.astype(np.float64)
        vals.setflags(write=False)
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):
        raise AttributeError("CylinderFunction is immutable")

    def __repr__(self):
        return f"CylinderFunction(depth={self.depth}, n={len(self.values)})"

    @classmethod
    def constant(cls, shift, value, depth=1):
        n = shift.word_count(depth)
        return cls(shift, depth, np.full(n, value))

    @classmethod
    def indicator(cls, shift, word):
        """Indicator of the cylinder [word], at depth len(word)."""
        word = tuple(word)
        shift.require_admissible(word)
        vals = np.zeros(shift.word_count(len(word)))
        vals[shift.word_index(len(word))[word]] = 1.0
        return cls(shift, len(word), vals)

    @classmethod
    def from_table(cls, shift, depth, table):
        """Build from a {word: value} dict covering exactly the admissible words."""
        words = shift.words(depth)
        missing = [w for w in words if tuple(w) not in table]
        if missing:
            raise InadmissibleWord(
                f"table is missing admissible words, e.g. {word_string(missing[0])}"
            )
        extra = set(table) - set(words)
        if extra:
            w = sorted(extra)[0]
            raise InadmissibleWord(f"table mentions inadmissible word {word_string(w)}")
        return cls(shift, depth, [table[w] for w in words])

    def value(self, word):
        """Value on the cylinder [word]; needs len(word) >= depth to be well defined."""
        word = tuple(word)
        if len(word) < self.depth:
            raise DepthDowngrade(
                f"function of depth {self.depth} is not constant on [{word_string(word)}]"
            )
        self.shift.require_admissible(word)
        return self.values[self.shift.word_index(self.depth)[word[: self.depth]]]

    def promote(self, depth):
        """Represent the same function on X at a finer cylinder resolution."""
        if depth < self.depth:
            raise DepthDowngrade(f"cannot lower depth {self.depth} to {depth}")
        if depth == self.depth:
            return self
        idx = self.shift.prefix_indices(depth, self.depth)
        return CylinderFunction(self.shift, depth, self.values[idx])

    def compose_with_shift(self):
        """The function x -> f(shift(x)), one level deeper than f."""
        d = self.depth + 1
        suf = self.shift.suffix_indices(d)
        return CylinderFunction(self.shift, d, self.values[suf])

    def _pair(self, other):
        if not isinstance(other, CylinderFunction):
            raise TypeError("expected a CylinderFunction")
        if other.shift is not self.shift:
            raise ValueError("operands live on different subshifts")
        d = max(self.depth, other.depth)
        return self.promote(d), other.promote(d)

    def __add__(self, other):
        if np.isscalar(other):
            return CylinderFunction(self.shift, self.depth, self.values + other)
        a, b = self._pair(other)
        return CylinderFunction(a.shift, a.depth, a.values + b.values)

    __radd__ = __add__

    def __sub__(self, other):
        if np.isscalar(other):
            return CylinderFunction(self.shift, self.depth, self.values - other)
        a, b = self._pair(other)
        return CylinderFunction(a.shift, a.depth, a.values - b.values)

    def __rsub__(self, other):
        if np.isscalar(other):
            return CylinderFunction(self.shift, self.depth, other - self.values)
        return NotImplemented

    def __mul__(self, other):
        if np.isscalar(other):
            return CylinderFunction(self.shift, self.depth, self.values * other)
        a, b = self._pair(other)
        return CylinderFunction(a.shift, a.depth, a.values * b.values)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return CylinderFunction(self.shift, self.depth, self.values / other)
        return NotImplemented

    def __neg__(self):
        return CylinderFunction(self.shift, self.depth, -self.values)

    def abs_squared(self):
        """Pointwise |f|^2 as a real cylinder function."""
        return CylinderFunction(
            self.shift, self.depth, (self.values.conj() * self.values).real
        )

    def sup_norm(self):
        return float(np.abs(self.values).max())

    def max(self):
        return float(self.values.max().real)

    def min(self):
        return float(self.values.min().real)

    def require_nonnegative(self, name="weight"):
        if np.iscomplexobj(self.values) or self.values.min() < 0:
            raise NegativeWeight(f"{name} must be real and nonnegative")


def build_subshift(matrix):
    """Validate a 0/1 transition matrix and wrap it as a Subshift."""
    return Subshift(matrix)


def admissible_words(shift, depth):
    return shift.words(depth)


def preimage_symbols(shift, j):
    return shift.preimage_symbols(j)


def promote_depth(f, depth):
    return f.promote(depth)


def compose_with_shift(f):
    return f.compose_with_shift()


def weight_product(v, n):
    """The running product v(x) v(shift x) ... v(shift^(n-1) x).

    The result depends on the first depth(v) + n - 1 coordinates.  It is
    built by the recursion product(n+1) = v * (product(n) o shift), which
    is exact on cylinder tables.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    v.require_nonnegative()
    out = v
    for _ in range(n - 1):
        out = v * out.compose_with_shift()
    return out
