"""Van Ham Booleanization and nested canalization of partial Boolean functions.

A multivalued state ``x`` is encoded as the bit vector
``1^{x_1} 0^{k_1-1-x_1} ... 1^{x_n} 0^{k_n-1-x_n}``; bit ``(i, a)`` (for
``1 <= a <= k_i - 1``) is set iff ``x_i >= a``.  Bit positions are numbered
left to right from 0, and a bit vector's flat index is big-endian (the
leftmost bit is the most significant).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .canalization import SncWitness, WitnessError
from .domain import MixedRadixDomain, MultivaluedFunction, Network, ResourceLimitError

DEFAULT_MAX_BITS = 24


class VanHamCodec:
    def __init__(self, arities: Sequence[int] | MixedRadixDomain):
        if isinstance(arities, MixedRadixDomain):
            self.domain = arities
        else:
            self.domain = MixedRadixDomain(tuple(arities))
        self.arities = self.domain.arities
        offsets, pos = [], 0
        for k in self.arities:
            offsets.append(pos)
            pos += k - 1
        self.offsets = tuple(offsets)
        self.k = pos

    def __repr__(self):
        return f"VanHamCodec({self.arities})"

    def bit(self, i: int, a: int) -> int:
        """Position of bit ``(i, a)``, ``1 <= a <= k_i - 1``."""
        if not 1 <= a <= self.arities[i] - 1:
            raise IndexError(f"threshold {a} outside 1..{self.arities[i] - 1} for coordinate {i}")
        return self.offsets[i] + a - 1

    def bit_label(self, pos: int) -> tuple[int, int]:
        for i in reversed(range(len(self.offsets))):
            if pos >= self.offsets[i]:
                return i, pos - self.offsets[i] + 1
        raise IndexError(pos)

    def encode(self, point: Sequence[int]) -> tuple[int, ...]:
        point = self.domain.check_point(point)
        bits = []
        for x, k in zip(point, self.arities):
            bits += [1] * x + [0] * (k - 1 - x)
        return tuple(bits)

    def is_admissible(self, y: Sequence[int]) -> bool:
        if len(y) != self.k:
            raise ValueError(f"expected {self.k} bits, got {len(y)}")
        for i, k in enumerate(self.arities):
            block = y[self.offsets[i]:self.offsets[i] + k - 1]
            if any(b not in (0, 1) for b in block):
                return False
            if any(block[j] < block[j + 1] for j in range(len(block) - 1)):
                return False
        return True

    def decode(self, y: Sequence[int]) -> tuple[int, ...]:
        if not self.is_admissible(y):
            raise ValueError(f"{tuple(y)} is not admissible for arities {self.arities}")
        return tuple(sum(y[self.offsets[i]:self.offsets[i] + k - 1]) for i, k in enumerate(self.arities))

    @staticmethod
    def bits_to_index(y: Sequence[int]) -> int:
        out = 0
        for b in y:
            out = (out << 1) | int(b)
        return out

    def admissible_points(self) -> list[tuple[int, ...]]:
        """``beta(Omega)`` sorted by flat index."""
        return sorted((self.encode(x) for x in self.domain.points()), key=self.bits_to_index)


@dataclass(frozen=True)
class PartialBooleanFunction:
    """``g: X -> {0,1}`` on an explicit subset ``X`` of ``{0,1}^k``."""

    dimension: int
    points: tuple[tuple[int, ...], ...]
    values: tuple[int, ...]

    def __post_init__(self):
        pts = tuple(tuple(int(b) for b in p) for p in self.points)
        vals = tuple(int(v) for v in self.values)
        if not pts:
            raise ValueError("admissible set must be non-empty")
        if len(pts) != len(vals):
            raise ValueError("one value per admissible point is required")
        if any(len(p) != self.dimension or any(b not in (0, 1) for b in p) for p in pts):
            raise ValueError(f"points must be {self.dimension}-bit vectors")
        if len(set(pts)) != len(pts):
            raise ValueError("admissible points must be distinct")
        if any(v not in (0, 1) for v in vals):
            raise ValueError("values must be bits")
        order = sorted(range(len(pts)), key=lambda r: VanHamCodec.bits_to_index(pts[r]))
        object.__setattr__(self, "points", tuple(pts[r] for r in order))
        object.__setattr__(self, "values", tuple(vals[r] for r in order))

    @cached_property
    def _lookup(self) -> dict[tuple[int, ...], int]:
        return dict(zip(self.points, self.values))

    def __call__(self, y: Sequence[int]) -> int:
        return self._lookup[tuple(y)]

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self._lookup)

    def to_dict(self) -> dict:
        return {
            "arities": [2] * self.dimension,
            "codomain": 2,
            "admissible": [VanHamCodec.bits_to_index(p) for p in self.points],
            "values": list(self.values),
        }


@dataclass(frozen=True)
class BooleanNcStep:
    coord: int
    value: int
    output: int


BooleanNcWitness = tuple[BooleanNcStep, ...]


def verify_boolean_nc(g: PartialBooleanFunction, witness: Sequence[BooleanNcStep]) -> bool:
    """Check a Boolean NC witness against ``g`` on its admissible set.

    The witness must test every coordinate exactly once; points that escape
    every test are unconstrained.
    """
    if sorted(s.coord for s in witness) != list(range(g.dimension)):
        return False
    if any(s.value not in (0, 1) or s.output not in (0, 1) for s in witness):
        return False
    for y, v in zip(g.points, g.values):
        for s in witness:
            if y[s.coord] == s.value:
                if v != s.output:
                    return False
                break
    return True


def is_nc_partial(g: PartialBooleanFunction, max_bits: int = DEFAULT_MAX_BITS) -> Optional[BooleanNcWitness]:
    """Backtracking search for a Boolean NC witness on ``X``.

    Empty slices count as constant.  Failed residual states, keyed by the
    used-coordinate set and the values those coordinates must avoid, are
    memoized.
    """
    k = g.dimension
    if k > max_bits:
        raise ResourceLimitError(f"partial function has {k} bits, cap is {max_bits}")
    X = np.array(g.points, dtype=np.int8).reshape(len(g.points), k)
    vals = np.array(g.values, dtype=np.int8)
    failed: set[tuple[int, int]] = set()

    def fill(used: int, value: int) -> list[BooleanNcStep]:
        return [BooleanNcStep(j, 0, value) for j in range(k) if not (used >> j) & 1]

    def search(rows: np.ndarray, used: int, avoid: int):
        v = vals[rows]
        if v.size == 0:
            return fill(used, 0)
        if v.min() == v.max():
            return fill(used, int(v[0]))
        if (used, avoid) in failed:
            return None
        cols = X[rows]
        for j in range(k):
            if (used >> j) & 1:
                continue
            for a in (0, 1):
                hit = cols[:, j] == a
                out = v[hit]
                if out.size == 0:
                    b = 0
                elif out.min() == out.max():
                    b = int(out[0])
                else:
                    continue
                found = search(rows[~hit], used | (1 << j), avoid | (a << j))
                if found is not None:
                    return [BooleanNcStep(j, a, b)] + found
        failed.add((used, avoid))
        return None

    found = search(np.arange(len(vals)), 0, 0)
    return None if found is None else tuple(found)


def booleanize_function(f: MultivaluedFunction) -> dict[int, PartialBooleanFunction]:
    """Components ``chi_{f(x) >= a}`` on ``beta(Omega)`` for ``1 <= a <= m - 1``."""
    codec = VanHamCodec(f.domain)
    pts = [codec.encode(x) for x in f.domain.points()]
    out = {}
    for a in range(1, f.codomain):
        out[a] = PartialBooleanFunction(codec.k, pts, [int(v >= a) for v in f.values])
    return out


@dataclass(frozen=True)
class BooleanizedNetwork:
    codec: VanHamCodec
    components: dict  # (j, a) -> PartialBooleanFunction

    def image(self, y: Sequence[int]) -> tuple[int, ...]:
        """Assembled ``F^beta(y)`` in bit order."""
        out = []
        for j, k in enumerate(self.codec.arities):
            out += [self.components[(j, a)](y) for a in range(1, k)]
        return tuple(out)


def booleanize(F: Network) -> BooleanizedNetwork:
    codec = VanHamCodec(F.domain)
    comps = {}
    for j, fj in enumerate(F.components):
        for a, g in booleanize_function(fj).items():
            comps[(j, a)] = g
    return BooleanizedNetwork(codec, comps)


def transport_witness(w: SncWitness, domain: MixedRadixDomain | Sequence[int], threshold: int) -> BooleanNcWitness:
    """Boolean NC witness for ``chi_{f >= threshold}`` from an SNC witness of ``f``.

    A min-side peel of value ``a`` becomes the test "bit ``(v, a+1)`` is 0"; a
    max-side peel becomes "bit ``(v, a)`` is 1".  Outputs are thresholded.
    """
    if not isinstance(domain, MixedRadixDomain):
        domain = MixedRadixDomain(tuple(domain))
    codec = VanHamCodec(domain)
    out = []
    for _, step in w.residuals(domain):
        if step.side == "min":
            out.append(BooleanNcStep(codec.bit(step.coord, step.value + 1), 0, int(step.output >= threshold)))
        else:
            out.append(BooleanNcStep(codec.bit(step.coord, step.value), 1, int(step.output >= threshold)))
    if len(out) != codec.k:
        raise WitnessError(f"witness has {len(out)} steps, expected {codec.k}")
    return tuple(out)
