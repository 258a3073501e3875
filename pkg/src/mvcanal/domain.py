"""Mixed-radix domains, dense truth tables and residual sub-boxes.

Points are integer tuples ``(x_1, ..., x_n)`` with ``0 <= x_i < k_i``.  Tables
are stored flat in big-endian mixed-radix order: the last coordinate varies
fastest, so ``index = sum_i x_i * prod_{j>i} k_j``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence, Union

import numpy as np

DEFAULT_MAX_POINTS = 2**24


class ResourceLimitError(RuntimeError):
    """A configurable size guard was exceeded."""


class _Vacuous:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "VACUOUS"

    def __bool__(self):
        return False


#: Returned by :func:`slice_constant` when the requested slice has no points.
VACUOUS = _Vacuous()


@dataclass(frozen=True)
class MixedRadixDomain:
    arities: tuple[int, ...]
    max_points: int = field(default=DEFAULT_MAX_POINTS, compare=False, repr=False)

    def __post_init__(self):
        arities = tuple(int(k) for k in self.arities)
        object.__setattr__(self, "arities", arities)
        if not arities:
            raise ValueError("a domain needs at least one coordinate")
        if any(k < 1 for k in arities):
            raise ValueError(f"arities must be >= 1, got {arities}")
        if self.size > self.max_points:
            raise ResourceLimitError(
                f"domain {arities} has {self.size} points, cap is {self.max_points}"
            )

    @property
    def n(self) -> int:
        return len(self.arities)

    @property
    def size(self) -> int:
        return int(np.prod(self.arities, dtype=object))

    @property
    def excess(self) -> int:
        """K = sum(k_i - 1): the number of peels needed to reach one point."""
        return sum(k - 1 for k in self.arities)

    @property
    def strides(self) -> tuple[int, ...]:
        out = []
        s = 1
        for k in reversed(self.arities):
            out.append(s)
            s *= k
        return tuple(reversed(out))

    def check_point(self, point: Sequence[int]) -> tuple[int, ...]:
        point = tuple(int(x) for x in point)
        if len(point) != self.n:
            raise ValueError(f"point {point} has {len(point)} coordinates, domain has {self.n}")
        for i, (x, k) in enumerate(zip(point, self.arities)):
            if not 0 <= x < k:
                raise IndexError(f"coordinate {i} of {point} is outside 0..{k - 1}")
        return point

    def encode(self, point: Sequence[int]) -> int:
        point = self.check_point(point)
        return sum(x * s for x, s in zip(point, self.strides))

    def decode(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.size:
            raise IndexError(f"index {index} outside 0..{self.size - 1}")
        out = []
        for k in reversed(self.arities):
            index, r = divmod(index, k)
            out.append(r)
        return tuple(reversed(out))

    def points(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(k) for k in self.arities))

    def full_box(self) -> "IntervalBox":
        return IntervalBox((0,) * self.n, tuple(k - 1 for k in self.arities))

    def full_subset_box(self) -> "SubsetBox":
        return SubsetBox(tuple((1 << k) - 1 for k in self.arities))


@dataclass(frozen=True)
class IntervalBox:
    """Product of inclusive ranges ``lo[i]..hi[i]``; never empty."""

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi must have the same length")
        for a, b in zip(self.lo, self.hi):
            if not 0 <= a <= b:
                raise ValueError(f"invalid interval box lo={self.lo} hi={self.hi}")

    @property
    def size(self) -> int:
        return int(np.prod([b - a + 1 for a, b in zip(self.lo, self.hi)], dtype=object))

    def values(self, i: int) -> range:
        return range(self.lo[i], self.hi[i] + 1)

    def contains(self, point: Sequence[int]) -> bool:
        return all(a <= x <= b for x, a, b in zip(point, self.lo, self.hi))

    def index(self) -> tuple[slice, ...]:
        return tuple(slice(a, b + 1) for a, b in zip(self.lo, self.hi))

    def view(self, table: np.ndarray) -> np.ndarray:
        return table[self.index()]

    def peel(self, i: int, side: str) -> "IntervalBox":
        """Remove the min (``side='min'``) or max value of coordinate ``i``."""
        lo, hi = list(self.lo), list(self.hi)
        if lo[i] == hi[i]:
            raise ValueError(f"coordinate {i} is a singleton in {self}; cannot peel")
        if side == "min":
            lo[i] += 1
        elif side == "max":
            hi[i] -= 1
        else:
            raise ValueError(f"side must be 'min' or 'max', got {side!r}")
        return IntervalBox(tuple(lo), tuple(hi))

    def restrict(self, i: int, lo: int, hi: int) -> "IntervalBox":
        new_lo, new_hi = list(self.lo), list(self.hi)
        new_lo[i], new_hi[i] = lo, hi
        return IntervalBox(tuple(new_lo), tuple(new_hi))

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(self.values(i) for i in range(len(self.lo))))


def _mask_values(mask: int) -> list[int]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


@dataclass(frozen=True)
class SubsetBox:
    """Product of arbitrary non-empty value sets, one bitmask per coordinate."""

    masks: tuple[int, ...]

    def __post_init__(self):
        if any(m <= 0 for m in self.masks):
            raise ValueError(f"every mask must be non-empty, got {self.masks}")

    @property
    def size(self) -> int:
        return int(np.prod([bin(m).count("1") for m in self.masks], dtype=object))

    def values(self, i: int) -> list[int]:
        return _mask_values(self.masks[i])

    def contains(self, point: Sequence[int]) -> bool:
        return all((m >> x) & 1 for x, m in zip(point, self.masks))

    def index(self) -> tuple:
        return np.ix_(*(self.values(i) for i in range(len(self.masks))))

    def view(self, table: np.ndarray) -> np.ndarray:
        return table[self.index()]

    def remove(self, i: int, a: int) -> "SubsetBox":
        m = self.masks[i]
        if not (m >> a) & 1:
            raise ValueError(f"value {a} is not in coordinate {i} of {self}")
        if m == 1 << a:
            raise ValueError(f"removing {a} would empty coordinate {i}")
        masks = list(self.masks)
        masks[i] = m & ~(1 << a)
        return SubsetBox(tuple(masks))

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(self.values(i) for i in range(len(self.masks))))


Box = Union[IntervalBox, SubsetBox]


def _as_domain(d) -> MixedRadixDomain:
    return d if isinstance(d, MixedRadixDomain) else MixedRadixDomain(tuple(d))


class MultivaluedFunction:
    """Dense truth table ``f: prod_i {0..k_i-1} -> {0..m-1}``."""

    __slots__ = ("domain", "codomain", "values", "table")

    def __init__(self, domain: MixedRadixDomain | Sequence[int], codomain: int, values: Iterable[int]):
        domain = _as_domain(domain)
        codomain = int(codomain)
        if codomain < 1:
            raise ValueError("codomain arity must be positive")
        vals = np.array(list(values) if not isinstance(values, np.ndarray) else values, dtype=np.int64).ravel()
        if vals.size != domain.size:
            raise ValueError(f"expected {domain.size} values, got {vals.size}")
        if vals.size and (vals.min() < 0 or vals.max() >= codomain):
            raise ValueError(f"values must lie in 0..{codomain - 1}")
        vals.setflags(write=False)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "codomain", codomain)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "table", vals.reshape(domain.arities))

    def __setattr__(self, name, value):
        raise AttributeError("MultivaluedFunction is immutable")

    @classmethod
    def from_callable(cls, arities: Sequence[int] | MixedRadixDomain, codomain: int,
                      fn: Callable[..., int]) -> "MultivaluedFunction":
        dom = _as_domain(arities)
        return cls(dom, codomain, [fn(*x) for x in dom.points()])

    @classmethod
    def constant(cls, arities: Sequence[int] | MixedRadixDomain, codomain: int, c: int) -> "MultivaluedFunction":
        dom = _as_domain(arities)
        return cls(dom, codomain, np.full(dom.size, c))

    @property
    def arities(self) -> tuple[int, ...]:
        return self.domain.arities

    def __call__(self, *point: int) -> int:
        if len(point) == 1 and not isinstance(point[0], (int, np.integer)):
            point = tuple(point[0])
        return int(self.values[self.domain.encode(point)])

    def __eq__(self, other):
        if not isinstance(other, MultivaluedFunction):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.codomain == other.codomain
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.domain.arities, self.codomain, self.values.tobytes()))

    def __repr__(self):
        return f"MultivaluedFunction(arities={self.arities}, codomain={self.codomain}, values={self.values.tolist()})"

    def to_dict(self) -> dict:
        return {"arities": list(self.arities), "codomain": self.codomain, "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "MultivaluedFunction":
        missing = {"arities", "codomain", "values"} - set(data)
        if missing:
            raise ValueError(f"truth table is missing fields: {sorted(missing)}")
        return cls(MixedRadixDomain(tuple(data["arities"])), data["codomain"], data["values"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "MultivaluedFunction":
        return cls.from_dict(json.loads(text))


def iterate(box: Box) -> Iterator[tuple[int, ...]]:
    """Points of ``box`` in ascending flat-index order."""
    return iter(box)


def slice_constant(f: MultivaluedFunction, box: Box, i: int, a: int):
    """Value of ``f`` on ``{x in box : x_i = a}`` if constant.

    Returns the constant, :data:`VACUOUS` for an empty slice, or ``None`` when
    the slice takes several values.
    """
    if a not in box.values(i):
        raise IndexError(f"value {a} is not in the residual range of coordinate {i}")
    sub = box.view(f.table)
    if sub.size == 0:
        return VACUOUS
    if isinstance(box, IntervalBox):
        pos = a - box.lo[i]
    else:
        pos = box.values(i).index(a)
    s = sub.take(pos, axis=i)
    if s.size == 0:
        return VACUOUS
    lo = s.min()
    return int(lo) if lo == s.max() else None


@dataclass(frozen=True)
class Network:
    """``F: Omega -> Omega``; component ``i`` takes values in ``Omega_i``."""

    domain: MixedRadixDomain
    components: tuple[MultivaluedFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) != self.domain.n:
            raise ValueError(f"network over {self.domain.n} coordinates needs {self.domain.n} components")
        for i, (f, k) in enumerate(zip(self.components, self.domain.arities)):
            if f.domain != self.domain:
                raise ValueError(f"component {i} is defined on {f.arities}, not {self.domain.arities}")
            if f.codomain != k:
                raise ValueError(f"component {i} has codomain {f.codomain}, expected {k}")

    def __call__(self, point: Sequence[int]) -> tuple[int, ...]:
        idx = self.domain.encode(point)
        return tuple(int(f.values[idx]) for f in self.components)

    @classmethod
    def identity(cls, arities: "Sequence[int] | MixedRadixDomain") -> "Network":
        dom = _as_domain(arities)
        comps = [MultivaluedFunction.from_callable(dom.arities, k, lambda *x, i=i: x[i]) for i, k in enumerate(dom.arities)]
        return cls(dom, tuple(comps))
