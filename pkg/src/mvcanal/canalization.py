"""Decision procedures for canalization of multivalued functions.

Every checker returns a witness (or ``None``) rather than a bare flag, and
every witness can be replayed back into a truth table.  Searches try
coordinates in ascending order and the min side before the max side, so the
witness returned for a given table is deterministic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .domain import (
    IntervalBox,
    MixedRadixDomain,
    MultivaluedFunction,
    ResourceLimitError,
    SubsetBox,
)

DEFAULT_NC_MAX_STATES = 10**7
DEFAULT_WNC_MAX_EXCESS = 16


class WitnessError(ValueError):
    """A witness is malformed or does not describe the function."""


def _const(a: np.ndarray):
    if a.size == 0:
        return None
    lo = a.min()
    return int(lo) if lo == a.max() else None


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class SncStep:
    coord: int
    value: int
    side: str  # "min" | "max"
    output: int


@dataclass(frozen=True)
class SncWitness:
    """Peeling sequence ``(v(i), a_i, side, b_i)`` plus the value of the last point.

    After all ``K`` steps a single point remains; ``final`` is the value of the
    function there (the peels themselves do not constrain it).
    """

    steps: tuple[SncStep, ...]
    final: int

    def residuals(self, domain: MixedRadixDomain):
        """Yield ``(box_before_step, step)`` while checking the peel rules."""
        box = domain.full_box()
        for step in self.steps:
            lo, hi = box.lo[step.coord], box.hi[step.coord]
            if lo == hi:
                raise WitnessError(f"step {step} peels a singleton coordinate")
            expected = lo if step.side == "min" else hi
            if step.side not in ("min", "max") or step.value != expected:
                raise WitnessError(f"step {step} is not the {step.side} of {lo}..{hi}")
            yield box, step
            box = box.peel(step.coord, step.side)

    def replay(self, domain: MixedRadixDomain, codomain: int) -> MultivaluedFunction:
        table = np.full(domain.arities, -1, dtype=np.int64)
        box = domain.full_box()
        for box, step in self.residuals(domain):
            region = list(box.index())
            region[step.coord] = step.value
            table[tuple(region)] = step.output
        if len(self.steps) != domain.excess:
            raise WitnessError(f"witness has {len(self.steps)} steps, domain needs {domain.excess}")
        table[table < 0] = self.final
        return MultivaluedFunction(domain, codomain, table.ravel())

    def verify(self, f: MultivaluedFunction) -> bool:
        try:
            return self.replay(f.domain, f.codomain) == f
        except (WitnessError, ValueError):
            return False


@dataclass(frozen=True)
class NcWitness:
    """``sigma``, segments ``A_1..A_n`` (inclusive ranges) and outputs ``c_1..c_{n+1}``."""

    order: tuple[int, ...]
    segments: tuple[tuple[int, int], ...]
    outputs: tuple[int, ...]

    def validate(self, domain: MixedRadixDomain) -> None:
        n = domain.n
        if sorted(self.order) != list(range(n)):
            raise WitnessError(f"order {self.order} is not a permutation of 0..{n - 1}")
        if len(self.segments) != n or len(self.outputs) != n + 1:
            raise WitnessError("need n segments and n+1 outputs")
        for coord, (lo, hi) in zip(self.order, self.segments):
            k = domain.arities[coord]
            if not 0 <= lo <= hi <= k - 1:
                raise WitnessError(f"segment {lo}..{hi} outside coordinate {coord}")
            if lo != 0 and hi != k - 1:
                raise WitnessError(f"segment {lo}..{hi} is neither a prefix nor a suffix")
            if lo == 0 and hi == k - 1:
                raise WitnessError(f"segment {lo}..{hi} is the whole range of coordinate {coord}")
        if self.outputs[-1] == self.outputs[-2]:
            raise WitnessError("the last two outputs must differ")

    def evaluate(self, point: Sequence[int]) -> int:
        for coord, (lo, hi), c in zip(self.order, self.segments, self.outputs):
            if lo <= point[coord] <= hi:
                return c
        return self.outputs[-1]

    def replay(self, domain: MixedRadixDomain, codomain: int) -> MultivaluedFunction:
        self.validate(domain)
        return MultivaluedFunction(domain, codomain, [self.evaluate(x) for x in domain.points()])

    def verify(self, f: MultivaluedFunction) -> bool:
        try:
            return self.replay(f.domain, f.codomain) == f
        except (WitnessError, ValueError):
            return False


@dataclass(frozen=True)
class WncStep:
    coord: int
    value: int
    output: int


@dataclass(frozen=True)
class WncWitness:
    steps: tuple[WncStep, ...]
    final: int

    def replay(self, domain: MixedRadixDomain, codomain: int) -> MultivaluedFunction:
        table = np.full(domain.arities, -1, dtype=np.int64)
        box = domain.full_subset_box()
        for step in self.steps:
            values = box.values(step.coord)
            if len(values) < 2 or step.value not in values:
                raise WitnessError(f"step {step} cannot be applied to {box}")
            region = [box.values(i) for i in range(domain.n)]
            region[step.coord] = [step.value]
            table[np.ix_(*region)] = step.output
            box = box.remove(step.coord, step.value)
        if len(self.steps) != domain.excess:
            raise WitnessError(f"witness has {len(self.steps)} steps, domain needs {domain.excess}")
        table[table < 0] = self.final
        return MultivaluedFunction(domain, codomain, table.ravel())

    def verify(self, f: MultivaluedFunction) -> bool:
        try:
            return self.replay(f.domain, f.codomain) == f
        except (WitnessError, ValueError):
            return False


# ---------------------------------------------------------------------------
# single-step canalization


def is_canalizing(f: MultivaluedFunction) -> Optional[tuple[int, int, int]]:
    """First ``(i, a, b)`` with ``f = b`` on ``x_i = a`` and ``f != b`` somewhere off it."""
    table = f.table
    for i, k in enumerate(f.arities):
        for a in range(k):
            b = _const(table.take(a, axis=i))
            if b is None:
                continue
            rest = np.delete(table, a, axis=i)
            if rest.size and (rest != b).any():
                return i, a, b
    return None


def is_softly_canalizing(f: MultivaluedFunction, extreme_only: bool = False) -> Optional[tuple[int, int, int]]:
    """First ``(i, a, b)`` with ``f = b`` whenever ``x_i = a``.

    With ``extreme_only`` only ``a = 0`` and ``a = k_i - 1`` are tried.
    """
    table = f.table
    for i, k in enumerate(f.arities):
        candidates = sorted({0, k - 1}) if extreme_only else range(k)
        for a in candidates:
            b = _const(table.take(a, axis=i))
            if b is not None:
                return i, a, b
    return None


# ---------------------------------------------------------------------------
# SNC


def _fill_constant_snc(box: IntervalBox, value: int) -> list[SncStep]:
    steps = []
    for i in range(len(box.lo)):
        for a in range(box.lo[i], box.hi[i]):
            steps.append(SncStep(i, a, "min", value))
    return steps


def is_snc(f: MultivaluedFunction) -> Optional[SncWitness]:
    """Softly nested canalizing check by backtracking over extreme peels.

    Boxes already known to be unpeelable are memoized for the call.
    """
    table = f.table
    n = f.domain.n
    failed: set[tuple] = set()

    def search(box: IntervalBox):
        sub = box.view(table)
        c = _const(sub)
        if c is not None:
            return _fill_constant_snc(box, c), c
        key = box.lo + box.hi
        if key in failed:
            return None
        for i in range(n):
            lo, hi = box.lo[i], box.hi[i]
            if lo == hi:
                continue
            for side, a in (("min", lo), ("max", hi)):
                b = _const(sub.take(a - lo, axis=i))
                if b is None:
                    continue
                found = search(box.peel(i, side))
                if found is not None:
                    steps, final = found
                    return [SncStep(i, a, side, b)] + steps, final
        failed.add(key)
        return None

    found = search(f.domain.full_box())
    if found is None:
        return None
    steps, final = found
    return SncWitness(tuple(steps), final)


# ---------------------------------------------------------------------------
# NC


def _segments(k: int) -> list[tuple[int, int]]:
    """Strict non-empty prefixes, then suffixes, of ``0..k-1``."""
    return [(0, t) for t in range(k - 1)] + [(t, k - 1) for t in range(k - 1, 0, -1)]


def _complement(seg: tuple[int, int], k: int) -> tuple[int, int]:
    lo, hi = seg
    return (hi + 1, k - 1) if lo == 0 else (0, lo - 1)


def is_nc(f: MultivaluedFunction, max_states: int = DEFAULT_NC_MAX_STATES) -> Optional[NcWitness]:
    """Nested canalizing check (each coordinate used once, ``c_n != c_{n+1}``)."""
    arities = f.arities
    if any(k < 2 for k in arities):
        raise ValueError(f"NC needs every arity >= 2; got {arities}")
    states = math.prod(2 * k - 1 for k in arities)
    if states > max_states:
        raise ResourceLimitError(f"NC search over {arities} has {states} states, cap is {max_states}")
    table = f.table
    n = len(arities)
    failed: set[tuple] = set()

    def search(box: IntervalBox, used: frozenset):
        key = box.lo + box.hi
        if key in failed:
            return None
        sub = box.view(table)
        for i in range(n):
            if i in used:
                continue
            k = arities[i]
            for seg in _segments(k):
                c = _const(sub[(slice(None),) * i + (slice(seg[0], seg[1] + 1),)])
                if c is None:
                    continue
                rest = box.restrict(i, *_complement(seg, k))
                if len(used) + 1 == n:
                    d = _const(rest.view(table))
                    if d is not None and d != c:
                        return [(i, seg, c)], d
                    continue
                found = search(rest, used | {i})
                if found is not None:
                    chain, last = found
                    return [(i, seg, c)] + chain, last
        failed.add(key)
        return None

    found = search(f.domain.full_box(), frozenset())
    if found is None:
        return None
    chain, last = found
    return NcWitness(
        order=tuple(i for i, _, _ in chain),
        segments=tuple(seg for _, seg, _ in chain),
        outputs=tuple(c for _, _, c in chain) + (last,),
    )


# ---------------------------------------------------------------------------
# WNC


def is_wnc(f: MultivaluedFunction, max_excess: int = DEFAULT_WNC_MAX_EXCESS) -> Optional[WncWitness]:
    """Weakly nested canalizing check: like SNC but any residual value may be peeled."""
    if f.domain.excess > max_excess:
        raise ResourceLimitError(f"WNC search needs K <= {max_excess}, domain has K = {f.domain.excess}")
    table = f.table
    n = f.domain.n
    failed: set[tuple] = set()

    def fill(box: SubsetBox, value: int):
        steps = []
        for i in range(n):
            for a in box.values(i)[:-1]:
                steps.append(WncStep(i, a, value))
        return steps, value

    def search(box: SubsetBox):
        sub = box.view(table)
        c = _const(sub)
        if c is not None:
            return fill(box, c)
        if box.masks in failed:
            return None
        for i in range(n):
            values = box.values(i)
            if len(values) < 2:
                continue
            for pos, a in enumerate(values):
                b = _const(sub.take(pos, axis=i))
                if b is None:
                    continue
                found = search(box.remove(i, a))
                if found is not None:
                    steps, final = found
                    return [WncStep(i, a, b)] + steps, final
        failed.add(box.masks)
        return None

    found = search(f.domain.full_subset_box())
    if found is None:
        return None
    steps, final = found
    return WncWitness(tuple(steps), final)


# ---------------------------------------------------------------------------
# constructions


def snc_witness_from_nc(w: NcWitness, domain: MixedRadixDomain) -> SncWitness:
    """Turn an NC witness into a peeling sequence.

    Each segment is peeled from its extreme end inward with output ``c_i`` (in
    the order of ``w.order``); then the complements are peeled, again in that
    order and from their own extreme end inward, with output ``c_{n+1}``.
    """
    w.validate(domain)
    last = w.outputs[-1]
    head, tail = [], []
    for coord, (lo, hi), c in zip(w.order, w.segments, w.outputs):
        k = domain.arities[coord]
        if lo == 0:
            head += [SncStep(coord, a, "min", c) for a in range(0, hi + 1)]
            tail += [SncStep(coord, a, "max", last) for a in range(k - 1, hi + 1, -1)]
        else:
            head += [SncStep(coord, a, "max", c) for a in range(k - 1, lo - 1, -1)]
            tail += [SncStep(coord, a, "min", last) for a in range(0, lo - 1)]
    return SncWitness(tuple(head + tail), last)


def _as_rng(rng) -> random.Random:
    if isinstance(rng, random.Random):
        return rng
    return random.Random(rng)


def generate_snc(domain: MixedRadixDomain | Sequence[int], codomain: int, rng=None) -> tuple[MultivaluedFunction, SncWitness]:
    """Random SNC function: peel random extreme slices with random outputs."""
    if not isinstance(domain, MixedRadixDomain):
        domain = MixedRadixDomain(tuple(domain))
    rng = _as_rng(rng)
    box = domain.full_box()
    steps = []
    while True:
        open_coords = [i for i in range(domain.n) if box.lo[i] < box.hi[i]]
        if not open_coords:
            break
        i = rng.choice(open_coords)
        side = rng.choice(("min", "max"))
        a = box.lo[i] if side == "min" else box.hi[i]
        steps.append(SncStep(i, a, side, rng.randrange(codomain)))
        box = box.peel(i, side)
    w = SncWitness(tuple(steps), rng.randrange(codomain))
    return w.replay(domain, codomain), w


def generate_nc(domain: MixedRadixDomain | Sequence[int], codomain: int = 3, rng=None) -> tuple[MultivaluedFunction, NcWitness]:
    """Random NC function from a random ``(sigma, A, c)`` with ``c_n != c_{n+1}``."""
    if not isinstance(domain, MixedRadixDomain):
        domain = MixedRadixDomain(tuple(domain))
    if any(k < 2 for k in domain.arities):
        raise ValueError(f"NC needs every arity >= 2; got {domain.arities}")
    if codomain < 2:
        raise ValueError("NC needs at least two output values")
    rng = _as_rng(rng)
    order = list(range(domain.n))
    rng.shuffle(order)
    segments = tuple(rng.choice(_segments(domain.arities[i])) for i in order)
    outputs = [rng.randrange(codomain) for _ in range(domain.n)]
    outputs.append(rng.choice([c for c in range(codomain) if c != outputs[-1]]))
    w = NcWitness(tuple(order), segments, tuple(outputs))
    return w.replay(domain, codomain), w
