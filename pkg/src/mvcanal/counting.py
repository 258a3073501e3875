"""Exact upper bound on the number of softly nested canalizing functions.

A decomposition is a sequence of steps; step ``j`` is an n-vector whose entry
``i`` counts how many times variable ``i`` is canalized (to its min or max) at
that step.  Steps are non-zero and column ``i`` sums to ``k_i - 1``.  Each
decomposition is weighted by the number of ways to choose the min/max split
and the step values.

The set of decompositions (after removing zero steps and duplicates) is exactly
the set of sequences of non-zero vectors with the required column sums, and
the weight factorizes over steps, so :func:`up_snc` uses a dynamic program over
the remaining column sums instead of enumerating the set.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from decimal import ROUND_CEILING, ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .domain import ResourceLimitError

Decomposition = tuple[tuple[int, ...], ...]

DEFAULT_MAX_CANDIDATES = 2**34
DEFAULT_MAX_DECOMPOSITIONS = 10**7


def _check_arities(arities: Sequence[int], generalized: bool) -> tuple[int, ...]:
    arities = tuple(int(k) for k in arities)
    if not arities:
        raise ValueError("arities must be non-empty")
    if any(k < 1 for k in arities):
        raise ValueError(f"arities must be >= 1, got {arities}")
    if all(k == 1 for k in arities):
        raise ValueError("at least one arity must be >= 2")
    if not generalized and any(k > 3 for k in arities):
        raise ValueError(f"arity > 3 in {arities} needs generalized weights")
    return arities


def candidate_count(arities: Sequence[int]) -> int:
    """Size of the Cartesian product the reference enumeration walks through."""
    K = sum(k - 1 for k in arities)
    if K == 0:
        return 1
    return math.prod(math.comb(K + k - 2, k - 1) for k in arities)


def _sequences(rem: tuple[int, ...], max_len: int) -> Iterator[Decomposition]:
    if not any(rem):
        yield ()
        return
    if max_len == 0:
        return
    for s in itertools.product(*(range(r + 1) for r in rem)):
        if not any(s):
            continue
        rest = tuple(r - x for r, x in zip(rem, s))
        for tail in _sequences(rest, max_len - 1):
            yield (s,) + tail


def enumerate_decompositions(
    arities: Sequence[int],
    max_count: int = DEFAULT_MAX_DECOMPOSITIONS,
    generalized: bool = True,
) -> Iterator[Decomposition]:
    """Every distinct decomposition for ``arities``, each exactly once.

    The number generated is checked up front against ``max_count``.
    """
    arities = _check_arities(arities, generalized)
    count = count_decompositions(arities)
    if count > max_count:
        raise ResourceLimitError(f"{count} decompositions for {arities}, cap is {max_count}")
    rem = tuple(k - 1 for k in arities)
    return _sequences(rem, sum(rem))


def count_decompositions(arities: Sequence[int]) -> int:
    rem = tuple(int(k) - 1 for k in arities)

    @lru_cache(maxsize=None)
    def T(r):
        if not any(r):
            return 1
        total = 0
        for s in itertools.product(*(range(x + 1) for x in r)):
            if any(s):
                total += T(tuple(a - b for a, b in zip(r, s)))
        return total

    return T(rem)


def _entry_factor(m: int, generalized: bool) -> int:
    if m == 0:
        return 1
    if generalized:
        return m + 1
    if m == 1:
        return 2
    if m == 2:
        return 3
    raise ValueError(f"entry {m} > 2 needs generalized weights")


def weight(d: Decomposition, generalized: bool = False) -> int:
    """Number of (min/max split, value sequence) choices for ``d``.

    ``2^{#1} * 3^{#2} * 9 * 2^{steps-1}``; generalized mode uses ``m + 1`` per
    non-zero entry ``m``.
    """
    if not d:
        raise ValueError("a decomposition needs at least one step")
    f = 1
    for step in d:
        for m in step:
            if m < 0:
                raise ValueError(f"negative entry in {d}")
            f *= _entry_factor(m, generalized)
    return f * 9 * 2 ** (len(d) - 1)


def up_snc(arities: Sequence[int], generalized: bool = False) -> int:
    """Upper bound on the number of SNC functions ``prod Omega_i -> Z/3Z``.

    Exact sum of :func:`weight` over all decompositions, computed as
    ``9/2 * T(k - 1)`` with ``T(0) = 1`` and
    ``T(r) = sum_{0 < s <= r} 2 g(s) T(r - s)``.
    """
    arities = _check_arities(arities, generalized)
    rem = tuple(k - 1 for k in arities)

    def g(s):
        return math.prod(_entry_factor(m, generalized) for m in s)

    @lru_cache(maxsize=None)
    def T(r):
        if not any(r):
            return 1
        total = 0
        for s in itertools.product(*(range(x + 1) for x in r)):
            if any(s):
                total += 2 * g(s) * T(tuple(a - b for a, b in zip(r, s)))
        return total

    t = T(rem)
    assert (9 * t) % 2 == 0
    return 9 * t // 2


def up_snc_by_enumeration(arities: Sequence[int], generalized: bool = False,
                          max_count: int = DEFAULT_MAX_DECOMPOSITIONS, threads: int = 1) -> int:
    """Same bound as :func:`up_snc`, summed decomposition by decomposition.

    Work is split over the first step's vector; partial sums are added in a
    fixed order so the result does not depend on ``threads``.
    """
    arities = _check_arities(arities, generalized)
    count = count_decompositions(arities)
    if count > max_count:
        raise ResourceLimitError(f"{count} decompositions for {arities}, cap is {max_count}")
    rem = tuple(k - 1 for k in arities)
    firsts = [s for s in itertools.product(*(range(r + 1) for r in rem)) if any(s)]

    def part(s):
        rest = tuple(r - x for r, x in zip(rem, s))
        return sum(weight((s,) + tail, generalized) for tail in _sequences(rest, sum(rest)))

    if threads <= 1:
        parts = [part(s) for s in firsts]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(part, firsts))
    return sum(parts)


def nbvars_arities(n: int) -> list[tuple[tuple[int, ...], int]]:
    """``([2]*(n-i) + [3]*i, C(n, i))`` for ``i = 0..n``."""
    return [(tuple([2] * (n - i) + [3] * i), math.comb(n, i)) for i in range(n + 1)]


def total_functions_by_nbvars(n: int) -> int:
    """Number of ternary-output functions over all mixed {2,3}-arity domains with n inputs."""
    return sum(3 ** (2**i * 3 ** (n - i)) * math.comb(n, i) for i in range(n + 1))


def up_prop_snc_by_nbvars(n: int) -> Fraction:
    """Exact upper bound on the proportion of SNC functions with ``n`` inputs.

    The value is a bound, so it can exceed 1 for small ``n``; see
    :func:`presentation`.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    snc = sum(up_snc(ar) * c for ar, c in nbvars_arities(n))
    return Fraction(snc, total_functions_by_nbvars(n))


def presentation(ratio: Fraction) -> Fraction:
    """The ratio clamped to at most 1."""
    return min(ratio, Fraction(1))


def to_decimal(ratio: Fraction, digits: int = 30, upward: bool = False) -> Decimal:
    """``ratio`` correctly rounded to ``digits`` significant digits."""
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_CEILING if upward else ROUND_HALF_EVEN
        return Decimal(ratio.numerator) / Decimal(ratio.denominator)


def format_scientific(ratio: Fraction, sig: int = 2, upward: bool = False) -> str:
    """``ratio`` to ``sig`` significant figures, e.g. ``8.5e-7``.

    ``upward=True`` rounds towards +infinity, which keeps an upper bound an
    upper bound after rounding.
    """
    if ratio == 0:
        return "0"
    d = to_decimal(ratio, sig, upward)
    mant, exp = f"{d:.{sig - 1}e}".split("e")
    return f"{mant}e{int(exp)}"


def format_fixed(ratio: Fraction, places: int = 2, upward: bool = False) -> str:
    scaled = ratio * 10**places
    q = math.ceil(scaled) if upward else round(scaled)
    return f"{Decimal(q).scaleb(-places):.{places}f}"
