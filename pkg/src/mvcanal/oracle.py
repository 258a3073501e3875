"""Brute-force reference implementations, written straight from the definitions.

Nothing here shares code with the fast checkers: functions are turned into
plain ``{point: value}`` dictionaries and every search is naive recursion.
The module also carries a literal port of the reference program for the SNC
upper bound.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Iterator, Sequence

import numpy as np

from .domain import ResourceLimitError

ORACLE_NC_BUDGET = 10**7
ORACLE_MAX_DOMAIN = 512
REFERENCE_MAX_CANDIDATES = 10**6


def _as_dict(f) -> tuple[tuple[int, ...], dict]:
    arities = tuple(f.domain.arities)
    points = itertools.product(*(range(k) for k in arities))
    return arities, {p: int(v) for p, v in zip(points, f.values.tolist())}


# ---------------------------------------------------------------------------
# NC


def _strict_segments(k: int) -> list[frozenset]:
    segs = [frozenset(range(0, t + 1)) for t in range(k - 1)]
    segs += [frozenset(range(t, k)) for t in range(1, k)]
    return segs


def oracle_nc(f, budget: int = ORACLE_NC_BUDGET) -> bool:
    """Try every order, every strict prefix/suffix per coordinate, and read off outputs."""
    arities, table = _as_dict(f)
    if f.codomain < 2:
        return False  # c_n != c_{n+1} is impossible
    n = len(arities)
    seg_lists = [_strict_segments(k) for k in arities]
    size = math.factorial(n) * math.prod(len(s) for s in seg_lists)
    if size > budget:
        raise ResourceLimitError(f"{size} (order, segment) combinations, budget is {budget}")
    for sigma in itertools.permutations(range(n)):
        for segs in itertools.product(*(seg_lists[i] for i in sigma)):
            regions: list[set] = [set() for _ in range(n + 1)]
            for x, v in table.items():
                r = n
                for step, i in enumerate(sigma):
                    if x[i] in segs[step]:
                        r = step
                        break
                regions[r].add(v)
            if any(len(vals) > 1 for vals in regions):
                continue
            last, before = regions[n], regions[n - 1]
            if last and before and last == before:
                continue
            return True
    return False


# ---------------------------------------------------------------------------
# SNC / WNC


def _check_domain(arities, max_domain):
    size = math.prod(arities)
    if size > max_domain:
        raise ResourceLimitError(f"domain of {size} points exceeds oracle budget {max_domain}")


def _peelable(points: list, table: dict, extreme_only: bool) -> bool:
    if len(points) == 1:
        return True
    n = len(points[0])
    for i in range(n):
        vals = sorted({x[i] for x in points})
        if len(vals) < 2:
            continue
        candidates = (vals[0], vals[-1]) if extreme_only else vals
        for a in candidates:
            outs = {table[x] for x in points if x[i] == a}
            if len(outs) != 1:
                continue
            rest = [x for x in points if x[i] != a]
            if _peelable(rest, table, extreme_only):
                return True
    return False


def oracle_snc(f, max_domain: int = ORACLE_MAX_DOMAIN) -> bool:
    """Inductive definition: peel a min or max hyperplane with a constant value."""
    arities, table = _as_dict(f)
    _check_domain(arities, max_domain)
    return _peelable(sorted(table), table, extreme_only=True)


def oracle_wnc(f, max_domain: int = ORACLE_MAX_DOMAIN) -> bool:
    """Same as :func:`oracle_snc` but any residual value may be peeled."""
    arities, table = _as_dict(f)
    _check_domain(arities, max_domain)
    return _peelable(sorted(table), table, extreme_only=False)


# ---------------------------------------------------------------------------
# literal port of the reference upper-bound program


def _sums(length, totalsum):
    # all lists of given length whose sum equals totalsum
    if length == 1:
        yield (totalsum,)
    else:
        for v in range(totalsum + 1):
            for p in _sums(length - 1, totalsum - v):
                yield (v,) + p


def _removezeroes(lst, n):
    return [x for x in lst if x != [0] * n]


def reference_decompositions(arities: Sequence[int], max_candidates: int = REFERENCE_MAX_CANDIDATES) -> set:
    n = len(arities)
    totalsums = [arities[i] - 1 for i in range(n)]
    length = sum(totalsums)
    l = [list(_sums(length, totalsums[i])) for i in range(n)]
    candidates = math.prod(len(c) for c in l)
    if candidates > max_candidates:
        raise ResourceLimitError(f"{candidates} candidate products, cap is {max_candidates}")
    s = set()
    for pr in itertools.product(*l):
        step = _removezeroes(np.array(pr).T.tolist(), n)
        s.add(tuple(tuple(i) for i in step))
    return s


def reference_up_snc(arities: Sequence[int], max_candidates: int = REFERENCE_MAX_CANDIDATES) -> int:
    s = reference_decompositions(arities, max_candidates)
    ones = [2 ** sum([e.count(1) for e in x]) for x in s]
    twos = [3 ** sum([e.count(2) for e in x]) for x in s]
    values = [9 * 2 ** (len(x) - 1) for x in s]
    return sum([a * b * c for a, b, c in zip(ones, twos, values)])


def reference_up_prop_snc_by_nbvars(n: int, max_candidates: int = REFERENCE_MAX_CANDIDATES) -> float:
    """Float result, as the reference program computes it."""
    snc = 0
    for i in range(n + 1):
        snc += reference_up_snc([2] * (n - i) + [3] * i, max_candidates) * math.comb(n, i)
    tot = 0
    for i in range(n + 1):
        tot += 3 ** (2**i * 3 ** (n - i)) * math.comb(n, i)
    return snc / tot


# ---------------------------------------------------------------------------
# agreement sweeps


def all_functions(arities: Sequence[int], codomain: int) -> Iterator[np.ndarray]:
    """Every value vector of length ``prod(arities)``, in lexicographic order."""
    size = math.prod(arities)
    for vals in itertools.product(range(codomain), repeat=size):
        yield np.array(vals, dtype=np.int64)


def _sweep_chunk(args):
    from .canalization import is_nc, is_snc, is_wnc
    from .domain import MultivaluedFunction

    arities, codomain, start, stop, props = args
    size = math.prod(arities)
    out = []
    for code in range(start, stop):
        vals, c = [], code
        for _ in range(size):
            c, r = divmod(c, codomain)
            vals.append(r)
        f = MultivaluedFunction(arities, codomain, vals[::-1])
        for prop in props:
            if prop == "nc":
                fast, slow = is_nc(f) is not None, oracle_nc(f)
            elif prop == "snc":
                fast, slow = is_snc(f) is not None, oracle_snc(f)
            else:
                fast, slow = is_wnc(f) is not None, oracle_wnc(f)
            if fast != slow:
                out.append((code, prop, fast, slow))
    return out


def sweep(arities: Sequence[int], codomain: int, props: Sequence[str] = ("nc", "snc", "wnc"),
          max_domain: int = ORACLE_MAX_DOMAIN, workers: int = 1, chunk: int = 2048) -> dict:
    """Compare fast checkers with the oracles on every function over ``arities``.

    Returns counts and the list of disagreements ``(code, prop, fast, oracle)``
    where ``code`` is the base-``codomain`` number of the value vector.
    """
    arities = tuple(arities)
    _check_domain(arities, max_domain)
    props = tuple(props)
    if any(k < 2 for k in arities) and "nc" in props:
        raise ValueError("NC needs every arity >= 2")
    total = codomain ** math.prod(arities)
    jobs = [(arities, codomain, s, min(s + chunk, total), props) for s in range(0, total, chunk)]
    if workers <= 1:
        parts = [_sweep_chunk(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_sweep_chunk, jobs))
    bad = [d for p in parts for d in p]
    return {"arities": list(arities), "codomain": codomain, "functions": total,
            "props": list(props), "disagreements": bad}
