"""The 48-gene census: classification of published multivalued rules.

Fixture models ship with the package (``mvcanal/fixtures/*.mvr``).  Each
ruled gene with at least three levels is compiled, checked for NC, SNC, WNC
and for nested canalization of its Booleanization, and sorted into one of four
situations:

* ``a``: NC
* ``b``: SNC but not NC
* ``c``: not WNC, Booleanization NC
* ``d``: not WNC, Booleanization not NC

A record that is WNC but not SNC fits none of them and is reported as an
anomaly.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .booleanize import booleanize_function, is_nc_partial
from .canalization import is_nc, is_snc, is_wnc
from .domain import MultivaluedFunction, ResourceLimitError
from .ruledsl import RuleSyntaxError, compile_gene, detect_structure_s, parse_file

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_INPUT = 3

SITUATIONS = ("a", "b", "c", "d")
ANOMALY = "anomaly"
CSV_COLUMNS = ("gene", "model", "n", "nc", "snc", "wnc", "bool_nc", "situation", "structure_s")

# Published classification: (model, gene) -> (situation, structure S marked).
# Rows are listed in the published table order.
_EXPECTED_ROWS = {
    "a": [
        ("Mbo13", "E_Spl", False), ("San19", "mQH2_Q", True), ("San19", "mdH", True),
        ("San19", "mGR", False), ("San19", "mGSH_GSSG", True), ("San19", "mTRX", True),
        ("San19", "cGSH_GSSG", True), ("San19", "cGR", False), ("Rem15", "E2F3", True),
        ("Nal10", "IL12RB1", True), ("Nal10", "IL4RA", True), ("Rem15", "ATM", True),
        ("Rem15", "CHEK", True),
    ],
    "b": [
        ("Mbo13", "Drk", True), ("Mbo13", "Dsor1", True), ("Mbo13", "Pnt", True),
        ("Mbo13", "Stat92E", True), ("Mbo13", "Raf", True), ("Mbo13", "RI", True),
        ("Mbo13", "Sos", True), ("Mbo13", "Tkv", False), ("San19", "mNNT", False),
        ("San19", "mCa", True), ("San19", "mGPX", True), ("San19", "mTR", False),
        ("San19", "cGPX", True), ("San19", "cTR", False), ("San19", "cTRX", True),
        ("Nal10", "STAT5", False), ("Mbo13", "Twi", True),
    ],
    "c": [
        ("Mbo13", "Ras", False), ("Mbo13", "MadMed", False), ("Mbo13", "Hop", False),
        ("San19", "mNADPH_NADP", False), ("San19", "mNADH_NAD", True), ("San19", "cCa", False),
        ("San19", "KrebsCycle", True), ("Sil20", "VIM", False), ("Sil20", "CDH1", False),
        ("Sil20", "EMT", False), ("Nal10", "IL2R", True), ("Nal10", "IL4R", True),
    ],
    "d": [
        ("San19", "mROS", False), ("Mbo13", "Der", False), ("San19", "cROS", False),
        ("San19", "cNADPH_NADP", False), ("Rem15", "E2F1", False), ("Col17", "Spi1", False),
    ],
}


@dataclass(frozen=True)
class Expected:
    model: str
    gene: str
    situation: str
    structure_s: bool
    order: int


EXPECTED: dict[tuple[str, str], Expected] = {}
for _sit in SITUATIONS:
    for _model, _gene, _s in _EXPECTED_ROWS[_sit]:
        EXPECTED[(_model, _gene)] = Expected(_model, _gene, _sit, _s, len(EXPECTED))

# Published per-arity SNC proportions of the data set: n -> (SNC, total).
EXPECTED_SNC_BY_N = {1: (7, 7), 2: (16, 20), 3: (3, 6), 4: (1, 5), 5: (0, 2), 6: (2, 5), 7: (0, 1), 8: (1, 1), 9: (0, 1)}
EXPECTED_TOTALS = {"a": 13, "b": 17, "c": 12, "d": 6}


def situation_of(nc: bool, snc: bool, wnc: bool, bool_nc: bool) -> str:
    if nc:
        return "a"
    if snc:
        return "b"
    if wnc:
        return ANOMALY
    return "c" if bool_nc else "d"


@dataclass(frozen=True)
class GeneRecord:
    gene: str
    model: str
    regulators: tuple[str, ...]
    function: MultivaluedFunction = field(repr=False, compare=False)
    nc: bool
    snc: bool
    wnc: bool
    bool_nc: bool
    bool_nc_components: tuple[bool, ...]
    situation: str
    structure_s: bool

    @property
    def n(self) -> int:
        return len(self.regulators)

    @property
    def expected(self) -> Optional[Expected]:
        return EXPECTED.get((self.model, self.gene))

    def row(self) -> dict:
        yn = {True: "Yes", False: "No"}
        return {
            "gene": self.gene, "model": self.model, "n": self.n,
            "nc": yn[self.nc], "snc": yn[self.snc], "wnc": yn[self.wnc], "bool_nc": yn[self.bool_nc],
            "situation": self.situation, "structure_s": "S" if self.structure_s else "",
        }


def classify(f: MultivaluedFunction, gene: str = "", model: str = "", regulators: Sequence[str] = ()) -> GeneRecord:
    """Run every checker on ``f`` and assign its situation."""
    try:
        nc = all(k >= 2 for k in f.arities) and is_nc(f) is not None
        snc = is_snc(f) is not None
        wnc = is_wnc(f) is not None
        comps = tuple(is_nc_partial(g) is not None for g in booleanize_function(f).values())
    except ResourceLimitError as e:
        raise ResourceLimitError(f"{model}/{gene}: {e}") from e
    bool_nc = all(comps)
    s = f.codomain == 3 and detect_structure_s(f) is not None
    regs = tuple(regulators) or tuple(f"x{i + 1}" for i in range(f.domain.n))
    return GeneRecord(gene, model, regs, f, nc, snc, wnc, bool_nc, comps,
                      situation_of(nc, snc, wnc, bool_nc), s)


# ---------------------------------------------------------------------------
# census


@dataclass
class Census:
    records: list[GeneRecord]
    skipped: list[tuple[str, str]]  # (path, reason)

    @property
    def buckets(self) -> dict[int, tuple[int, int]]:
        out: dict[int, list[int]] = {}
        for r in self.records:
            b = out.setdefault(r.n, [0, 0])
            b[0] += r.snc
            b[1] += 1
        return {n: tuple(v) for n, v in sorted(out.items())}

    @property
    def totals(self) -> dict[str, int]:
        out = {s: 0 for s in SITUATIONS}
        for r in self.records:
            if r.situation in out:
                out[r.situation] += 1
        return out

    @property
    def anomalies(self) -> list[GeneRecord]:
        return [r for r in self.records if r.situation == ANOMALY]

    def mismatches(self) -> list[tuple[GeneRecord, Expected]]:
        """Records whose situation differs from the published one."""
        return [(r, r.expected) for r in self.records if r.expected and r.expected.situation != r.situation]

    def structure_mismatches(self) -> list[tuple[GeneRecord, Expected]]:
        """Informational only: the published structure column is not a formal criterion."""
        return [(r, r.expected) for r in self.records if r.expected and r.expected.structure_s != r.structure_s]

    def missing_expected(self) -> list[Expected]:
        """Published genes of the analyzed models that produced no record (informational)."""
        seen = {(r.model, r.gene) for r in self.records}
        models = {r.model for r in self.records}
        return [e for k, e in EXPECTED.items() if e.model in models and k not in seen]

    def exit_code(self) -> int:
        if self.skipped or not self.records:
            return EXIT_INPUT
        if self.mismatches() or self.anomalies:
            return EXIT_MISMATCH
        return EXIT_OK


def fixture_paths() -> list[Path]:
    root = resources.files("mvcanal") / "fixtures"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".mvr"))


def _sort_key(r: GeneRecord):
    e = r.expected
    return (0, e.order, "") if e else (1, r.model, r.gene)


def run_census(paths: Optional[Iterable] = None, priority: str = "highest", threads: int = 1) -> Census:
    """Classify every multivalued ruled gene of every model file.

    Unreadable or malformed files are listed in ``skipped``.  Records come out
    in the published table order, then by model and gene name.
    """
    paths = fixture_paths() if paths is None else list(paths)
    jobs, skipped = [], []
    for p in paths:
        try:
            model = parse_file(p)
        except (OSError, RuleSyntaxError, UnicodeDecodeError) as e:
            skipped.append((str(p), str(e)))
            continue
        for g in model.ruled_genes():
            if g.arity < 3:
                continue
            try:
                f, regs = compile_gene(model, g.name, priority=priority)
            except ValueError as e:
                skipped.append((str(p), str(e)))
                continue
            jobs.append((f, g.name, model.name, tuple(regs)))

    def work(job):
        f, gene, mname, regs = job
        return classify(f, gene, mname, regs)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            records = list(ex.map(work, jobs))
    else:
        records = [work(j) for j in jobs]
    records.sort(key=_sort_key)
    return Census(records, skipped)


# ---------------------------------------------------------------------------
# reports


def to_csv(census: Census) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in census.records:
        w.writerow(r.row())
    return buf.getvalue()


def to_json(census: Census) -> str:
    data = {
        "records": [r.row() for r in census.records],
        "snc_by_n": {str(n): {"snc": s, "total": t} for n, (s, t) in census.buckets.items()},
        "totals": census.totals,
        "anomalies": [r.gene for r in census.anomalies],
        "mismatches": [
            {"gene": r.gene, "model": r.model, "computed": r.situation, "expected": e.situation}
            for r, e in census.mismatches()
        ],
        "structure_notes": [
            {"gene": r.gene, "model": r.model, "computed": r.structure_s, "published": e.structure_s}
            for r, e in census.structure_mismatches()
        ],
        "skipped": [{"path": p, "reason": why} for p, why in census.skipped],
    }
    return json.dumps(data, indent=2) + "\n"


def to_markdown(census: Census) -> str:
    yn = {True: "Yes", False: "No"}
    lines = []
    groups = [(s, f"Situation ({s})") for s in SITUATIONS] + [(ANOMALY, "WNC but not SNC")]
    for sit, title in groups:
        rows = [r for r in census.records if r.situation == sit]
        if not rows:
            continue
        lines += [f"### {title}", "", "| Gene | Model | n | NC | SNC | WNC | Bool. NC | Struct. |",
                  "|---|---|---|---|---|---|---|---|"]
        for r in rows:
            lines.append(f"| {r.gene} | {r.model} | {r.n} | {yn[r.nc]} | {yn[r.snc]} | {yn[r.wnc]} | "
                         f"{yn[r.bool_nc]} | {'(S)' if r.structure_s else ''} |")
        lines.append("")
    lines += ["### SNC proportion by number of regulators", "", "| n | SNC / total |", "|---|---|"]
    for n, (s, t) in census.buckets.items():
        lines.append(f"| {n} | {s}/{t} |")
    lines.append("")
    t = census.totals
    lines.append("Totals: " + ", ".join(f"{s}={t[s]}" for s in SITUATIONS))
    mm = census.mismatches()
    if mm:
        lines += ["", "Mismatches against the published classification:", ""]
        lines += [f"- {r.model}/{r.gene}: computed {r.situation}, published {e.situation}" for r, e in mm]
    sm = census.structure_mismatches()
    if sm:
        lines += ["", "Structure (S) notes (formal criterion vs published mark):", ""]
        lines += [f"- {r.model}/{r.gene}: {'S' if r.structure_s else 'no S'} here, "
                  f"{'marked' if e.structure_s else 'unmarked'} in the published table" for r, e in sm]
    if census.skipped:
        lines += ["", "Skipped:", ""] + [f"- {p}: {why}" for p, why in census.skipped]
    return "\n".join(lines) + "\n"


def render(census: Census, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(census)
    if fmt == "md":
        return to_markdown(census)
    if fmt == "json":
        return to_json(census)
    raise ValueError(f"unknown format {fmt!r}")
