"""Exhaustive, resumable search for solutions of the power equation.

Work is chunked into (k, n) blocks; each block scans the exponent range and
the m-window derived from the index inequality, tests exact equality, and
emits certified records.  Blocks are independent, so they can run in a
process pool; the journal of finished blocks makes interrupted runs
resumable, and the merged output is deterministically sorted.
"""

from __future__ import annotations

import functools
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import DomainError, ResourceLimitError
from .linforms import m_range
from .seq import EquationInstance, KIndex, lhs, lucas, lucas_window

_FILTER_PERIOD_CAP = 200_000


@dataclass(frozen=True)
class SearchConfig:
    """Inclusive ranges and pruning switches for one search sweep."""

    k_range: tuple[int, int]
    n_range: tuple[int, int]
    x_range: tuple[int, int]
    m_range_explicit: tuple[int, int] | None = None
    batch_size: int = 16
    use_modular_filter: bool = False
    use_parity_filter: bool = False
    filter_moduli: tuple[int, ...] = (5,)
    clamp_n_le_k: bool = False
    clamp_n_gt_k: bool = False
    time_limit_s: float | None = None

    def __post_init__(self):
        for name in ("k_range", "n_range", "x_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise DomainError(f"{name} is empty: {lo}..{hi}")
        if self.k_range[0] < 2:
            raise DomainError("k range must start at 2 or above")
        if self.n_range[0] < 0 or self.x_range[0] < 0:
            raise DomainError("n and x ranges must be nonnegative")
        if self.batch_size < 1:
            raise DomainError("batch_size must be >= 1")


@dataclass(frozen=True)
class SolutionRecord:
    """A verified tuple (k, n, m, x) with its recomputation certificate."""

    k: int
    n: int
    m: int
    x: int
    lhs_value: int
    certificate: str

    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.k, self.n, self.x, self.m)

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "m": self.m,
            "x": self.x,
            "lhs": str(self.lhs_value),
            "certificate": self.certificate,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SolutionRecord":
        return cls(
            k=doc["k"], n=doc["n"], m=doc["m"], x=doc["x"],
            lhs_value=int(doc["lhs"]), certificate=doc["certificate"],
        )


def _certificate(k: int, n: int, m: int, x: int, value: int) -> str:
    blob = f"{k}:{n}:{m}:{x}:{value}".encode()
    return hashlib.sha256(blob).hexdigest()[:32]


def verify_solution(k: int, n: int, m: int, x: int) -> SolutionRecord | None:
    """Exact recomputation check; returns a certified record on success."""
    inst = EquationInstance(k=k, n=n, m=m, x=x)
    value = lhs(inst)
    if value != lucas(KIndex(k, m)):
        return None
    return SolutionRecord(k, n, m, x, value, _certificate(k, n, m, x, value))


def trivial_solutions(k_range: tuple[int, int], n_cap: int = 50) -> list[SolutionRecord]:
    """The x = 0 and x = 1 families, by finite case analysis.

    For x = 0 the left side is always 1, hitting the unique index with term
    one; for x = 1 only the seven candidates m in [n-2, n+5] can match.
    """
    out: list[SolutionRecord] = []
    for k in range(k_range[0], k_range[1] + 1):
        for n in range(0, n_cap + 1):
            rec = verify_solution(k, n, 1, 0)
            if rec is not None:
                out.append(rec)
            for m in range(max(0, n - 2), n + 6):
                rec = verify_solution(k, n, m, 1)
                if rec is not None:
                    out.append(rec)
    return sorted(out, key=SolutionRecord.sort_key)


@dataclass(frozen=True)
class ModularFilterResult:
    """Residues of m (mod period) compatible with one (k, n, x) row."""

    modulus: int
    period: int
    residues: frozenset[int]


@functools.lru_cache(maxsize=256)
def _term_cycle(k: int, modulus: int) -> tuple[int, tuple[int, ...]] | None:
    """Period of the term sequence mod ``modulus`` and one cycle from index 0.

    The recurrence is invertible mod any modulus (the trailing coefficient is
    1), so the sequence is purely periodic.  Returns None when the state
    cycle exceeds the search cap.
    """
    seq = [v % modulus for v in ([0] * (k - 2) + [2, 1])]  # indices 2-k .. 1
    for _ in range(2, k):
        seq.append(sum(seq[-k:]) % modulus)
    start = tuple(seq[-k:])  # state (L_0, ..., L_{k-1})
    values = list(start)
    state = start
    for step in range(_FILTER_PERIOD_CAP):
        nxt = sum(state) % modulus
        state = state[1:] + (nxt,)
        if state == start:
            period = step + 1
            return period, tuple((values + [nxt])[:period])
        values.append(nxt)
    return None


def modular_filter(k: int, n: int, x: int, modulus: int) -> ModularFilterResult | None:
    """Admissible residue classes for m, or None when the period is too large.

    An empty residue set certifies that no m solves the row (k, n, x).
    """
    if modulus < 2:
        raise DomainError(f"modulus must be >= 2, got {modulus}")
    found = _term_cycle(k, modulus)
    if found is None:
        return None
    period, cycle = found
    target = lhs(EquationInstance(k=k, n=n, m=0, x=x)) % modulus
    residues = frozenset(i for i, v in enumerate(cycle) if v == target)
    return ModularFilterResult(modulus=modulus, period=period, residues=residues)


def _blocks(cfg: SearchConfig) -> list[tuple[int, int]]:
    out = []
    for k in range(cfg.k_range[0], cfg.k_range[1] + 1):
        n_lo, n_hi = cfg.n_range
        if cfg.clamp_n_le_k:
            n_hi = min(n_hi, k)
        if cfg.clamp_n_gt_k:
            n_lo = max(n_lo, k + 1)
        for n in range(n_lo, n_hi + 1):
            out.append((k, n))
    return out


def search_block(cfg: SearchConfig, k: int, n: int) -> list[SolutionRecord]:
    """Scan all (x, m) candidates for one (k, n) block."""
    records: list[SolutionRecord] = []
    x_lo, x_hi = cfg.x_range
    m_cap = None if cfg.m_range_explicit is None else cfg.m_range_explicit
    # the Lucas window for fixed k is shared across the whole block
    max_m = (n + 3) * x_hi + 3
    if m_cap is not None:
        max_m = min(max_m, m_cap[1])
    terms = lucas_window(k, max(max_m, n + 1))
    moduli: tuple[int, ...] = ()
    if cfg.use_modular_filter:
        moduli += tuple(m for m in cfg.filter_moduli if m != 2)
    if cfg.use_parity_filter:
        moduli += (2,)
    for x in range(x_lo, x_hi + 1):
        lo, hi = m_range(n, x)
        m_lo, m_hi = max(lo + 1, 0), min(hi - 1, max_m)
        if m_cap is not None:
            m_lo, m_hi = max(m_lo, m_cap[0]), min(m_hi, m_cap[1])
        if m_lo > m_hi:
            continue
        value = lhs(EquationInstance(k=k, n=n, m=0, x=x))
        admissible: set[int] | None = None
        for mod in moduli:
            res = modular_filter(k, n, x, mod)
            if res is None:
                continue
            ok = {m for m in range(m_lo, m_hi + 1) if m % res.period in res.residues}
            admissible = ok if admissible is None else (admissible & ok)
            if not admissible:
                break
        candidates = range(m_lo, m_hi + 1) if admissible is None else sorted(admissible)
        for m in candidates:
            if terms[m] == value:
                records.append(
                    SolutionRecord(k, n, m, x, value, _certificate(k, n, m, x, value))
                )
    records.sort(key=SolutionRecord.sort_key)
    return records


def _block_task(args: tuple[SearchConfig, int, int]) -> tuple[tuple[int, int], list[dict]]:
    cfg, k, n = args
    return (k, n), [r.to_json_dict() for r in search_block(cfg, k, n)]


def _load_journal(path: Path) -> tuple[set[tuple[int, int]], list[SolutionRecord]]:
    done: set[tuple[int, int]] = set()
    records: list[SolutionRecord] = []
    if path.exists():
        for line in path.read_text().splitlines():
            if not line.strip():
                continue
            doc = json.loads(line)
            done.add(tuple(doc["block"]))
            records.extend(SolutionRecord.from_json_dict(r) for r in doc["records"])
    return done, records


def exhaustive_search(
    cfg: SearchConfig,
    *,
    jobs: int = 1,
    journal_path: str | Path | None = None,
    resume: bool = False,
) -> list[SolutionRecord]:
    """All solutions in the configured ranges, sorted by (k, n, x, m).

    With a journal path, finished blocks are appended as JSON lines; a
    resumed run skips them and reproduces the same final set.  A configured
    time limit raises ResourceLimitError after flushing completed work.
    """
    journal = Path(journal_path) if journal_path is not None else None
    done: set[tuple[int, int]] = set()
    records: list[SolutionRecord] = []
    if journal is not None and resume:
        done, records = _load_journal(journal)
    blocks = [b for b in _blocks(cfg) if b not in done]
    started = time.monotonic()
    handle = journal.open("a") if journal is not None else None
    try:
        def emit(block: tuple[int, int], recs: list[dict]) -> None:
            records.extend(SolutionRecord.from_json_dict(r) for r in recs)
            if handle is not None:
                handle.write(json.dumps({"block": list(block), "records": recs}) + "\n")
                handle.flush()

        def check_budget(done_count: int) -> None:
            if cfg.time_limit_s is not None and time.monotonic() - started > cfg.time_limit_s:
                raise ResourceLimitError(
                    f"time limit {cfg.time_limit_s}s hit after {done_count} blocks",
                    journal_path=str(journal) if journal is not None else None,
                )

        if jobs <= 1:
            for idx, (k, n) in enumerate(blocks):
                emit((k, n), [r.to_json_dict() for r in search_block(cfg, k, n)])
                check_budget(idx + 1)
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                args = [(cfg, k, n) for k, n in blocks]
                for idx, (block, recs) in enumerate(
                    pool.map(_block_task, args, chunksize=cfg.batch_size)
                ):
                    emit(block, recs)
                    check_budget(idx + 1)
    finally:
        if handle is not None:
            handle.close()
    return sorted(set(records), key=SolutionRecord.sort_key)


PRESETS: dict[str, tuple[SearchConfig, ...]] = {
    # acceptance-scale sweep
    "desk": (
        SearchConfig(k_range=(2, 10), n_range=(0, 20), x_range=(0, 15)),
    ),
    # the reference full-scale ranges; expect a very long run
    "paper-full": (
        SearchConfig(
            k_range=(2, 800), n_range=(0, 800), x_range=(1, 1119),
            m_range_explicit=(3, 5597), clamp_n_le_k=True,
        ),
        SearchConfig(
            k_range=(2, 800), n_range=(3, 800), x_range=(2, 736), clamp_n_gt_k=True,
        ),
        SearchConfig(
            k_range=(2, 800), n_range=(801, 1278), x_range=(2, 1722),
        ),
    ),
}


def search_preset(
    name: str,
    *,
    jobs: int = 1,
    journal_path: str | Path | None = None,
    resume: bool = False,
    time_limit_s: float | None = None,
) -> list[SolutionRecord]:
    if name not in PRESETS:
        raise DomainError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    merged: list[SolutionRecord] = []
    for idx, cfg in enumerate(PRESETS[name]):
        if time_limit_s is not None:
            cfg = replace(cfg, time_limit_s=time_limit_s)
        phase_journal = None
        if journal_path is not None:
            phase_journal = Path(str(journal_path) + (f".phase{idx}" if idx else ""))
        merged.extend(
            exhaustive_search(cfg, jobs=jobs, journal_path=phase_journal, resume=resume)
        )
    return sorted(set(merged), key=SolutionRecord.sort_key)


def records_to_jsonl(records: list[SolutionRecord]) -> str:
    return "".join(json.dumps(r.to_json_dict(), sort_keys=True) + "\n" for r in records)
