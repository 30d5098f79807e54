"""Corpus runner: determinise every file under a time budget, emit CSV."""

from __future__ import annotations

import csv
import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

from .core import Fta
from .determinize import DetOptions, determinize
from .errors import DeterminizationTimeout, ResourceLimitExceeded, TreeDetError
from .product import Dfta
from .textbook import determinize_textbook
from .timbuk import StatsRecord, parse_timbuk, stats_record

BENCH_MODES = {
    "textbook": "textbook",
    "opt": "det",
    "opt+compl": "det+compl",
    "opt+compl+dc": "det+compl+dc",
}
OUTPUT_FORMATS = ("timbuk", "product", "json")
CSV_COLUMNS = (
    "file", "mode", "|Q|", "|Δ|", "|Σ|", "|Q_d|", "|Δ_Π|",
    "estDeltaD", "exactCompletedDeltaD", "time_ms", "status",
)
SUFFIXES = (".timbuk", ".txt", ".aut")


@dataclass
class BenchConfig:
    input_paths: Sequence[str | os.PathLike]
    mode: str = "opt+compl"
    timeout_seconds: float = 120.0
    output_format: str = "json"
    csv_path: str | os.PathLike | None = None
    jobs: int | None = None
    # When set, every solved result is written here in output_format.
    output_dir: str | os.PathLike | None = None
    max_states: int | None = None

    def __post_init__(self):
        if self.mode not in BENCH_MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {', '.join(BENCH_MODES)}")
        if not self.timeout_seconds > 0:
            raise ValueError("timeout must be positive")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"unknown output format {self.output_format!r}")
        if self.jobs is not None and self.jobs < 1:
            raise ValueError("jobs must be at least 1")


def corpus_files(paths: Sequence[str | os.PathLike]) -> list[Path]:
    """Expand directories into their automaton files, sorted by name."""
    out = []
    for p in map(Path, paths):
        if p.is_dir():
            out.extend(sorted(q for q in p.iterdir() if q.is_file() and q.suffix in SUFFIXES))
        else:
            out.append(p)
    return out


def run_mode(fta: Fta, mode: str, timeout: float | None = None, max_states: int | None = None) -> Dfta:
    """Determinise ``fta`` the way bench ``mode`` prescribes."""
    if mode == "textbook":
        return determinize_textbook(fta, timeout=timeout, max_states=max_states)
    kw = {} if max_states is None else {"max_states": max_states}
    opts = DetOptions(complete="compl" in mode, dontcare=mode.endswith("+dc"), timeout=timeout, **kw)
    return determinize(fta, opts)


def _task(path: str, mode: str, timeout: float, max_states, output_dir, output_format) -> StatsRecord:
    name = Path(path).name
    rec_mode = BENCH_MODES[mode]
    try:
        fta = parse_timbuk(Path(path).read_text())
    except (OSError, UnicodeDecodeError, TreeDetError) as exc:
        return StatsRecord(name, rec_mode, None, None, None, error=f"{type(exc).__name__}: {exc}")
    start = time.perf_counter()
    try:
        dfta = run_mode(fta, mode, timeout, max_states)
    except DeterminizationTimeout:
        return stats_record(name, rec_mode, fta, seconds=time.perf_counter() - start, timed_out=True)
    except (ResourceLimitExceeded, MemoryError) as exc:
        return stats_record(name, rec_mode, fta, seconds=time.perf_counter() - start, error=f"resource: {exc}")
    except TreeDetError as exc:
        return stats_record(name, rec_mode, fta, error=f"{type(exc).__name__}: {exc}")
    rec = stats_record(name, rec_mode, fta, dfta, seconds=time.perf_counter() - start)
    if output_dir is not None:
        _write_result(Path(output_dir), Path(path).stem, dfta, rec, output_format)
    return rec


def _write_result(out: Path, stem: str, dfta: Dfta, rec: StatsRecord, fmt: str):
    from .cli import render

    out.mkdir(parents=True, exist_ok=True)
    ext = {"timbuk": ".timbuk", "product": ".product", "json": ".json"}[fmt]
    text = rec.to_json() + "\n" if fmt == "json" else render(dfta, fmt, stem)
    (out / (stem + ext)).write_text(text)


def bench_corpus(cfg: BenchConfig) -> list[StatsRecord]:
    """One record per input file, in input order.

    Each file runs in its own task; a crash in one task becomes an error
    record for that file only.
    """
    files = [str(p) for p in corpus_files(cfg.input_paths)]
    args = [(f, cfg.mode, cfg.timeout_seconds, cfg.max_states, cfg.output_dir, cfg.output_format) for f in files]
    jobs = cfg.jobs or os.cpu_count() or 1
    if jobs == 1 or len(files) <= 1:
        records = []
        for a in args:
            try:
                records.append(_task(*a))
            except Exception as exc:  # isolation: one bad input never stops the run
                records.append(StatsRecord(Path(a[0]).name, BENCH_MODES[cfg.mode], None, None, None, error=repr(exc)))
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(files))) as pool:
            futures = [pool.submit(_task, *a) for a in args]
            records = []
            for a, fut in zip(args, futures):
                try:
                    records.append(fut.result())
                except Exception as exc:
                    records.append(StatsRecord(Path(a[0]).name, BENCH_MODES[cfg.mode], None, None, None, error=repr(exc)))
    if cfg.csv_path is not None:
        with open(cfg.csv_path, "w", newline="", encoding="utf-8") as fh:
            write_csv(records, fh, cfg.mode)
    return records


def summarize(records: Sequence[StatsRecord]) -> dict:
    solved = [r for r in records if r.status == "ok"]
    times = [r.timeMillis for r in solved if r.timeMillis is not None]
    return {
        "solved": len(solved),
        "timeouts": sum(r.status == "timeout" for r in records),
        "errors": sum(r.status == "error" for r in records),
        "avg_ms": sum(times) / len(times) if times else None,
    }


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.3f}"
    return str(v)


def write_csv(records: Sequence[StatsRecord], fh: TextIO, mode: str | None = None):
    """Fixed columns, one row per record, then one summary row per mode."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    to_bench = {v: k for k, v in BENCH_MODES.items()}
    modes = []
    for r in records:
        m = to_bench.get(r.mode, r.mode)
        if m not in modes:
            modes.append(m)
        w.writerow([
            r.name, m, r.sizeQ, r.sizeDelta, r.sizeSigma, r.sizeQd, r.sizeDeltaPi,
            r.estDeltaD, r.exactCompletedDeltaD, r.timeMillis, r.status,
        ])
    if not modes and mode is not None:
        modes.append(mode)
    for m in modes:
        s = summarize([r for r in records if to_bench.get(r.mode, r.mode) == m])
        status = f"solved={s['solved']};timeouts={s['timeouts']};errors={s['errors']}"
        w.writerow(["SUMMARY", m, "", "", "", "", "", "", "", _cell(s["avg_ms"]), status])


def csv_text(records: Sequence[StatsRecord], mode: str | None = None) -> str:
    buf = io.StringIO()
    write_csv(records, buf, mode)
    return buf.getvalue()
