"""CSV output for per-episode metrics, run summaries and reference comparisons.

Floats are written with ``repr``, which is the shortest string that parses
back to the same double, so every file round-trips at full precision.
Missing values (std of a single run, greed/fear for N > 2) are empty cells.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

from .engine import MetricsRow, RunSummary

AGGREGATE_HEADER = ["experiment", "metric", "mean", "std", "n_seeds"]
COMPARISON_HEADER = ["artifact", "game", "condition", "metric", "paper_mean", "paper_std", "measured_mean",
                     "measured_std", "n_seeds"]


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def run_header(n_players: int) -> list[str]:
    return (["seed", "phase", "episode"] + [f"coop_prob_{i}" for i in range(1, n_players + 1)]
            + ["p_all_c", "welfare"] + [f"extra_{i}" for i in range(1, n_players + 1)]
            + ["aar_contrib", "cum_extra", "mod_greed", "mod_fear"])


def run_record(row: MetricsRow) -> list[str]:
    values = [row.seed, row.phase, row.episode, *row.coop_probs, row.p_all_c, row.welfare, *row.extra,
              row.aar_contrib, row.cum_extra, row.mod_greed, row.mod_fear]
    return [_num(v) for v in values]


def write_run_csv(path: str | Path, rows: Sequence[MetricsRow]) -> Path:
    path = Path(path)
    n = len(rows[0].coop_probs) if rows else 2
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(run_header(n))
        w.writerows(run_record(r) for r in rows)
    return path


def read_run_csv(path: str | Path) -> list[MetricsRow]:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n = sum(h.startswith("coop_prob_") for h in header)
        out = []
        for rec in reader:
            opt = [float(v) if v else None for v in rec[-2:]]
            out.append(MetricsRow(
                seed=int(rec[0]), phase=int(rec[1]), episode=int(rec[2]),
                coop_probs=tuple(float(v) for v in rec[3:3 + n]),
                p_all_c=float(rec[3 + n]), welfare=float(rec[4 + n]),
                extra=tuple(float(v) for v in rec[5 + n:5 + 2 * n]),
                aar_contrib=float(rec[5 + 2 * n]), cum_extra=float(rec[6 + 2 * n]),
                mod_greed=opt[0], mod_fear=opt[1],
            ))
    return out


def write_aggregate_csv(path: str | Path, entries: Iterable[tuple[str, RunSummary]]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGGREGATE_HEADER)
        for name, summary in entries:
            for metric, stat in summary.as_dict().items():
                w.writerow([name, metric, _num(stat.mean), _num(stat.std), summary.n_seeds])
    return path


def write_comparison_csv(path: str | Path, records: Iterable[dict]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COMPARISON_HEADER)
        for rec in records:
            w.writerow([_num(rec.get(k)) for k in COMPARISON_HEADER])
    return path


def read_csv_dicts(path: str | Path) -> list[dict[str, str]]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))
