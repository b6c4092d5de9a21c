"""CSV / JSON serialization of exploration reports.

Output is deterministic: fixed column order, integer-only cells, LF line
endings.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import List, Union

from .dse import EvaluatedPoint, ExplorationReport

REPORT_COLUMNS = (
    "id", "traversal", "p", "q", "r", "r_t", "c_sa", "ch_sa", "r_sa", "n_dsp",
    "mu_words", "worst_layer_m_t_words", "t_total_cycles", "feasible", "rank",
)
PLOT_COLUMNS = ("id", "traversal", "r_t", "n_dsp", "worst_layer_m_t_words", "t_total_cycles", "feasible")
LAYER_COLUMNS = ("layer", "m_fm", "m_ps", "m_pool", "m_wsa", "m_t", "m_delta")


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    return str(v)


def report_row(ep: EvaluatedPoint) -> dict:
    dp = ep.point
    return {
        "id": dp.id,
        "traversal": dp.traversal.value,
        "p": dp.p,
        "q": dp.q,
        "r": dp.r,
        "r_t": dp.tile.nominal,
        "c_sa": dp.c_sa,
        "ch_sa": dp.ch_sa,
        "r_sa": dp.r_sa,
        "n_dsp": ep.resources.n_dsp,
        "mu_words": ep.resources.mu,
        "worst_layer_m_t_words": ep.resources.worst_m_t,
        "t_total_cycles": ep.t_total,
        "feasible": ep.feasible,
        "rank": ep.rank,
    }


def _write_csv(columns, rows, header_comment=None) -> str:
    buf = io.StringIO()
    if header_comment:
        buf.write(f"# {header_comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def report_csv(report: ExplorationReport) -> str:
    rows = [report_row(ep) for ep in report.points]
    return _write_csv(REPORT_COLUMNS, rows, f"word_bits={report.budget.word_bits}")


def plot_csv(report: ExplorationReport) -> str:
    rows = [report_row(ep) for ep in report.points]
    return _write_csv(PLOT_COLUMNS, rows, f"word_bits={report.budget.word_bits}")


def layer_rows(ep: EvaluatedPoint) -> List[dict]:
    return [dict(layer=i, **lr.to_json()) for i, lr in enumerate(ep.resources.layers, 1)]


def layers_csv(ep: EvaluatedPoint, word_bits: int) -> str:
    return _write_csv(LAYER_COLUMNS, layer_rows(ep), f"word_bits={word_bits} point={ep.point.id}")


def report_json(report: ExplorationReport) -> str:
    return json.dumps(report.to_json(), indent=2) + "\n"


def load_report(path: Union[str, Path]) -> ExplorationReport:
    return ExplorationReport.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def read_csv(text: str) -> List[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def write_report(report: ExplorationReport, prefix: Union[str, Path]) -> List[Path]:
    prefix = str(prefix)
    files = {
        Path(prefix + ".csv"): report_csv(report),
        Path(prefix + ".json"): report_json(report),
        Path(prefix + ".plot.csv"): plot_csv(report),
    }
    for path, text in files.items():
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return list(files)
