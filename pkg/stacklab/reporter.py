"""
Report generation: long-format CSV traces and summaries, JSON, and an Excel
workbook with conditional formatting.
"""

import json
import os
from contextlib import contextmanager
from typing import Dict, Iterable, List, Optional

import pandas as pd

from .engine import BatchReport, RunResult
from .exceptions import ReportWriteError

TRACE_COLUMNS = ["run_seed", "t", "a", "b", "r_l", "r_f", "leader_algo", "follower_algo"]
SUMMARY_COLUMNS = ["checkpoint_t", "metric", "mean", "std", "n_seeds"]
FLOAT_FORMAT = "%.12g"


@contextmanager
def _writing(filepath: str):
    try:
        directory = os.path.dirname(os.path.abspath(filepath))
        os.makedirs(directory, exist_ok=True)
        yield
    except OSError as e:
        raise ReportWriteError(f"cannot write {filepath}: {e.strerror or e}") from e


def trace_frame(runs: Iterable[RunResult], leader_algo: str, follower_algo: str) -> pd.DataFrame:
    rows = [
        (run.seed, rec.t, rec.a, rec.b, rec.r_l, rec.r_f, leader_algo, follower_algo)
        for run in runs for rec in run.records
    ]
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


def write_trace_csv(reports: Iterable[BatchReport], filepath: str):
    """Every recorded round of every run, header row always present."""
    frames = [
        trace_frame(rep.runs, rep.config.leader.algorithm, rep.config.follower.strategy)
        for rep in reports
    ]
    frame = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=TRACE_COLUMNS)
    with _writing(filepath):
        frame.to_csv(filepath, index=False, float_format=FLOAT_FORMAT,
                     lineterminator="\n", encoding="utf-8")


def write_summary_csv(summary: pd.DataFrame, filepath: str):
    frame = summary[SUMMARY_COLUMNS] if len(summary.columns) else pd.DataFrame(columns=SUMMARY_COLUMNS)
    with _writing(filepath):
        frame.to_csv(filepath, index=False, float_format=FLOAT_FORMAT,
                     lineterminator="\n", encoding="utf-8")


def read_summary_csv(filepath: str) -> pd.DataFrame:
    return pd.read_csv(filepath)


def _json_safe(value):
    """Infinite gaps become null."""
    if isinstance(value, float) and (value != value or value in (float("inf"), float("-inf"))):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def export_json(payload: dict, filepath: str):
    """Write a report dictionary as JSON."""
    with _writing(filepath):
        with open(filepath, "w", encoding="utf-8", newline="\n") as f:
            json.dump(_json_safe(payload), f, indent=2, default=str)
            f.write("\n")


def export_excel(reports: Dict[str, BatchReport], filepath: str,
                 expectations: Optional[List[dict]] = None):
    """Summary, Metrics and Expectations sheets."""
    try:
        import openpyxl
        from openpyxl.styles import Font, PatternFill, Alignment, Border, Side
        from openpyxl.utils import get_column_letter
    except ImportError:
        raise ImportError("openpyxl required: pip install openpyxl")

    wb = openpyxl.Workbook()

    FILLS = {
        "pass": PatternFill(start_color="C6EFCE", end_color="C6EFCE", fill_type="solid"),
        "fail": PatternFill(start_color="FFC7CE", end_color="FFC7CE", fill_type="solid"),
        "header": PatternFill(start_color="1F4E79", end_color="1F4E79", fill_type="solid"),
    }
    FONTS = {
        "header": Font(bold=True, color="FFFFFF", size=11),
        "section": Font(bold=True, size=11, color="1F4E79"),
        "normal": Font(size=10),
        "title": Font(bold=True, size=14, color="1F4E79"),
    }
    thin_border = Border(
        left=Side(style='thin'), right=Side(style='thin'),
        top=Side(style='thin'), bottom=Side(style='thin')
    )

    def header_row(ws, headers):
        for col, h in enumerate(headers, 1):
            cell = ws.cell(row=1, column=col, value=h)
            cell.font = FONTS['header']
            cell.fill = FILLS['header']
            cell.alignment = Alignment(horizontal='center')
            cell.border = thin_border

    # ── Summary Sheet ──
    ws = wb.active
    ws.title = "Summary"
    ws['A1'] = "Stackelberg Simulation Summary"
    ws['A1'].font = FONTS['title']
    row = 3
    for arm, report in reports.items():
        s = report.overview()
        ws[f'A{row}'] = arm
        ws[f'A{row}'].font = FONTS['section']
        row += 1
        for label, value in (("Game", s['game']), ("Leader", s['leader']),
                             ("Follower", f"{s['follower']} ({s['information']})"),
                             ("Horizon", s['horizon']), ("Seeds", len(s['seeds'])),
                             ("Manipulation gap", s['gaps']['manipulation_gap']),
                             ("Target pair", str(tuple(s['target_pair'])))):
            ws[f'A{row}'] = label
            ws[f'B{row}'] = value
            row += 1
        for name, stats in s['scalars'].items():
            ws[f'A{row}'] = name
            ws[f'B{row}'] = stats['mean']
            ws[f'C{row}'] = stats['std']
            row += 1
        row += 1
    ws.column_dimensions['A'].width = 30
    ws.column_dimensions['B'].width = 30
    ws.column_dimensions['C'].width = 16

    # ── Metrics Sheet ──
    ws2 = wb.create_sheet("Metrics")
    headers = ["arm"] + SUMMARY_COLUMNS
    header_row(ws2, headers)
    i = 2
    for arm, report in reports.items():
        for rec in report.summary.itertuples(index=False):
            for col, val in enumerate([arm, rec.checkpoint_t, rec.metric, rec.mean, rec.std, rec.n_seeds], 1):
                cell = ws2.cell(row=i, column=col, value=val)
                cell.font = FONTS['normal']
                cell.border = thin_border
            i += 1
    for col_idx in range(1, len(headers) + 1):
        ws2.column_dimensions[get_column_letter(col_idx)].width = 22

    # ── Expectations Sheet ──
    ws3 = wb.create_sheet("Expectations")
    headers = ["Kind", "Arm", "Passed", "Message", "Expected", "Actual", "Provenance"]
    header_row(ws3, headers)
    for i, r in enumerate(expectations or [], 2):
        values = [r["kind"], r["arm"], "PASS" if r["passed"] else "FAIL", r["message"],
                  r["expected"], r["actual"], r["provenance"]]
        for col, val in enumerate(values, 1):
            cell = ws3.cell(row=i, column=col, value=val)
            cell.border = thin_border
            cell.fill = FILLS["pass" if r["passed"] else "fail"]
    for col_idx in range(1, len(headers) + 1):
        col_letter = get_column_letter(col_idx)
        max_len = max(
            len(str(ws3.cell(row=r, column=col_idx).value or ""))
            for r in range(1, len(expectations or []) + 2)
        )
        ws3.column_dimensions[col_letter].width = min(max_len + 4, 60)

    with _writing(filepath):
        wb.save(filepath)
