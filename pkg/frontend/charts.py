"""
Altair charts for the dashboard. Plain functions over DataFrames so they
can be built and inspected without a Streamlit session.
"""

from typing import Optional, Sequence

import altair as alt
import pandas as pd

from lexical_baseline.models import LexicalReport

PALETTE = ["#6fe5b1", "#7ea6ff", "#ffb86b", "#ff7e9d"]


def loss_curve_chart(frame: pd.DataFrame, columns: Optional[Sequence[str]] = None, title: str = "Loss") -> alt.Chart:
    """One line per loss column against step."""
    columns = list(columns or [c for c in frame.columns if c != "step"])
    long = frame.melt(id_vars=["step"], value_vars=columns, var_name="loss", value_name="value")
    return (
        alt.Chart(long)
        .mark_line()
        .encode(
            x=alt.X("step:Q", title="Step"),
            y=alt.Y("value:Q", title="Loss"),
            color=alt.Color("loss:N", title="Loss", scale=alt.Scale(range=PALETTE)),
            tooltip=["step", "loss", "value"],
        )
        .properties(height=260, title=title)
    )


def metrics_chart(frame: pd.DataFrame) -> alt.Chart:
    """Grouped bars from a long (run, metric, value) frame."""
    return (
        alt.Chart(frame)
        .mark_bar()
        .encode(
            x=alt.X("metric:N", title="Metric"),
            xOffset="run:N",
            y=alt.Y("value:Q", title="Value", scale=alt.Scale(domain=[0, 1])),
            color=alt.Color("run:N", title="Run", scale=alt.Scale(range=PALETTE)),
            tooltip=["run", "metric", alt.Tooltip("value:Q", format=".4f")],
        )
        .properties(height=240)
    )


def lexical_chart(report: LexicalReport) -> alt.Chart:
    """Mean BM25 between query and answer projections, one line per stage, log-scaled N."""
    long = report.to_frame().melt(id_vars=["N"], var_name="stage", value_name="bm25")
    return (
        alt.Chart(long)
        .mark_line(point=True)
        .encode(
            x=alt.X("N:Q", title="Projection size N", scale=alt.Scale(type="log")),
            y=alt.Y("bm25:Q", title="Mean BM25"),
            color=alt.Color("stage:N", title="Stage", sort=list(report.columns), scale=alt.Scale(range=PALETTE)),
            tooltip=["N", "stage", alt.Tooltip("bm25:Q", format=".4f")],
        )
        .properties(height=260)
    )


def compression_chart(frame: pd.DataFrame, metric: str = "mrr@10") -> alt.Chart:
    """
    Metric against budget per compression method; the uncompressed run is a
    horizontal rule.
    """
    data = frame.rename(columns={metric: "value"})
    points = data[data["method"] != "none"].dropna(subset=["budget"])
    lines = (
        alt.Chart(points)
        .mark_line(point=True)
        .encode(
            x=alt.X("budget:Q", title="Budget (kept entries / dimensions)"),
            y=alt.Y("value:Q", title=metric.upper()),
            color=alt.Color("method:N", title="Method", scale=alt.Scale(range=PALETTE)),
            tooltip=["method", "budget", alt.Tooltip("value:Q", format=".4f")],
        )
    )
    baseline = data[data["method"] == "none"]
    if baseline.empty:
        return lines.properties(height=260)
    rule = alt.Chart(baseline).mark_rule(strokeDash=[4, 4], color="#999999").encode(y="value:Q")
    return (lines + rule).properties(height=260)
