import json
import os
import sys

import pandas as pd
import streamlit as st

try:
    from dotenv import load_dotenv
except Exception:
    load_dotenv = None

# Ensure project root is on PYTHONPATH when running via Streamlit.
PROJECT_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), os.pardir))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)
if load_dotenv:
    load_dotenv(os.path.join(PROJECT_ROOT, ".ebadapt", ".env"))
    load_dotenv(os.path.join(PROJECT_ROOT, ".env"))

from frontend.charts import compression_chart, lexical_chart, loss_curve_chart, metrics_chart
from frontend.run_data import list_run_dirs, load_run_artifacts

RUNS_ENV = "EBADAPT_RUNS_DIR"


def render_table(df: pd.DataFrame, title: str) -> None:
    if df is None or df.empty:
        return
    st.markdown(f"**{title}**")
    st.dataframe(df, use_container_width=True)


@st.cache_data(show_spinner=False)
def cached_artifacts(path: str, stamp: float):
    # stamp invalidates the cache when the directory changes
    return load_run_artifacts(path)


st.set_page_config(page_title="EBAdapt Lab", layout="wide")

with st.sidebar:
    st.markdown("### Runs")
    base = st.text_input("Runs directory", value=os.environ.get(RUNS_ENV, os.path.join(PROJECT_ROOT, "runs")))
    candidates = list_run_dirs(base)
    if candidates:
        choice = st.selectbox("Run", [p.name for p in candidates])
        run_dir = os.path.join(base, choice)
    else:
        run_dir = base
        st.caption("No subdirectories with manifests; showing the directory itself.")
    st.caption(f"Reading {run_dir}")

st.title("EBAdapt Lab")

if not os.path.isdir(run_dir):
    st.info("Point the sidebar at a directory written by the ebadapt pipeline (scripts/full_pipeline.sh).")
    st.stop()

artifacts = cached_artifacts(run_dir, os.path.getmtime(run_dir))
if artifacts.empty:
    st.warning("No loss curves, metrics, lexical report or comparison table found in this directory.")
    st.stop()

training_tab, retrieval_tab, lexical_tab, compression_tab, manifest_tab = st.tabs(
    ["Training", "Retrieval", "Lexical similarity", "Compression", "Manifests"]
)

with training_tab:
    if artifacts.adapt_loss is not None:
        st.altair_chart(
            loss_curve_chart(artifacts.adapt_loss, ["ebae_loss", "ebar_loss"], title="Adaptation (EBAE / EBAR)"),
            use_container_width=True,
        )
    if artifacts.finetune_loss is not None:
        st.altair_chart(
            loss_curve_chart(artifacts.finetune_loss, ["loss"], title="Contrastive fine-tuning"),
            use_container_width=True,
        )
    if artifacts.adapt_loss is None and artifacts.finetune_loss is None:
        st.caption("No loss curves in this run.")

with retrieval_tab:
    frame = artifacts.metrics_frame()
    if frame.empty:
        st.caption("No metrics.json in this run.")
    else:
        cols = st.columns(min(4, frame["metric"].nunique()))
        first_run = frame["run"].iloc[0]
        for col, (_, row) in zip(cols, frame[frame["run"] == first_run].iterrows()):
            col.metric(row["metric"].upper(), f"{row['value']:.4f}")
        st.altair_chart(metrics_chart(frame), use_container_width=True)
        render_table(frame.pivot(index="run", columns="metric", values="value").reset_index(), "All runs")

with lexical_tab:
    if artifacts.lexical is None:
        st.caption("No lexical.csv in this run (see `ebadapt diagnose-lexical`).")
    else:
        st.caption(artifacts.lexical.note)
        st.altair_chart(lexical_chart(artifacts.lexical), use_container_width=True)
        render_table(artifacts.lexical.to_frame(), "Mean BM25 between query and answer projections")

with compression_tab:
    report = artifacts.report
    if report is None or "method" not in report.columns:
        st.caption("No comparison table in this run (see `ebadapt report`).")
    else:
        metric_cols = [c for c in report.columns if "@" in c]
        metric = st.selectbox("Metric", metric_cols, index=metric_cols.index("mrr@10") if "mrr@10" in metric_cols else 0)
        st.altair_chart(compression_chart(report, metric), use_container_width=True)
        render_table(report, "Comparison table")

with manifest_tab:
    for name, manifest in sorted(artifacts.manifests.items()):
        with st.expander(f"{name} ({manifest.get('subcommand', '?')})"):
            st.code(json.dumps(manifest, indent=2, sort_keys=True), language="json")
