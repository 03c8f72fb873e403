//! Stable CSV and SVG serialization of run results.
//!
//! Every emitter writes byte-deterministic output: fixed 6-decimal reals,
//! `\n` line endings, UTF-8, no timestamps.

use std::io::Write;

use abicap_core::engine::{aggregate, RunResult, SummaryRow};
use anyhow::{bail, Context, Result};

pub const TIMESERIES_HEADER: &str = "scenario,condition,step,mean_knowledge,sd_knowledge,n_agents";

/// Aggregate a result and write one row per (condition, step).
pub fn write_timeseries_csv<W: Write>(result: &RunResult, mut dest: W) -> Result<()> {
    let rows = aggregate(result).context("aggregating run result")?;
    writeln!(dest, "{TIMESERIES_HEADER}")?;
    for row in &rows {
        writeln!(
            dest,
            "{},{},{},{:.6},{:.6},{}",
            row.scenario, row.condition, row.step, row.mean_knowledge, row.sd_knowledge, row.n_agents
        )?;
    }
    Ok(())
}

/// Raw per-step mastery of the tracked node, for scenarios that record it.
pub fn write_mastery_csv<W: Write>(result: &RunResult, mut dest: W) -> Result<()> {
    writeln!(dest, "step,agent_id,node,mastery")?;
    let mut wrote = false;
    for cond in &result.conditions {
        let Some(trace) = &cond.mastery_trace else {
            continue;
        };
        wrote = true;
        for (step_idx, agents) in trace.iter().enumerate() {
            for (agent_id, &mastery) in agents.iter().enumerate() {
                writeln!(
                    dest,
                    "{},{},{},{:.6}",
                    step_idx + 1,
                    agent_id,
                    result.tracked_node,
                    mastery
                )?;
            }
        }
    }
    if !wrote {
        bail!("this run recorded no mastery traces; enable record_mastery");
    }
    Ok(())
}

const CHART_WIDTH: f64 = 640.0;
const CHART_HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 56.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 48.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// Render aggregated rows as a self-contained SVG line chart: one polyline
/// per condition, with axes and a legend. Deterministic bytes for a fixed
/// input.
pub fn render_line_chart<W: Write>(rows: &[SummaryRow], mut dest: W, title: &str) -> Result<()> {
    if rows.is_empty() {
        bail!("no rows to chart");
    }
    let mut conditions: Vec<&str> = rows.iter().map(|r| r.condition.as_str()).collect();
    conditions.sort_unstable();
    conditions.dedup();

    let max_step = rows.iter().map(|r| r.step).max().unwrap_or(1).max(1);
    let max_y = rows
        .iter()
        .map(|r| r.mean_knowledge)
        .fold(1.0f64, f64::max)
        .ceil();

    let plot_w = CHART_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = CHART_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x = |step: usize| MARGIN_LEFT + plot_w * (step as f64 - 1.0) / (max_step as f64 - 1.0).max(1.0);
    let y = |v: f64| MARGIN_TOP + plot_h * (1.0 - v / max_y);

    writeln!(
        dest,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{CHART_WIDTH}\" height=\"{CHART_HEIGHT}\" viewBox=\"0 0 {CHART_WIDTH} {CHART_HEIGHT}\">"
    )?;
    writeln!(dest, "<rect width=\"{CHART_WIDTH}\" height=\"{CHART_HEIGHT}\" fill=\"white\"/>")?;
    writeln!(
        dest,
        "<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        MARGIN_LEFT + plot_w / 2.0,
        xml_escape(title)
    )?;

    // axes
    writeln!(
        dest,
        "<line x1=\"{MARGIN_LEFT}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>",
        MARGIN_TOP + plot_h,
        MARGIN_LEFT + plot_w,
        MARGIN_TOP + plot_h
    )?;
    writeln!(
        dest,
        "<line x1=\"{MARGIN_LEFT}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_LEFT}\" y2=\"{:.1}\" stroke=\"black\"/>",
        MARGIN_TOP + plot_h
    )?;

    // x ticks every 5 steps plus step 1
    let mut ticks: Vec<usize> = (0..=max_step).step_by(5).skip(1).collect();
    ticks.insert(0, 1);
    for step in ticks {
        writeln!(
            dest,
            "<line x1=\"{0:.1}\" y1=\"{1:.1}\" x2=\"{0:.1}\" y2=\"{2:.1}\" stroke=\"black\"/>",
            x(step),
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 5.0
        )?;
        writeln!(
            dest,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            x(step),
            MARGIN_TOP + plot_h + 18.0,
            step
        )?;
    }
    // y ticks at integer values (at most 10 labels)
    let y_step = (max_y / 10.0).ceil().max(1.0);
    let mut v = 0.0;
    while v <= max_y {
        writeln!(
            dest,
            "<line x1=\"{:.1}\" y1=\"{1:.1}\" x2=\"{MARGIN_LEFT}\" y2=\"{1:.1}\" stroke=\"black\"/>",
            MARGIN_LEFT - 5.0,
            y(v)
        )?;
        writeln!(
            dest,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            MARGIN_LEFT - 8.0,
            y(v) + 4.0,
            v as u64
        )?;
        v += y_step;
    }

    // axis labels
    writeln!(
        dest,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">step</text>",
        MARGIN_LEFT + plot_w / 2.0,
        CHART_HEIGHT - 10.0
    )?;
    writeln!(
        dest,
        "<text x=\"14\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {0:.1})\">mean knowledge</text>",
        MARGIN_TOP + plot_h / 2.0
    )?;

    for (idx, cond) in conditions.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let mut points: Vec<(usize, f64)> = rows
            .iter()
            .filter(|r| r.condition == *cond)
            .map(|r| (r.step, r.mean_knowledge))
            .collect();
        points.sort_by_key(|&(step, _)| step);
        let path: Vec<String> = points
            .iter()
            .map(|&(step, v)| format!("{:.2},{:.2}", x(step), y(v)))
            .collect();
        writeln!(
            dest,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            path.join(" ")
        )?;
        // legend
        let ly = MARGIN_TOP + 16.0 * idx as f64;
        let lx = MARGIN_LEFT + plot_w + 12.0;
        writeln!(
            dest,
            "<line x1=\"{lx:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            lx + 18.0
        )?;
        writeln!(
            dest,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            lx + 24.0,
            ly + 4.0,
            xml_escape(cond)
        )?;
    }

    writeln!(dest, "</svg>")?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
