//! Tables, CSV/JSON exports and SVG figures.
//!
//! Figures carry their plotted numbers in `data-*` attributes formatted by
//! [`num`], the same formatter used for the co-emitted CSV files, so a figure
//! can always be checked against its CSV.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metrics::SummaryStats;
use crate::pod::{PoapCurve, ReliableHorizon};
use crate::trajectory::{RiverAxis, Trajectory};

/// Fixed-point rendering with trailing zeros (and a bare point) removed.
pub fn format_trimmed(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Shortest round-trip rendering used in every CSV and `data-*` attribute.
pub fn num(v: f64) -> String {
    v.to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Best/worst flags for one table row. Entries that tie for the extreme are
/// all marked; a row where every entry ties, or with fewer than two entries,
/// gets no marks.
pub fn rank_markers(values: &[Option<f64>], higher_is_better: bool) -> Vec<(bool, bool)> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let mut out = vec![(false, false); values.len()];
    if present.len() < 2 {
        return out;
    }
    let hi = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = present.iter().copied().fold(f64::INFINITY, f64::min);
    if hi == lo {
        return out;
    }
    let (best, worst) = if higher_is_better { (hi, lo) } else { (lo, hi) };
    for (flag, v) in out.iter_mut().zip(values) {
        if let Some(v) = v {
            *flag = (*v == best, *v == worst);
        }
    }
    out
}

/// Error-statistics table: one row per group, one `mean (median, std)` cell
/// per model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsTable {
    pub horizon_min: f64,
    pub models: Vec<String>,
    pub rows: Vec<StatsTableRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsTableRow {
    pub group: String,
    pub n: usize,
    /// `None` where the group is empty for that model.
    pub cells: Vec<Option<SummaryStats>>,
}

impl StatsTable {
    /// Cell text for every row, with `*` on the lowest value of each
    /// statistic independently.
    pub fn cell_texts(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|row| {
                let mark = |f: fn(&SummaryStats) -> f64| {
                    let vals: Vec<Option<f64>> = row.cells.iter().map(|c| c.as_ref().map(f)).collect();
                    rank_markers(&vals, false)
                };
                let (mean, median, std) = (mark(|s| s.mean), mark(|s| s.median), mark(|s| s.std));
                let star = |m: (bool, bool)| if m.0 { "*" } else { "" };
                row.cells
                    .iter()
                    .enumerate()
                    .map(|(j, c)| match c {
                        Some(s) => format!(
                            "{}{} ({}{}, {}{})",
                            format_trimmed(s.mean, 2),
                            star(mean[j]),
                            format_trimmed(s.median, 2),
                            star(median[j]),
                            format_trimmed(s.std, 2),
                            star(std[j]),
                        ),
                        None => "insufficient data".into(),
                    })
                    .collect()
            })
            .collect()
    }

    pub fn render(&self) -> String {
        let mut out =
            format!("Error statistics at {} min, mean (median, std) [m]\n\n", format_trimmed(self.horizon_min, 3));
        out.push_str(&markdown_header("Situation", &self.models));
        for (row, cells) in self.rows.iter().zip(self.cell_texts()) {
            out.push_str(&markdown_row(&format!("{} ({})", row.group, row.n), &cells));
        }
        out.push_str(
            "\n* lowest value of that statistic in the row. Standard deviation divides by n; \
             quartiles interpolate linearly between order statistics.\n",
        );
        out
    }
}

/// Reliability table: one row per traffic situation, one `a90/95` cell per
/// model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonTable {
    pub h_max: f64,
    pub models: Vec<String>,
    pub rows: Vec<HorizonTableRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonTableRow {
    pub group: String,
    pub n: usize,
    /// `None` where the group cannot be fitted.
    pub cells: Vec<Option<ReliableHorizon>>,
}

impl HorizonTable {
    /// Cell text with `*` on the most and `†` on the least reliable entry.
    pub fn cell_texts(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|row| {
                let keys: Vec<Option<f64>> = row.cells.iter().map(|c| c.map(|h| h.rank_key())).collect();
                let marks = rank_markers(&keys, true);
                row.cells
                    .iter()
                    .zip(marks)
                    .map(|(c, (best, worst))| match c {
                        Some(h) => {
                            let mut s = h.to_string();
                            if best {
                                s.push('*');
                            }
                            if worst {
                                s.push('†');
                            }
                            s
                        }
                        None => "insufficient data".into(),
                    })
                    .collect()
            })
            .collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::from("a90/95 [min] per traffic situation (sample count)\n\n");
        out.push_str(&markdown_header("Situation", &self.models));
        for (row, cells) in self.rows.iter().zip(self.cell_texts()) {
            out.push_str(&markdown_row(&format!("{} ({})", row.group, row.n), &cells));
        }
        let _ = writeln!(
            out,
            "\n* most reliable, † least reliable in the row. \"> {h}\" means the lower bound stays at or above 0.9 \
             up to {h} min; 0 means it is below 0.9 at every horizon. The lower bound applies the delta method to \
             z = (th - b - m*a)/tau with the maximum-likelihood covariance of (b, m, tau).",
            h = format_trimmed(self.h_max, 3)
        );
        out
    }
}

fn markdown_header(first: &str, models: &[String]) -> String {
    let mut s = format!("| {first} |");
    for m in models {
        let _ = write!(s, " {m} |");
    }
    s.push_str("\n|---|");
    for _ in models {
        s.push_str("---|");
    }
    s.push('\n');
    s
}

fn markdown_row(first: &str, cells: &[String]) -> String {
    let mut s = format!("| {first} |");
    for c in cells {
        let _ = write!(s, " {c} |");
    }
    s.push('\n');
    s
}

/// One line of the statistics CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRecord {
    pub model: String,
    pub group: String,
    pub horizon_min: f64,
    /// `None` for an empty group; written as `n = 0` with blank fields.
    pub stats: Option<SummaryStats>,
}

pub const STATS_HEADER: [&str; 11] =
    ["model", "group", "horizon_min", "n", "mean", "median", "std", "q1", "q3", "wlow", "whigh"];

pub fn write_stats_csv<'a, W, I>(sink: W, rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a StatsRecord>,
{
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(STATS_HEADER)?;
    for r in rows {
        let mut rec = vec![r.model.clone(), r.group.clone(), num(r.horizon_min)];
        match &r.stats {
            Some(s) => {
                rec.push(s.n.to_string());
                rec.extend([s.mean, s.median, s.std, s.q1, s.q3, s.whisker_low, s.whisker_high].map(num));
            }
            None => {
                rec.push("0".into());
                rec.extend(std::iter::repeat_n(String::new(), 7));
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve_csv<W: Write>(sink: W, curve: &PoapCurve) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["a_min", "p", "p_lower95"])?;
    for ((a, p), lo) in curve.grid.iter().zip(&curve.p).zip(&curve.p_lower95) {
        w.write_record([num(*a), num(*p), num(*lo)])?;
    }
    w.flush()?;
    Ok(())
}

/// Machine-readable summary of one fitted curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoapSummary {
    pub model: String,
    pub label: String,
    pub transform: String,
    pub b: f64,
    pub m: f64,
    pub tau: f64,
    pub r2: f64,
    pub n: usize,
    pub threshold_m: f64,
    /// Horizon in minutes; `h_max` when censored and 0 when unreliable.
    pub a90: f64,
    pub a90_95: f64,
    /// Whether `a90_95` is censored at the maximum horizon.
    pub censored: bool,
    pub a90_status: String,
    pub a90_95_status: String,
    pub n_series: usize,
    pub confidence: f64,
    pub degenerate: bool,
    /// Transform chosen although every candidate failed the residual screen.
    pub transform_fallback: bool,
}

impl PoapSummary {
    pub fn new(model: &str, label: &str, curve: &PoapCurve) -> Self {
        Self {
            model: model.into(),
            label: label.into(),
            transform: curve.fit.transform.to_string(),
            b: curve.fit.b,
            m: curve.fit.m,
            tau: curve.fit.tau,
            r2: curve.fit.r_squared,
            n: curve.fit.n,
            threshold_m: curve.threshold,
            a90: curve.a90.value(),
            a90_95: curve.a90_95.value(),
            censored: curve.a90_95.is_censored(),
            a90_status: curve.a90.status().into(),
            a90_95_status: curve.a90_95.status().into(),
            n_series: curve.n_series,
            confidence: curve.confidence,
            degenerate: curve.fit.degenerate,
            transform_fallback: curve.selection.as_ref().is_some_and(|s| s.fallback),
        }
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Round tick step of roughly `span / 5`: 1, 2 or 5 times a power of ten.
fn tick_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    mag * if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    }
}

/// Plot area with linear axes; the y range is widened to whole ticks.
struct Frame {
    width: f64,
    height: f64,
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
    x: (f64, f64),
    y: (f64, f64),
    y_step: f64,
    /// Numeric ticks on the x axis; off for categorical axes.
    x_ticks: bool,
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |(lo, hi): (f64, f64)| if hi > lo { (lo, hi) } else { (lo - 1.0, lo + 1.0) };
        let (x, y) = (pad(x), pad(y));
        let y_step = tick_step(y.1 - y.0);
        let y = ((y.0 / y_step).floor() * y_step, (y.1 / y_step - 1e-9).ceil() * y_step);
        Self {
            width: 800.0,
            height: 420.0,
            left: 72.0,
            right: 240.0,
            top: 36.0,
            bottom: 52.0,
            x,
            y,
            y_step,
            x_ticks: true,
        }
    }

    fn sx(&self, v: f64) -> f64 {
        self.left + (v - self.x.0) / (self.x.1 - self.x.0) * (self.width - self.left - self.right)
    }

    fn sy(&self, v: f64) -> f64 {
        self.height - self.bottom - (v - self.y.0) / (self.y.1 - self.y.0) * (self.height - self.top - self.bottom)
    }

    fn open(&self, title: &str, x_label: &str, y_label: &str) -> String {
        let (w, h) = (self.width, self.height);
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" \
             font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
        );
        let _ = writeln!(s, "<text x=\"{}\" y=\"22\" font-size=\"14\">{}</text>", self.left, escape(title));
        let (x0, x1, y0, y1) = (self.sx(self.x.0), self.sx(self.x.1), self.sy(self.y.0), self.sy(self.y.1));
        let _ = writeln!(
            s,
            "<g class=\"axes\" stroke=\"#333\"><line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x1:.2}\" y2=\"{y0:.2}\"/>\
             <line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{x0:.2}\" y2=\"{y1:.2}\"/></g>"
        );
        let decimals = |step: f64| (-step.log10().floor()).max(0.0) as usize;
        let y_count = ((self.y.1 - self.y.0) / self.y_step).round() as i64;
        for k in 0..=y_count {
            let yv = self.y.0 + self.y_step * k as f64;
            let _ = writeln!(
                s,
                "<line x1=\"{:.2}\" y1=\"{yy:.2}\" x2=\"{x1:.2}\" y2=\"{yy:.2}\" stroke=\"#eee\"/>\
                 <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
                x0 + 1.0,
                x0 - 6.0,
                self.sy(yv) + 4.0,
                format_trimmed(yv, decimals(self.y_step)),
                yy = self.sy(yv),
            );
        }
        if self.x_ticks {
            let step = tick_step(self.x.1 - self.x.0);
            let first = (self.x.0 / step - 1e-9).ceil() as i64;
            let last = (self.x.1 / step + 1e-9).floor() as i64;
            for k in first..=last {
                let xv = step * k as f64;
                let _ = writeln!(
                    s,
                    "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
                    self.sx(xv),
                    y0 + 16.0,
                    format_trimmed(xv, decimals(step))
                );
            }
        }
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            0.5 * (x0 + x1),
            h - 12.0,
            escape(x_label)
        );
        let _ = writeln!(
            s,
            "<text transform=\"translate(16 {:.2}) rotate(-90)\" text-anchor=\"middle\">{}</text>",
            0.5 * (y0 + y1),
            escape(y_label)
        );
        s
    }

    fn legend(&self, s: &mut String, entries: &[(String, &str, &str)]) {
        for (i, (name, color, dash)) in entries.iter().enumerate() {
            let x = self.width - self.right + 16.0;
            let y = self.top + 14.0 + 18.0 * i as f64;
            let _ = writeln!(
                s,
                "<line x1=\"{x}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"{color}\" stroke-width=\"2\" stroke-dasharray=\"{dash}\"/>\
                 <text x=\"{}\" y=\"{}\">{}</text>",
                x + 24.0,
                x + 30.0,
                y + 4.0,
                escape(name)
            );
        }
    }
}

fn joined(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(num).collect::<Vec<_>>().join(" ")
}

/// Box plots grouped by horizon, one box per model. Each `<g class="box">`
/// carries the statistics row it draws.
pub fn boxplot_svg(title: &str, rows: &[StatsRecord]) -> String {
    let drawn: Vec<(&StatsRecord, &SummaryStats)> =
        rows.iter().filter_map(|r| r.stats.as_ref().map(|s| (r, s))).collect();
    let mut horizons: Vec<f64> = drawn.iter().map(|(r, _)| r.horizon_min).collect();
    horizons.sort_by(f64::total_cmp);
    horizons.dedup();
    let mut models: Vec<&str> = Vec::new();
    for (r, _) in &drawn {
        if !models.contains(&r.model.as_str()) {
            models.push(&r.model);
        }
    }
    let y_max = drawn.iter().map(|(_, s)| s.whisker_high).fold(0.0, f64::max) * 1.05;
    let mut frame = Frame::new((0.5, horizons.len() as f64 + 0.5), (0.0, y_max));
    frame.x_ticks = false;
    let mut s = frame.open(title, "prediction horizon [min]", "displacement error [m]");
    for (i, h) in horizons.iter().enumerate() {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" class=\"category\">{}</text>",
            frame.sx(i as f64 + 1.0),
            frame.sy(0.0) + 16.0,
            format_trimmed(*h, 3)
        );
    }
    let slot = 0.8 / models.len().max(1) as f64;
    for (r, st) in &drawn {
        let i = horizons.iter().position(|h| *h == r.horizon_min).unwrap_or(0);
        let j = models.iter().position(|m| *m == r.model).unwrap_or(0);
        let color = PALETTE[j % PALETTE.len()];
        let center = i as f64 + 1.0 - 0.4 + slot * (j as f64 + 0.5);
        let (xl, xc, xr) = (frame.sx(center - 0.35 * slot), frame.sx(center), frame.sx(center + 0.35 * slot));
        let _ = writeln!(
            s,
            "<g class=\"box\" data-model=\"{}\" data-group=\"{}\" data-horizon-min=\"{}\" data-n=\"{}\" data-mean=\"{}\" \
             data-median=\"{}\" data-std=\"{}\" data-q1=\"{}\" data-q3=\"{}\" data-wlow=\"{}\" data-whigh=\"{}\" \
             stroke=\"{color}\" fill=\"none\">",
            escape(&r.model),
            escape(&r.group),
            num(r.horizon_min),
            st.n,
            num(st.mean),
            num(st.median),
            num(st.std),
            num(st.q1),
            num(st.q3),
            num(st.whisker_low),
            num(st.whisker_high)
        );
        let _ = writeln!(
            s,
            "<rect x=\"{xl:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\"/>\
             <line x1=\"{xl:.2}\" y1=\"{m:.2}\" x2=\"{xr:.2}\" y2=\"{m:.2}\" stroke-width=\"2\"/>\
             <line x1=\"{xc:.2}\" y1=\"{:.2}\" x2=\"{xc:.2}\" y2=\"{:.2}\"/>\
             <line x1=\"{xc:.2}\" y1=\"{:.2}\" x2=\"{xc:.2}\" y2=\"{:.2}\"/>\
             <circle cx=\"{xc:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{color}\"/>\n</g>",
            frame.sy(st.q3),
            xr - xl,
            frame.sy(st.q1) - frame.sy(st.q3),
            frame.sy(st.q3),
            frame.sy(st.whisker_high),
            frame.sy(st.q1),
            frame.sy(st.whisker_low),
            frame.sy(st.mean),
            m = frame.sy(st.median),
        );
    }
    let entries: Vec<(String, &str, &str)> =
        models.iter().enumerate().map(|(j, m)| (m.to_string(), PALETTE[j % PALETTE.len()], "none")).collect();
    frame.legend(&mut s, &entries);
    s.push_str("</svg>\n");
    s
}

/// POAP curves (solid) with their lower bounds (dash-dot) and the 0.9
/// reference line.
pub fn poap_svg(title: &str, curves: &[(&str, &PoapCurve)]) -> String {
    let x_max = curves.iter().filter_map(|(_, c)| c.grid.last().copied()).fold(0.0, f64::max);
    let frame = Frame::new((0.0, if x_max > 0.0 { x_max } else { 5.0 }), (0.0, 1.0));
    let mut s = frame.open(title, "prediction horizon a [min]", "POAP");
    let _ = writeln!(
        s,
        "<line class=\"reference\" data-p=\"0.9\" x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#888\"/>",
        frame.sx(frame.x.0),
        frame.sx(frame.x.1),
        y = frame.sy(0.9)
    );
    let mut entries = Vec::new();
    for (j, (model, c)) in curves.iter().enumerate() {
        let color = PALETTE[j % PALETTE.len()];
        for (kind, values, dash) in [("p", &c.p, "none"), ("p_lower95", &c.p_lower95, "10 4 2 4")] {
            let pts: Vec<String> =
                c.grid.iter().zip(values).map(|(a, p)| format!("{:.2},{:.2}", frame.sx(*a), frame.sy(*p))).collect();
            let _ = writeln!(
                s,
                "<polyline class=\"curve\" data-model=\"{}\" data-kind=\"{kind}\" data-a=\"{}\" data-values=\"{}\" \
                 fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" stroke-dasharray=\"{dash}\" points=\"{}\"/>",
                escape(model),
                joined(c.grid.iter().copied()),
                joined(values.iter().copied()),
                pts.join(" ")
            );
        }
        entries.push((format!("{model} POAP"), color, "none"));
        entries.push((format!("{model} 95% bound"), color, "10 4 2 4"));
    }
    frame.legend(&mut s, &entries);
    s.push_str("</svg>\n");
    s
}

/// Along-river position of every vessel against time; crossing lines are
/// interactions. The first trajectory is drawn as the ego. Each polyline
/// carries the raw timestamps and projected coordinates it was drawn from.
pub fn scene_svg(title: &str, trajectories: &[Trajectory], axis: &RiverAxis) -> String {
    let t0 = trajectories.iter().filter_map(|t| t.start_time()).min().unwrap_or(0);
    let origin = trajectories.first().and_then(|t| t.points.first()).map_or(0.0, |p| axis.along(p.position()));
    let minutes = |t: i64| (t - t0) as f64 / 60.0;
    let km = |p: &crate::trajectory::TrackPoint| (axis.along(p.position()) - origin) / 1000.0;
    let pts = || trajectories.iter().flat_map(|t| &t.points);
    let x_max = pts().map(|p| minutes(p.timestamp)).fold(0.0, f64::max);
    let (y_lo, y_hi) = pts().map(km).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (y_lo, y_hi) = if y_lo.is_finite() { (y_lo, y_hi) } else { (0.0, 1.0) };
    let frame = Frame::new((0.0, x_max.max(1.0)), (y_lo, y_hi));
    let mut s = frame.open(title, "time [min]", "along-river position [km]");
    let mut entries = Vec::new();
    for (j, t) in trajectories.iter().enumerate() {
        let color = if j == 0 { "#000" } else { PALETTE[(j - 1) % PALETTE.len()] };
        let width = if j == 0 { 3 } else { 1 };
        let drawn: Vec<String> =
            t.points.iter().map(|p| format!("{:.2},{:.2}", frame.sx(minutes(p.timestamp)), frame.sy(km(p)))).collect();
        let _ = writeln!(
            s,
            "<polyline class=\"track\" data-vessel=\"{}\" data-t=\"{}\" data-easting=\"{}\" data-northing=\"{}\" \
             fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\" points=\"{}\"/>",
            escape(&t.vessel_id),
            t.points.iter().map(|p| p.timestamp.to_string()).collect::<Vec<_>>().join(" "),
            joined(t.points.iter().map(|p| p.easting)),
            joined(t.points.iter().map(|p| p.northing)),
            drawn.join(" ")
        );
        if j < 18 {
            entries.push((t.vessel_id.clone(), color, "none"));
        }
    }
    frame.legend(&mut s, &entries);
    s.push_str("</svg>\n");
    s
}
