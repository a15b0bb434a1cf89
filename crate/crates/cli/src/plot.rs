//! Self-contained SVG plots of mean cumulative regret with a ±1 std band.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{read_results, ResultRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axes {
    Linear,
    Logx,
    /// `log2 log2 t` on the x axis.
    Loglogx,
}

impl Axes {
    /// x coordinate of period `t`, if defined.
    pub fn x(self, t: u64) -> Option<f64> {
        let t = t as f64;
        match self {
            Axes::Linear => Some(t),
            Axes::Logx => (t >= 1.0).then(|| t.ln()),
            Axes::Loglogx => (t >= 2.0).then(|| t.log2().log2()),
        }
    }

    fn label(self) -> &'static str {
        match self {
            Axes::Linear => "t",
            Axes::Logx => "ln t",
            Axes::Loglogx => "log2 log2 t",
        }
    }
}

/// Mean and population std of cumulative regret across seeds, per period.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub learner: String,
    pub t: Vec<u64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Groups rows by learner (first-appearance order). An episode is a run of rows
/// with one seed starting at `t = 1`; every episode of a learner must cover the same
/// periods.
pub fn aggregate(rows: &[ResultRow]) -> Result<Vec<Series>, CliError> {
    let mut order: Vec<&str> = Vec::new();
    let mut episodes: BTreeMap<&str, Vec<Vec<(u64, f64)>>> = BTreeMap::new();
    let mut prev: Option<(&str, u64, u64)> = None;
    for r in rows {
        let runs = episodes.entry(&r.learner).or_insert_with(|| {
            order.push(&r.learner);
            Vec::new()
        });
        let continues = matches!(prev, Some((l, s, t)) if l == r.learner && s == r.seed && r.t > t);
        if !continues || runs.is_empty() {
            runs.push(Vec::new());
        }
        runs.last_mut().expect("episode started").push((r.t, r.cumulative_regret));
        prev = Some((&r.learner, r.seed, r.t));
    }
    let mismatch = |learner: &str| CliError::Schema {
        path: "results".into(),
        message: format!("episodes of `{learner}` cover different periods"),
    };
    order
        .into_iter()
        .map(|learner| {
            let runs = &episodes[learner];
            let t: Vec<u64> = runs[0].iter().map(|p| p.0).collect();
            if runs.iter().any(|s| s.len() != t.len() || s.iter().zip(&t).any(|(p, &t)| p.0 != t)) {
                return Err(mismatch(learner));
            }
            let n = runs.len() as f64;
            let mut mean = Vec::with_capacity(t.len());
            let mut std = Vec::with_capacity(t.len());
            for i in 0..t.len() {
                let m = runs.iter().map(|s| s[i].1).sum::<f64>() / n;
                let var = runs.iter().map(|s| (s[i].1 - m).powi(2)).sum::<f64>() / n;
                mean.push(m);
                std.push(var.sqrt());
            }
            Ok(Series { learner: learner.to_string(), t, mean, std })
        })
        .collect()
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope_fit(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs[..n].iter().zip(&ys[..n]).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs[..n].iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Points `(x, mean, std)` of a series on the given axes, thinned to at most
/// `max_points` roughly evenly spaced in x.
pub fn project(series: &Series, axes: Axes, max_points: usize) -> Vec<(f64, f64, f64)> {
    let pts: Vec<(f64, f64, f64)> = series
        .t
        .iter()
        .zip(series.mean.iter().zip(&series.std))
        .filter_map(|(&t, (&m, &s))| axes.x(t).map(|x| (x, m, s)))
        .collect();
    let (Some(first), Some(last)) = (pts.first(), pts.last()) else {
        return pts;
    };
    let gap = (last.0 - first.0) / max_points.max(1) as f64;
    let mut out: Vec<(f64, f64, f64)> = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        let keep = match out.last() {
            None => true,
            Some(prev) => p.0 - prev.0 >= gap || i + 1 == pts.len(),
        };
        if keep {
            out.push(*p);
        }
    }
    out
}

/// Slope of the mean curve against the plot's x axis.
pub fn series_slope(series: &Series, axes: Axes) -> Option<f64> {
    let pts = project(series, axes, 2000);
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    slope_fit(&xs, &ys)
}

/// A dashed reference curve.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub label: String,
    pub points: Vec<(u64, f64)>,
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
const W: f64 = 900.0;
const H: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 290.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else {
        format!("{:.2}", v).trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

pub fn render_svg(series: &[Series], axes: Axes, bounds: &[BoundCurve]) -> String {
    let projected: Vec<Vec<(f64, f64, f64)>> = series.iter().map(|s| project(s, axes, 400)).collect();
    let bound_pts: Vec<Vec<(f64, f64)>> = bounds
        .iter()
        .map(|b| b.points.iter().filter_map(|&(t, y)| axes.x(t).map(|x| (x, y))).collect())
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, f64::NEG_INFINITY);
    for p in projected.iter().flatten() {
        x0 = x0.min(p.0);
        x1 = x1.max(p.0);
        y0 = y0.min(p.1 - p.2);
        y1 = y1.max(p.1 + p.2);
    }
    for p in bound_pts.iter().flatten() {
        x0 = x0.min(p.0);
        x1 = x1.max(p.0);
        y1 = y1.max(p.1);
    }
    if !x0.is_finite() {
        (x0, x1) = (0.0, 1.0);
    }
    if !y1.is_finite() {
        y1 = 1.0;
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#, TOP + ph, LEFT + pw, TOP + ph);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.2}" stroke="black"/>"#, TOP + ph);
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, sx(xv), TOP + ph + 18.0, tick_label(xv));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, sy(yv) + 4.0, tick_label(yv));
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, H - 10.0, axes.label());
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">cumulative regret</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    for (k, (ser, pts)) in series.iter().zip(&projected).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if pts.is_empty() {
            continue;
        }
        let mut band: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1 + p.2))).collect();
        band.extend(pts.iter().rev().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1 - p.2))));
        let _ = writeln!(s, r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#, band.join(" "));
        let line: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"><title>{}</title></polyline>"#, line.join(" "), ser.learner);
        let slope = series_slope(ser, axes).map(|m| format!("{m:.3}")).unwrap_or_else(|| "n/a".into());
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="3"/>"#, W - RIGHT + 10.0, W - RIGHT + 30.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{} (slope {slope})</text>"#, W - RIGHT + 36.0, ly + 4.0, ser.learner);
    }
    for (k, (b, pts)) in bounds.iter().zip(&bound_pts).enumerate() {
        if pts.is_empty() {
            continue;
        }
        let line: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="gray" stroke-dasharray="6 4"><title>{}</title></polyline>"#, line.join(" "), b.label);
        let ly = TOP + 10.0 + 18.0 * (series.len() + k) as f64;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" fill="gray">- - {} bound</text>"#, W - RIGHT + 10.0, ly + 4.0, b.label);
    }
    s.push_str("</svg>\n");
    s
}

/// Bound curves for every learner of `cfg` that has one, on the periods of `series`.
pub fn bound_curves(cfg: &ExperimentConfig, series: &[Series]) -> Result<Vec<BoundCurve>, CliError> {
    let instance = cfg.instance.build()?;
    let mut ts: Vec<u64> = series.iter().flat_map(|s| s.t.iter().copied()).collect();
    ts.sort_unstable();
    ts.dedup();
    if ts.len() > 400 {
        // geometric and linear samples so every axis mode gets coverage
        let last = *ts.last().expect("nonempty");
        let mut picked: Vec<u64> = (0..200).map(|i| ts[i * ts.len() / 200]).collect();
        let mut t = 1.0f64;
        while (t as u64) < last {
            picked.push(t as u64);
            t = (t * 1.05).max(t + 1.0);
        }
        picked.push(last);
        picked.sort_unstable();
        picked.dedup();
        ts = picked;
    }
    Ok(cfg
        .learner_kinds()
        .into_iter()
        .filter_map(|(label, kind)| {
            kind.regret_bound(&instance, 1)?;
            let points = ts.iter().filter_map(|&t| kind.regret_bound(&instance, t).filter(|b| b.is_finite()).map(|b| (t, b))).collect();
            Some(BoundCurve { label, points })
        })
        .collect())
}

/// `plot`: results CSV to SVG.
pub fn cmd_plot(input: &Path, out: &Path, axes: Axes, bound_config: Option<&Path>) -> Result<(), CliError> {
    let file = File::open(input).map_err(|e| CliError::io(input, e))?;
    let rows = read_results(std::io::BufReader::new(file), &input.display().to_string())?;
    let series = aggregate(&rows)?;
    let bounds = match bound_config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            bound_curves(&ExperimentConfig::parse(&text)?, &series)?
        }
        None => Vec::new(),
    };
    std::fs::write(out, render_svg(&series, axes, &bounds)).map_err(|e| CliError::io(out, e))
}
