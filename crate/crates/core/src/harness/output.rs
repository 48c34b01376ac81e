use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::run::{AggregateSummary, CsvRow, ExperimentOutput};
use crate::error::Result;

pub const TRACE_HEADER: &str =
    "experiment_id,seed,t,eta,f_gap_last,f_gap_avg,dist_to_opt,S2,Q,theta_norm,check_violations";

/// Writes the per-step rows of every run; rows are grouped by seed in
/// seed-list order, so the file does not depend on thread scheduling.
pub fn write_trace_csv<W: Write>(out: W, experiments: &[ExperimentOutput]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut wrote = false;
    for e in experiments {
        for r in &e.runs {
            for row in &r.rows {
                w.serialize(row)?;
                wrote = true;
            }
        }
    }
    if !wrote {
        w.write_record(TRACE_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(serde::Serialize)]
struct SummaryRow<'a> {
    experiment_id: &'a str,
    problem: &'a str,
    dim: usize,
    r: f64,
    schedule: &'a str,
    #[serde(rename = "G")]
    g: f64,
    alpha: f64,
    sigma: f64,
    #[serde(rename = "T")]
    horizon: u64,
    seeds: usize,
    gap_avg_mean: f64,
    gap_avg_median: f64,
    gap_avg_stderr: f64,
    gap_last_mean: f64,
    gap_last_median: f64,
    gap_last_stderr: f64,
    dist_mean: f64,
    dist_median: f64,
    dist_stderr: f64,
    max_s: f64,
    max_q: f64,
    max_key_term: f64,
    trace_bound_violations: u64,
    theorem2_bound: f64,
    theorem3_bound: f64,
}

/// One row per configuration, including the theorem bound columns.
pub fn write_summary_csv<W: Write>(out: W, experiments: &[ExperimentOutput]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for e in experiments {
        let c = &e.config;
        let a: &AggregateSummary = &e.aggregate;
        w.serialize(SummaryRow {
            experiment_id: &c.experiment_id,
            problem: c.problem.name(),
            dim: c.dim,
            r: c.r,
            schedule: c.schedule.as_str(),
            g: c.g_bound()?,
            alpha: c.alpha,
            sigma: c.sigma,
            horizon: c.horizon,
            seeds: a.seeds,
            gap_avg_mean: a.gap_avg.mean,
            gap_avg_median: a.gap_avg.median,
            gap_avg_stderr: a.gap_avg.stderr,
            gap_last_mean: a.gap_last.mean,
            gap_last_median: a.gap_last.median,
            gap_last_stderr: a.gap_last.stderr,
            dist_mean: a.dist_last.mean,
            dist_median: a.dist_last.median,
            dist_stderr: a.dist_last.stderr,
            max_s: a.max_s,
            max_q: a.max_q,
            max_key_term: a.max_key_term,
            trace_bound_violations: a.trace_bound_violations,
            theorem2_bound: a.theorem2_bound,
            theorem3_bound: a.theorem3_bound,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Mean over seeds of `(f_gap_avg, f_gap_last)` at each recorded step.
pub fn mean_curves(e: &ExperimentOutput) -> Vec<(u64, f64, f64)> {
    let n = e.runs.len() as f64;
    let Some(first) = e.runs.first() else { return Vec::new() };
    first
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let (sa, sl) = e.runs.iter().fold((0.0, 0.0), |(a, l), r| {
                let rr: &CsvRow = &r.rows[i];
                (a + rr.f_gap_avg, l + rr.f_gap_last)
            });
            (row.t, sa / n, sl / n)
        })
        .collect()
}

/// Log-log line plot of mean gaps against `t`, as a standalone SVG.
pub fn render_svg(title: &str, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const M: f64 = 60.0;
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, s)| s.iter().copied())
        .filter(|&(x, y)| x > 0.0 && y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    if pts.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let (x0, x1) = (x0.floor(), x1.ceil().max(x0.floor() + 1.0));
    let (y0, y1) = (y0.floor(), y1.ceil().max(y0.floor() + 1.0));
    let px = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let py = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let _ = writeln!(
        svg,
        r#"<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * M,
        H - 2.0 * M
    );
    for k in (x0 as i32)..=(x1 as i32) {
        let x = px(k as f64);
        let _ = writeln!(svg, r##"<line x1="{x:.1}" y1="{M}" x2="{x:.1}" y2="{:.1}" stroke="#ddd"/>"##, H - M);
        let _ = writeln!(svg, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">1e{k}</text>"#, H - M + 16.0);
    }
    for k in (y0 as i32)..=(y1 as i32) {
        let y = py(k as f64);
        let _ = writeln!(svg, r##"<line x1="{M}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##, W - M);
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{k}</text>"#, M - 6.0, y + 4.0);
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#, W / 2.0, H - 20.0);
    for (i, (label, s)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = s
            .iter()
            .filter(|&&(x, y)| x > 0.0 && y > 0.0 && y.is_finite())
            .map(|&(x, y)| format!("{:.1},{:.1}", px(x.log10()), py(y.log10())))
            .collect();
        if !path.is_empty() {
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
        }
        let ly = M + 16.0 + 16.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{ly:.1}" fill="{color}" text-anchor="end">{}</text>"#,
            W - M - 8.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `trace.csv`, `summary.csv` and, when asked, `plot.svg` into `dir`.
pub fn write_outputs(dir: &Path, experiments: &[ExperimentOutput], plot: bool) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_trace_csv(fs::File::create(dir.join("trace.csv"))?, experiments)?;
    write_summary_csv(fs::File::create(dir.join("summary.csv"))?, experiments)?;
    if plot {
        let mut series = Vec::new();
        let mut labels = Vec::new();
        for e in experiments {
            labels.push((format!("{} avg", e.config.experiment_id), format!("{} last", e.config.experiment_id)));
        }
        for (e, (la, ll)) in experiments.iter().zip(&labels) {
            let curves = mean_curves(e);
            series.push((la.as_str(), curves.iter().map(|c| (c.0 as f64, c.1)).collect()));
            series.push((ll.as_str(), curves.iter().map(|c| (c.0 as f64, c.2)).collect()));
        }
        fs::write(dir.join("plot.svg"), render_svg("mean suboptimality gap", &series))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_experiment, ExperimentConfig};
    use crate::problems::ProblemKind;

    fn small() -> ExperimentOutput {
        let mut c = ExperimentConfig::new(ProblemKind::PseudoHuber, 2, 3.0, 0.75, 0.2, 100);
        c.seeds = vec![1, 2];
        run_experiment(&c, Some(2)).unwrap()
    }

    #[test]
    fn trace_csv_has_exact_header() {
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &[small()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), TRACE_HEADER);
        // powers of two up to 64, plus 100, for two seeds
        assert_eq!(text.lines().count(), 1 + 2 * 8);
        let mut empty = Vec::new();
        write_trace_csv(&mut empty, &[]).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().trim_end(), TRACE_HEADER);
    }

    #[test]
    fn summary_csv_has_bound_columns() {
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &[small()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
        assert!(header.contains(&"theorem2_bound") && header.contains(&"theorem3_bound"));
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn svg_is_well_formed() {
        let e = small();
        let curves = mean_curves(&e);
        assert_eq!(curves.len(), 8);
        let s = render_svg("a<b", &[("avg", curves.iter().map(|c| (c.0 as f64, c.1)).collect())]);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("polyline") && s.contains("a&lt;b"));
    }
}
