//! Small deterministic SVG scatter plots with fitted lines. Coordinates are
//! printed at fixed precision and nothing depends on the clock, so equal
//! inputs give byte-identical files.

use std::fmt::Write as _;

use serde::Serialize;

use crate::integrability::JnProfile;
use crate::lelong::{LelongEstimate, SlopeFit};
use crate::oscillation::OscillationProfile;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 20.0, 40.0, 55.0); // left, right, top, bottom
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const TICKS: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error("nothing to plot")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Symmetric error bars, one per point.
    pub errors: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitLine {
    pub label: String,
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub lines: Vec<FitLine>,
}

#[derive(Serialize)]
struct Metadata<'a> {
    title: &'a str,
    lines: &'a [FitLine],
}

fn bounds(vals: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = vals.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        return None;
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1.0) };
    Some((lo - pad, hi + pad))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn to_svg(&self) -> Result<String, PlotError> {
        let pts = || self.series.iter().flat_map(|s| s.points.iter());
        if pts().next().is_none() {
            return Err(PlotError::Empty);
        }
        let (x0, x1) = bounds(pts().map(|p| p.0)).ok_or(PlotError::Empty)?;
        let ys = self.series.iter().flat_map(|s| {
            s.points.iter().enumerate().flat_map(move |(i, p)| {
                let e = s.errors.as_ref().map_or(0.0, |e| e[i]);
                [p.1 - e, p.1 + e]
            })
        });
        let (y0, y1) = bounds(ys).ok_or(PlotError::Empty)?;
        let (ml, mr, mt, mb) = MARGIN;
        let (pw, ph) = (WIDTH - ml - mr, HEIGHT - mt - mb);
        let sx = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| mt + (y1 - y) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
        let meta = serde_json::to_string(&Metadata { title: &self.title, lines: &self.lines }).expect("metadata serializes");
        let _ = writeln!(s, "<metadata>{}</metadata>", escape(&meta));
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(s, r##"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);
        let _ = writeln!(s, r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(&self.title));
        for k in 0..=TICKS {
            let f = k as f64 / TICKS as f64;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let (px, py) = (sx(xv), sy(yv));
            let _ = writeln!(s, r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#333"/>"##, mt + ph, mt + ph + 5.0);
            let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle" font-size="11">{xv:.3}</text>"#, mt + ph + 18.0);
            let _ = writeln!(s, r##"<line x1="{:.2}" y1="{py:.2}" x2="{ml}" y2="{py:.2}" stroke="#333"/>"##, ml - 5.0);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{yv:.3}</text>"#, ml - 8.0, py + 4.0);
        }
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13">{}</text>"#, ml + pw / 2.0, HEIGHT - 12.0, escape(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.1}" text-anchor="middle" font-size="13" transform="rotate(-90 16 {:.1})">{}</text>"#,
            mt + ph / 2.0,
            mt + ph / 2.0,
            escape(&self.y_label)
        );
        for (i, l) in self.lines.iter().enumerate() {
            let c = COLORS[i % COLORS.len()];
            let (ya, yb) = (l.intercept + l.slope * x0, l.intercept + l.slope * x1);
            if ya.is_finite() && yb.is_finite() {
                let _ = writeln!(
                    s,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{c}" stroke-dasharray="6 4"/>"#,
                    sx(x0),
                    sy(ya).clamp(mt, mt + ph),
                    sx(x1),
                    sy(yb).clamp(mt, mt + ph)
                );
            }
        }
        for (i, se) in self.series.iter().enumerate() {
            let c = COLORS[i % COLORS.len()];
            let _ = writeln!(s, r#"<g fill="{c}" stroke="{c}"><title>{}</title>"#, escape(&se.label));
            for (k, &(x, y)) in se.points.iter().enumerate() {
                if !(x.is_finite() && y.is_finite()) {
                    continue;
                }
                if let Some(e) = se.errors.as_ref().map(|e| e[k]).filter(|e| *e > 0.0) {
                    let _ = writeln!(s, r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}"/>"#, sx(x), sy(y - e), sy(y + e));
                }
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3"/>"#, sx(x), sy(y));
            }
            let _ = writeln!(s, "</g>");
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" font-size="11" fill="{c}">{}</text>"#, ml + 10.0, mt + 16.0 + 14.0 * i as f64, escape(&se.label));
        }
        s.push_str("</svg>\n");
        Ok(s)
    }
}

/// One ordinate sequence against `log r` with its least-squares line.
pub fn slope_plot(fit: &SlopeFit, label: &str) -> Plot {
    Plot {
        title: format!("{label} against log r"),
        x_label: "log r".into(),
        y_label: label.into(),
        series: vec![Series {
            label: label.into(),
            points: fit.t.iter().copied().zip(fit.values.iter().copied()).collect(),
            errors: Some(fit.stderr.clone()),
        }],
        lines: vec![FitLine { label: label.into(), slope: fit.slope, intercept: fit.intercept }],
    }
}

/// The three Lelong estimators with their fitted lines.
pub fn lelong_plot(est: &LelongEstimate) -> Plot {
    let mut p = Plot {
        title: format!("Lelong slopes at ({}), consensus {:.4}", est.center, est.consensus),
        x_label: "log r".into(),
        y_label: "mean / sup of φ".into(),
        series: Vec::new(),
        lines: Vec::new(),
    };
    for (name, fit) in est.fits() {
        let one = slope_plot(fit, name);
        p.series.extend(one.series);
        p.lines.extend(one.lines);
    }
    p
}

/// `ω(r)` against `log r`.
pub fn profile_plot(profile: &OscillationProfile) -> Plot {
    Plot {
        title: "worst mean oscillation".into(),
        x_label: "log r".into(),
        y_label: "ω(r)".into(),
        series: vec![Series {
            label: "ω(r)".into(),
            points: profile.radii.iter().map(|r| r.ln()).zip(profile.worst_mo.iter().copied()).collect(),
            errors: Some(profile.stderr.clone()),
        }],
        lines: Vec::new(),
    }
}

/// `log Λ(λ)` against `λ`, zero tails omitted, with the fitted decay.
pub fn jn_plot(p: &JnProfile) -> Plot {
    let points = p
        .lambdas
        .iter()
        .zip(&p.tail_fraction)
        .filter(|(_, t)| **t > 0.0)
        .map(|(l, t)| (*l, t.ln()))
        .collect();
    let lines = match (p.decay_rate, p.decay_intercept) {
        (Some(rate), Some(b)) => vec![FitLine { label: "fit".into(), slope: -rate, intercept: b }],
        _ => Vec::new(),
    };
    Plot {
        title: "tail of |φ - φ_B|".into(),
        x_label: "λ".into(),
        y_label: "log Λ(λ)".into(),
        series: vec![Series { label: "log Λ(λ)".into(), points, errors: None }],
        lines,
    }
}

/// Slope recorded for the line named `label` in an SVG produced here.
pub fn metadata_slope(svg: &str, label: &str) -> Option<f64> {
    let start = svg.find("<metadata>")? + "<metadata>".len();
    let end = svg.find("</metadata>")?;
    let json = svg[start..end].replace("&lt;", "<").replace("&gt;", ">").replace("&amp;", "&");
    let v: serde_json::Value = serde_json::from_str(&json).ok()?;
    v["lines"].as_array()?.iter().find(|l| l["label"] == label)?["slope"].as_f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_model::{Point, PshExpr};
    use crate::lelong::{lelong_at, RadiusGrid};

    #[test]
    fn single_point_profile() {
        let p = OscillationProfile {
            radii: vec![0.1],
            worst_mo: vec![0.3],
            stderr: vec![0.01],
            argmax: vec![Point::origin(1)],
            rows: Vec::new(),
        };
        let svg = profile_plot(&p).to_svg().unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn empty_plot_is_an_error() {
        let p = Plot { title: "x".into(), x_label: "a".into(), y_label: "b".into(), series: Vec::new(), lines: Vec::new() };
        assert!(matches!(p.to_svg(), Err(PlotError::Empty)));
    }

    #[test]
    fn log_slope_in_metadata_and_deterministic() {
        let f: PshExpr = "logabs(poly 1 0)".parse().unwrap();
        let grid = RadiusGrid::new(0.1, 10f64.powf(-0.5), 9).unwrap();
        let est = lelong_at(&f, &Point::origin(1), &grid, 2000, 4).unwrap();
        let svg = slope_plot(&est.sphere_mean, "sphere_mean").to_svg().unwrap();
        assert!((metadata_slope(&svg, "sphere_mean").unwrap() - 1.0).abs() < 1e-9);
        let again = lelong_at(&f, &Point::origin(1), &grid, 2000, 4).unwrap();
        assert_eq!(lelong_plot(&est).to_svg().unwrap(), lelong_plot(&again).to_svg().unwrap());
    }
}
