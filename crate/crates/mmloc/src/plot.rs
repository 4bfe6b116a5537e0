//! Self-contained SVG bar charts for power delay profiles and positioning
//! errors.

use std::fmt::Write;

use crate::dataset::EvaluationReport;
use crate::error::{Error, Result};
use crate::formats::PdpPoint;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 64.0;

/// Linear map from data values onto a pixel interval.
#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    step: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    /// Extends `[min, max]` outward to multiples of a 1/2/5 tick step.
    fn nice(min: f64, max: f64, px_lo: f64, px_hi: f64) -> Self {
        let span = if max > min { max - min } else { min.abs().max(1.0) };
        let raw = span / 6.0;
        let mag = 10f64.powf(raw.log10().floor());
        let norm = raw / mag;
        let step = mag
            * if norm < 1.5 {
                1.0
            } else if norm < 3.0 {
                2.0
            } else if norm < 7.0 {
                5.0
            } else {
                10.0
            };
        let lo = (min / step).floor() * step;
        let mut hi = (max / step).ceil() * step;
        if hi <= lo {
            hi = lo + step;
        }
        Self { lo, hi, step, px_lo, px_hi }
    }

    fn px(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn ticks(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step).round() as i64;
        (0..=n).map(|k| self.lo + k as f64 * self.step).collect()
    }

    fn label(&self, v: f64) -> String {
        let decimals = (-self.step.log10().floor()).max(0.0) as usize;
        let s = format!("{v:.decimals$}");
        if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
            s[1..].to_string()
        } else {
            s
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        concat!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
            "\n",
            r#"<rect width="{w}" height="{h}" fill="white"/>"#,
            "\n",
            r#"<text x="{cx}" y="20" text-anchor="middle" font-size="14">{t}</text>"#,
            "\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        cx = WIDTH / 2.0,
        t = escape(title)
    );
}

fn frame(out: &mut String, x_label: &str, y: &Axis, y_label: &str) {
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(out, r#"<line class="axis" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
    let _ = writeln!(out, r#"<line class="axis" x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    for v in y.ticks() {
        let py = y.px(v);
        let _ = writeln!(
            out,
            r##"<line x1="{a}" y1="{py}" x2="{x0}" y2="{py}" stroke="black"/><text class="ytick" data-value="{v}" x="{tx}" y="{ty}" text-anchor="end">{l}</text>"##,
            a = x0 - 5.0,
            tx = x0 - 8.0,
            ty = py + 4.0,
            l = y.label(v)
        );
    }
    let _ = writeln!(
        out,
        r#"<text class="xlabel" x="{cx}" y="{by}" text-anchor="middle">{xl}</text>"#,
        cx = (x0 + x1) / 2.0,
        by = HEIGHT - 12.0,
        xl = escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text class="ylabel" x="18" y="{cy}" text-anchor="middle" transform="rotate(-90 18 {cy})">{yl}</text>"#,
        cy = (y0 + y1) / 2.0,
        yl = escape(y_label)
    );
}

/// Stem chart of power (dBm) against delay (ns), one bar per bin.
pub fn pdp_svg(points: &[PdpPoint]) -> Result<String> {
    if points.is_empty() {
        return Err(Error::EmptyInput("power delay profile".into()));
    }
    let dmin = points.iter().map(|p| p.delay_ns).fold(f64::INFINITY, f64::min);
    let dmax = points.iter().map(|p| p.delay_ns).fold(f64::NEG_INFINITY, f64::max);
    let pmin = points.iter().map(|p| p.power_dbm).fold(f64::INFINITY, f64::min);
    let pmax = points.iter().map(|p| p.power_dbm).fold(f64::NEG_INFINITY, f64::max);
    let pad = ((dmax - dmin) * 0.05).max(1.0);
    let x = Axis::nice((dmin - pad).max(0.0), dmax + pad, LEFT, WIDTH - RIGHT);
    let y = Axis::nice(pmin - 10.0, pmax, HEIGHT - BOTTOM, TOP);

    let mut out = String::new();
    header(&mut out, "Power delay profile");
    frame(&mut out, "Delay (ns)", &y, "Power (dBm)");
    for v in x.ticks() {
        let px = x.px(v);
        let _ = writeln!(
            out,
            r#"<line x1="{px}" y1="{y0}" x2="{px}" y2="{y5}" stroke="black"/><text class="xtick" data-value="{v}" x="{px}" y="{ty}" text-anchor="middle">{l}</text>"#,
            y0 = HEIGHT - BOTTOM,
            y5 = HEIGHT - BOTTOM + 5.0,
            ty = HEIGHT - BOTTOM + 18.0,
            l = x.label(v)
        );
    }
    for p in points {
        let px = x.px(p.delay_ns);
        let _ = writeln!(
            out,
            r#"<line class="bar" data-delay-ns="{d}" data-power-dbm="{pw}" x1="{px}" y1="{yb}" x2="{px}" y2="{yt}" stroke="steelblue" stroke-width="3"/>"#,
            d = p.delay_ns,
            pw = p.power_dbm,
            yb = y.px(y.lo),
            yt = y.px(p.power_dbm)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Bar chart of positioning error per receiver; outliers are drawn in red.
pub fn errors_svg(report: &EvaluationReport) -> Result<String> {
    if report.per_rx.is_empty() {
        return Err(Error::EmptyInput("evaluation report".into()));
    }
    let emax = report.per_rx.iter().map(|r| r.error_m).fold(0.0, f64::max);
    let y = Axis::nice(0.0, if emax > 0.0 { emax } else { 1.0 }, HEIGHT - BOTTOM, TOP);
    let n = report.per_rx.len() as f64;
    let slot = (WIDTH - RIGHT - LEFT) / n;

    let mut out = String::new();
    header(&mut out, "Positioning error per receiver");
    frame(&mut out, "Receiver", &y, "Positioning error (m)");
    for (i, r) in report.per_rx.iter().enumerate() {
        let cx = LEFT + (i as f64 + 0.5) * slot;
        let top = y.px(r.error_m);
        let _ = writeln!(
            out,
            r#"<rect class="bar" data-rx="{id}" data-error-m="{e}" x="{x}" y="{top}" width="{w}" height="{h}" fill="{c}"/>"#,
            id = escape(&r.rx_id),
            e = r.error_m,
            x = cx - 0.35 * slot,
            w = 0.7 * slot,
            h = y.px(0.0) - top,
            c = if r.outlier { "firebrick" } else { "steelblue" }
        );
        let ty = HEIGHT - BOTTOM + 14.0;
        let _ = writeln!(
            out,
            r#"<text class="xtick" x="{cx}" y="{ty}" text-anchor="end" transform="rotate(-45 {cx} {ty})">{id}</text>"#,
            id = escape(&r.rx_id)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
