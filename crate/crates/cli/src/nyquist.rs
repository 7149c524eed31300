//! Nyquist curve samples with the secant circle `|z - γ/2| ≤ γ/2`.

use std::fmt::Write as _;

use num_complex::Complex64;
use secant_core::passivity::{hinf_gain, log_grid, secant_gain, PassivityError};
use secant_core::poly::RationalTransfer;

pub const GRID_POINTS: usize = 2000;
pub const GRID_LO: f64 = 1e-3;
pub const GRID_HI: f64 = 1e3;
const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;

/// Points outside the circle by more than this relative amount are marked.
const OUTSIDE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct NyquistData {
    /// `(ω, G(iω))` with strictly increasing `ω`.
    pub points: Vec<(f64, Complex64)>,
    /// Circle diameter; `None` when the secant gain is infinite.
    pub gamma: Option<f64>,
    /// Indices into `points` lying outside the circle.
    pub outside: Vec<usize>,
}

/// Samples the log grid on `[1e-3, 1e3]` plus every finite critical
/// frequency of the secant and H∞ gains.
pub fn nyquist_data(g: &RationalTransfer, gamma: Option<f64>) -> Result<NyquistData, PassivityError> {
    let sec = secant_gain(g)?;
    let hinf = hinf_gain(g)?;
    let mut omegas = log_grid(GRID_LO, GRID_HI, GRID_POINTS);
    omegas.extend(
        sec.candidates
            .iter()
            .chain(&hinf.candidates)
            .map(|c| c.0)
            .filter(|w| w.is_finite() && *w >= 0.0),
    );
    omegas.sort_by(f64::total_cmp);
    omegas.dedup_by(|a, b| *a <= *b);
    let gamma = gamma.or(sec.is_finite().then_some(sec.gamma)).filter(|g| *g > 0.0);
    let points: Vec<(f64, Complex64)> = omegas.iter().map(|&w| (w, g.freq_response(w))).collect();
    let outside = match gamma {
        Some(gm) => points
            .iter()
            .enumerate()
            .filter(|(_, (_, z))| (z - gm / 2.0).norm() > gm / 2.0 * (1.0 + OUTSIDE_TOL))
            .map(|(i, _)| i)
            .collect(),
        None => Vec::new(),
    };
    Ok(NyquistData { points, gamma, outside })
}

impl NyquistData {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("omega,re,im\n");
        for (w, z) in &self.points {
            let _ = writeln!(s, "{w},{},{}", z.re, z.im);
        }
        s
    }

    /// Self-contained 800×800 SVG with equal axis scaling. The curve for
    /// `ω ≥ 0` is solid, its mirror image for `ω ≤ 0` dashed, and points
    /// outside the circle are marked in red.
    pub fn to_svg(&self) -> String {
        let mut xs: Vec<f64> = vec![0.0];
        let mut ys: Vec<f64> = vec![0.0];
        for (_, z) in &self.points {
            xs.push(z.re);
            ys.push(z.im);
            ys.push(-z.im);
        }
        if let Some(g) = self.gamma {
            xs.extend([0.0, g]);
            ys.extend([-g / 2.0, g / 2.0]);
        }
        let (x0, x1) = bounds(&xs);
        let (y0, y1) = bounds(&ys);
        let span = ((x1 - x0).max(y1 - y0) * 1.1).max(1e-12);
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        let scale = (SIZE - 2.0 * MARGIN) / span;
        let px = |x: f64| MARGIN + (x - cx + span / 2.0) * scale;
        let py = |y: f64| MARGIN + (cy + span / 2.0 - y) * scale;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">
<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#
        );
        let _ = writeln!(
            s,
            r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#999" stroke-width="1"/>"##,
            px(cx - span / 2.0),
            py(0.0),
            px(cx + span / 2.0),
            py(0.0)
        );
        let _ = writeln!(
            s,
            r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#999" stroke-width="1"/>"##,
            px(0.0),
            py(cy - span / 2.0),
            px(0.0),
            py(cy + span / 2.0)
        );
        if let Some(g) = self.gamma {
            let _ = writeln!(
                s,
                r##"<circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="#2a7" stroke-width="2"/>"##,
                px(g / 2.0),
                py(0.0),
                g / 2.0 * scale
            );
        }
        let poly = |sign: f64| {
            self.points
                .iter()
                .map(|(_, z)| format!("{:.3},{:.3}", px(z.re), py(sign * z.im)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="#36c" stroke-width="1.5" stroke-dasharray="6,4"/>"##,
            poly(-1.0)
        );
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="#36c" stroke-width="2"/>"##,
            poly(1.0)
        );
        for &i in &self.outside {
            let z = self.points[i].1;
            let _ = writeln!(
                s,
                r##"<circle class="violation" cx="{:.3}" cy="{:.3}" r="3" fill="#d22"/>"##,
                px(z.re),
                py(z.im)
            );
        }
        let caption = match self.gamma {
            Some(g) => format!(
                "circle |z - {}| &lt;= {}, {} points outside",
                crate::format::num(g / 2.0),
                crate::format::num(g / 2.0),
                self.outside.len()
            ),
            None => "secant gain is infinite: no circle".to_string(),
        };
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN}" y="24" font-family="sans-serif" font-size="16">{caption}</text>"#
        );
        s.push_str("</svg>\n");
        s
    }
}

fn bounds(v: &[f64]) -> (f64, f64) {
    v.iter()
        .filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}
