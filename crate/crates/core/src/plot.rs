//! Standalone SVG documents for prevalence plots and ROC curves.
//!
//! Geometry is part of the contract: the data area is emitted as
//! `<rect id="plot-area">` and every data vertex is an affine image of the
//! underlying value, so a consumer can map coordinates back to data space.
//! Output is byte-for-byte deterministic.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metrics::Probability;
use crate::roc::RocCurve;
use crate::sweep::PrevalenceCurve;

pub const FALSE_ALARM_ID: &str = "false-alarm-rate";
pub const MISSED_CASE_ID: &str = "missed-case-rate";
pub const MARKER_ID: &str = "prevalence-marker";
pub const PLOT_AREA_ID: &str = "plot-area";
pub const ROC_ID: &str = "roc-curve";
pub const DIAGONAL_ID: &str = "chance-diagonal";
pub const AUC_LABEL_ID: &str = "auc-annotation";

const FALSE_ALARM_COLOR: &str = "#c0392b";
const MISSED_CASE_COLOR: &str = "#2471a3";

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub width_px: u32,
    pub height_px: u32,
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub show_marker: bool,
    /// Label axes 0-100% instead of 0-1.
    pub percent_axes: bool,
}

impl PlotOptions {
    pub fn prevalence_default() -> Self {
        Self {
            width_px: 640,
            height_px: 420,
            title: "Misclassification rates by prevalence".to_string(),
            x_label: "Prevalence".to_string(),
            y_label: "Rate".to_string(),
            show_marker: true,
            percent_axes: true,
        }
    }

    pub fn roc_default() -> Self {
        Self {
            width_px: 480,
            height_px: 480,
            title: "ROC curve".to_string(),
            x_label: "False positive rate (1 - specificity)".to_string(),
            y_label: "True positive rate (sensitivity)".to_string(),
            show_marker: false,
            percent_axes: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.width_px < 100 || self.height_px < 100 {
            return Err(Error::InvalidPlotOptions(format!(
                "width and height must be at least 100 px, got {}x{}",
                self.width_px, self.height_px
            )));
        }
        Ok(())
    }
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self::prevalence_default()
    }
}

/// Pixel rectangle holding the unit square of data space.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn for_options(opts: &PlotOptions) -> Self {
        let (w, h) = (opts.width_px as f64, opts.height_px as f64);
        // margins shrink with small canvases so the data area never vanishes
        let left = (w * 0.14).min(72.0);
        let right = (w * 0.05).min(24.0);
        let top = (h * 0.12).min(48.0);
        let bottom = (h * 0.14).min(60.0);
        Self {
            left,
            top,
            width: w - left - right,
            height: h - top - bottom,
        }
    }

    fn x(&self, v: f64) -> f64 {
        self.left + v * self.width
    }

    fn y(&self, v: f64) -> f64 {
        self.top + (1.0 - v) * self.height
    }

    fn bottom(&self) -> f64 {
        self.top + self.height
    }

    fn right(&self) -> f64 {
        self.left + self.width
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn tick_label(v: f64, percent: bool) -> String {
    if percent {
        format!("{:.0}%", v * 100.0)
    } else {
        format!("{v:.1}")
    }
}

fn polyline_points(frame: &Frame, data: impl Iterator<Item = (f64, f64)>) -> String {
    let mut out = String::new();
    for (x, y) in data {
        if !out.is_empty() {
            out.push(' ');
        }
        let _ = write!(out, "{:.3},{:.3}", frame.x(x), frame.y(y));
    }
    out
}

fn open_document(buf: &mut String, opts: &PlotOptions, frame: &Frame) {
    let (w, h) = (opts.width_px, opts.height_px);
    let _ = writeln!(buf, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        buf,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="Helvetica, Arial, sans-serif" font-size="12">"#
    );
    let _ = writeln!(buf, "<title>{}</title>", escape(&opts.title));
    let _ = writeln!(buf, r##"<rect width="{w}" height="{h}" fill="#ffffff"/>"##);
    let _ = writeln!(
        buf,
        r##"<rect id="{PLOT_AREA_ID}" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="none" stroke="#333333"/>"##,
        frame.left, frame.top, frame.width, frame.height
    );
    let _ = writeln!(
        buf,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle" font-size="15">{}</text>"#,
        opts.width_px as f64 / 2.0,
        frame.top / 2.0 + 5.0,
        escape(&opts.title)
    );
}

fn draw_axes(buf: &mut String, opts: &PlotOptions, frame: &Frame) {
    let _ = writeln!(buf, r##"<g id="axes" stroke="#dddddd" stroke-width="1">"##);
    for i in 1..5 {
        let v = i as f64 / 5.0;
        let _ = writeln!(
            buf,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
            frame.left,
            frame.y(v),
            frame.right(),
            frame.y(v)
        );
        let _ = writeln!(
            buf,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
            frame.x(v),
            frame.top,
            frame.x(v),
            frame.bottom()
        );
    }
    let _ = writeln!(buf, "</g>");

    let _ = writeln!(buf, r##"<g id="tick-labels" fill="#333333">"##);
    for i in 0..=5 {
        let v = i as f64 / 5.0;
        let label = tick_label(v, opts.percent_axes);
        let _ = writeln!(
            buf,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{label}</text>"#,
            frame.x(v),
            frame.bottom() + 16.0
        );
        let _ = writeln!(
            buf,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{label}</text>"#,
            frame.left - 6.0,
            frame.y(v) + 4.0
        );
    }
    let _ = writeln!(buf, "</g>");

    let _ = writeln!(
        buf,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
        frame.left + frame.width / 2.0,
        frame.bottom() + 36.0,
        escape(&opts.x_label)
    );
    let cy = frame.top + frame.height / 2.0;
    let cx = (frame.left - 44.0).max(12.0);
    let _ = writeln!(
        buf,
        r#"<text x="{cx:.3}" y="{cy:.3}" text-anchor="middle" transform="rotate(-90 {cx:.3} {cy:.3})">{}</text>"#,
        escape(&opts.y_label)
    );
}

/// False-alarm and missed-case rates against prevalence, with an optional
/// vertical line at the marker prevalence.
///
/// Undefined values (e.g. the false alarm rate at prevalence 0 for a test
/// with perfect specificity) are left out of the polylines.
pub fn render_prevalence_plot(curve: &PrevalenceCurve, opts: &PlotOptions) -> Result<String> {
    if curve.points.len() < 2 {
        return Err(Error::EmptyCurve(curve.points.len()));
    }
    opts.validate()?;
    let frame = Frame::for_options(opts);
    let mut buf = String::new();
    open_document(&mut buf, opts, &frame);
    draw_axes(&mut buf, opts, &frame);

    let series = |f: fn(&crate::metrics::TranslatedPerformance) -> Option<Probability>| {
        polyline_points(
            &frame,
            curve
                .points
                .iter()
                .filter_map(move |pt| f(pt).map(|v| (pt.prevalence.value(), v.value()))),
        )
    };
    let _ = writeln!(
        buf,
        r#"<polyline id="{FALSE_ALARM_ID}" fill="none" stroke="{FALSE_ALARM_COLOR}" stroke-width="2" points="{}"/>"#,
        series(|pt| pt.false_alarm_rate)
    );
    let _ = writeln!(
        buf,
        r#"<polyline id="{MISSED_CASE_ID}" fill="none" stroke="{MISSED_CASE_COLOR}" stroke-width="2" points="{}"/>"#,
        series(|pt| pt.missed_case_rate)
    );

    if let (true, Some(marker)) = (opts.show_marker, curve.marker_prevalence) {
        let x = frame.x(marker.value());
        let _ = writeln!(
            buf,
            r##"<line id="{MARKER_ID}" x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{:.3}" stroke="#555555" stroke-width="1.5" stroke-dasharray="5,4"/>"##,
            frame.top,
            frame.bottom()
        );
        let _ = writeln!(
            buf,
            r##"<text x="{:.3}" y="{:.3}" fill="#555555">{}</text>"##,
            x + 4.0,
            frame.top + 14.0,
            tick_label_precise(marker.value(), opts.percent_axes)
        );
    }

    let lx = frame.right() - 150.0_f64.min(frame.width * 0.5);
    let ly = frame.top + frame.height * 0.5;
    let _ = writeln!(buf, r#"<g id="legend">"#);
    for (i, (color, label)) in [
        (FALSE_ALARM_COLOR, "False alarms"),
        (MISSED_CASE_COLOR, "Missed cases"),
    ]
    .iter()
    .enumerate()
    {
        let y = ly + i as f64 * 18.0;
        let _ = writeln!(
            buf,
            r#"<line x1="{lx:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="{color}" stroke-width="2"/>"#,
            lx + 22.0
        );
        let _ = writeln!(
            buf,
            r#"<text x="{:.3}" y="{:.3}">{label}</text>"#,
            lx + 28.0,
            y + 4.0
        );
    }
    let _ = writeln!(buf, "</g>");
    buf.push_str("</svg>\n");
    Ok(buf)
}

fn tick_label_precise(v: f64, percent: bool) -> String {
    if percent {
        let pct = v * 100.0;
        if (pct - pct.round()).abs() < 1e-9 {
            format!("{pct:.0}%")
        } else {
            format!("{pct:.1}%")
        }
    } else {
        format!("{v}")
    }
}

/// ROC polyline over the chance diagonal, annotated with the AUC (and its
/// interval when present).
pub fn render_roc_plot(roc: &RocCurve, opts: &PlotOptions) -> Result<String> {
    if roc.points.len() < 2 {
        return Err(Error::EmptyCurve(roc.points.len()));
    }
    opts.validate()?;
    let frame = Frame::for_options(opts);
    let mut buf = String::new();
    open_document(&mut buf, opts, &frame);
    draw_axes(&mut buf, opts, &frame);

    let _ = writeln!(
        buf,
        r##"<line id="{DIAGONAL_ID}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#999999" stroke-dasharray="4,4"/>"##,
        frame.x(0.0),
        frame.y(0.0),
        frame.x(1.0),
        frame.y(1.0)
    );
    let _ = writeln!(
        buf,
        r#"<polyline id="{ROC_ID}" fill="none" stroke="{MISSED_CASE_COLOR}" stroke-width="2" points="{}"/>"#,
        polyline_points(
            &frame,
            roc.points
                .iter()
                .map(|p| (p.false_positive_rate.value(), p.true_positive_rate.value()))
        )
    );

    let mut annotation = format!("AUC = {:.2}", roc.auc.value());
    if let Some(ci) = &roc.auc_ci {
        let _ = write!(
            annotation,
            " ({:.0}% CI: {:.2}, {:.2})",
            ci.confidence_level * 100.0,
            ci.lower.value(),
            ci.upper.value()
        );
    }
    let _ = writeln!(
        buf,
        r#"<text id="{AUC_LABEL_ID}" x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#,
        frame.right() - 8.0,
        frame.bottom() - 10.0,
        escape(&annotation)
    );
    let _ = writeln!(
        buf,
        r##"<text x="{:.3}" y="{:.3}" text-anchor="end" fill="#555555">n = {} diseased, {} healthy</text>"##,
        frame.right() - 8.0,
        frame.bottom() - 26.0,
        roc.n_diseased,
        roc.n_healthy
    );
    buf.push_str("</svg>\n");
    Ok(buf)
}
