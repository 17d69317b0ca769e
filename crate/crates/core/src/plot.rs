//! Static SVG charts.
//!
//! Output is a pure function of the [`PlotSpec`]: coordinates are printed
//! with two decimals and series are drawn in the order given, so identical
//! specs give byte-identical documents.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    Line,
    /// Grouped bars; x values index into `categories`.
    Bar,
    /// Several lines on a shared axis with a zero baseline.
    Overlay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesStyle {
    #[default]
    Line,
    Points,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    #[serde(default)]
    pub style: SeriesStyle,
}

impl PlotSeries {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
            style: SeriesStyle::Line,
        }
    }

    pub fn points(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
            style: SeriesStyle::Points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub kind: PlotKind,
    pub series: Vec<PlotSeries>,
    /// Bar labels, one per x index.
    #[serde(default)]
    pub categories: Vec<String>,
    /// Dashed vertical marker, e.g. the end of the observed sample.
    #[serde(default)]
    pub boundary: Option<(f64, String)>,
}

impl PlotSpec {
    pub fn new(kind: PlotKind, title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: String::new(),
            y_label: String::new(),
            kind,
            series: Vec::new(),
            categories: Vec::new(),
            boundary: None,
        }
    }

    pub fn labels(mut self, x: impl Into<String>, y: impl Into<String>) -> Self {
        self.x_label = x.into();
        self.y_label = y.into();
        self
    }

    pub fn with_series(mut self, s: PlotSeries) -> Self {
        self.series.push(s);
        self
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Tick label: up to four decimals, trailing zeros trimmed.
fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

#[derive(Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        if lo == hi {
            let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
            Self {
                lo: lo - pad,
                hi: hi + pad,
            }
        } else {
            Self { lo, hi }
        }
    }

    fn include(self, v: f64) -> Self {
        Self {
            lo: self.lo.min(v),
            hi: self.hi.max(v),
        }
    }

    fn frac(&self, v: f64) -> f64 {
        (v - self.lo) / (self.hi - self.lo)
    }
}

struct Frame {
    x: Range,
    y: Range,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + self.x.frac(x) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - self.y.frac(y) * (HEIGHT - TOP - BOTTOM)
    }
}

fn check(spec: &PlotSpec) -> Result<()> {
    if spec.series.is_empty() || spec.series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::EmptyPlot);
    }
    for s in &spec.series {
        if s.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidSeries {
                key: s.label.clone(),
                reason: "non-finite plot coordinate".into(),
            });
        }
    }
    Ok(())
}

/// Renders a standalone SVG document.
pub fn render_svg(spec: &PlotSpec) -> Result<String> {
    check(spec)?;
    let all = || spec.series.iter().flat_map(|s| s.points.iter());
    let bar = spec.kind == PlotKind::Bar;

    let mut x = Range::of(all().map(|p| p.0));
    if let Some((b, _)) = &spec.boundary {
        x = x.include(*b);
    }
    if bar {
        let n = spec.categories.len().max(x.hi as usize + 1) as f64;
        x = Range { lo: -0.5, hi: n - 0.5 };
    }
    let mut y = Range::of(all().map(|p| p.1));
    if bar || spec.kind == PlotKind::Overlay {
        y = y.include(0.0);
    }
    let f = Frame { x, y };

    let mut svg = String::new();
    let w = |svg: &mut String, s: String| {
        svg.push_str(&s);
        svg.push('\n');
    };
    w(
        &mut svg,
        format!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
        ),
    );
    w(&mut svg, format!(r#"<title>{}</title>"#, escape(&spec.title)));
    w(
        &mut svg,
        format!(r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#),
    );
    w(
        &mut svg,
        format!(
            r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
            (LEFT + WIDTH - RIGHT) / 2.0,
            escape(&spec.title)
        ),
    );
    axes(&mut svg, spec, &f);

    if spec.kind == PlotKind::Overlay && f.y.lo < 0.0 {
        let zy = f.py(0.0);
        w(
            &mut svg,
            format!(
                r##"<line class="baseline" x1="{LEFT:.2}" y1="{zy:.2}" x2="{:.2}" y2="{zy:.2}" stroke="#999" stroke-dasharray="2,2"/>"##,
                WIDTH - RIGHT
            ),
        );
    }

    let nseries = spec.series.len() as f64;
    for (i, s) in spec.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let label = escape(&s.label);
        if bar {
            let slot = (f.px(1.0) - f.px(0.0)) * 0.8;
            let bw = slot / nseries;
            let base = f.py(0.0_f64.max(f.y.lo));
            w(&mut svg, format!(r#"<g class="series" data-label="{label}" fill="{color}">"#));
            for &(cx, cy) in &s.points {
                let left = f.px(cx) - slot / 2.0 + bw * i as f64;
                let top = f.py(cy).min(base);
                let h = (f.py(cy) - base).abs();
                w(
                    &mut svg,
                    format!(r#"<rect x="{left:.2}" y="{top:.2}" width="{bw:.2}" height="{h:.2}"/>"#),
                );
            }
            svg.push_str("</g>\n");
            continue;
        }
        match s.style {
            SeriesStyle::Line => {
                let mut pts = String::new();
                for (k, &(px, py)) in s.points.iter().enumerate() {
                    if k > 0 {
                        pts.push(' ');
                    }
                    let _ = write!(pts, "{:.2},{:.2}", f.px(px), f.py(py));
                }
                w(
                    &mut svg,
                    format!(
                        r#"<polyline class="series" data-label="{label}" fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>"#
                    ),
                );
            }
            SeriesStyle::Points => {
                w(&mut svg, format!(r#"<g class="series" data-label="{label}" fill="{color}">"#));
                for &(px, py) in &s.points {
                    w(
                        &mut svg,
                        format!(r#"<circle cx="{:.2}" cy="{:.2}" r="3"/>"#, f.px(px), f.py(py)),
                    );
                }
                svg.push_str("</g>\n");
            }
        }
    }

    if let Some((bx, text)) = &spec.boundary {
        let px = f.px(*bx);
        w(
            &mut svg,
            format!(
                r##"<line class="boundary" x1="{px:.2}" y1="{TOP:.2}" x2="{px:.2}" y2="{:.2}" stroke="#444" stroke-dasharray="6,4"/>"##,
                HEIGHT - BOTTOM
            ),
        );
        w(
            &mut svg,
            format!(
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                px + 4.0,
                TOP + 12.0,
                escape(text)
            ),
        );
    }

    legend(&mut svg, spec);
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn axes(svg: &mut String, spec: &PlotSpec, f: &Frame) {
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="black"><line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/><line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/></g>"#
    );
    svg.push_str("<g class=\"ticks\">\n");
    for k in 0..=TICKS {
        let v = f.y.lo + (f.y.hi - f.y.lo) * k as f64 / TICKS as f64;
        let py = f.py(v);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            py + 4.0,
            tick_label(v)
        );
    }
    if spec.kind == PlotKind::Bar {
        for (i, c) in spec.categories.iter().enumerate() {
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                f.px(i as f64),
                y0 + 16.0,
                escape(c)
            );
        }
    } else {
        for k in 0..=TICKS {
            let v = f.x.lo + (f.x.hi - f.x.lo) * k as f64 / TICKS as f64;
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                f.px(v),
                y0 + 16.0,
                tick_label(v)
            );
        }
    }
    svg.push_str("</g>\n");
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 16.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(&spec.y_label)
    );
}

fn legend(svg: &mut String, spec: &PlotSpec) {
    let x = WIDTH - RIGHT + 16.0;
    svg.push_str("<g class=\"legend\">\n");
    for (i, s) in spec.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = TOP + 10.0 + 20.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.2}" y="{:.2}" width="12" height="12" fill="{color}"/><text class="legend-entry" x="{:.2}" y="{:.2}">{}</text>"#,
            y - 10.0,
            x + 18.0,
            y,
            escape(&s.label)
        );
    }
    svg.push_str("</g>\n");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(svg: &str) -> roxmltree::Document<'_> {
        roxmltree::Document::parse(svg).expect("well-formed svg")
    }

    #[test]
    fn single_line_has_three_pairs() {
        let spec = PlotSpec::new(PlotKind::Line, "GDP")
            .with_series(PlotSeries::line("CHN", vec![(2000.0, 1.0), (2001.0, 2.0), (2002.0, 4.0)]));
        let svg = render_svg(&spec).unwrap();
        let d = doc(&svg);
        let lines: Vec<_> = d.descendants().filter(|n| n.has_tag_name("polyline")).collect();
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].attribute("points").unwrap().split(' ').count(), 3);
        assert!(d.root_element().attribute("viewBox").is_some());
    }

    #[test]
    fn overlay_has_two_legend_entries() {
        let spec = PlotSpec::new(PlotKind::Overlay, "impact")
            .with_series(PlotSeries::line("GGDP", vec![(1.0, 2.0), (2.0, -1.0)]))
            .with_series(PlotSeries::line("CO2 <kt>", vec![(1.0, 0.5), (2.0, 0.7)]));
        let svg = render_svg(&spec).unwrap();
        let d = doc(&svg);
        let entries: Vec<_> = d
            .descendants()
            .filter(|n| n.attribute("class") == Some("legend-entry"))
            .map(|n| n.text().unwrap().to_string())
            .collect();
        assert_eq!(entries, vec!["GGDP", "CO2 <kt>"]);
    }

    #[test]
    fn deterministic() {
        let spec = PlotSpec::new(PlotKind::Bar, "grades")
            .with_series(PlotSeries::line("grade", vec![(0.0, 0.9), (1.0, 0.7)]));
        let spec = PlotSpec {
            categories: vec!["GDP".into(), "CPI".into()],
            ..spec
        };
        let a = render_svg(&spec).unwrap();
        assert_eq!(a, render_svg(&spec).unwrap());
        let d = doc(&a);
        assert_eq!(d.descendants().filter(|n| n.has_tag_name("rect")).count(), 2 + 1 + 1);
    }

    #[test]
    fn boundary_and_points() {
        let mut spec = PlotSpec::new(PlotKind::Line, "forecast")
            .with_series(PlotSeries::points("observed", vec![(1.0, 1.0), (2.0, 2.0)]))
            .with_series(PlotSeries::line("model", vec![(1.0, 1.0), (2.0, 2.1), (3.0, 3.0)]));
        spec.boundary = Some((2.0, "forecast".into()));
        let svg = render_svg(&spec).unwrap();
        let d = doc(&svg);
        assert_eq!(d.descendants().filter(|n| n.has_tag_name("circle")).count(), 2);
        assert!(d.descendants().any(|n| n.attribute("class") == Some("boundary")));
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(
            render_svg(&PlotSpec::new(PlotKind::Line, "x")),
            Err(Error::EmptyPlot)
        ));
        let spec = PlotSpec::new(PlotKind::Line, "x")
            .with_series(PlotSeries::line("a", vec![(0.0, f64::NAN)]));
        assert!(render_svg(&spec).is_err());
    }
}
