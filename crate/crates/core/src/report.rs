//! Deterministic SVG rendering of the evaluation figures: grids of onset
//! error histograms, per-class heatmaps of mean/std boundary precision,
//! and vowel charts with dispersion ellipses.
//!
//! Everything here is pure (data in, bytes out) and deterministic: cell
//! colors come from fixed palettes indexed by declaration order, floats
//! are formatted through one shared helper, and no hash-ordered
//! containers are iterated. Identical inputs yield byte-identical SVG,
//! which is what makes snapshot tests meaningful.
//!
//! Each value drawn in a figure also lands in a `data-value` attribute
//! with full float precision, so tests (and downstream tooling) can check
//! that figures and tables were emitted from the same structures without
//! reverse-engineering the human-readable label formatting.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boundary::{DiffStats, HistogramResult, HISTOGRAM_RANGE_MS};
use crate::vowel::VowelEllipse;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("figure/data shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },
    #[error("invalid figure spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureKind {
    HistogramGrid,
    HeatmapMeans,
    HeatmapStds,
    VowelChart,
}

/// Size and palette options shared by all figure kinds.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FigureStyle {
    pub panel_width: f64,
    pub panel_height: f64,
    pub font_size: f64,
    /// Per-model colors, assigned by declaration (row) order.
    pub palette: Vec<String>,
}

impl Default for FigureStyle {
    fn default() -> Self {
        FigureStyle {
            panel_width: 180.0,
            panel_height: 120.0,
            font_size: 11.0,
            palette: DEFAULT_MODEL_PALETTE.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Fixed ordered model palette (ColorBrewer Dark2). Determinism matters
/// more than matching any publication's colors.
pub const DEFAULT_MODEL_PALETTE: [&str; 7] = [
    "#d95f02", "#7570b3", "#1b9e77", "#e7298a", "#66a61e", "#e6ab02", "#a6761d",
];

/// Layout contract for the grid figures. `rows` are always model tags;
/// `cols` are setting tags for histogram grids and natural-class labels
/// for heatmaps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FigureSpec {
    pub kind: FigureKind,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    #[serde(default)]
    pub styling: FigureStyle,
}

impl FigureSpec {
    pub fn new(kind: FigureKind, rows: Vec<String>, cols: Vec<String>) -> Result<Self, ReportError> {
        if rows.is_empty() || cols.is_empty() {
            return Err(ReportError::InvalidSpec(
                "rows and cols must be non-empty".into(),
            ));
        }
        Ok(FigureSpec { kind, rows, cols, styling: FigureStyle::default() })
    }

    fn validate(&self) -> Result<(), ReportError> {
        if self.rows.is_empty() || self.cols.is_empty() {
            return Err(ReportError::InvalidSpec(
                "rows and cols must be non-empty".into(),
            ));
        }
        Ok(())
    }
}

/// Escape a string for use in XML text nodes and attribute values.
pub fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
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

/// Human-readable numeric label: integers render bare ("3", "-12"),
/// everything else keeps one decimal.
pub fn fmt_label(v: f64) -> String {
    if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round() as i64)
    } else {
        format!("{v:.1}")
    }
}

/// Fixed-precision coordinate formatting so layout math never leaks
/// 17-digit floats into the output.
fn fmt_coord(v: f64) -> String {
    let s = format!("{v:.2}");
    // Normalize negative zero so identical layouts are byte-identical.
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

struct Svg {
    buf: String,
}

impl Svg {
    fn new(width: f64, height: f64, meta: &[(&str, String)]) -> Svg {
        let mut buf = String::new();
        buf.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            buf,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
             viewBox=\"0 0 {} {}\" font-family=\"sans-serif\">",
            fmt_coord(width),
            fmt_coord(height),
            fmt_coord(width),
            fmt_coord(height),
        );
        // Figure metadata block: documents the conventions baked into this
        // rendering. Comments must not contain "--".
        buf.push_str("<!--\n");
        for (k, v) in meta {
            let safe = v.replace("--", "==");
            let _ = writeln!(buf, "  {k}: {safe}");
        }
        buf.push_str("-->\n");
        Svg { buf }
    }

    fn finish(mut self) -> Vec<u8> {
        self.buf.push_str("</svg>\n");
        self.buf.into_bytes()
    }

    fn open_group(&mut self, attrs: &str) {
        let _ = writeln!(self.buf, "<g {attrs}>");
    }

    fn close_group(&mut self) {
        self.buf.push_str("</g>\n");
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, attrs: &str) {
        let _ = writeln!(
            self.buf,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" {attrs}/>",
            fmt_coord(x),
            fmt_coord(y),
            fmt_coord(w),
            fmt_coord(h),
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, attrs: &str) {
        let _ = writeln!(
            self.buf,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {attrs}/>",
            fmt_coord(x1),
            fmt_coord(y1),
            fmt_coord(x2),
            fmt_coord(y2),
        );
    }

    fn text(&mut self, x: f64, y: f64, attrs: &str, content: &str) {
        let _ = writeln!(
            self.buf,
            "<text x=\"{}\" y=\"{}\" {attrs}>{}</text>",
            fmt_coord(x),
            fmt_coord(y),
            attrs_then(content),
        );
    }

    fn ellipse(&mut self, cx: f64, cy: f64, rx: f64, ry: f64, attrs: &str) {
        let _ = writeln!(
            self.buf,
            "<ellipse cx=\"{}\" cy=\"{}\" rx=\"{}\" ry=\"{}\" {attrs}/>",
            fmt_coord(cx),
            fmt_coord(cy),
            fmt_coord(rx),
            fmt_coord(ry),
        );
    }

    fn circle(&mut self, cx: f64, cy: f64, r: f64, attrs: &str) {
        let _ = writeln!(
            self.buf,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" {attrs}/>",
            fmt_coord(cx),
            fmt_coord(cy),
            fmt_coord(r),
        );
    }
}

fn attrs_then(content: &str) -> String {
    escape_xml(content)
}

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 45.0;
const PANEL_GAP: f64 = 12.0;

/// One panel per (model row, setting column). `results[r][c]` of `None`
/// (or a result with zero tokens) renders an explicit "no data" cell.
/// Panels annotate the excluded percentage top-left and the in-range
/// token count below it; the x-axis is shared and spans the histogram
/// range.
pub fn render_histogram_grid(
    results: &[Vec<Option<HistogramResult>>],
    spec: &FigureSpec,
) -> Result<Vec<u8>, ReportError> {
    spec.validate()?;
    let (nr, nc) = (spec.rows.len(), spec.cols.len());
    if results.len() != nr || results.iter().any(|row| row.len() != nc) {
        return Err(ReportError::ShapeMismatch {
            expected: format!("{nr}x{nc} result matrix"),
            got: format!(
                "{} rows of lengths [{}]",
                results.len(),
                results
                    .iter()
                    .map(|r| r.len().to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        });
    }
    let st = &spec.styling;
    let width = MARGIN_LEFT + nc as f64 * (st.panel_width + PANEL_GAP) - PANEL_GAP + MARGIN_RIGHT;
    let height =
        MARGIN_TOP + nr as f64 * (st.panel_height + PANEL_GAP) - PANEL_GAP + MARGIN_BOTTOM;
    let mut svg = Svg::new(
        width,
        height,
        &[
            ("figure", "histogram_grid".into()),
            ("rows", format!("models: {}", spec.rows.join(", "))),
            ("cols", format!("settings: {}", spec.cols.join(", "))),
            (
                "x_axis",
                format!(
                    "onset diff in ms, shared range [{}, {}]",
                    -HISTOGRAM_RANGE_MS, HISTOGRAM_RANGE_MS
                ),
            ),
            ("annotations", "top-left: excluded percentage; below: in-range token count".into()),
        ],
    );
    for (c, col) in spec.cols.iter().enumerate() {
        let x = MARGIN_LEFT + c as f64 * (st.panel_width + PANEL_GAP) + st.panel_width / 2.0;
        svg.text(
            x,
            MARGIN_TOP - 10.0,
            &format!(
                "text-anchor=\"middle\" font-size=\"{}\" font-weight=\"bold\"",
                fmt_coord(st.font_size)
            ),
            col,
        );
    }
    for (r, rowlab) in spec.rows.iter().enumerate() {
        let y = MARGIN_TOP + r as f64 * (st.panel_height + PANEL_GAP) + st.panel_height / 2.0;
        svg.text(
            MARGIN_LEFT - 8.0,
            y,
            &format!(
                "text-anchor=\"end\" dominant-baseline=\"middle\" font-size=\"{}\" \
                 font-weight=\"bold\"",
                fmt_coord(st.font_size)
            ),
            rowlab,
        );
    }
    for (r, row) in results.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            let x0 = MARGIN_LEFT + c as f64 * (st.panel_width + PANEL_GAP);
            let y0 = MARGIN_TOP + r as f64 * (st.panel_height + PANEL_GAP);
            svg.open_group(&format!(
                "class=\"panel\" data-model=\"{}\" data-setting=\"{}\"",
                escape_xml(&spec.rows[r]),
                escape_xml(&spec.cols[c]),
            ));
            svg.rect(
                x0,
                y0,
                st.panel_width,
                st.panel_height,
                "fill=\"white\" stroke=\"#888888\" stroke-width=\"0.5\"",
            );
            match cell {
                Some(h) if h.total_count > 0 => {
                    render_histogram_panel(&mut svg, h, x0, y0, st);
                }
                _ => {
                    svg.text(
                        x0 + st.panel_width / 2.0,
                        y0 + st.panel_height / 2.0,
                        &format!(
                            "text-anchor=\"middle\" dominant-baseline=\"middle\" \
                             font-size=\"{}\" fill=\"#999999\"",
                            fmt_coord(st.font_size)
                        ),
                        "no data",
                    );
                }
            }
            svg.close_group();
        }
    }
    // Shared x-axis labels under the bottom row.
    let y_axis = MARGIN_TOP + nr as f64 * (st.panel_height + PANEL_GAP) - PANEL_GAP + 14.0;
    for (c, _) in spec.cols.iter().enumerate() {
        let x0 = MARGIN_LEFT + c as f64 * (st.panel_width + PANEL_GAP);
        for tick in [-HISTOGRAM_RANGE_MS, 0.0, HISTOGRAM_RANGE_MS] {
            let fx = x0 + (tick + HISTOGRAM_RANGE_MS) / (2.0 * HISTOGRAM_RANGE_MS) * st.panel_width;
            svg.text(
                fx,
                y_axis,
                &format!(
                    "text-anchor=\"middle\" font-size=\"{}\"",
                    fmt_coord(st.font_size - 2.0)
                ),
                &fmt_label(tick),
            );
        }
        svg.text(
            x0 + st.panel_width / 2.0,
            y_axis + 16.0,
            &format!("text-anchor=\"middle\" font-size=\"{}\"", fmt_coord(st.font_size - 1.0)),
            "onset diff (ms)",
        );
    }
    Ok(svg.finish())
}

fn render_histogram_panel(svg: &mut Svg, h: &HistogramResult, x0: f64, y0: f64, st: &FigureStyle) {
    let max_count = h.counts.iter().copied().max().unwrap_or(0).max(1) as f64;
    let nbins = h.counts.len() as f64;
    let bar_w = st.panel_width / nbins;
    let plot_h = st.panel_height - 4.0;
    for (i, &count) in h.counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let bh = count as f64 / max_count * plot_h;
        svg.rect(
            x0 + i as f64 * bar_w,
            y0 + st.panel_height - bh,
            bar_w,
            bh,
            &format!("fill=\"#4477aa\" data-bin=\"{i}\" data-value=\"{count}\""),
        );
    }
    // Zero line for orientation (center of the [-5, 5] bin).
    let zero_x = x0 + st.panel_width / 2.0;
    svg.line(
        zero_x,
        y0,
        zero_x,
        y0 + st.panel_height,
        "stroke=\"#cc3311\" stroke-width=\"0.6\" stroke-dasharray=\"3 2\"",
    );
    svg.text(
        x0 + 4.0,
        y0 + st.font_size + 2.0,
        &format!(
            "class=\"excluded-pct\" font-size=\"{}\" data-value=\"{}\"",
            fmt_coord(st.font_size),
            h.excluded_pct
        ),
        &format!("{:.1}%", h.excluded_pct),
    );
    svg.text(
        x0 + 4.0,
        y0 + 2.0 * st.font_size + 5.0,
        &format!(
            "class=\"token-count\" font-size=\"{}\" data-value=\"{}\"",
            fmt_coord(st.font_size),
            h.in_range_count
        ),
        &h.in_range_count.to_string(),
    );
}

/// Linear interpolation between two sRGB hex colors.
fn lerp_color(a: (u8, u8, u8), b: (u8, u8, u8), t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let ch = |x: u8, y: u8| (x as f64 + (y as f64 - x as f64) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", ch(a.0, b.0), ch(a.1, b.1), ch(a.2, b.2))
}

const DIVERGING_LO: (u8, u8, u8) = (0x21, 0x66, 0xac); // blue
const DIVERGING_MID: (u8, u8, u8) = (0xf7, 0xf7, 0xf7); // near-white
const DIVERGING_HI: (u8, u8, u8) = (0xb2, 0x18, 0x2b); // red
const SEQUENTIAL_LO: (u8, u8, u8) = (0xf7, 0xfb, 0xff); // lightest blue
const SEQUENTIAL_HI: (u8, u8, u8) = (0x08, 0x30, 0x6b); // darkest blue

/// Diverging palette centered at zero, scaled to the largest |value|.
fn diverging_color(v: f64, max_abs: f64) -> String {
    if max_abs <= 0.0 {
        return lerp_color(DIVERGING_MID, DIVERGING_MID, 0.0);
    }
    let t = (v / max_abs).clamp(-1.0, 1.0);
    if t < 0.0 {
        lerp_color(DIVERGING_MID, DIVERGING_LO, -t)
    } else {
        lerp_color(DIVERGING_MID, DIVERGING_HI, t)
    }
}

/// Sequential palette from lightest (0) to darkest (max).
fn sequential_color(v: f64, max: f64) -> String {
    if max <= 0.0 {
        return lerp_color(SEQUENTIAL_LO, SEQUENTIAL_HI, 0.0);
    }
    lerp_color(SEQUENTIAL_LO, SEQUENTIAL_HI, (v / max).clamp(0.0, 1.0))
}

/// Perceived luminance, for flipping label color on dark cells.
fn luminance(hex: &str) -> f64 {
    let b = u32::from_str_radix(&hex[1..], 16).unwrap_or(0xffffff);
    let (r, g, bl) = ((b >> 16) & 0xff, (b >> 8) & 0xff, b & 0xff);
    0.299 * r as f64 + 0.587 * g as f64 + 0.114 * bl as f64
}

/// Heatmap of per-class boundary statistics: rows are models (spec.rows),
/// columns are natural classes (spec.cols). `HeatmapMeans` reads
/// `mean_ms` and uses a diverging palette centered at 0; `HeatmapStds`
/// reads `std_ms` and uses a sequential palette. A missing (model, class)
/// combination renders a neutral cell; a duplicate is a shape error.
pub fn render_heatmap(stats: &[DiffStats], spec: &FigureSpec) -> Result<Vec<u8>, ReportError> {
    spec.validate()?;
    let pick = |s: &DiffStats| match spec.kind {
        FigureKind::HeatmapMeans => s.mean_ms,
        FigureKind::HeatmapStds => s.std_ms,
        _ => f64::NAN,
    };
    if !matches!(spec.kind, FigureKind::HeatmapMeans | FigureKind::HeatmapStds) {
        return Err(ReportError::InvalidSpec(
            "heatmap rendering requires a heatmap figure kind".into(),
        ));
    }
    let (nr, nc) = (spec.rows.len(), spec.cols.len());
    let mut grid: Vec<Vec<Option<f64>>> = vec![vec![None; nc]; nr];
    for s in stats {
        let Some(r) = spec.rows.iter().position(|m| *m == s.key.model) else {
            return Err(ReportError::ShapeMismatch {
                expected: format!("models limited to [{}]", spec.rows.join(", ")),
                got: s.key.model.clone(),
            });
        };
        let Some(c) = spec.cols.iter().position(|k| *k == s.key.class) else {
            return Err(ReportError::ShapeMismatch {
                expected: format!("classes limited to [{}]", spec.cols.join(", ")),
                got: s.key.class.clone(),
            });
        };
        if grid[r][c].is_some() {
            return Err(ReportError::ShapeMismatch {
                expected: "one value per (class, model) cell".into(),
                got: format!("duplicate entry for ({}, {})", s.key.class, s.key.model),
            });
        }
        grid[r][c] = Some(pick(s));
    }
    let scale_max = grid
        .iter()
        .flatten()
        .flatten()
        .fold(0.0f64, |m, &v| m.max(v.abs()));

    let cell_w: f64 = 72.0;
    let cell_h: f64 = 34.0;
    let st = &spec.styling;
    let width = MARGIN_LEFT + nc as f64 * cell_w + MARGIN_RIGHT;
    let height = MARGIN_TOP + nr as f64 * cell_h + 20.0;
    let (kind_name, palette_doc) = match spec.kind {
        FigureKind::HeatmapMeans => (
            "heatmap_means",
            "diverging blue=white=red centered at 0, scaled to max |mean|",
        ),
        _ => ("heatmap_stds", "sequential light=dark blue from 0 to max std"),
    };
    let mut svg = Svg::new(
        width,
        height,
        &[
            ("figure", kind_name.into()),
            ("rows", format!("models: {}", spec.rows.join(", "))),
            ("cols", format!("classes: {}", spec.cols.join(", "))),
            ("palette", palette_doc.into()),
            ("units", "milliseconds".into()),
        ],
    );
    for (c, col) in spec.cols.iter().enumerate() {
        svg.text(
            MARGIN_LEFT + (c as f64 + 0.5) * cell_w,
            MARGIN_TOP - 8.0,
            &format!(
                "text-anchor=\"middle\" font-size=\"{}\" font-weight=\"bold\"",
                fmt_coord(st.font_size)
            ),
            col,
        );
    }
    for (r, rowlab) in spec.rows.iter().enumerate() {
        svg.text(
            MARGIN_LEFT - 8.0,
            MARGIN_TOP + (r as f64 + 0.5) * cell_h,
            &format!(
                "text-anchor=\"end\" dominant-baseline=\"middle\" font-size=\"{}\" \
                 font-weight=\"bold\"",
                fmt_coord(st.font_size)
            ),
            rowlab,
        );
    }
    for (r, row) in grid.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            let x = MARGIN_LEFT + c as f64 * cell_w;
            let y = MARGIN_TOP + r as f64 * cell_h;
            match *cell {
                Some(v) => {
                    let fill = match spec.kind {
                        FigureKind::HeatmapMeans => diverging_color(v, scale_max),
                        _ => sequential_color(v, scale_max),
                    };
                    let text_fill = if luminance(&fill) < 140.0 { "#ffffff" } else { "#000000" };
                    svg.rect(
                        x,
                        y,
                        cell_w,
                        cell_h,
                        &format!("fill=\"{fill}\" stroke=\"#888888\" stroke-width=\"0.5\""),
                    );
                    svg.text(
                        x + cell_w / 2.0,
                        y + cell_h / 2.0,
                        &format!(
                            "class=\"cell-value\" text-anchor=\"middle\" \
                             dominant-baseline=\"middle\" font-size=\"{}\" fill=\"{text_fill}\" \
                             data-model=\"{}\" data-class=\"{}\" data-value=\"{v}\"",
                            fmt_coord(st.font_size),
                            escape_xml(&spec.rows[r]),
                            escape_xml(&spec.cols[c]),
                        ),
                        &fmt_label(v),
                    );
                }
                None => {
                    svg.rect(
                        x,
                        y,
                        cell_w,
                        cell_h,
                        "fill=\"#eeeeee\" stroke=\"#888888\" stroke-width=\"0.5\"",
                    );
                    svg.text(
                        x + cell_w / 2.0,
                        y + cell_h / 2.0,
                        &format!(
                            "text-anchor=\"middle\" dominant-baseline=\"middle\" \
                             font-size=\"{}\" fill=\"#999999\"",
                            fmt_coord(st.font_size)
                        ),
                        "\u{2013}",
                    );
                }
            }
        }
    }
    Ok(svg.finish())
}

const CHART_SIZE: f64 = 480.0;
const CHART_MARGIN: f64 = 60.0;

/// Vowel chart in the standard phonetic orientation: F2 on the x-axis
/// decreasing rightward, F1 on the y-axis decreasing upward. Model
/// ellipses are colored from the fixed palette by order of first
/// appearance; gold ellipses are black and solid. An ellipse built from
/// fewer than two tokens has zero semi-axes and renders as a glyph-only
/// marker.
pub fn render_vowel_chart(ellipses: &[VowelEllipse], gold: &[VowelEllipse]) -> Vec<u8> {
    // Axis ranges padded around all centers and extents.
    let mut f1_min = f64::INFINITY;
    let mut f1_max = f64::NEG_INFINITY;
    let mut f2_min = f64::INFINITY;
    let mut f2_max = f64::NEG_INFINITY;
    for e in ellipses.iter().chain(gold) {
        f2_min = f2_min.min(e.center.0 - e.semi_axes.0);
        f2_max = f2_max.max(e.center.0 + e.semi_axes.0);
        f1_min = f1_min.min(e.center.1 - e.semi_axes.1);
        f1_max = f1_max.max(e.center.1 + e.semi_axes.1);
    }
    if !f1_min.is_finite() {
        (f1_min, f1_max, f2_min, f2_max) = (200.0, 1000.0, 500.0, 3000.0);
    }
    let pad1 = ((f1_max - f1_min) * 0.1).max(50.0);
    let pad2 = ((f2_max - f2_min) * 0.1).max(50.0);
    f1_min -= pad1;
    f1_max += pad1;
    f2_min -= pad2;
    f2_max += pad2;

    let plot = CHART_SIZE - 2.0 * CHART_MARGIN;
    // High F2 at the left edge, high F1 at the bottom edge.
    let sx = |f2: f64| CHART_MARGIN + (f2_max - f2) / (f2_max - f2_min) * plot;
    let sy = |f1: f64| CHART_MARGIN + (f1 - f1_min) / (f1_max - f1_min) * plot;

    let mut models: Vec<&str> = Vec::new();
    for e in ellipses {
        if !models.contains(&e.model.as_str()) {
            models.push(&e.model);
        }
    }
    let mut svg = Svg::new(
        CHART_SIZE,
        CHART_SIZE,
        &[
            ("figure", "vowel_chart".into()),
            ("x_axis", "F2 in Hz, decreasing rightward".into()),
            ("y_axis", "F1 in Hz, decreasing upward".into()),
            ("gold", "black solid outline".into()),
            ("models", models.join(", ")),
            ("ellipse_axes", "semi-axis = 1 population std per formant".into()),
        ],
    );
    svg.rect(
        CHART_MARGIN,
        CHART_MARGIN,
        plot,
        plot,
        "fill=\"white\" stroke=\"#444444\" stroke-width=\"1\"",
    );
    for t in axis_ticks(f2_min, f2_max) {
        let x = sx(t);
        svg.line(x, CHART_MARGIN + plot, x, CHART_MARGIN + plot + 5.0, "stroke=\"#444444\"");
        svg.text(
            x,
            CHART_MARGIN + plot + 18.0,
            "text-anchor=\"middle\" font-size=\"10\"",
            &fmt_label(t),
        );
    }
    for t in axis_ticks(f1_min, f1_max) {
        let y = sy(t);
        svg.line(CHART_MARGIN - 5.0, y, CHART_MARGIN, y, "stroke=\"#444444\"");
        svg.text(
            CHART_MARGIN - 8.0,
            y,
            "text-anchor=\"end\" dominant-baseline=\"middle\" font-size=\"10\"",
            &fmt_label(t),
        );
    }
    svg.text(
        CHART_MARGIN + plot / 2.0,
        CHART_SIZE - 14.0,
        "text-anchor=\"middle\" font-size=\"12\"",
        "F2 (Hz)",
    );
    svg.text(
        16.0,
        CHART_MARGIN + plot / 2.0,
        &format!(
            "text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 {})\"",
            fmt_coord(CHART_MARGIN + plot / 2.0)
        ),
        "F1 (Hz)",
    );

    let palette = DEFAULT_MODEL_PALETTE;
    let draw = |svg: &mut Svg, e: &VowelEllipse, color: &str, dash: &str| {
        let cx = sx(e.center.0);
        let cy = sy(e.center.1);
        svg.open_group(&format!(
            "class=\"vowel\" data-model=\"{}\" data-vowel=\"{}\" data-f1=\"{}\" data-f2=\"{}\" \
             data-n=\"{}\"",
            escape_xml(&e.model),
            escape_xml(&e.vowel),
            e.center.1,
            e.center.0,
            e.n,
        ));
        if e.n >= 2 {
            let rx = e.semi_axes.0 / (f2_max - f2_min) * plot;
            let ry = e.semi_axes.1 / (f1_max - f1_min) * plot;
            svg.ellipse(
                cx,
                cy,
                rx,
                ry,
                &format!("fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"{dash}"),
            );
        } else {
            svg.circle(cx, cy, 2.0, &format!("fill=\"{color}\""));
        }
        svg.text(
            cx,
            cy,
            &format!(
                "text-anchor=\"middle\" dominant-baseline=\"middle\" font-size=\"16\" \
                 fill=\"{color}\""
            ),
            &e.vowel,
        );
        svg.close_group();
    };
    for e in ellipses {
        let idx = models.iter().position(|m| *m == e.model).unwrap_or(0);
        let color = palette[idx % palette.len()];
        draw(&mut svg, e, color, " stroke-dasharray=\"5 3\"");
    }
    for e in gold {
        draw(&mut svg, e, "#000000", "");
    }
    svg.finish()
}

/// Round tick positions covering [lo, hi]: a 1/2/5-scaled step sized to
/// produce four to nine ticks.
fn axis_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-9);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 9.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    let mut t = first;
    while t <= hi + 1e-9 {
        ticks.push(t);
        t += step;
    }
    ticks
}
