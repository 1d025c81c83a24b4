//! SVG and ASCII output for diagrams.
//!
//! SVG uses only `line`, `path`, `text` and `circle` elements: one `path`
//! per state line, one `line` per segment. ASCII glyphs:
//!
//! | glyph | meaning |
//! |-------|---------|
//! | `-`   | state line or straight segment |
//! | `=` / `.` | thick / thin line when flow marks are present |
//! | `\` `/` | crossing segment going down / up |
//! | `X`   | two crossing segments meeting |
//! | `+`   | crossing segment passing over another line |
//! | `*`   | junction |
//!
//! Segment labels are listed per column under the ASCII drawing.

use std::fmt::{self, Write};

use super::{Diagram, GateBlock, Segment};
use crate::linalg::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Svg,
    Ascii,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderStyle {
    pub format: RenderFormat,
    /// When false, a block whose entries share one modulus is drawn with that
    /// modulus divided out (so H shows `1` and `-1`).
    pub show_normalization: bool,
    pub mark_junctions: bool,
    /// SVG units between state lines.
    pub line_spacing: f64,
    /// SVG units per label character when sizing columns.
    pub column_unit: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self {
            format: RenderFormat::Svg,
            show_normalization: false,
            mark_junctions: false,
            line_spacing: 40.0,
            column_unit: 7.0,
        }
    }
}

impl RenderStyle {
    pub fn ascii() -> Self {
        Self {
            format: RenderFormat::Ascii,
            ..Self::default()
        }
    }
}

const LABEL_TOL: f64 = 1e-9;
const MINUS: char = '\u{2212}';

/// Six significant digits, trailing zeros trimmed, typographic minus.
pub(crate) fn format_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).clamp(0, 17) as usize;
    let mut s = format!("{:.*}", decimals, x.abs());
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "0" {
        return s;
    }
    if x < 0.0 {
        s.insert(0, MINUS);
    }
    s
}

fn value_label(z: Complex) -> String {
    let near = |w: Complex| (z - w).norm() <= LABEL_TOL;
    if near(Complex::new(1.0, 0.0)) {
        String::new()
    } else if near(Complex::new(-1.0, 0.0)) {
        MINUS.to_string()
    } else if near(Complex::new(0.0, 1.0)) {
        "i".to_string()
    } else if near(Complex::new(0.0, -1.0)) {
        format!("{MINUS}i")
    } else if (z.norm() - 1.0).abs() <= LABEL_TOL {
        format!("e^{{i{}}}", format_sig(z.arg()))
    } else if z.im.abs() <= LABEL_TOL {
        format_sig(z.re)
    } else if z.re.abs() <= LABEL_TOL {
        format!("{}i", format_sig(z.im))
    } else {
        let sign = if z.im < 0.0 { MINUS } else { '+' };
        format!("{}{}{}i", format_sig(z.re), sign, format_sig(z.im.abs()))
    }
}

/// Label of a segment whose block entries are divided by `scale`.
pub fn label_for(seg: &Segment, scale: f64) -> String {
    match &seg.symbol {
        Some(s) => s.clone(),
        None => value_label(seg.value / scale),
    }
}

fn block_scale(block: &GateBlock, style: &RenderStyle) -> f64 {
    if style.show_normalization {
        return 1.0;
    }
    let mut moduli = block.segments.iter().filter(|s| s.symbol.is_none()).map(|s| s.value.norm());
    let Some(first) = moduli.next() else {
        return 1.0;
    };
    if moduli.all(|m| (m - first).abs() <= LABEL_TOL) {
        first
    } else {
        1.0
    }
}

/// Renders into a fresh string.
pub fn render(d: &Diagram, style: &RenderStyle) -> String {
    let mut out = String::new();
    write_diagram(d, style, &mut out).expect("writing to a String cannot fail");
    out
}

pub fn write_diagram(d: &Diagram, style: &RenderStyle, out: &mut impl Write) -> fmt::Result {
    let layout = Layout::new(d, style);
    match style.format {
        RenderFormat::Svg => write_svg(d, style, &layout, out),
        RenderFormat::Ascii => write_ascii(d, style, &layout, out),
    }
}

struct Layout {
    /// Per block, per segment label.
    labels: Vec<Vec<String>>,
    /// Per column, longest label in characters.
    widest: Vec<usize>,
    /// Per column, largest line distance spanned by a crossing segment.
    span: Vec<usize>,
    /// `owner[c][k]`: block covering line `k` in column `c`.
    owner: Vec<Vec<Option<usize>>>,
    /// Per column, the distinct block names.
    names: Vec<String>,
}

impl Layout {
    fn new(d: &Diagram, style: &RenderStyle) -> Self {
        let labels: Vec<Vec<String>> = d
            .blocks
            .iter()
            .map(|b| {
                let scale = block_scale(b, style);
                b.segments.iter().map(|s| label_for(s, scale)).collect()
            })
            .collect();
        let mut widest = vec![0; d.n_columns];
        let mut span = vec![0; d.n_columns];
        let mut owner = vec![vec![None; d.dim()]; d.n_columns];
        for (b, block) in d.blocks.iter().enumerate() {
            let c = block.column;
            for l in &labels[b] {
                widest[c] = widest[c].max(l.chars().count());
            }
            for s in &block.segments {
                span[c] = span[c].max(s.from.abs_diff(s.to));
            }
            for &k in &block.support {
                owner[c][k] = Some(b);
            }
        }
        let names = (0..d.n_columns)
            .map(|c| {
                let mut names: Vec<&str> = d.column_blocks(c).map(|(_, b)| b.name.as_str()).collect();
                names.dedup();
                names.join(" ")
            })
            .collect();
        Self {
            labels,
            widest,
            span,
            owner,
            names,
        }
    }

    fn thick_line(d: &Diagram, column: usize, line: usize) -> Option<bool> {
        d.flow.as_ref().map(|f| f.lines[column][line])
    }

    fn thick_segment(d: &Diagram, block: usize, seg: usize) -> Option<bool> {
        d.flow.as_ref().map(|f| f.segments[block][seg])
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn stroke(thick: Option<bool>) -> &'static str {
    match thick {
        None => "1.5",
        Some(true) => "3",
        Some(false) => "0.75",
    }
}

fn write_svg(d: &Diagram, style: &RenderStyle, layout: &Layout, out: &mut impl Write) -> fmt::Result {
    const LEFT: f64 = 64.0;
    const TOP: f64 = 36.0;
    const GAP: f64 = 24.0;
    const MIN_WIDTH: f64 = 48.0;
    let dim = d.dim();
    let ls = style.line_spacing;
    let widths: Vec<f64> = (0..d.n_columns)
        .map(|c| (style.column_unit * layout.widest[c] as f64 + 24.0).max(MIN_WIDTH))
        .collect();
    let mut starts = Vec::with_capacity(d.n_columns);
    let mut x = LEFT + GAP;
    for w in &widths {
        starts.push(x);
        x += w + GAP;
    }
    let right_end = x;
    let width = right_end + 16.0;
    let height = TOP + (dim - 1) as f64 * ls + 24.0;
    let y = |k: usize| TOP + k as f64 * ls;

    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.1}\" height=\"{height:.1}\" viewBox=\"0 0 {width:.1} {height:.1}\">"
    )?;

    for c in 0..d.n_columns {
        writeln!(
            out,
            "<text class=\"gate\" x=\"{:.1}\" y=\"16.0\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            starts[c] + widths[c] / 2.0,
            escape(&layout.names[c])
        )?;
    }

    for line in &d.state_lines {
        let k = line.index;
        writeln!(
            out,
            "<text class=\"basis\" x=\"8.0\" y=\"{:.1}\" font-size=\"12\">|{}\u{27e9}</text>",
            y(k) + 4.0,
            line.label
        )?;
        // free runs: (x0, x1, flow column)
        let mut runs: Vec<(f64, f64, usize)> = Vec::new();
        let mut cursor = LEFT;
        for c in 0..d.n_columns {
            runs.push((cursor, starts[c], c));
            cursor = starts[c];
            if layout.owner[c][k].is_none() {
                runs.push((cursor, starts[c] + widths[c], c));
            }
            cursor = starts[c] + widths[c];
        }
        runs.push((cursor, right_end, d.n_columns));

        let mut path = String::new();
        let mut pen: Option<f64> = None;
        for &(x0, x1, _) in &runs {
            if pen != Some(x0) {
                write!(path, "M {x0:.1} {:.1} ", y(k))?;
            }
            write!(path, "H {x1:.1} ")?;
            pen = Some(x1);
        }
        let base = if d.flow.is_some() { "0.75" } else { "1.5" };
        writeln!(
            out,
            "<path class=\"state-line\" d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{base}\"/>",
            path.trim_end()
        )?;
        for &(x0, x1, c) in &runs {
            if Layout::thick_line(d, c, k) == Some(true) && x1 > x0 {
                writeln!(
                    out,
                    "<line class=\"flow\" x1=\"{x0:.1}\" y1=\"{yk:.1}\" x2=\"{x1:.1}\" y2=\"{yk:.1}\" stroke=\"black\" stroke-width=\"3\"/>",
                    yk = y(k)
                )?;
            }
        }
    }

    for (b, block) in d.blocks.iter().enumerate() {
        let (x0, w) = (starts[block.column], widths[block.column]);
        let x1 = x0 + w;
        for (s, seg) in block.segments.iter().enumerate() {
            let (ya, yb) = (y(seg.from), y(seg.to));
            let kind = if seg.is_crossing() { "diagonal" } else { "straight" };
            writeln!(
                out,
                "<line class=\"segment {kind}\" x1=\"{x0:.1}\" y1=\"{ya:.1}\" x2=\"{x1:.1}\" y2=\"{yb:.1}\" stroke=\"black\" stroke-width=\"{}\"/>",
                stroke(Layout::thick_segment(d, b, s))
            )?;
            let label = &layout.labels[b][s];
            if !label.is_empty() {
                let (lx, ly) = if seg.is_crossing() {
                    (x0 + 0.25 * w, ya + 0.25 * (yb - ya) - 4.0)
                } else {
                    (x0 + 0.5 * w, ya - 4.0)
                };
                writeln!(
                    out,
                    "<text class=\"label\" x=\"{lx:.1}\" y=\"{ly:.1}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
                    escape(label)
                )?;
            }
        }
        if style.mark_junctions {
            let (outs, ins) = block.junctions();
            for k in outs {
                writeln!(out, "<circle class=\"junction\" cx=\"{x0:.1}\" cy=\"{:.1}\" r=\"3.0\" fill=\"black\"/>", y(k))?;
            }
            for k in ins {
                writeln!(out, "<circle class=\"junction\" cx=\"{x1:.1}\" cy=\"{:.1}\" r=\"3.0\" fill=\"black\"/>", y(k))?;
            }
        }
    }
    writeln!(out, "</svg>")
}

fn line_glyph(thick: Option<bool>) -> char {
    match thick {
        None => '-',
        Some(true) => '=',
        Some(false) => '.',
    }
}

fn is_line_glyph(c: char) -> bool {
    matches!(c, '-' | '=' | '.')
}

fn write_ascii(d: &Diagram, style: &RenderStyle, layout: &Layout, out: &mut impl Write) -> fmt::Result {
    const GAP: usize = 2;
    let dim = d.dim();
    let lead = d.n_qubits + 3;
    let widths: Vec<usize> = (0..d.n_columns)
        .map(|c| (2 * layout.span[c] + 2).max(layout.names[c].chars().count()).max(3))
        .collect();
    let mut starts = Vec::with_capacity(d.n_columns);
    let mut x = lead + GAP;
    for w in &widths {
        starts.push(x);
        x += w + GAP;
    }
    let total = x;
    let rows = 2 * dim - 1;
    let mut grid = vec![vec![' '; total]; rows];

    for (k, line) in d.state_lines.iter().enumerate() {
        let row = &mut grid[2 * k];
        for (i, ch) in format!("|{}> ", line.label).chars().enumerate() {
            row[i] = ch;
        }
        let mut cursor = lead;
        for c in 0..d.n_columns {
            let glyph = line_glyph(Layout::thick_line(d, c, k));
            row[cursor..starts[c]].fill(glyph);
            if layout.owner[c][k].is_none() {
                row[starts[c]..starts[c] + widths[c]].fill(glyph);
            }
            cursor = starts[c] + widths[c];
        }
        let glyph = line_glyph(Layout::thick_line(d, d.n_columns, k));
        row[cursor..total].fill(glyph);
    }

    let put = |grid: &mut Vec<Vec<char>>, r: usize, c: usize, glyph: char| {
        let cell = &mut grid[r][c];
        *cell = match *cell {
            ' ' => glyph,
            existing if existing == glyph => glyph,
            '\\' | '/' | 'X' => 'X',
            existing if is_line_glyph(existing) => '+',
            existing => existing,
        };
    };

    for (b, block) in d.blocks.iter().enumerate() {
        let (x0, w) = (starts[block.column], widths[block.column]);
        for (s, seg) in block.segments.iter().enumerate() {
            let glyph = line_glyph(Layout::thick_segment(d, b, s));
            let (ra, rb) = (2 * seg.from, 2 * seg.to);
            if !seg.is_crossing() {
                for cell in &mut grid[ra][x0..x0 + w] {
                    if *cell == ' ' || is_line_glyph(*cell) {
                        *cell = glyph;
                    }
                }
                continue;
            }
            let dr = ra.abs_diff(rb);
            let s0 = x0 + (w - dr) / 2;
            for cell in &mut grid[ra][x0..=s0] {
                if *cell == ' ' {
                    *cell = glyph;
                }
            }
            for cell in &mut grid[rb][s0 + dr..x0 + w] {
                if *cell == ' ' {
                    *cell = glyph;
                }
            }
            let down = rb > ra;
            for step in 1..dr {
                let r = if down { ra + step } else { ra - step };
                put(&mut grid, r, s0 + step, if down { '\\' } else { '/' });
            }
        }
        if style.mark_junctions {
            let (outs, ins) = block.junctions();
            for k in outs {
                grid[2 * k][x0] = '*';
            }
            for k in ins {
                grid[2 * k][x0 + w - 1] = '*';
            }
        }
    }

    let mut header = vec![' '; total];
    for c in 0..d.n_columns {
        for (i, ch) in layout.names[c].chars().take(widths[c] + GAP - 1).enumerate() {
            header[starts[c] + i] = ch;
        }
    }
    writeln!(out, "{}", String::from_iter(header).trim_end())?;
    for row in grid {
        writeln!(out, "{}", String::from_iter(row).trim_end())?;
    }

    let mut legend = String::new();
    for (b, block) in d.blocks.iter().enumerate() {
        let items: Vec<String> = block
            .segments
            .iter()
            .zip(&layout.labels[b])
            .filter(|(_, l)| !l.is_empty())
            .map(|(s, l)| format!("{}>{} {l}", d.state_lines[s.from].label, d.state_lines[s.to].label))
            .collect();
        if !items.is_empty() {
            writeln!(legend, "[{}] {}: {}", block.column, block.name, items.join(", "))?;
        }
    }
    if !legend.is_empty() {
        writeln!(out)?;
        write!(out, "{legend}")?;
    }
    Ok(())
}
