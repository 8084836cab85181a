//! SVG and ASCII pictures of regions and tilings.

use std::fmt::Write;

use crate::lattice::{Region, TriRef};
use crate::matching::{enumerate_tilings, Lozenge};

const SCALE: f64 = 24.0;
const MARGIN: f64 = 8.0;

fn point((y, x2): (i32, i32)) -> (f64, f64) {
    (
        x2 as f64 * SCALE / 2.0,
        y as f64 * SCALE * 3f64.sqrt() / 2.0,
    )
}

struct Frame {
    min_x: f64,
    min_y: f64,
    width: f64,
    height: f64,
}

fn frame(region: &Region) -> Frame {
    let pts: Vec<(f64, f64)> = region
        .cells()
        .iter()
        .flat_map(|t| t.vertices())
        .map(point)
        .collect();
    if pts.is_empty() {
        return Frame {
            min_x: -MARGIN,
            min_y: -MARGIN,
            width: 2.0 * MARGIN,
            height: 2.0 * MARGIN,
        };
    }
    let min_x = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let max_x = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let min_y = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let max_y = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    Frame {
        min_x: min_x - MARGIN,
        min_y: min_y - MARGIN,
        width: max_x - min_x + 2.0 * MARGIN,
        height: max_y - min_y + 2.0 * MARGIN,
    }
}

fn polygon(out: &mut String, pts: &[(f64, f64)], style: &str) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(out, r#"  <polygon points="{}" {style}/>"#, coords.join(" "));
}

/// Corners of the rhombus covered by two adjacent triangles, in order
/// around the shape.
fn lozenge_corners((p, q): Lozenge) -> Vec<(f64, f64)> {
    let mut corners: Vec<(i32, i32)> = p.vertices().into_iter().chain(q.vertices()).collect();
    corners.sort_unstable();
    corners.dedup();
    let pts: Vec<(f64, f64)> = corners.into_iter().map(point).collect();
    let cx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let cy = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let mut pts = pts;
    pts.sort_by(|a, b| {
        let ta = (a.1 - cy).atan2(a.0 - cx);
        let tb = (b.1 - cy).atan2(b.0 - cx);
        ta.total_cmp(&tb)
    });
    pts
}

/// Fill colour by lozenge orientation: vertical pairs, and the two tilted
/// pairs told apart by which side the partner sits on.
fn lozenge_fill((p, q): Lozenge) -> &'static str {
    let (up, down) = if p.is_up() { (p, q) } else { (q, p) };
    if up.row != down.row {
        "#e4b363"
    } else if down.col < up.col {
        "#5b8e7d"
    } else {
        "#a3c4dc"
    }
}

/// SVG drawing of the region. With `tiling = Some(n)` the `n`-th tiling in
/// enumeration order (0-based) is overlaid; a missing tiling draws nothing
/// extra.
pub fn to_svg(region: &Region, tiling: Option<usize>) -> String {
    let f = frame(region);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.2} {:.2} {:.2} {:.2}" width="{:.0}" height="{:.0}">"#,
        f.min_x, f.min_y, f.width, f.height, f.width, f.height
    );
    let _ = writeln!(out, "  <title>{}</title>", escape(region.label()));
    let _ = writeln!(
        out,
        r##"  <rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#999"/>"##,
        f.min_x, f.min_y, f.width, f.height
    );
    for t in region.cells() {
        let pts: Vec<(f64, f64)> = t.vertices().into_iter().map(point).collect();
        let fill = if t.is_up() { "#f4f4f4" } else { "#dddddd" };
        polygon(
            &mut out,
            &pts,
            &format!(r##"fill="{fill}" stroke="#bbb" stroke-width="0.5""##),
        );
    }
    if let Some(n) = tiling {
        if let Some(lozenges) = enumerate_tilings(region, n.saturating_add(1))
            .into_iter()
            .nth(n)
        {
            for l in lozenges {
                polygon(
                    &mut out,
                    &lozenge_corners(l),
                    &format!(
                        r##"fill="{}" stroke="#222" stroke-width="1""##,
                        lozenge_fill(l)
                    ),
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// One text line per row: `^` up cell, `v` down cell, `.` outside.
pub fn to_ascii(region: &Region) -> String {
    let cells = region.cells();
    let (Some(first), Some(last)) = (cells.first(), cells.last()) else {
        return String::from("(empty)\n");
    };
    let min_col = cells.iter().map(|t| t.col).min().unwrap_or(0);
    let max_col = cells.iter().map(|t| t.col).max().unwrap_or(0);
    let mut out = String::new();
    for row in first.row..=last.row {
        let line: String = (min_col..=max_col)
            .map(|col| {
                let t = TriRef::new(row, col);
                match (region.contains(t), t.is_up()) {
                    (false, _) => '.',
                    (true, true) => '^',
                    (true, false) => 'v',
                }
            })
            .collect();
        out.push_str(line.trim_end_matches('.'));
        out.push('\n');
    }
    out
}
