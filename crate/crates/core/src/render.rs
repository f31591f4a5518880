//! Rendering array patches: a UTF-8 grid for terminals and an ASCII PGM
//! image with a legend for anything bigger.
//!
//! Both targets draw later rows on top and deeper columns on the left, so
//! the clock region hugs the right edge and the adic successor reads upward,
//! matching the way the orbit arrays are pictured.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::spacetime::{format_symbol, Slab, Symbol};
use crate::validated::ValidatedDiagram;

/// What to draw: rows `rows.0 ..= rows.1` and columns `cols.0 ..= cols.1`
/// of a slab, bottom/right inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderSpec {
    pub rows: (i64, i64),
    pub cols: (i64, i64),
}

fn check_range(slab: &Slab, spec: &RenderSpec) -> Result<()> {
    let (m0, m1) = spec.rows;
    let (j0, j1) = spec.cols;
    if m0 > m1 || j0 > j1 {
        return Err(Error::InsufficientCoverage {
            detail: format!("empty render range: rows {m0}..={m1}, columns {j0}..={j1}"),
        });
    }
    if m0 < slab.m0 || m1 > slab.m1() || j0 < slab.j0 || j1 > slab.j1() {
        return Err(Error::InsufficientCoverage {
            detail: format!(
                "render range rows {m0}..={m1}, columns {j0}..={j1} exceeds the patch \
                 (rows {}..={}, columns {}..={})",
                slab.m0,
                slab.m1(),
                slab.j0,
                slab.j1()
            ),
        });
    }
    Ok(())
}

/// A text grid: one line per row, later rows on top, deeper columns on the
/// left, every cell padded to a common width, with a row-index gutter.
pub fn render_grid(d: &ValidatedDiagram, slab: &Slab, spec: &RenderSpec) -> Result<String> {
    check_range(slab, spec)?;
    let (m0, m1) = spec.rows;
    let (j0, j1) = spec.cols;
    let mut cells: Vec<Vec<String>> = Vec::new();
    let mut cell_width = 1;
    for m in (m0..=m1).rev() {
        let mut line = Vec::new();
        for j in (j0..=j1).rev() {
            let name = format_symbol(d, slab.get(m, j).expect("range checked"));
            cell_width = cell_width.max(name.chars().count());
            line.push(name);
        }
        cells.push(line);
    }
    let gutter = (m0..=m1)
        .map(|m| m.to_string().len())
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    for (i, m) in (m0..=m1).rev().enumerate() {
        write!(out, "{:>gutter$} |", m).expect("writing to a string");
        for name in &cells[i] {
            write!(out, " {:<cell_width$}", name).expect("writing to a string");
        }
        while out.ends_with(' ') {
            out.pop();
        }
        out.push('\n');
    }
    Ok(out)
}

/// An ASCII PGM image (one pixel per cell, same orientation as the grid)
/// plus a legend mapping gray levels back to symbols. The clock region gets
/// the brightest level so it reads as background.
pub fn render_pgm(
    d: &ValidatedDiagram,
    slab: &Slab,
    spec: &RenderSpec,
) -> Result<(String, String)> {
    check_range(slab, spec)?;
    let (m0, m1) = spec.rows;
    let (j0, j1) = spec.cols;
    let mut symbols: Vec<Symbol> = Vec::new();
    for m in m0..=m1 {
        for j in j0..=j1 {
            symbols.push(slab.get(m, j).expect("range checked"));
        }
    }
    let mut palette: Vec<Symbol> = symbols.clone();
    palette.sort();
    palette.dedup();
    let level = |sym: Symbol| -> u32 {
        let i = palette.binary_search(&sym).expect("palette is complete") as u32;
        let n = palette.len() as u32;
        if n == 1 {
            255
        } else {
            255 - i * 255 / (n - 1)
        }
    };
    let width = (j1 - j0 + 1) as usize;
    let height = (m1 - m0 + 1) as usize;
    let mut pgm = format!("P2\n{width} {height}\n255\n");
    for m in (m0..=m1).rev() {
        let mut line = String::new();
        for j in (j0..=j1).rev() {
            if !line.is_empty() {
                line.push(' ');
            }
            write!(line, "{}", level(slab.get(m, j).expect("range checked")))
                .expect("writing to a string");
        }
        pgm.push_str(&line);
        pgm.push('\n');
    }
    let mut legend = String::new();
    for &sym in &palette {
        writeln!(legend, "{}\t{}", level(sym), format_symbol(d, sym)).expect("writing to a string");
    }
    Ok((pgm, legend))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{DiagramSpec, VertexLabel};
    use crate::path::PathRep;
    use crate::spacetime::orbit_slab;
    use crate::validated::validate;

    fn abb_ab() -> ValidatedDiagram {
        let v = VertexLabel::new;
        validate(&DiagramSpec::stationary([
            (v("a"), vec![v("a"), v("b"), v("b")]),
            (v("b"), vec![v("a"), v("b")]),
        ]))
        .unwrap()
    }

    #[test]
    fn grid_puts_later_rows_on_top_and_clocks_on_the_right() {
        let d = abb_ab();
        let slab = orbit_slab(&d, &PathRep::minimal(), (-2, 1), (-1, 3)).unwrap();
        let spec = RenderSpec {
            rows: (-2, 1),
            cols: (-1, 3),
        };
        let grid = render_grid(&d, &slab, &spec).unwrap();
        let lines: Vec<&str> = grid.lines().collect();
        assert_eq!(lines.len(), 4);
        // Top line is the successor of the minimal path; bottom line is the
        // second predecessor. Both rows are frozen by the orbit tests.
        assert_eq!(lines[0], " 1 | a@T1#0 a@T1#1 b!0    C      C");
        assert_eq!(lines[1], " 0 | a@T1#0 a@T1#0 a!0    C      C");
        assert_eq!(lines[2], "-1 | b@T1#1 b@T1#1 b!0    C      C");
        assert_eq!(lines[3], "-2 | b@T1#1 b@T1#0 a!0    C      C");
    }

    #[test]
    fn out_of_range_requests_are_refused() {
        let d = abb_ab();
        let slab = orbit_slab(&d, &PathRep::minimal(), (0, 2), (-1, 3)).unwrap();
        let spec = RenderSpec {
            rows: (0, 5),
            cols: (-1, 3),
        };
        assert!(matches!(
            render_grid(&d, &slab, &spec),
            Err(Error::InsufficientCoverage { .. })
        ));
    }

    #[test]
    fn pgm_has_one_pixel_per_cell_and_a_full_legend() {
        let d = abb_ab();
        let slab = orbit_slab(&d, &PathRep::minimal(), (-3, 3), (-1, 4)).unwrap();
        let spec = RenderSpec {
            rows: (-3, 3),
            cols: (-1, 4),
        };
        let (pgm, legend) = render_pgm(&d, &slab, &spec).unwrap();
        let mut lines = pgm.lines();
        assert_eq!(lines.next(), Some("P2"));
        assert_eq!(lines.next(), Some("6 7"));
        assert_eq!(lines.next(), Some("255"));
        let pixel_rows: Vec<&str> = lines.collect();
        assert_eq!(pixel_rows.len(), 7);
        assert!(pixel_rows
            .iter()
            .all(|r| r.split_whitespace().count() == 6));
        // Every distinct symbol in range appears in the legend, the clock
        // brightest; the two clock columns render as 255.
        assert!(legend.lines().any(|l| l == "255\tC"));
        let distinct: std::collections::BTreeSet<&str> = legend
            .lines()
            .map(|l| l.split('\t').nth(1).unwrap())
            .collect();
        assert_eq!(distinct.len(), legend.lines().count());
        for row in &pixel_rows {
            let last_two: Vec<&str> = row.split_whitespace().rev().take(2).collect();
            assert_eq!(last_two, vec!["255", "255"]);
        }
    }
}
