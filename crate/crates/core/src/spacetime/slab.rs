//! Rectangular windows of the two-dimensional edge array of an orbit.
//!
//! Row m of the array encodes the m-th successor of a base path (negative m:
//! predecessors); column j holds the level-j edge, with columns <= 0 fixed at
//! the clock symbol. Everything downstream (tiles, deduction shapes, the
//! automaton's rule) is harvested from such windows.

use crate::error::Result;
use crate::path::{source_chain_ids, PathRep, Tail};
use crate::spacetime::symbol::Symbol;
use crate::validated::ValidatedDiagram;
use crate::vershik::{predecessor, successor};

/// Column-j symbol of a single path.
pub fn path_symbol(d: &ValidatedDiagram, p: &PathRep, j: i64) -> Result<Symbol> {
    if j <= 0 {
        return Ok(Symbol::Clock);
    }
    let level = j as usize;
    let depth = p.depth();
    let vertex = if level <= depth {
        source_chain_ids(d, p)?[level - 1]
    } else {
        d.extremal_source(level, p.tail.end())?
    };
    let label = p.label_at(d, level)?;
    Ok(if level == 1 {
        Symbol::ClockEdge { vertex, label }
    } else {
        Symbol::Edge {
            vertex,
            template: d.template_at_level(level),
            label,
        }
    })
}

/// One row of the array over an explicit column range (inclusive).
pub fn encode_row(
    d: &ValidatedDiagram,
    p: &PathRep,
    j0: i64,
    j1: i64,
) -> Result<Vec<Symbol>> {
    // Derive the source chain once; per-column calls would redo it.
    let sources = source_chain_ids(d, p)?;
    let depth = p.depth();
    (j0..=j1)
        .map(|j| {
            if j <= 0 {
                return Ok(Symbol::Clock);
            }
            let level = j as usize;
            let vertex = if level <= depth {
                sources[level - 1]
            } else {
                d.extremal_source(level, p.tail.end())?
            };
            let label = p.label_at(d, level)?;
            Ok(if level == 1 {
                Symbol::ClockEdge { vertex, label }
            } else {
                Symbol::Edge {
                    vertex,
                    template: d.template_at_level(level),
                    label,
                }
            })
        })
        .collect()
}

/// A dense window of the array: rows `m0..=m1` of the orbit of a base path,
/// columns `j0..=j1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slab {
    pub m0: i64,
    pub j0: i64,
    rows: Vec<Vec<Symbol>>,
}

impl Slab {
    /// Wraps explicit rows (all the same length) with their coordinates.
    pub fn from_rows(m0: i64, j0: i64, rows: Vec<Vec<Symbol>>) -> Self {
        assert!(!rows.is_empty(), "a slab needs at least one row");
        assert!(
            rows.windows(2).all(|w| w[0].len() == w[1].len()),
            "slab rows must have equal widths"
        );
        Slab { m0, j0, rows }
    }

    pub fn m1(&self) -> i64 {
        self.m0 + self.rows.len() as i64 - 1
    }

    pub fn j1(&self) -> i64 {
        self.j0 + self.width() as i64 - 1
    }

    pub fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    /// Symbol at array coordinates, if inside the window.
    pub fn get(&self, m: i64, j: i64) -> Option<Symbol> {
        if m < self.m0 || j < self.j0 {
            return None;
        }
        self.rows
            .get((m - self.m0) as usize)?
            .get((j - self.j0) as usize)
            .copied()
    }

    /// Rows in increasing m, each over the full column range.
    pub fn rows(&self) -> &[Vec<Symbol>] {
        &self.rows
    }
}

/// Materializes rows `m0..=m1` of the orbit of `base` over columns
/// `j0..=j1`. Rows step through the successor map; the orbit may cross the
/// wrap from the maximal to the minimal path.
pub fn orbit_slab(
    d: &ValidatedDiagram,
    base: &PathRep,
    (m0, m1): (i64, i64),
    (j0, j1): (i64, i64),
) -> Result<Slab> {
    assert!(m0 <= m1 && j0 <= j1, "empty slab range");
    // Walk to row m0 first, then forward.
    let mut p = base.clone();
    if m0 > 0 {
        for _ in 0..m0 {
            p = successor(d, &p)?;
        }
    } else {
        for _ in 0..(-m0) {
            p = predecessor(d, &p)?;
        }
    }
    let mut rows = Vec::with_capacity((m1 - m0 + 1) as usize);
    for m in m0..=m1 {
        rows.push(encode_row(d, &p, j0, j1)?);
        if m < m1 {
            p = successor(d, &p)?;
        }
    }
    Ok(Slab { m0, j0, rows })
}

/// Columns that always show tail-chain symbols for every row of an orbit
/// window: one past the deepest level the window's rows touch explicitly.
pub fn active_depth(d: &ValidatedDiagram, base: &PathRep, (m0, m1): (i64, i64)) -> Result<usize> {
    let mut p = base.clone();
    if m0 > 0 {
        for _ in 0..m0 {
            p = successor(d, &p)?;
        }
    } else {
        for _ in 0..(-m0) {
            p = predecessor(d, &p)?;
        }
    }
    let mut depth = p.depth().max(base.depth());
    for _ in m0..m1 {
        p = successor(d, &p)?;
        depth = depth.max(p.depth());
    }
    Ok(depth)
}

/// Tail-column symbol: what every sufficiently deep column shows for a path
/// with the given tail. Periodic in `j` with the schedule cycle length once
/// past the chain prefix.
pub fn tail_symbol(d: &ValidatedDiagram, tail: Tail, j: usize) -> Result<Symbol> {
    debug_assert!(j >= 1);
    let vertex = d.extremal_source(j, tail.end())?;
    let label = match tail {
        Tail::Min => 0,
        Tail::Max => d.max_label_at(j, vertex)?,
    };
    Ok(if j == 1 {
        Symbol::ClockEdge { vertex, label }
    } else {
        Symbol::Edge {
            vertex,
            template: d.template_at_level(j),
            label,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{DiagramSpec, VertexLabel};
    use crate::spacetime::symbol::format_symbol;
    use crate::validated::validate;

    fn abb_ab() -> ValidatedDiagram {
        let v = VertexLabel::new;
        validate(&DiagramSpec::stationary([
            (v("a"), vec![v("a"), v("b"), v("b")]),
            (v("b"), vec![v("a"), v("b")]),
        ]))
        .unwrap()
    }

    fn named(d: &ValidatedDiagram, row: &[Symbol]) -> Vec<String> {
        row.iter().map(|&s| format_symbol(d, s)).collect()
    }

    #[test]
    fn minimal_row_shows_clocks_and_zero_labels() {
        let d = abb_ab();
        let row = encode_row(&d, &PathRep::minimal(), -1, 4).unwrap();
        assert_eq!(
            named(&d, &row),
            vec!["C", "C", "a!0", "a@T1#0", "a@T1#0", "a@T1#0"]
        );
    }

    #[test]
    fn successor_rows_update_the_carry_prefix() {
        let d = abb_ab();
        // Successor of the minimal path on abb_ab is labels [0, 1]: the level-2
        // edge steps to tau(a)'s second letter b, level 1 resets to b's clock.
        let slab = orbit_slab(&d, &PathRep::minimal(), (0, 2), (1, 3)).unwrap();
        assert_eq!(named(&d, &slab.rows()[0]), vec!["a!0", "a@T1#0", "a@T1#0"]);
        assert_eq!(named(&d, &slab.rows()[1]), vec!["b!0", "a@T1#1", "a@T1#0"]);
        assert_eq!(named(&d, &slab.rows()[2]), vec!["b!0", "a@T1#2", "a@T1#0"]);
    }

    #[test]
    fn negative_rows_are_predecessors_with_max_tails() {
        let d = abb_ab();
        let slab = orbit_slab(&d, &PathRep::minimal(), (-2, -1), (1, 3)).unwrap();
        // Row -1 is the maximal path: sources follow the maximal chain at b;
        // tau(b) = ab so the maximal label is 1 everywhere above level 1.
        assert_eq!(named(&d, &slab.rows()[1]), vec!["b!0", "b@T1#1", "b@T1#1"]);
        // Row -2 is its predecessor: level 2 steps back to label 0.
        assert_eq!(named(&d, &slab.rows()[0]), vec!["a!0", "b@T1#0", "b@T1#1"]);
    }

    #[test]
    fn slab_indexing_matches_coordinates() {
        let d = abb_ab();
        let slab = orbit_slab(&d, &PathRep::minimal(), (-1, 2), (-2, 5)).unwrap();
        assert_eq!(slab.m1(), 2);
        assert_eq!(slab.j1(), 5);
        assert_eq!(slab.get(0, 0), Some(Symbol::Clock));
        assert_eq!(slab.get(-2, 0), None);
        assert_eq!(slab.get(0, 6), None);
        let direct = path_symbol(&d, &PathRep::minimal(), 3).unwrap();
        assert_eq!(slab.get(0, 3), Some(direct));
    }

    #[test]
    fn tail_symbols_match_deep_columns_of_extremal_paths() {
        let d = abb_ab();
        for (tail, p) in [(Tail::Min, PathRep::minimal()), (Tail::Max, PathRep::maximal())] {
            for j in 1..8 {
                assert_eq!(
                    tail_symbol(&d, tail, j).unwrap(),
                    path_symbol(&d, &p, j as i64).unwrap()
                );
            }
        }
    }
}
