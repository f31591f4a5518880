//! The adic transformation: successor and predecessor in the path order.
//!
//! The successor finds the lowest level carrying a non-maximal edge,
//! increments it within its source's edge order, and resets every level
//! below: the level right under the carry takes the range of the incremented
//! edge as its new source, and the levels under that follow minimal edges
//! down. The predecessor mirrors this with minimal/maximal swapped. The
//! unique maximal path wraps to the unique minimal path and vice versa.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::{canonicalize, source_chain_ids, PathRep, Tail};
use crate::validated::{End, ValidatedDiagram};

/// How far beyond the explicit prefix the search for a non-extremal level may
/// extend before reporting a degenerate schedule.
pub const EXTENSION_BOUND: usize = 64;

/// The unique minimal path. Exists for focused diagrams.
pub fn minimal_path(d: &ValidatedDiagram) -> Result<PathRep> {
    d.min_chain()?;
    Ok(PathRep::minimal())
}

/// The unique maximal path. Exists for properly ordered diagrams.
pub fn maximal_path(d: &ValidatedDiagram) -> Result<PathRep> {
    d.max_chain()?;
    Ok(PathRep::maximal())
}

/// Order successor with the default extension bound.
pub fn successor(d: &ValidatedDiagram, p: &PathRep) -> Result<PathRep> {
    successor_bounded(d, p, EXTENSION_BOUND)
}

/// Order predecessor with the default extension bound.
pub fn predecessor(d: &ValidatedDiagram, p: &PathRep) -> Result<PathRep> {
    predecessor_bounded(d, p, EXTENSION_BOUND)
}

pub fn successor_bounded(d: &ValidatedDiagram, p: &PathRep, bound: usize) -> Result<PathRep> {
    let sources = source_chain_ids(d, p)?;
    let depth = p.depth();
    // Lowest explicit level whose edge is not maximal for its source.
    for level in 1..=depth {
        let label = p.labels[level - 1];
        let max = d.max_label_at(level, sources[level - 1])?;
        if label < max {
            let mut labels = p.labels.clone();
            labels[level - 1] = label + 1;
            for l in labels.iter_mut().take(level - 1) {
                *l = 0;
            }
            return Ok(PathRep::new(labels, p.tail));
        }
    }
    match p.tail {
        // Every level is maximal: this is the maximal path, which wraps.
        Tail::Max => minimal_path(d),
        // Tail levels carry label 0; extend until one has room to increment.
        Tail::Min => {
            for level in depth + 1..=depth + bound {
                let src = d.extremal_source(level, End::Min)?;
                if d.max_label_at(level, src)? > 0 {
                    let mut labels = vec![0; level];
                    labels[level - 1] = 1;
                    return Ok(PathRep::new(labels, Tail::Min));
                }
            }
            Err(Error::ExtensionBoundExceeded { bound })
        }
    }
}

pub fn predecessor_bounded(d: &ValidatedDiagram, p: &PathRep, bound: usize) -> Result<PathRep> {
    let sources = source_chain_ids(d, p)?;
    let depth = p.depth();
    for level in 1..=depth {
        let label = p.labels[level - 1];
        if label > 0 {
            let mut labels = p.labels.clone();
            labels[level - 1] = label - 1;
            reset_below_to_max(d, &mut labels, level, sources[level - 1])?;
            return Ok(PathRep::new(labels, p.tail));
        }
    }
    match p.tail {
        // Every level is minimal: this is the minimal path, which wraps.
        Tail::Min => maximal_path(d),
        Tail::Max => {
            // Every explicit label is minimal, so the borrow lands on the
            // first tail level with more than one edge and everything below
            // is rebuilt along the new maximal chain.
            for level in depth + 1..=depth + bound {
                let src = d.extremal_source(level, End::Max)?;
                let max = d.max_label_at(level, src)?;
                if max > 0 {
                    let mut labels = vec![0; level];
                    labels[level - 1] = max - 1;
                    reset_below_to_max(d, &mut labels, level, src)?;
                    return Ok(PathRep::new(labels, Tail::Max));
                }
            }
            Err(Error::ExtensionBoundExceeded { bound })
        }
    }
}

/// After decrementing at `level`, set every lower level to the maximal edge
/// along the chain descending from the decremented edge's range.
fn reset_below_to_max(
    d: &ValidatedDiagram,
    labels: &mut [u32],
    level: usize,
    source: crate::validated::VertexId,
) -> Result<()> {
    if level == 1 {
        return Ok(());
    }
    let mut below = d.edge_range(level, source, labels[level - 1])?;
    for n in (1..level).rev() {
        let max = d.max_label_at(n, below)?;
        labels[n - 1] = max;
        if n > 1 {
            below = d.edge_range(n, below, max)?;
        }
    }
    Ok(())
}

/// Result of comparing two paths in the induced order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathOrder {
    Less,
    Equal,
    Greater,
    Incomparable,
}

/// Compare two paths: comparable iff they agree above some level, in which
/// case the highest differing level decides.
pub fn compare(d: &ValidatedDiagram, p: &PathRep, q: &PathRep) -> Result<PathOrder> {
    let p = canonicalize(d, p)?;
    let q = canonicalize(d, q)?;
    let depth = p.depth().max(q.depth());
    // Different tails agree above the prefixes only when every higher level
    // has a single edge; otherwise the paths differ cofinally.
    if p.tail != q.tail && !tails_merge_above(d, depth)? {
        return Ok(PathOrder::Incomparable);
    }
    for level in (1..=depth).rev() {
        let lp = p.label_at(d, level)?;
        let lq = q.label_at(d, level)?;
        if lp != lq {
            return Ok(if lp < lq {
                PathOrder::Less
            } else {
                PathOrder::Greater
            });
        }
    }
    Ok(PathOrder::Equal)
}

/// True when every level above `depth` has a single edge shared by both
/// extremal chains, making min and max tails the same path.
fn tails_merge_above(d: &ValidatedDiagram, depth: usize) -> Result<bool> {
    let horizon = depth.max(d.schedule_prefix_len()) + d.schedule_cycle_len();
    for n in depth + 1..=horizon {
        let min_src = d.extremal_source(n, End::Min)?;
        let max_src = d.extremal_source(n, End::Max)?;
        if min_src != max_src || d.max_label_at(n, min_src)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Orbit log: the base path followed by |n| successor (n > 0) or predecessor
/// (n < 0) steps, so the result has |n| + 1 entries.
pub fn orbit(d: &ValidatedDiagram, p: &PathRep, n: i64) -> Result<Vec<PathRep>> {
    let mut out = Vec::with_capacity(n.unsigned_abs() as usize + 1);
    out.push(p.clone());
    for _ in 0..n.abs() {
        let next = if n > 0 {
            successor(d, out.last().unwrap())?
        } else {
            predecessor(d, out.last().unwrap())?
        };
        out.push(next);
    }
    Ok(out)
}
