//! Finite representations of infinite paths.
//!
//! A path stores explicit edge labels for levels 1..=L plus a tail marker:
//! MinTail paths take the minimal edge at every level above L, MaxTail paths
//! the maximal one. Source vertices are never stored; they are derived
//! downward from the tail chain, so a representation can never go out of sync
//! with its diagram.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::validated::{End, ValidatedDiagram, VertexId};

/// Tail behaviour above the explicit prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    Min,
    Max,
}

impl Tail {
    pub fn end(self) -> End {
        match self {
            Tail::Min => End::Min,
            Tail::Max => End::Max,
        }
    }
}

/// A path given by explicit labels at levels 1..=depth and a tail marker.
/// The level-1 label indexes clock edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRep {
    pub labels: Vec<u32>,
    pub tail: Tail,
}

impl PathRep {
    pub fn new(labels: Vec<u32>, tail: Tail) -> Self {
        PathRep { labels, tail }
    }

    /// The unique minimal path: empty prefix, minimal tail.
    pub fn minimal() -> Self {
        PathRep {
            labels: vec![],
            tail: Tail::Min,
        }
    }

    /// The unique maximal path: empty prefix, maximal tail.
    pub fn maximal() -> Self {
        PathRep {
            labels: vec![],
            tail: Tail::Max,
        }
    }

    pub fn depth(&self) -> usize {
        self.labels.len()
    }

    /// Edge label at `level`, following the tail beyond the prefix.
    /// Needs the diagram only for tail labels, which depend on the source.
    pub fn label_at(&self, d: &ValidatedDiagram, level: usize) -> Result<u32> {
        if level <= self.labels.len() {
            return Ok(self.labels[level - 1]);
        }
        match self.tail {
            Tail::Min => Ok(0),
            Tail::Max => {
                let src = d.extremal_source(level, End::Max)?;
                d.max_label_at(level, src)
            }
        }
    }
}

/// Source vertices at levels 1..=depth, derived from the tail downward.
/// `a_{n-1}` is the range of the level-n edge; the topmost source comes from
/// the tail chain. Validates every label along the way.
pub fn source_chain_ids(d: &ValidatedDiagram, p: &PathRep) -> Result<Vec<VertexId>> {
    let depth = p.depth();
    if depth == 0 {
        return Ok(vec![]);
    }
    let mut sources = vec![VertexId(0); depth];
    sources[depth - 1] = d.extremal_source(depth, p.tail.end())?;
    for n in (2..=depth).rev() {
        let src = sources[n - 1];
        let label = p.labels[n - 1];
        sources[n - 2] = d.edge_range(n, src, label)?;
    }
    // Level-1 label must index a clock edge of the level-1 source.
    let a1 = sources[0];
    let max = d.max_label_at(1, a1)?;
    if p.labels[0] > max {
        return Err(Error::LabelOutOfRange {
            level: 1,
            label: p.labels[0],
            max,
        });
    }
    Ok(sources)
}

/// Source chain as vertex labels (the public form).
pub fn source_chain(
    d: &ValidatedDiagram,
    p: &PathRep,
) -> Result<Vec<crate::diagram::VertexLabel>> {
    Ok(source_chain_ids(d, p)?
        .into_iter()
        .map(|v| d.label(v).clone())
        .collect())
}

/// Drop trailing labels that merely restate the tail: a label can be trimmed
/// when it is extremal for the tail chain's source at that level. Two
/// representations of the same path canonicalize identically.
pub fn canonicalize(d: &ValidatedDiagram, p: &PathRep) -> Result<PathRep> {
    let mut labels = p.labels.clone();
    loop {
        let depth = labels.len();
        if depth == 0 {
            break;
        }
        let src = d.extremal_source(depth, p.tail.end())?;
        let trim = match p.tail {
            Tail::Min => labels[depth - 1] == 0,
            Tail::Max => labels[depth - 1] == d.max_label_at(depth, src)?,
        };
        if !trim {
            break;
        }
        labels.pop();
    }
    let q = PathRep {
        labels,
        tail: p.tail,
    };
    source_chain_ids(d, &q)?;
    Ok(q)
}

/// Labels at levels 1..=depth with the tail materialized.
pub fn labels_to_depth(d: &ValidatedDiagram, p: &PathRep, depth: usize) -> Result<Vec<u32>> {
    (1..=depth).map(|n| p.label_at(d, n)).collect()
}
