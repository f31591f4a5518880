//! Reading paths back out of the line, and the end-to-end verification that
//! the automaton's orbit mirrors the adic orbit.
//!
//! The line at time T places the window of row T-k at cell k, so row T
//! itself is spread along the diagonal: after u further steps cell u shows
//! row T at columns u-w+1 ..= u. Decoding therefore clones the running line,
//! steps the clone once per wanted cell, and assembles row T from the
//! overlapping windows, cross-checking every overlap.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::ca::engine::{make_x_init, Automaton, CAConfig};
use crate::ca::rule::{synthesize, HarvestSpec, RuleTable};
use crate::error::{Error, Result};
use crate::path::{labels_to_depth, PathRep, Tail};
use crate::spacetime::Symbol;
use crate::validated::{ValidatedDiagram, VertexId};
use crate::vershik::{minimal_path, successor};

fn decode_from(d: &ValidatedDiagram, aut: &Automaton, depth: usize) -> Result<PathRep> {
    if depth == 0 {
        return Ok(PathRep::new(vec![], Tail::Min));
    }
    let w = aut.cell(0).len() as i64;
    let mut clone = aut.clone();
    let mut row: Vec<Option<Symbol>> = vec![None; depth + 1];
    for u in 1..=depth as i64 {
        clone.step()?;
        let window = clone.cell(u);
        for (i, j) in ((u - w + 1)..=u).enumerate() {
            let sym = window.as_slice()[i];
            if j <= 0 {
                if sym != Symbol::Clock {
                    return Err(Error::DecodeInconsistent { column: 0 });
                }
            } else {
                match row[j as usize] {
                    None => row[j as usize] = Some(sym),
                    Some(prev) if prev != sym => {
                        return Err(Error::DecodeInconsistent { column: j as usize })
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let mut labels = Vec::with_capacity(depth);
    let mut below: Option<VertexId> = None;
    for (j, slot) in row.iter().enumerate().take(depth + 1).skip(1) {
        let sym = slot.expect("columns up to the requested depth are covered");
        match (j, sym) {
            // A clock where an edge belongs: the line carries no path this
            // deep (possible for degenerate hand-built configurations), so
            // the recovered depth ends here.
            (_, Symbol::Clock) => break,
            (1, Symbol::ClockEdge { vertex, label }) => {
                labels.push(label);
                below = Some(vertex);
            }
            (j, Symbol::Edge { vertex, template, label }) if j >= 2 => {
                if template != d.template_at_level(j) {
                    return Err(Error::InconsistentPath {
                        detail: format!(
                            "column {j} shows template {} where the schedule has {}",
                            d.template(template).id,
                            d.template(d.template_at_level(j)).id
                        ),
                    });
                }
                let range = d.edge_range(j, vertex, label)?;
                if below.is_some_and(|b| b != range) {
                    return Err(Error::DecodeInconsistent { column: j });
                }
                labels.push(label);
                below = Some(vertex);
            }
            (j, _) => {
                return Err(Error::InconsistentPath {
                    detail: format!("column {j} shows a symbol of the wrong kind"),
                })
            }
        }
    }
    Ok(PathRep::new(labels, Tail::Min))
}

/// Reconstructs the path whose row the configuration's diagonal carries,
/// reading `depth` levels (fewer if the line is degenerate). Levels beyond
/// the recovered depth follow the minimal tail.
pub fn decode(
    d: &ValidatedDiagram,
    rule: &RuleTable,
    cfg: &CAConfig,
    depth: usize,
) -> Result<PathRep> {
    let aut = Automaton::new(d, rule, cfg)?;
    decode_from(d, &aut, depth)
}

/// One conjugacy failure: what the line decoded to versus what the adic
/// orbit holds at that step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MismatchSample {
    pub step: u64,
    pub decoded: Vec<u32>,
    pub expected: Vec<u32>,
}

/// Evidence that the sampled orbit injects: the decode horizon was raised
/// until the adic orbit separates every sampled pair, and the decoded
/// truncations are counted at that horizon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InjectivityWitness {
    pub horizon: usize,
    pub separated: bool,
    pub samples: usize,
    pub distinct: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConjugacyReport {
    pub steps: u64,
    pub depth: usize,
    pub rule_width: usize,
    pub rule_radius: usize,
    pub rule_contexts: usize,
    pub rule_saturated: bool,
    pub mismatch_count: u64,
    /// At most the first sixteen failures, at the injectivity horizon.
    pub mismatches: Vec<MismatchSample>,
    pub injectivity: InjectivityWitness,
}

impl ConjugacyReport {
    /// Errors with the first recorded failure, for callers that need a hard
    /// pass/fail rather than a report.
    pub fn ensure_clean(&self) -> Result<()> {
        if let Some(first) = self.mismatches.first() {
            return Err(Error::Mismatch {
                step: first.step,
                decoded: format_labels(&first.decoded),
                expected: format_labels(&first.expected),
            });
        }
        if !self.injectivity.separated {
            return Err(Error::InsufficientCoverage {
                detail: format!(
                    "the adic orbit does not separate {} samples within depth {}",
                    self.injectivity.samples, self.injectivity.horizon
                ),
            });
        }
        if self.injectivity.distinct != self.injectivity.samples {
            return Err(Error::InsufficientCoverage {
                detail: "decoded truncations collided where the adic orbit separates".into(),
            });
        }
        Ok(())
    }
}

fn format_labels(labels: &[u32]) -> String {
    labels
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Builds the rule and the initial line for the diagram, runs the automaton
/// alongside the adic orbit of the minimal path for `steps` steps, and
/// compares the decoded path against the orbit at every step.
///
/// Comparisons run at the smallest horizon >= `depth` at which the adic
/// orbit separates all sampled steps, so a clean report certifies both
/// equivariance and injectivity on the sample.
pub fn verify_conjugacy(
    d: &ValidatedDiagram,
    steps: u64,
    depth: usize,
) -> Result<ConjugacyReport> {
    let rule = synthesize(d, &HarvestSpec::default())?;
    let cfg = make_x_init(d, rule.w(), 0)?;

    // The adic side: the orbit itself, and the separation horizon.
    let mut orbit = Vec::with_capacity(steps as usize + 1);
    let mut p = minimal_path(d)?;
    for _ in 0..steps {
        orbit.push(p.clone());
        p = successor(d, &p)?;
    }
    orbit.push(p);
    let mut horizon = depth;
    let separated = loop {
        let mut seen = HashSet::with_capacity(orbit.len());
        if orbit
            .iter()
            .map(|q| labels_to_depth(d, q, horizon))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .all(|t| seen.insert(t))
        {
            break true;
        }
        horizon += 1;
        if horizon > depth + 64 {
            break false;
        }
    };

    // The automaton side.
    let mut aut = Automaton::new(d, &rule, &cfg)?;
    let mut mismatch_count = 0u64;
    let mut mismatches = Vec::new();
    let mut distinct = HashSet::with_capacity(orbit.len());
    for (t, expected_path) in orbit.iter().enumerate() {
        let decoded = decode_from(d, &aut, horizon)?;
        let expected = labels_to_depth(d, expected_path, horizon)?;
        if decoded.labels != expected {
            mismatch_count += 1;
            if mismatches.len() < 16 {
                mismatches.push(MismatchSample {
                    step: t as u64,
                    decoded: decoded.labels.clone(),
                    expected,
                });
            }
        }
        distinct.insert(decoded.labels);
        if (t as u64) < steps {
            aut.step()?;
        }
    }

    Ok(ConjugacyReport {
        steps,
        depth,
        rule_width: rule.w(),
        rule_radius: rule.radius(),
        rule_contexts: rule.len(),
        rule_saturated: rule.certificate().is_some_and(|c| c.saturated),
        mismatch_count,
        mismatches,
        injectivity: InjectivityWitness {
            horizon,
            separated,
            samples: orbit.len(),
            distinct: distinct.len(),
        },
    })
}
