//! Telescoping: contract runs of consecutive levels into single levels.
//!
//! Cuts are given as a gap schedule (finitely many leading gaps, then a
//! repeating cycle of gaps), so the cut set is eventually periodic and the
//! telescoped diagram again has an eventually periodic schedule. The new
//! edges from a vertex are the ordered paths across the contracted span;
//! composing the template words level by level enumerates them in the
//! induced order, where higher levels weigh more.
//!
//! Every new edge remembers the original label sequence it contracted. These
//! recoding tables realize the order isomorphism between the two diagrams,
//! which is what the telescoping-equivariance checks ride on.

use std::collections::BTreeMap;

use crate::diagram::{DiagramSpec, LevelTemplate, Schedule, TemplateId, VertexLabel};
use crate::error::{Error, Result};
use crate::path::{source_chain_ids, PathRep};
use crate::validated::{validate, ValidatedDiagram, VertexId};

/// Eventually periodic gap schedule: cut k sits `gaps[k]` levels above cut
/// k-1, with `cycle` repeating after `prefix` runs out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutSchedule {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl CutSchedule {
    /// Constant gap: contract every run of `gap` levels.
    pub fn every(gap: usize) -> Self {
        CutSchedule {
            prefix: vec![],
            cycle: vec![gap],
        }
    }

    fn gap(&self, k: usize) -> usize {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.cycle[(k - self.prefix.len()) % self.cycle.len()]
        }
    }
}

/// A telescoped diagram plus the label recoding that inverts the
/// contraction.
#[derive(Debug, Clone)]
pub struct TelescopeResult {
    pub spec: DiagramSpec,
    pub recoding: RecodingTable,
}

/// Original label chunks per new edge. A chunk lists the original labels of
/// the contracted span bottom-up, so concatenating chunks level by level
/// rebuilds the original path's label vector.
#[derive(Debug, Clone, Default)]
pub struct RecodingTable {
    /// New clock edge -> original labels for levels 1..=n1, keyed by level-1
    /// vertex label.
    pub level1: BTreeMap<VertexLabel, Vec<Vec<u32>>>,
    /// New edge -> original labels for the contracted span, keyed by
    /// template id then source vertex label.
    pub templates: BTreeMap<TemplateId, BTreeMap<VertexLabel, Vec<Vec<u32>>>>,
}

/// Telescope `d` along `cuts`.
pub fn telescope(d: &ValidatedDiagram, cuts: &CutSchedule) -> Result<TelescopeResult> {
    if cuts.prefix.iter().chain(&cuts.cycle).any(|&g| g == 0) {
        return Err(Error::CutsNotMonotone);
    }
    if cuts.cycle.is_empty() {
        return Err(Error::CutsBreakPeriodicity {
            detail: "gap cycle is empty, so the cut set is finite".into(),
        });
    }

    let clen = d.schedule_cycle_len();
    // Enough new levels for the joined-id sequence to go periodic: past the
    // gap prefix and the schedule prefix, the state (gap-cycle position,
    // schedule phase) cycles within cycle_gaps * clen steps.
    let state_period = cuts.cycle.len() * clen;
    let levels_needed =
        cuts.prefix.len() + d.schedule_prefix_len() + 3 * state_period + 4;

    // Absolute cut positions n_0 = 0 < n_1 < n_2 < ...
    let mut cut_pos = vec![0usize];
    for k in 0..levels_needed {
        cut_pos.push(cut_pos[k] + cuts.gap(k));
    }

    // New level 1 contracts original levels 1..=n_1.
    let n1 = cut_pos[1];
    let mut level1 = BTreeMap::new();
    let mut level1_recoding = BTreeMap::new();
    for &v in d.vertices_at_level(n1) {
        let mut chunks = Vec::new();
        enumerate_span(d, n1, v, true, &mut vec![0; n1], &mut |chunk, _| {
            chunks.push(chunk.to_vec());
        })?;
        level1.insert(d.label(v).clone(), chunks.len() as u32);
        level1_recoding.insert(d.label(v).clone(), chunks);
    }

    // New levels k >= 2 contract original spans (n_{k-1}, n_k].
    let mut ids: Vec<TemplateId> = Vec::new(); // id of new level k at ids[k-2]
    let mut templates: BTreeMap<TemplateId, LevelTemplate> = BTreeMap::new();
    let mut template_recoding = BTreeMap::new();
    for k in 2..=levels_needed {
        let lo = cut_pos[k - 1] + 1;
        let hi = cut_pos[k];
        let id = TemplateId::new(
            (lo..=hi)
                .rev()
                .map(|n| d.template(d.template_at_level(n)).id.as_str())
                .collect::<Vec<_>>()
                .join("+"),
        );
        ids.push(id.clone());
        if templates.contains_key(&id) {
            continue;
        }
        let mut ranges = BTreeMap::new();
        let mut recoding = BTreeMap::new();
        for &v in d.vertices_at_level(hi) {
            let mut word = Vec::new();
            let mut chunks = Vec::new();
            enumerate_span(d, hi, v, false, &mut vec![0; hi - lo + 1], &mut |chunk, end| {
                word.push(d.label(end).clone());
                chunks.push(chunk.to_vec());
            })?;
            ranges.insert(d.label(v).clone(), word);
            recoding.insert(d.label(v).clone(), chunks);
        }
        templates.insert(id.clone(), LevelTemplate { id: id.clone(), ranges });
        template_recoding.insert(id, recoding);
    }

    // Detect the smallest eventually periodic split of the id sequence.
    let (start, period) = id_periodicity(&ids).ok_or_else(|| Error::CutsBreakPeriodicity {
        detail: "template sequence did not go periodic within the horizon".into(),
    })?;
    let schedule = Schedule {
        prefix: ids[..start].to_vec(),
        cycle: ids[start..start + period].to_vec(),
    };
    let used: Vec<TemplateId> = {
        let mut seen = Vec::new();
        for id in schedule.prefix.iter().chain(&schedule.cycle) {
            if !seen.contains(id) {
                seen.push(id.clone());
            }
        }
        seen
    };

    let spec = DiagramSpec {
        alphabet: d.spec().alphabet.clone(),
        level1,
        templates: used.iter().map(|id| templates[id].clone()).collect(),
        schedule,
    };
    // By construction consecutive levels agree; validate to be sure.
    validate(&spec)?;

    let recoding = RecodingTable {
        level1: level1_recoding,
        templates: used
            .into_iter()
            .map(|id| {
                let r = template_recoding[&id].clone();
                (id, r)
            })
            .collect(),
    };
    Ok(TelescopeResult { spec, recoding })
}

/// Enumerate ordered paths from `(v, hi)` down through the span, calling
/// `emit(chunk, end_vertex)` per path with the chunk's labels bottom-up.
/// With `to_root`, the span ends at the root through level-1 clock edges and
/// `end_vertex` is meaningless.
fn enumerate_span(
    d: &ValidatedDiagram,
    hi: usize,
    v: VertexId,
    to_root: bool,
    chunk: &mut [u32],
    emit: &mut impl FnMut(&[u32], VertexId),
) -> Result<()> {
    let lo = if to_root { 1 } else { hi + 1 - chunk.len() };
    fn rec(
        d: &ValidatedDiagram,
        level: usize,
        lo: usize,
        src: VertexId,
        chunk: &mut [u32],
        emit: &mut impl FnMut(&[u32], VertexId),
    ) -> Result<()> {
        if level < lo {
            emit(chunk, src);
            return Ok(());
        }
        let max = d.max_label_at(level, src)?;
        for label in 0..=max {
            chunk[level - lo] = label;
            let below = if level > 1 {
                d.edge_range(level, src, label)?
            } else {
                src
            };
            rec(d, level - 1, lo, below, chunk, emit)?;
        }
        Ok(())
    }
    rec(d, hi, lo, v, chunk, emit)
}

/// Smallest (start, period) with ids[k] == ids[k + period] for all k >=
/// start within the horizon. Requires at least two full periods of evidence.
fn id_periodicity(ids: &[TemplateId]) -> Option<(usize, usize)> {
    for period in 1..=ids.len() / 3 {
        for start in 0..=ids.len() - 3 * period {
            if (start..ids.len() - period).all(|k| ids[k] == ids[k + period]) {
                return Some((start, period));
            }
        }
    }
    None
}

/// Map a path of the telescoped diagram back to the original diagram by
/// concatenating the recorded label chunks.
pub fn recode_path(
    telescoped: &ValidatedDiagram,
    table: &RecodingTable,
    p: &PathRep,
) -> Result<PathRep> {
    let sources = source_chain_ids(telescoped, p)?;
    let mut labels = Vec::new();
    for (i, &src) in sources.iter().enumerate() {
        let level = i + 1;
        let label = p.labels[i] as usize;
        let chunks = if level == 1 {
            &table.level1[telescoped.label(src)]
        } else {
            let id = &telescoped
                .template(telescoped.template_at_level(level))
                .id;
            &table.templates[id][telescoped.label(src)]
        };
        labels.extend_from_slice(&chunks[label]);
    }
    Ok(PathRep::new(labels, p.tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::canonicalize;
    use crate::vershik::{minimal_path, predecessor, successor};

    fn v(s: &str) -> VertexLabel {
        VertexLabel::new(s)
    }

    fn abb_ab() -> ValidatedDiagram {
        validate(&DiagramSpec::stationary([
            (v("a"), vec![v("a"), v("b"), v("b")]),
            (v("b"), vec![v("a"), v("b")]),
        ]))
        .unwrap()
    }

    fn dyadic() -> ValidatedDiagram {
        validate(&DiagramSpec::stationary([(v("a"), vec![v("a"), v("a")])])).unwrap()
    }

    #[test]
    fn unit_gaps_are_the_identity() {
        let d = abb_ab();
        let t = telescope(&d, &CutSchedule::every(1)).unwrap();
        assert_eq!(&t.spec, d.spec());
    }

    #[test]
    fn dyadic_by_pairs_is_the_four_adic() {
        let d = dyadic();
        let t = telescope(&d, &CutSchedule::every(2)).unwrap();
        let word = &t.spec.templates[0].ranges[&v("a")];
        assert_eq!(word.len(), 4);
        // Two contracted clock levels: paths through levels 2 and 1.
        assert_eq!(t.spec.level1[&v("a")], 2);
    }

    #[test]
    fn abb_ab_by_pairs_expands_the_word() {
        // Composing tau with itself: tau(tau(a)) = tau(a)tau(b)tau(b), a
        // seven-letter word.
        let d = abb_ab();
        let t = telescope(&d, &CutSchedule::every(2)).unwrap();
        let word = &t.spec.templates[0].ranges[&v("a")];
        let expect: Vec<VertexLabel> = "abbabab".chars().map(|c| v(&c.to_string())).collect();
        assert_eq!(word, &expect);
        let word_b = &t.spec.templates[0].ranges[&v("b")];
        let expect_b: Vec<VertexLabel> = "abbab".chars().map(|c| v(&c.to_string())).collect();
        assert_eq!(word_b, &expect_b);
    }

    #[test]
    fn zero_gap_is_rejected() {
        let d = abb_ab();
        let cuts = CutSchedule {
            prefix: vec![1, 0],
            cycle: vec![2],
        };
        assert_eq!(telescope(&d, &cuts).unwrap_err(), Error::CutsNotMonotone);
    }

    #[test]
    fn empty_cycle_is_rejected() {
        let d = abb_ab();
        let cuts = CutSchedule {
            prefix: vec![2, 2],
            cycle: vec![],
        };
        assert!(matches!(
            telescope(&d, &cuts).unwrap_err(),
            Error::CutsBreakPeriodicity { .. }
        ));
    }

    #[test]
    fn composed_cuts_associate() {
        // Pairs then triples equals sextuples, including template naming.
        let d = dyadic();
        let once = telescope(&d, &CutSchedule::every(2)).unwrap();
        let d2 = validate(&once.spec).unwrap();
        let twice = telescope(&d2, &CutSchedule::every(3)).unwrap();
        let direct = telescope(&d, &CutSchedule::every(6)).unwrap();
        assert_eq!(twice.spec, direct.spec);
    }

    #[test]
    fn composed_cuts_associate_on_abb_ab() {
        let d = abb_ab();
        let once = telescope(&d, &CutSchedule::every(2)).unwrap();
        let d2 = validate(&once.spec).unwrap();
        let twice = telescope(&d2, &CutSchedule::every(2)).unwrap();
        let direct = telescope(&d, &CutSchedule::every(4)).unwrap();
        assert_eq!(twice.spec, direct.spec);
    }

    #[test]
    fn recoding_intertwines_the_successor() {
        // One successor step downstairs corresponds to one step upstairs.
        let d = abb_ab();
        let t = telescope(&d, &CutSchedule::every(2)).unwrap();
        let dt = validate(&t.spec).unwrap();
        let mut p_orig = minimal_path(&d).unwrap();
        let mut p_tele = minimal_path(&dt).unwrap();
        for step in 0..200 {
            let recoded = recode_path(&dt, &t.recoding, &p_tele).unwrap();
            assert_eq!(
                canonicalize(&d, &recoded).unwrap(),
                canonicalize(&d, &p_orig).unwrap(),
                "recoded orbit diverged at step {step}"
            );
            p_orig = successor(&d, &p_orig).unwrap();
            p_tele = successor(&dt, &p_tele).unwrap();
        }
    }

    #[test]
    fn recoding_intertwines_the_predecessor() {
        let d = abb_ab();
        let t = telescope(&d, &CutSchedule::every(3)).unwrap();
        let dt = validate(&t.spec).unwrap();
        let mut p_orig = minimal_path(&d).unwrap();
        let mut p_tele = minimal_path(&dt).unwrap();
        for step in 0..100 {
            let recoded = recode_path(&dt, &t.recoding, &p_tele).unwrap();
            assert_eq!(
                canonicalize(&d, &recoded).unwrap(),
                canonicalize(&d, &p_orig).unwrap(),
                "recoded orbit diverged at step -{step}"
            );
            p_orig = predecessor(&d, &p_orig).unwrap();
            p_tele = predecessor(&dt, &p_tele).unwrap();
        }
    }

    #[test]
    fn mixed_gap_schedule_stays_periodic() {
        let d = abb_ab();
        let cuts = CutSchedule {
            prefix: vec![3],
            cycle: vec![1, 2],
        };
        let t = telescope(&d, &cuts).unwrap();
        let dt = validate(&t.spec).unwrap();
        // Equivariance survives uneven cuts.
        let mut p_orig = minimal_path(&d).unwrap();
        let mut p_tele = minimal_path(&dt).unwrap();
        for _ in 0..50 {
            p_orig = successor(&d, &p_orig).unwrap();
            p_tele = successor(&dt, &p_tele).unwrap();
        }
        let recoded = recode_path(&dt, &t.recoding, &p_tele).unwrap();
        assert_eq!(
            canonicalize(&d, &recoded).unwrap(),
            canonicalize(&d, &p_orig).unwrap()
        );
    }
}
