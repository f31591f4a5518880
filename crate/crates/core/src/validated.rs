//! Compiled form of a diagram description.
//!
//! Validation interns vertex labels and templates into dense indices, checks
//! that consecutive levels agree on their shared vertex set, and precomputes
//! the data every later stage leans on: per-level widths, the focus chain,
//! and the unique maximal chain when one exists.
//!
//! Extremal chains are computed by image stabilization: push the full vertex
//! set down from a high level through the extremal-edge maps and read off the
//! stable images. The schedule is eventually periodic, so the images are too,
//! and a chain is unique exactly when every stable image is a singleton.

use std::collections::BTreeMap;

use crate::diagram::{DiagramSpec, TemplateId, VertexLabel};
use crate::error::{Error, Result};

/// Dense vertex index into [`ValidatedDiagram::labels`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u16);

/// Dense template index into [`ValidatedDiagram::templates`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TemplateIdx(pub u16);

/// Which end of the edge order a chain follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Min,
    Max,
}

/// A template with labels replaced by dense indices.
#[derive(Debug, Clone)]
pub struct CompiledTemplate {
    pub id: TemplateId,
    /// Edge words indexed by source [`VertexId`]; `None` when the vertex is
    /// absent from levels using this template.
    words: Vec<Option<Vec<VertexId>>>,
    /// Sources present, ascending.
    sources: Vec<VertexId>,
    /// Common range of all label-0 edges, when one exists.
    focus: Option<VertexId>,
    edge_count: usize,
}

impl CompiledTemplate {
    pub fn word(&self, v: VertexId) -> Option<&[VertexId]> {
        self.words
            .get(v.0 as usize)
            .and_then(|w| w.as_deref())
    }

    pub fn sources(&self) -> &[VertexId] {
        &self.sources
    }

    pub fn focus(&self) -> Option<VertexId> {
        self.focus
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    fn range_set(&self, n_vertices: usize) -> Vec<bool> {
        let mut set = vec![false; n_vertices];
        for w in self.words.iter().flatten() {
            for &r in w {
                set[r.0 as usize] = true;
            }
        }
        set
    }

    fn extremal_range(&self, v: VertexId, end: End) -> Option<VertexId> {
        let w = self.word(v)?;
        Some(match end {
            End::Min => w[0],
            End::Max => *w.last().unwrap(),
        })
    }
}

/// Eventually periodic sequence of source vertices, one per level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainInfo {
    /// Sources at levels 1..=prefix.len().
    prefix: Vec<VertexId>,
    /// Sources at the following levels, repeating with the schedule period.
    cycle: Vec<VertexId>,
}

impl ChainInfo {
    /// Source vertex of the chain at level `n` (n >= 1).
    pub fn source_at(&self, n: usize) -> VertexId {
        debug_assert!(n >= 1);
        if n <= self.prefix.len() {
            self.prefix[n - 1]
        } else {
            self.cycle[(n - self.prefix.len() - 1) % self.cycle.len()]
        }
    }

    /// Levels before the chain's sources settle into their cycle.
    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    /// Period of the chain's sources past the prefix.
    pub fn cycle_len(&self) -> usize {
        self.cycle.len()
    }
}

/// A diagram that passed validation, with interned indices and cached
/// structural analysis.
#[derive(Debug, Clone)]
pub struct ValidatedDiagram {
    spec: DiagramSpec,
    labels: Vec<VertexLabel>,
    label_index: BTreeMap<VertexLabel, VertexId>,
    templates: Vec<CompiledTemplate>,
    template_index: BTreeMap<TemplateId, TemplateIdx>,
    prefix: Vec<TemplateIdx>,
    cycle: Vec<TemplateIdx>,
    /// Clock edge count per vertex id; `None` when absent from level 1.
    level1: Vec<Option<u32>>,
    level1_vertices: Vec<VertexId>,
    width_k: usize,
    /// Focus vertex per schedule slot when every slot has one.
    focus_slots: Vec<Option<VertexId>>,
    min_chain: Option<ChainInfo>,
    max_chain: Option<ChainInfo>,
}

/// Validate a description and compile it. This is the only way to obtain a
/// [`ValidatedDiagram`].
pub fn validate(spec: &DiagramSpec) -> Result<ValidatedDiagram> {
    spec.check_wellformed()?;

    let labels: Vec<VertexLabel> = spec.alphabet.clone();
    let label_index: BTreeMap<VertexLabel, VertexId> = labels
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), VertexId(i as u16)))
        .collect();
    let nv = labels.len();

    let mut templates = Vec::new();
    let mut template_index = BTreeMap::new();
    for t in &spec.templates {
        let mut words: Vec<Option<Vec<VertexId>>> = vec![None; nv];
        let mut sources = Vec::new();
        for (src, word) in &t.ranges {
            let id = label_index[src];
            words[id.0 as usize] = Some(word.iter().map(|r| label_index[r]).collect());
            sources.push(id);
        }
        sources.sort();
        let mut firsts = sources
            .iter()
            .map(|&s| words[s.0 as usize].as_ref().unwrap()[0]);
        let first = firsts.next().unwrap();
        let focus = firsts.all(|f| f == first).then_some(first);
        let edge_count = words.iter().flatten().map(Vec::len).sum();
        template_index.insert(t.id.clone(), TemplateIdx(templates.len() as u16));
        templates.push(CompiledTemplate {
            id: t.id.clone(),
            words,
            sources,
            focus,
            edge_count,
        });
    }

    let prefix: Vec<TemplateIdx> = spec
        .schedule
        .prefix
        .iter()
        .map(|id| template_index[id])
        .collect();
    let cycle: Vec<TemplateIdx> = spec
        .schedule
        .cycle
        .iter()
        .map(|id| template_index[id])
        .collect();

    let mut level1 = vec![None; nv];
    let mut level1_vertices = Vec::new();
    for (v, &count) in &spec.level1 {
        let id = label_index[v];
        level1[id.0 as usize] = Some(count);
        level1_vertices.push(id);
    }
    level1_vertices.sort();

    let mut d = ValidatedDiagram {
        spec: spec.clone(),
        labels,
        label_index,
        templates,
        template_index,
        prefix,
        cycle,
        level1,
        level1_vertices,
        width_k: 0,
        focus_slots: Vec::new(),
        min_chain: None,
        max_chain: None,
    };

    d.check_level_consistency()?;
    d.width_k = d.compute_width();
    d.focus_slots = d
        .slot_templates()
        .iter()
        .map(|&t| d.templates[t.0 as usize].focus)
        .collect();
    d.min_chain = d.stabilize_chain(End::Min);
    d.max_chain = d.stabilize_chain(End::Max);
    Ok(d)
}

impl ValidatedDiagram {
    pub fn spec(&self) -> &DiagramSpec {
        &self.spec
    }

    pub fn label(&self, v: VertexId) -> &VertexLabel {
        &self.labels[v.0 as usize]
    }

    pub fn vertex_id(&self, label: &VertexLabel) -> Option<VertexId> {
        self.label_index.get(label).copied()
    }

    pub fn template(&self, t: TemplateIdx) -> &CompiledTemplate {
        &self.templates[t.0 as usize]
    }

    pub fn template_idx(&self, id: &TemplateId) -> Option<TemplateIdx> {
        self.template_index.get(id).copied()
    }

    /// Schedule slots in order: prefix templates then cycle templates.
    fn slot_templates(&self) -> Vec<TemplateIdx> {
        self.prefix.iter().chain(&self.cycle).copied().collect()
    }

    pub fn schedule_prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn schedule_cycle_len(&self) -> usize {
        self.cycle.len()
    }

    /// Template index governing level `n` (n >= 2).
    pub fn template_at_level(&self, n: usize) -> TemplateIdx {
        debug_assert!(n >= 2);
        let slot = n - 2;
        if slot < self.prefix.len() {
            self.prefix[slot]
        } else {
            self.cycle[(slot - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Number of clock edges from level-1 vertex `v`.
    pub fn clock_edges(&self, v: VertexId) -> Option<u32> {
        self.level1[v.0 as usize]
    }

    pub fn level1_vertices(&self) -> &[VertexId] {
        &self.level1_vertices
    }

    /// Vertices present at level `n` (n >= 1), ascending.
    pub fn vertices_at_level(&self, n: usize) -> &[VertexId] {
        if n == 1 {
            &self.level1_vertices
        } else {
            self.template(self.template_at_level(n)).sources()
        }
    }

    /// Ordered range word of `v` at level `n` (n >= 2).
    pub fn word_at(&self, n: usize, v: VertexId) -> Result<&[VertexId]> {
        self.template(self.template_at_level(n))
            .word(v)
            .ok_or_else(|| Error::InconsistentPath {
                detail: format!("vertex {} absent at level {n}", self.label(v)),
            })
    }

    /// Largest edge label from `v` at level `n` (labels run 0..=max).
    pub fn max_label_at(&self, n: usize, v: VertexId) -> Result<u32> {
        if n == 1 {
            let count = self.clock_edges(v).ok_or_else(|| Error::InconsistentPath {
                detail: format!("vertex {} absent at level 1", self.label(v)),
            })?;
            Ok(count - 1)
        } else {
            Ok(self.word_at(n, v)?.len() as u32 - 1)
        }
    }

    /// Range of the edge `label` from `v` at level `n` (n >= 2).
    pub fn edge_range(&self, n: usize, v: VertexId, label: u32) -> Result<VertexId> {
        let word = self.word_at(n, v)?;
        word.get(label as usize).copied().ok_or(Error::LabelOutOfRange {
            level: n,
            label,
            max: word.len() as u32 - 1,
        })
    }

    /// max(|V_n|, |E_n|) over all levels; finite because levels share
    /// finitely many templates.
    pub fn width_k(&self) -> usize {
        self.width_k
    }

    /// True when every level's minimal edges share a single range.
    pub fn is_focused(&self) -> bool {
        self.focus_slots.iter().all(Option::is_some)
    }

    /// Focus vertex at level `n` (n >= 2): the common range of that level's
    /// label-0 edges, one level down.
    pub fn focus_at_level(&self, n: usize) -> Option<VertexId> {
        self.template(self.template_at_level(n)).focus
    }

    /// Focus vertex per schedule slot (prefix slots then cycle slots).
    pub fn focus_slots(&self) -> &[Option<VertexId>] {
        &self.focus_slots
    }

    /// True when the diagram has a unique minimal and a unique maximal path.
    pub fn is_properly_ordered(&self) -> bool {
        self.min_chain.is_some() && self.max_chain.is_some()
    }

    /// Source chain of the unique all-minimal path. Requires focus so that
    /// every level's minimal edge has a known range.
    pub fn min_chain(&self) -> Result<&ChainInfo> {
        if let Some(c) = &self.min_chain {
            if self.is_focused() {
                return Ok(c);
            }
        }
        let level = self
            .focus_slots
            .iter()
            .position(Option::is_none)
            .map(|slot| slot + 2)
            .unwrap_or(2);
        Err(Error::NotFocused { level })
    }

    /// Source chain of the unique all-maximal path.
    pub fn max_chain(&self) -> Result<&ChainInfo> {
        self.max_chain.as_ref().ok_or(Error::NotProperlyOrdered)
    }

    /// Source of the extremal chain at level `n`.
    pub fn extremal_source(&self, n: usize, end: End) -> Result<VertexId> {
        let chain = match end {
            End::Min => self.min_chain()?,
            End::Max => self.max_chain()?,
        };
        Ok(chain.source_at(n))
    }

    // ── validation internals ──

    fn check_level_consistency(&self) -> Result<()> {
        let nv = self.labels.len();
        let slots = self.slot_templates();
        // Ranges of the level-2 template must be exactly the level-1 vertices.
        let mut level1_set = vec![false; nv];
        for &v in &self.level1_vertices {
            level1_set[v.0 as usize] = true;
        }
        let first = self.template(slots[0]);
        if first.range_set(nv) != level1_set {
            return Err(Error::LevelMismatch {
                level: 2,
                detail: format!(
                    "template {} ranges do not match the level-1 vertex set",
                    first.id
                ),
            });
        }
        // Every consecutive slot pair that ever occurs: prefix pairs, the
        // prefix-to-cycle seam, cycle pairs, and the cycle wrap.
        let mut pairs: Vec<(TemplateIdx, TemplateIdx, usize)> = Vec::new();
        for s in 0..slots.len().saturating_sub(1) {
            pairs.push((slots[s], slots[s + 1], s + 3));
        }
        let wrap_low = *self.cycle.last().unwrap();
        pairs.push((wrap_low, self.cycle[0], self.prefix.len() + self.cycle.len() + 2));
        for (low, high, level) in pairs {
            let low_t = self.template(low);
            let high_t = self.template(high);
            let mut source_set = vec![false; nv];
            for &s in low_t.sources() {
                source_set[s.0 as usize] = true;
            }
            if high_t.range_set(nv) != source_set {
                return Err(Error::LevelMismatch {
                    level,
                    detail: format!(
                        "template {} ranges do not match template {} sources",
                        high_t.id, low_t.id
                    ),
                });
            }
        }
        Ok(())
    }

    fn compute_width(&self) -> usize {
        let level1_edges: u32 = self.level1.iter().flatten().sum();
        let mut k = self.level1_vertices.len().max(level1_edges as usize);
        for &t in &self.slot_templates() {
            let t = self.template(t);
            k = k.max(t.sources().len()).max(t.edge_count());
        }
        k
    }

    /// Push the full vertex set down from a high level through `end`-edge
    /// ranges. Returns the chain when every stable image is a singleton.
    fn stabilize_chain(&self, end: End) -> Option<ChainInfo> {
        let plen = self.prefix.len();
        let clen = self.cycle.len();
        let max_v = self
            .templates
            .iter()
            .map(|t| t.sources.len())
            .max()
            .unwrap_or(1);
        let report_top = plen + clen; // levels 1..=report_top pin the chain
        let top = report_top + clen * (max_v + 2) + 2;

        let mut images: Vec<Vec<VertexId>> = vec![Vec::new(); top + 1];
        images[top] = self.vertices_at_level(top).to_vec();
        for n in (1..top).rev() {
            let t = self.template(self.template_at_level(n + 1));
            let mut img: Vec<VertexId> = images[n + 1]
                .iter()
                .filter_map(|&v| t.extremal_range(v, end))
                .collect();
            img.sort();
            img.dedup();
            images[n] = img;
        }
        // The images must have gone periodic over the reported region;
        // otherwise the margin above was too small, which cannot happen for
        // monotone images, so treat it as no unique chain.
        for n in (plen + 1)..=report_top {
            if images[n] != images[n + clen] {
                return None;
            }
        }
        if (1..=report_top).any(|n| images[n].len() != 1) {
            return None;
        }
        Some(ChainInfo {
            prefix: (1..=plen).map(|n| images[n][0]).collect(),
            cycle: (plen + 1..=report_top).map(|n| images[n][0]).collect(),
        })
    }

    /// Number of paths from `(a, n)` down to `(b, m)`, n > m >= 1.
    pub fn path_count(&self, a: VertexId, n: usize, b: VertexId, m: usize) -> Result<u64> {
        if m < 1 || n <= m {
            return Err(Error::BadLevels {
                detail: format!("need n > m >= 1, got n={n} m={m}"),
            });
        }
        if !self.vertices_at_level(n).contains(&a) {
            return Err(Error::BadLevels {
                detail: format!("vertex {} absent at level {n}", self.label(a)),
            });
        }
        if !self.vertices_at_level(m).contains(&b) {
            return Err(Error::BadLevels {
                detail: format!("vertex {} absent at level {m}", self.label(b)),
            });
        }
        let nv = self.labels.len();
        let mut counts = vec![0u64; nv];
        counts[a.0 as usize] = 1;
        for level in ((m + 1)..=n).rev() {
            let t = self.template(self.template_at_level(level));
            let mut next = vec![0u64; nv];
            for &src in t.sources() {
                let c = counts[src.0 as usize];
                if c == 0 {
                    continue;
                }
                for &r in t.word(src).unwrap() {
                    let cell = &mut next[r.0 as usize];
                    *cell = cell.checked_add(c).ok_or(Error::CountOverflow)?;
                }
            }
            counts = next;
        }
        Ok(counts[b.0 as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::DiagramSpec;

    fn v(s: &str) -> VertexLabel {
        VertexLabel::new(s)
    }

    pub(crate) fn abb_ab() -> ValidatedDiagram {
        let spec = DiagramSpec::stationary([
            (v("a"), vec![v("a"), v("b"), v("b")]),
            (v("b"), vec![v("a"), v("b")]),
        ]);
        validate(&spec).unwrap()
    }

    fn dyadic() -> ValidatedDiagram {
        let spec = DiagramSpec::stationary([(v("a"), vec![v("a"), v("a")])]);
        validate(&spec).unwrap()
    }

    #[test]
    fn abb_ab_width_is_five() {
        assert_eq!(abb_ab().width_k(), 5);
    }

    #[test]
    fn abb_ab_focus_is_a_at_every_level() {
        let d = abb_ab();
        assert!(d.is_focused());
        let a = d.vertex_id(&v("a")).unwrap();
        for n in 2..10 {
            assert_eq!(d.focus_at_level(n), Some(a));
        }
        // Minimal chain follows the focus.
        for n in 1..10 {
            assert_eq!(d.extremal_source(n, End::Min).unwrap(), a);
        }
    }

    #[test]
    fn abb_ab_maximal_chain_settles_on_b() {
        // Maximal edges range to the last letter: tau(a) ends in b and
        // tau(b) ends in b, so the unique maximal chain sits at b.
        let d = abb_ab();
        assert!(d.is_properly_ordered());
        let b = d.vertex_id(&v("b")).unwrap();
        for n in 1..10 {
            assert_eq!(d.extremal_source(n, End::Max).unwrap(), b);
        }
    }

    #[test]
    fn swap_substitution_is_not_properly_ordered() {
        // tau(a) = ba, tau(b) = ab: maximal ranges swap a and b forever, so
        // there are two maximal chains.
        let spec = DiagramSpec::stationary([
            (v("a"), vec![v("b"), v("a")]),
            (v("b"), vec![v("a"), v("b")]),
        ]);
        let d = validate(&spec).unwrap();
        assert!(!d.is_properly_ordered());
        assert_eq!(d.max_chain().unwrap_err(), Error::NotProperlyOrdered);
    }

    #[test]
    fn unfocused_diagram_reports_the_level() {
        // Minimal edges: a -> a but b -> b, two distinct ranges.
        let spec = DiagramSpec::stationary([
            (v("a"), vec![v("a"), v("b")]),
            (v("b"), vec![v("b"), v("a")]),
        ]);
        let d = validate(&spec).unwrap();
        assert!(!d.is_focused());
        assert_eq!(d.min_chain().unwrap_err(), Error::NotFocused { level: 2 });
    }

    #[test]
    fn level_mismatch_is_rejected() {
        // The schedule alternates a two-vertex template with one whose
        // ranges only mention a, so the shared vertex set disagrees.
        let spec = DiagramSpec {
            alphabet: vec![v("a"), v("b")],
            level1: [(v("a"), 1), (v("b"), 1)].into(),
            templates: vec![
                crate::diagram::LevelTemplate::new(
                    "T1",
                    [
                        (v("a"), vec![v("a"), v("b")]),
                        (v("b"), vec![v("b"), v("a")]),
                    ],
                ),
                crate::diagram::LevelTemplate::new(
                    "T2",
                    [(v("a"), vec![v("a"), v("a")]), (v("b"), vec![v("a")])],
                ),
            ],
            schedule: crate::diagram::Schedule {
                prefix: vec![],
                cycle: vec![TemplateId::new("T1"), TemplateId::new("T2")],
            },
        };
        assert!(matches!(
            validate(&spec),
            Err(Error::LevelMismatch { .. })
        ));
    }

    #[test]
    fn path_count_matches_word_expansion_on_abb_ab() {
        // Expanding tau twice from a gives tau(abb) = abb ab ab, which
        // contains b four times, so there are 4 paths (a,3) -> (b,1).
        let d = abb_ab();
        let a = d.vertex_id(&v("a")).unwrap();
        let b = d.vertex_id(&v("b")).unwrap();
        assert_eq!(d.path_count(a, 3, b, 1).unwrap(), 4);
        assert_eq!(d.path_count(a, 3, a, 1).unwrap(), 3);
        assert_eq!(d.path_count(a, 2, b, 1).unwrap(), 2);
        assert_eq!(d.path_count(b, 2, b, 1).unwrap(), 1);
    }

    #[test]
    fn path_count_brute_force_cross_check() {
        // Independent oracle: enumerate every label assignment explicitly.
        let d = abb_ab();
        fn count(d: &ValidatedDiagram, a: VertexId, n: usize, b: VertexId, m: usize) -> u64 {
            if n == m {
                return (a == b) as u64;
            }
            let word = d.word_at(n, a).unwrap().to_vec();
            word.iter().map(|&r| count(d, r, n - 1, b, m)).sum()
        }
        for n in 2..=6 {
            for m in 1..n {
                for &a in d.vertices_at_level(n) {
                    for &b in d.vertices_at_level(m) {
                        assert_eq!(
                            d.path_count(a, n, b, m).unwrap(),
                            count(&d, a, n, b, m),
                            "paths ({a:?},{n}) -> ({b:?},{m})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn path_count_rejects_bad_levels() {
        let d = abb_ab();
        let a = d.vertex_id(&v("a")).unwrap();
        assert!(matches!(
            d.path_count(a, 2, a, 2),
            Err(Error::BadLevels { .. })
        ));
        assert!(matches!(
            d.path_count(a, 1, a, 2),
            Err(Error::BadLevels { .. })
        ));
    }

    #[test]
    fn dyadic_chains_are_constant() {
        let d = dyadic();
        let a = d.vertex_id(&v("a")).unwrap();
        assert!(d.is_focused());
        assert!(d.is_properly_ordered());
        for n in 1..6 {
            assert_eq!(d.extremal_source(n, End::Min).unwrap(), a);
            assert_eq!(d.extremal_source(n, End::Max).unwrap(), a);
        }
        assert_eq!(d.path_count(a, 13, a, 1).unwrap(), 1 << 12);
    }
}
