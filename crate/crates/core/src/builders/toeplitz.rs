//! Diagrams for Toeplitz sequences built by staged periodic filling.
//!
//! A Toeplitz sequence is described by a chain of periods `s1 | s2 | ...`
//! where stage k writes letters at some residues modulo `sk` that previous
//! stages left open. Positions never written by any stage are *holes*; a
//! well-formed description fills every position of the inspection window.
//!
//! The resulting diagram takes the aligned words of length `sk` as the
//! level-k vertices (each level-1 vertex gets `s1` clock edges, so the path
//! count down to level k is exactly `sk`), and the division of a level-k word
//! into its `sk / s(k-1)` aligned blocks as the ordered edge word.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::diagram::{DiagramSpec, LevelTemplate, Schedule, TemplateId, VertexLabel};
use crate::error::{Error, Result};
use crate::validated::validate;

/// One declared filling stage: the period and the letters written at chosen
/// residues (which must be holes of the previous stages).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToeplitzStage {
    pub s: u64,
    #[serde(default)]
    pub fill: BTreeMap<u64, VertexLabel>,
}

/// One tail stage, applied cyclically after the declared stages until the
/// sequence is complete. The period grows by `ratio`; `fill` is keyed by the
/// *index* of the hole (in increasing residue order) rather than by absolute
/// residue, so one rule can apply at every scale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailStage {
    pub ratio: u64,
    #[serde(default)]
    pub fill: BTreeMap<u64, VertexLabel>,
}

/// Full description of a Toeplitz sequence plus the declared width bound the
/// resulting diagram must respect.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ToeplitzSpec {
    pub alphabet: Vec<VertexLabel>,
    pub stages: Vec<ToeplitzStage>,
    #[serde(default)]
    pub tail: Vec<TailStage>,
    pub width_bound: u64,
}

/// The aligned words of one level, in lexicographic order. Index i is the
/// word named `v{i}` in the built diagram; ordering by content (rather than
/// by first occurrence) keeps the naming aligned across levels with the same
/// internal structure, which is what lets the template schedule go periodic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordCollection {
    pub level: usize,
    pub period: u64,
    pub words: Vec<String>,
}

/// How the filling went: periods reached, holes left after each stage, and
/// where (if anywhere) the sequence became fully periodic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FillReport {
    pub window: (i64, i64),
    pub periods: Vec<u64>,
    pub holes_after_stage: Vec<usize>,
    pub complete_at_stage: Option<usize>,
    pub levels_harvested: usize,
    pub width: usize,
}

struct ResolvedStage {
    s: u64,
    fill: BTreeMap<u64, VertexLabel>,
}

/// Upper bound on simultaneously open residues per period; a description
/// needing more than this is far outside any usable width bound.
const MAX_HOLES: usize = 4096;

fn check_alphabet(spec: &ToeplitzSpec) -> Result<()> {
    if spec.alphabet.is_empty() {
        return Err(Error::BadStage {
            stage: 0,
            detail: "alphabet is empty".into(),
        });
    }
    let mut seen = BTreeSet::new();
    for l in &spec.alphabet {
        l.validate()?;
        if !seen.insert(l) {
            return Err(Error::BadVertexLabel {
                label: l.to_string(),
                detail: "duplicate alphabet label".into(),
            });
        }
    }
    Ok(())
}

fn check_fill_labels(
    stage: usize,
    fill: &BTreeMap<u64, VertexLabel>,
    alphabet: &BTreeSet<&VertexLabel>,
) -> Result<()> {
    for label in fill.values() {
        if !alphabet.contains(label) {
            return Err(Error::BadStage {
                stage,
                detail: format!("fill letter {label} is not in the alphabet"),
            });
        }
    }
    Ok(())
}

/// Replaces the hole set of period `prev` by its copies inside period `s`.
fn lift_holes(holes: &[u64], prev: u64, s: u64) -> Result<Vec<u64>> {
    let ratio = s / prev;
    if (holes.len() as u64).saturating_mul(ratio) > 8 * MAX_HOLES as u64 {
        return Err(Error::WidthBoundViolated {
            bound: 0,
            detail: format!("{} open residues at period {s}", holes.len() as u64 * ratio),
        });
    }
    let mut lifted = Vec::with_capacity(holes.len() * ratio as usize);
    for j in 0..ratio {
        for &h in holes {
            lifted.push(j * prev + h);
        }
    }
    lifted.sort_unstable();
    Ok(lifted)
}

fn apply_stage(
    stage_no: usize,
    lifted: Vec<u64>,
    fill_offsets: &BTreeMap<u64, VertexLabel>,
) -> Result<Vec<u64>> {
    let lifted_set: BTreeSet<u64> = lifted.iter().copied().collect();
    for &offset in fill_offsets.keys() {
        if !lifted_set.contains(&offset) {
            return Err(Error::FillOverlapsPeriodic {
                stage: stage_no,
                offset,
            });
        }
    }
    Ok(lifted
        .into_iter()
        .filter(|h| !fill_offsets.contains_key(h))
        .collect())
}

fn resolve_stages(
    spec: &ToeplitzSpec,
    horizon: usize,
) -> Result<(Vec<ResolvedStage>, Vec<usize>, Option<usize>)> {
    let alphabet: BTreeSet<&VertexLabel> = spec.alphabet.iter().collect();
    if spec.stages.is_empty() {
        return Err(Error::BadStage {
            stage: 1,
            detail: "at least one declared stage is required".into(),
        });
    }
    let mut resolved: Vec<ResolvedStage> = Vec::new();
    let mut holes: Vec<u64> = Vec::new();
    let mut holes_after: Vec<usize> = Vec::new();
    let mut complete_at = None;

    for (i, stage) in spec.stages.iter().enumerate() {
        let stage_no = i + 1;
        check_fill_labels(stage_no, &stage.fill, &alphabet)?;
        if let Some(&offset) = stage.fill.keys().find(|&&o| o >= stage.s) {
            return Err(Error::BadStage {
                stage: stage_no,
                detail: format!("fill offset {offset} is outside the period {}", stage.s),
            });
        }
        if i == 0 {
            if stage.s < 2 {
                return Err(Error::BadStage {
                    stage: stage_no,
                    detail: format!("first period {} must be at least 2", stage.s),
                });
            }
            if stage.s > MAX_HOLES as u64 {
                return Err(Error::WidthBoundViolated {
                    bound: spec.width_bound,
                    detail: format!("first period {} is far beyond any usable width", stage.s),
                });
            }
            holes = (0..stage.s).filter(|o| !stage.fill.contains_key(o)).collect();
            if holes.is_empty() {
                return Err(Error::PeriodicAtFirstStage);
            }
        } else {
            let prev = resolved.last().unwrap().s;
            if stage.s <= prev || stage.s % prev != 0 {
                return Err(Error::BadStage {
                    stage: stage_no,
                    detail: format!(
                        "period {} must be a proper multiple of the previous period {prev}",
                        stage.s
                    ),
                });
            }
            if stage.s / prev > spec.width_bound {
                return Err(Error::WidthBoundViolated {
                    bound: spec.width_bound,
                    detail: format!(
                        "stage {stage_no} period ratio {} alone exceeds the bound",
                        stage.s / prev
                    ),
                });
            }
            let lifted = lift_holes(&holes, prev, stage.s)?;
            holes = apply_stage(stage_no, lifted, &stage.fill)?;
        }
        if holes.len() > MAX_HOLES {
            return Err(Error::WidthBoundViolated {
                bound: spec.width_bound,
                detail: format!("{} open residues after stage {stage_no}", holes.len()),
            });
        }
        holes_after.push(holes.len());
        if holes.is_empty() && complete_at.is_none() {
            complete_at = Some(stage_no);
        }
        resolved.push(ResolvedStage {
            s: stage.s,
            fill: stage.fill.clone(),
        });
    }

    // Tail stages write by hole index, cyclically, until nothing is open.
    let fill_cap: u64 = (horizon as u64).saturating_mul(64).max(1 << 20);
    if !holes.is_empty() && !spec.tail.is_empty() {
        let mut tail_iter = spec.tail.iter().cycle();
        let mut since_progress = 0usize;
        while !holes.is_empty() {
            let tail = tail_iter.next().unwrap();
            let stage_no = resolved.len() + 1;
            let prev = resolved.last().unwrap().s;
            if tail.ratio < 2 {
                return Err(Error::BadStage {
                    stage: stage_no,
                    detail: format!("tail ratio {} must be at least 2", tail.ratio),
                });
            }
            if tail.ratio > spec.width_bound {
                return Err(Error::WidthBoundViolated {
                    bound: spec.width_bound,
                    detail: format!("tail ratio {} alone exceeds the bound", tail.ratio),
                });
            }
            let s = prev.checked_mul(tail.ratio).ok_or(Error::CountOverflow)?;
            if s > fill_cap {
                break;
            }
            check_fill_labels(stage_no, &tail.fill, &alphabet)?;
            let lifted = lift_holes(&holes, prev, s)?;
            let mut fill_offsets = BTreeMap::new();
            for (&idx, label) in &tail.fill {
                let offset = *lifted.get(idx as usize).ok_or_else(|| Error::BadStage {
                    stage: stage_no,
                    detail: format!(
                        "hole index {idx} out of range ({} holes at period {s})",
                        lifted.len()
                    ),
                })?;
                fill_offsets.insert(offset, label.clone());
            }
            if fill_offsets.is_empty() {
                since_progress += 1;
                if since_progress >= spec.tail.len() {
                    return Err(Error::BadStage {
                        stage: stage_no,
                        detail: "a full tail cycle fills no holes".into(),
                    });
                }
            } else {
                since_progress = 0;
            }
            holes = apply_stage(stage_no, lifted, &fill_offsets)?;
            if holes.len() > MAX_HOLES {
                return Err(Error::WidthBoundViolated {
                    bound: spec.width_bound,
                    detail: format!("{} open residues after stage {stage_no}", holes.len()),
                });
            }
            holes_after.push(holes.len());
            if holes.is_empty() && complete_at.is_none() {
                complete_at = Some(resolved.len() + 1);
            }
            resolved.push(ResolvedStage { s, fill: fill_offsets });
        }
    }

    // Once complete, the sequence is periodic; deeper levels just regroup it.
    // Extend with empty stages (repeating the last ratio) so template cycle
    // detection has levels to look at.
    if holes.is_empty() && resolved.len() >= 2 {
        let harvest_cap = (horizon / 4) as u64;
        let ratio = resolved[resolved.len() - 1].s / resolved[resolved.len() - 2].s;
        while let Some(s) = resolved.last().unwrap().s.checked_mul(ratio) {
            if s > harvest_cap {
                break;
            }
            holes_after.push(0);
            resolved.push(ResolvedStage {
                s,
                fill: BTreeMap::new(),
            });
        }
    }

    Ok((resolved, holes_after, complete_at))
}

/// The sequence value at position `p`, if some stage fills it.
fn eval(stages: &[ResolvedStage], p: i64) -> Option<&VertexLabel> {
    stages
        .iter()
        .find_map(|st| st.fill.get(&(p.rem_euclid(st.s as i64) as u64)))
}

fn harvest_level(
    stages: &[ResolvedStage],
    window: &[VertexLabel],
    h: i64,
    level: usize,
) -> Result<Vec<Vec<VertexLabel>>> {
    let s = stages[level - 1].s as i64;
    let first_start = (-h).div_euclid(s) * s + if (-h) % s == 0 { 0 } else { s };
    let mut seen: BTreeMap<Vec<VertexLabel>, i64> = BTreeMap::new();
    let mut b = first_start;
    while b + s <= h {
        let word: Vec<VertexLabel> = (b..b + s)
            .map(|p| window[(p + h) as usize].clone())
            .collect();
        seen.entry(word).or_insert(b);
        b += s;
    }
    // Scanning left to right, every word must already have shown up in the
    // first half of the window; a word debuting late leaves no room to trust
    // that the list is complete.
    for first in seen.values() {
        if first + s > 0 {
            return Err(Error::UnstabilizedWords { level });
        }
    }
    if seen.is_empty() {
        return Err(Error::InsufficientCoverage {
            detail: format!("no aligned block of period {s} fits the window"),
        });
    }
    Ok(seen.into_keys().collect())
}

/// Finds the smallest period, then the smallest start, such that the level
/// template sequence repeats with at least three periods of evidence.
fn template_periodicity(
    seq: &[BTreeMap<VertexLabel, Vec<VertexLabel>>],
) -> Option<(usize, usize)> {
    for period in 1..=seq.len() / 3 {
        for start in 0..=seq.len() - 3 * period {
            if (start..seq.len() - period).all(|i| seq[i] == seq[i + period]) {
                return Some((start, period));
            }
        }
    }
    None
}

/// Builds the diagram of a staged Toeplitz description.
///
/// `horizon` is the half-width of the inspection window `[-horizon, horizon)`
/// used to harvest aligned words; levels are harvested while their period
/// fits four times into the window. Errors if the window is not fully
/// filled, if any level's word list cannot be trusted complete, or if the
/// built diagram exceeds the declared width bound.
pub fn from_toeplitz(
    spec: &ToeplitzSpec,
    horizon: usize,
) -> Result<(DiagramSpec, Vec<WordCollection>, FillReport)> {
    check_alphabet(spec)?;
    if spec.width_bound == 0 {
        return Err(Error::WidthBoundViolated {
            bound: 0,
            detail: "declared bound must be positive".into(),
        });
    }
    let (stages, holes_after, complete_at) = resolve_stages(spec, horizon)?;
    if stages[0].s > spec.width_bound {
        return Err(Error::WidthBoundViolated {
            bound: spec.width_bound,
            detail: format!("first period {} alone exceeds the bound", stages[0].s),
        });
    }

    let h = horizon as i64;
    let mut window = Vec::with_capacity(2 * horizon);
    let mut open = 0usize;
    for p in -h..h {
        match eval(&stages, p) {
            Some(l) => window.push(l.clone()),
            None => {
                open += 1;
                window.push(VertexLabel::new("?"));
            }
        }
    }
    if open > 0 {
        return Err(Error::IncompleteFill { holes: open });
    }

    let harvest_cap = (horizon / 4) as u64;
    let levels: Vec<usize> = (1..=stages.len())
        .filter(|&k| stages[k - 1].s <= harvest_cap)
        .collect();
    if levels.len() < 4 {
        return Err(Error::InsufficientCoverage {
            detail: format!(
                "only {} levels fit the window; increase the horizon",
                levels.len()
            ),
        });
    }

    let mut per_level: Vec<Vec<Vec<VertexLabel>>> = Vec::new();
    for &k in &levels {
        per_level.push(harvest_level(&stages, &window, h, k)?);
    }

    let name = |rank: usize| VertexLabel::new(format!("v{rank}"));
    let collections: Vec<WordCollection> = levels
        .iter()
        .zip(&per_level)
        .map(|(&k, words)| {
            let single = spec.alphabet.iter().all(|l| l.as_str().chars().count() == 1);
            WordCollection {
                level: k,
                period: stages[k - 1].s,
                words: words
                    .iter()
                    .map(|w| {
                        let parts: Vec<&str> = w.iter().map(|l| l.as_str()).collect();
                        parts.join(if single { "" } else { " " })
                    })
                    .collect(),
            }
        })
        .collect();

    // Level-k template: each word, split into aligned blocks, renamed.
    let mut seq: Vec<BTreeMap<VertexLabel, Vec<VertexLabel>>> = Vec::new();
    for k in 1..levels.len() {
        let below: BTreeMap<&Vec<VertexLabel>, usize> = per_level[k - 1]
            .iter()
            .enumerate()
            .map(|(r, w)| (w, r))
            .collect();
        let block = stages[levels[k - 1] - 1].s as usize;
        let mut map = BTreeMap::new();
        for (rank, word) in per_level[k].iter().enumerate() {
            let mut ranges = Vec::with_capacity(word.len() / block);
            for chunk in word.chunks(block) {
                let r = below.get(&chunk.to_vec()).ok_or_else(|| {
                    Error::InsufficientCoverage {
                        detail: format!(
                            "a level-{} block is missing from level {}",
                            levels[k],
                            levels[k - 1]
                        ),
                    }
                })?;
                ranges.push(name(*r));
            }
            map.insert(name(rank), ranges);
        }
        seq.push(map);
    }

    let (start, period) = template_periodicity(&seq)
        .ok_or(Error::UnstabilizedWords {
            level: *levels.last().unwrap(),
        })?;

    // Deduplicate template content; id by first appearance.
    let used = &seq[..start + period];
    let mut templates: Vec<LevelTemplate> = Vec::new();
    let mut ids: Vec<TemplateId> = Vec::new();
    for map in used {
        let id = match templates.iter().find(|t| &t.ranges == map) {
            Some(t) => t.id.clone(),
            None => {
                let id = TemplateId::new(format!("T{}", templates.len() + 1));
                templates.push(LevelTemplate {
                    id: id.clone(),
                    ranges: map.clone(),
                });
                id
            }
        };
        ids.push(id);
    }
    let schedule = Schedule {
        prefix: ids[..start].to_vec(),
        cycle: ids[start..].to_vec(),
    };

    let max_words = per_level.iter().map(Vec::len).max().unwrap_or(0);
    let alphabet: Vec<VertexLabel> = (0..max_words).map(name).collect();
    let clocks: u32 = stages[0].s.try_into().map_err(|_| Error::CountOverflow)?;
    let level1: BTreeMap<VertexLabel, u32> = (0..per_level[0].len())
        .map(|r| (name(r), clocks))
        .collect();

    let diagram = DiagramSpec {
        alphabet,
        level1,
        templates,
        schedule,
    };
    diagram.check_wellformed()?;
    let v = validate(&diagram)?;
    let width = v.width_k();
    if width as u64 > spec.width_bound {
        return Err(Error::WidthBoundViolated {
            bound: spec.width_bound,
            detail: format!("built diagram has width {width}"),
        });
    }
    if !v.is_focused() {
        let level = (2..2 + seq.len()).find(|&n| v.focus_at_level(n).is_none());
        return Err(Error::NotFocused {
            level: level.unwrap_or(2),
        });
    }

    let report = FillReport {
        window: (-h, h),
        periods: stages.iter().map(|st| st.s).collect(),
        holes_after_stage: holes_after,
        complete_at_stage: complete_at,
        levels_harvested: levels.len(),
        width,
    };
    Ok((diagram, collections, report))
}
