//! Table-driven synthesis of the automaton's local rule.
//!
//! Every occurrence of 2r+1 adjacent cells in harvested orbit arrays
//! proposes one table entry: the context is the tuple of their windows and
//! the output is the centre cell's window one row later. Cell k+i sits on
//! row m-i of the array when cell k sits on row m, so the context rows climb
//! toward lower cells: the tuple is read diagonally across the array.
//!
//! Functionality (single-valuedness) is empirical and certified by doubling
//! the harvested row range until no new contexts appear; a conflict surfaces
//! the two placements as an error instead of guessing.

use std::collections::{BTreeSet, HashMap};

use serde_json::{json, Value};

use crate::ca::step::{Step, MAX_STEP_WIDTH};
use crate::error::{Error, Result};
use crate::path::PathRep;
use crate::spacetime::{orbit_slab, active_depth, Slab, Symbol};
use crate::validated::ValidatedDiagram;

/// Row ranges to harvest: scanning starts at `initial_rows` around the base
/// row and doubles until the table stabilizes or `max_rows` is reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarvestSpec {
    pub initial_rows: i64,
    pub max_rows: i64,
}

impl Default for HarvestSpec {
    fn default() -> Self {
        HarvestSpec {
            initial_rows: 32,
            max_rows: 1024,
        }
    }
}

/// Saturation certificate carried by rules built from a harvest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certificate {
    pub harvest_rows: i64,
    pub saturated: bool,
}

/// The local rule: a single-valued map from neighbourhood window tuples to
/// the centre cell's next window.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleTable {
    w: usize,
    r: usize,
    map: HashMap<Vec<Step>, Step>,
    certificate: Option<Certificate>,
}

impl RuleTable {
    pub fn w(&self) -> usize {
        self.w
    }

    pub fn radius(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// None when the table was parsed from a file rather than harvested.
    pub fn certificate(&self) -> Option<Certificate> {
        self.certificate
    }

    pub fn get(&self, ctx: &[Step]) -> Option<Step> {
        self.map.get(ctx).copied()
    }

    /// Bare sorted array of {"ctx": [...], "out": ...} entries with windows
    /// as arrays of symbol names.
    pub fn to_named(&self, d: &ValidatedDiagram) -> Value {
        let mut entries: Vec<(&Vec<Step>, &Step)> = self.map.iter().collect();
        entries.sort();
        Value::Array(
            entries
                .into_iter()
                .map(|(ctx, out)| {
                    json!({
                        "ctx": ctx.iter().map(|s| s.to_named(d)).collect::<Vec<_>>(),
                        "out": out.to_named(d),
                    })
                })
                .collect(),
        )
    }

    pub fn to_json(&self, d: &ValidatedDiagram) -> String {
        serde_json::to_string_pretty(&self.to_named(d)).expect("rule table serializes")
    }
}

/// Parses the JSON form, inferring the window width from the steps and the
/// radius from the context length, and re-checking single-valuedness.
pub fn parse_rule(d: &ValidatedDiagram, text: &str) -> Result<RuleTable> {
    #[derive(serde::Deserialize)]
    struct RawEntry {
        ctx: Vec<Vec<String>>,
        out: Vec<String>,
    }
    let raw: Vec<RawEntry> =
        serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
    if raw.is_empty() {
        return Err(Error::ParseError("rule table is empty".into()));
    }
    let w = raw[0].out.len();
    let r = raw[0].ctx.len() / 2;
    if raw[0].ctx.len() != 2 * r + 1 || r == 0 {
        return Err(Error::ParseError(format!(
            "context of {} windows is not an odd-width neighbourhood",
            raw[0].ctx.len()
        )));
    }
    let mut map = HashMap::with_capacity(raw.len());
    for entry in &raw {
        if entry.ctx.len() != 2 * r + 1 || entry.out.len() != w {
            return Err(Error::ParseError(
                "rule entries disagree on window width or radius".into(),
            ));
        }
        let ctx: Vec<Step> = entry
            .ctx
            .iter()
            .map(|names| {
                let step = Step::parse_named(d, names)?;
                if step.len() != w {
                    return Err(Error::ParseError(
                        "rule entries disagree on window width".into(),
                    ));
                }
                Ok(step)
            })
            .collect::<Result<_>>()?;
        let out = Step::parse_named(d, &entry.out)?;
        if let Some(prev) = map.insert(ctx, out) {
            if prev != out {
                return Err(Error::AmbiguousRule {
                    w,
                    context: entry
                        .ctx
                        .iter()
                        .map(|names| format!("[{}]", names.join(" ")))
                        .collect::<Vec<_>>()
                        .join(" "),
                    out_a: format!("[{}]", prev.to_named(d).join(" ")),
                    out_b: format!("[{}]", entry.out.join(" ")),
                });
            }
        }
    }
    Ok(RuleTable {
        w,
        r,
        map,
        certificate: None,
    })
}

/// All window values occurring in harvested rows, clock boundaries included,
/// with a doubling-stability flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepSet {
    pub steps: BTreeSet<Step>,
    pub rows_used: i64,
    pub saturated: bool,
}

fn check_params(w: usize, r: usize) -> Result<()> {
    if !(2..=MAX_STEP_WIDTH).contains(&w) || !(1..=2).contains(&r) {
        return Err(Error::UnsupportedParams {
            detail: format!("window width {w} with radius {r}"),
        });
    }
    Ok(())
}

/// Window of row `m` at columns k-w+1 ..= k; columns left of the slab are
/// in the clock region by construction of the slab extents.
fn win(slab: &Slab, m: i64, k: i64, w: usize) -> Step {
    let mut syms = [Symbol::Clock; MAX_STEP_WIDTH];
    for (i, j) in ((k - w as i64 + 1)..=k).enumerate() {
        syms[i] = match slab.get(m, j) {
            Some(s) => s,
            None => {
                debug_assert!(j <= 0, "window column {j} outside the harvested slab");
                Symbol::Clock
            }
        };
    }
    Step::from_slice(&syms[..w])
}

/// Harvest extents: enough rows for the requested range plus the context
/// radius, and columns from the clock region out past where every row of the
/// window has settled onto its tail chain for two template periods.
fn harvest_slab(d: &ValidatedDiagram, rows: i64, w: usize, r: i64) -> Result<(Slab, i64)> {
    let base = PathRep::minimal();
    let depth = active_depth(d, &base, (-rows - r, rows + r))? as i64;
    let clen = d.schedule_cycle_len() as i64;
    let mut settle = d.schedule_prefix_len() as i64;
    settle = settle.max(d.min_chain()?.prefix_len() as i64);
    settle = settle.max(d.max_chain()?.prefix_len() as i64);
    let kmax = depth.max(settle) + 2 * clen + w as i64 + 2;
    let slab = orbit_slab(
        d,
        &base,
        (-rows - r, rows + r),
        (-(w as i64) - r, kmax + r),
    )?;
    Ok((slab, kmax))
}

fn format_ctx(d: &ValidatedDiagram, ctx: &[Step]) -> String {
    ctx.iter()
        .map(|s| format!("[{}]", s.to_named(d).join(" ")))
        .collect::<Vec<_>>()
        .join(" ")
}

fn scan_rule(
    d: &ValidatedDiagram,
    slab: &Slab,
    kmax: i64,
    w: usize,
    r: i64,
    map: &mut HashMap<Vec<Step>, Step>,
) -> Result<()> {
    for m in (slab.m0 + r)..=(slab.m1() - r) {
        for k in -1..=kmax {
            let ctx: Vec<Step> = (0..=2 * r)
                .map(|i| win(slab, m + r - i, k - r + i, w))
                .collect();
            let out = win(slab, m + 1, k, w);
            match map.get(&ctx) {
                None => {
                    map.insert(ctx, out);
                }
                Some(&prev) if prev != out => {
                    return Err(Error::AmbiguousRule {
                        w,
                        context: format_ctx(d, &ctx),
                        out_a: format!("[{}]", prev.to_named(d).join(" ")),
                        out_b: format!("[{}]", out.to_named(d).join(" ")),
                    });
                }
                Some(_) => {}
            }
        }
    }
    Ok(())
}

/// Builds the radius-r rule over width-w windows from harvested orbit rows,
/// doubling the row range until the table saturates. A context seen with two
/// different outputs is reported as an ambiguity, not patched over.
pub fn build_rule(
    d: &ValidatedDiagram,
    harvest: &HarvestSpec,
    w: usize,
    r: usize,
) -> Result<RuleTable> {
    check_params(w, r)?;
    let ri = r as i64;
    let mut rows = harvest.initial_rows.max(4);
    let mut map = HashMap::new();
    let (slab, kmax) = harvest_slab(d, rows, w, ri)?;
    scan_rule(d, &slab, kmax, w, ri, &mut map)?;
    loop {
        let doubled = rows * 2;
        if doubled > harvest.max_rows {
            return Ok(RuleTable {
                w,
                r,
                map,
                certificate: Some(Certificate {
                    harvest_rows: rows,
                    saturated: false,
                }),
            });
        }
        let before = map.len();
        let (slab, kmax) = harvest_slab(d, doubled, w, ri)?;
        scan_rule(d, &slab, kmax, w, ri, &mut map)?;
        if map.len() == before {
            return Ok(RuleTable {
                w,
                r,
                map,
                certificate: Some(Certificate {
                    harvest_rows: doubled,
                    saturated: true,
                }),
            });
        }
        rows = doubled;
    }
}

/// Tries the parameter ladder (w, r) = (3, 1) then (4, 1), returning the
/// first functional table; the last ambiguity is reported if none works.
pub fn synthesize(d: &ValidatedDiagram, harvest: &HarvestSpec) -> Result<RuleTable> {
    let ladder = [(3usize, 1usize), (4, 1)];
    let mut last = None;
    for (w, r) in ladder {
        match build_rule(d, harvest, w, r) {
            Ok(table) => return Ok(table),
            Err(e @ Error::AmbiguousRule { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("ladder is nonempty"))
}

/// Collects every width-w window occurring in harvested rows (the all-clock
/// boundary included), doubling the row range until the set stabilizes.
pub fn enumerate_steps(d: &ValidatedDiagram, harvest: &HarvestSpec, w: usize) -> Result<StepSet> {
    check_params(w, 1)?;
    let mut rows = harvest.initial_rows.max(4);
    let mut steps = BTreeSet::new();
    let scan = |rows: i64, steps: &mut BTreeSet<Step>| -> Result<()> {
        let (slab, kmax) = harvest_slab(d, rows, w, 1)?;
        for m in slab.m0..=slab.m1() {
            for k in (1 - w as i64)..=kmax {
                steps.insert(win(&slab, m, k, w));
            }
        }
        Ok(())
    };
    scan(rows, &mut steps)?;
    loop {
        let doubled = rows * 2;
        if doubled > harvest.max_rows {
            return Ok(StepSet {
                steps,
                rows_used: rows,
                saturated: false,
            });
        }
        let before = steps.len();
        scan(doubled, &mut steps)?;
        if steps.len() == before {
            return Ok(StepSet {
                steps,
                rows_used: doubled,
                saturated: true,
            });
        }
        rows = doubled;
    }
}
