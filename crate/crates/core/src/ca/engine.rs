//! The automaton line and its evolution.
//!
//! A configuration is an infinite line of cells indexed by k: cells k <= 0
//! are all-clock forever, a finite core holds cells 1..=core.len() explicitly,
//! and beyond the core the line continues with a periodic fill read off the
//! maximal chain. The initial line places the window of row -k at cell k, so
//! the whole line is one diagonal ray across the orbit array of the minimal
//! path.
//!
//! Simulation is synchronous, but only cells whose neighbourhood changed in
//! the previous step can change now, so the engine tracks a dirty set: the
//! handful of cells riding carries plus the front where the ray meets the
//! maximal-chain fill. The core grows on demand when the front reaches it.

use serde_json::{json, Value};

use crate::ca::rule::RuleTable;
use crate::ca::step::Step;
use crate::error::{Error, Result};
use crate::path::Tail;
use crate::spacetime::{encode_row, tail_symbol, Symbol};
use crate::validated::ValidatedDiagram;
use crate::vershik::{minimal_path, predecessor};

/// A configuration of the line: implicit clocks at k <= 0, explicit core at
/// cells 1..=core.len(), then the periodic left fill, anchored so that
/// `left_cycle[0]` is the value of the first cell past the core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CAConfig {
    pub left_cycle: Vec<Step>,
    pub core: Vec<Step>,
}

impl CAConfig {
    /// Window width carried by every cell.
    pub fn w(&self) -> usize {
        self.left_cycle.first().map_or(0, Step::len)
    }

    /// Index of the last explicitly stored cell.
    pub fn k_hi(&self) -> i64 {
        self.core.len() as i64
    }

    pub fn cell(&self, k: i64) -> Step {
        if k <= 0 {
            Step::clocks(self.w())
        } else if k <= self.core.len() as i64 {
            self.core[(k - 1) as usize]
        } else {
            let p = self.left_cycle.len() as i64;
            self.left_cycle[((k - self.core.len() as i64 - 1) % p) as usize]
        }
    }

    fn check(&self) -> Result<()> {
        if self.left_cycle.is_empty() {
            return Err(Error::ParseError(
                "configuration needs a nonempty left fill cycle".into(),
            ));
        }
        let w = self.w();
        if w == 0 {
            return Err(Error::ParseError("configuration windows are empty".into()));
        }
        for s in self.left_cycle.iter().chain(&self.core) {
            if s.len() != w {
                return Err(Error::ParseError(
                    "configuration windows disagree on width".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn to_named(&self, d: &ValidatedDiagram) -> Value {
        json!({
            "left": { "cycle": self.left_cycle.iter().map(|s| s.to_named(d)).collect::<Vec<_>>() },
            "core": self.core.iter().map(|s| s.to_named(d)).collect::<Vec<_>>(),
            "right": "clock",
        })
    }

    pub fn to_json(&self, d: &ValidatedDiagram) -> String {
        serde_json::to_string_pretty(&self.to_named(d)).expect("configuration serializes")
    }
}

/// Parses the JSON form written by `to_json`.
pub fn parse_config(d: &ValidatedDiagram, text: &str) -> Result<CAConfig> {
    #[derive(serde::Deserialize)]
    struct RawLeft {
        cycle: Vec<Vec<String>>,
    }
    #[derive(serde::Deserialize)]
    struct Raw {
        left: RawLeft,
        core: Vec<Vec<String>>,
        right: String,
    }
    let raw: Raw = serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
    if raw.right != "clock" {
        return Err(Error::ParseError(format!(
            "unknown right fill {:?}, only \"clock\" is defined",
            raw.right
        )));
    }
    let parse_steps = |steps: &[Vec<String>]| -> Result<Vec<Step>> {
        steps.iter().map(|names| Step::parse_named(d, names)).collect()
    };
    let cfg = CAConfig {
        left_cycle: parse_steps(&raw.left.cycle)?,
        core: parse_steps(&raw.core)?,
    };
    cfg.check()?;
    Ok(cfg)
}

/// The fill window a deep cell shows: maximal-chain symbols at columns
/// k-w+1 ..= k (clocks where the column is not positive).
fn max_chain_window(d: &ValidatedDiagram, k: i64, w: usize) -> Result<Step> {
    let mut syms = Vec::with_capacity(w);
    for j in (k - w as i64 + 1)..=k {
        syms.push(if j <= 0 {
            Symbol::Clock
        } else {
            tail_symbol(d, Tail::Max, j as usize)?
        });
    }
    Ok(Step::from_slice(&syms))
}

/// Builds the initial line for the diagram: cell k holds the window of row
/// -k of the minimal path's orbit array. The core extends until a full fill
/// period of deeper cells provably equals the maximal-chain fill, or to
/// `min_core` cells if that is larger.
pub fn make_x_init(d: &ValidatedDiagram, w: usize, min_core: usize) -> Result<CAConfig> {
    let period = d.schedule_cycle_len() as i64;
    let settle = (d.schedule_prefix_len() as i64).max(d.max_chain()?.prefix_len() as i64);
    let mut reach = settle + w as i64 + 2 * period + min_core as i64 + 8;
    loop {
        let mut windows = Vec::with_capacity(reach as usize);
        let mut p = minimal_path(d)?;
        for k in 1..=reach {
            p = predecessor(d, &p)?;
            let row = encode_row(d, &p, k - w as i64 + 1, k)?;
            windows.push(Step::from_slice(&row));
        }
        // Deepest cell whose window is not yet pure maximal-chain fill.
        let mut first_bad = 0i64;
        for k in (1..=reach).rev() {
            if windows[(k - 1) as usize] != max_chain_window(d, k, w)? {
                first_bad = k;
                break;
            }
        }
        if reach - first_bad >= period + 2 {
            // The fill anchor must clear the schedule and chain prefixes,
            // otherwise the cycle would not repeat beyond the core.
            let k_hi = first_bad.max(min_core as i64).max(settle + w as i64);
            let core = windows[..k_hi as usize].to_vec();
            let left_cycle = (0..period)
                .map(|i| max_chain_window(d, k_hi + 1 + i, w))
                .collect::<Result<_>>()?;
            let cfg = CAConfig { left_cycle, core };
            cfg.check()?;
            return Ok(cfg);
        }
        reach *= 2;
        if reach > 1 << 14 {
            return Err(Error::InsufficientHarvest {
                detail: "initial line never settles onto the maximal chain".into(),
            });
        }
    }
}

/// A running line: the configuration plus the dirty set that makes long runs
/// cheap. Only cells whose neighbourhood changed in the previous step are
/// re-evaluated; everything else provably keeps its value.
#[derive(Debug, Clone)]
pub struct Automaton<'a> {
    d: &'a ValidatedDiagram,
    rule: &'a RuleTable,
    /// Fill values with the fixed anchor: cycle[i] is the value of every
    /// cell k > core.len() with (k - anchor) = i mod period.
    cycle: Vec<Step>,
    anchor: i64,
    core: Vec<Step>,
    clock: Step,
    t: u64,
    dirty: Vec<i64>,
}

impl<'a> Automaton<'a> {
    pub fn new(d: &'a ValidatedDiagram, rule: &'a RuleTable, cfg: &CAConfig) -> Result<Self> {
        cfg.check()?;
        if cfg.w() != rule.w() {
            return Err(Error::UnsupportedParams {
                detail: format!(
                    "configuration windows have width {} but the rule expects {}",
                    cfg.w(),
                    rule.w()
                ),
            });
        }
        if rule.radius() != 1 {
            return Err(Error::UnsupportedParams {
                detail: format!("simulation supports radius 1, rule has {}", rule.radius()),
            });
        }
        let clock = Step::clocks(cfg.w());
        let k_hi = cfg.k_hi();
        let aut = Automaton {
            d,
            rule,
            cycle: cfg.left_cycle.clone(),
            anchor: k_hi + 1,
            core: cfg.core.clone(),
            clock,
            t: 0,
            dirty: (0..=k_hi + 1).collect(),
        };
        aut.check_static_regions()?;
        Ok(aut)
    }

    /// The two infinite regions must reproduce themselves, otherwise skipping
    /// them during simulation would be unsound.
    fn check_static_regions(&self) -> Result<()> {
        let ctx = vec![self.clock; 3];
        match self.rule.get(&ctx) {
            None => {
                return Err(Error::UnseenContext {
                    cell: 0,
                    context: self.format_ctx(&ctx),
                })
            }
            Some(out) if out != self.clock => return Err(Error::ClockRegionDisturbed { cell: 0 }),
            Some(_) => {}
        }
        let k_hi = self.core.len() as i64;
        for k in (k_hi + 2)..(k_hi + 2 + self.cycle.len() as i64) {
            let ctx = vec![self.cell(k - 1), self.cell(k), self.cell(k + 1)];
            let out = self.rule.get(&ctx).ok_or_else(|| Error::UnseenContext {
                cell: k,
                context: self.format_ctx(&ctx),
            })?;
            if out != self.cell(k) {
                return Err(Error::LeftFillNotInvariant {
                    phase: ((k - self.anchor).rem_euclid(self.cycle.len() as i64)) as usize,
                });
            }
        }
        Ok(())
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn k_hi(&self) -> i64 {
        self.core.len() as i64
    }

    pub fn cell(&self, k: i64) -> Step {
        if k <= 0 {
            self.clock
        } else if k <= self.core.len() as i64 {
            self.core[(k - 1) as usize]
        } else {
            let p = self.cycle.len() as i64;
            self.cycle[((k - self.anchor).rem_euclid(p)) as usize]
        }
    }

    fn format_ctx(&self, ctx: &[Step]) -> String {
        ctx.iter()
            .map(|s| format!("[{}]", s.to_named(self.d).join(" ")))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn extend_to(&mut self, k: i64) {
        while (self.core.len() as i64) < k {
            let next = self.cell(self.core.len() as i64 + 1);
            self.core.push(next);
        }
    }

    /// One synchronous step of the whole line.
    pub fn step(&mut self) -> Result<()> {
        let mut candidates: Vec<i64> = Vec::with_capacity(self.dirty.len() * 3);
        for &k in &self.dirty {
            candidates.extend([k - 1, k, k + 1]);
        }
        candidates.sort_unstable();
        candidates.dedup();
        let mut changes: Vec<(i64, Step)> = Vec::new();
        for &k in &candidates {
            if k < 0 {
                // Such a cell and its whole neighbourhood are clocks; the
                // quiescence check already covers it.
                continue;
            }
            let ctx = vec![self.cell(k - 1), self.cell(k), self.cell(k + 1)];
            let out = self.rule.get(&ctx).ok_or_else(|| Error::UnseenContext {
                cell: k,
                context: self.format_ctx(&ctx),
            })?;
            if out != self.cell(k) {
                changes.push((k, out));
            }
        }
        self.dirty.clear();
        for (k, out) in changes {
            if k <= 0 {
                return Err(Error::ClockRegionDisturbed { cell: k });
            }
            self.extend_to(k);
            self.core[(k - 1) as usize] = out;
            self.dirty.push(k);
        }
        self.t += 1;
        Ok(())
    }

    pub fn run(&mut self, steps: u64) -> Result<()> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }

    /// The current line as a standalone configuration, with the fill cycle
    /// re-anchored to the current core end.
    pub fn snapshot(&self) -> CAConfig {
        let p = self.cycle.len() as i64;
        let k_hi = self.core.len() as i64;
        let left_cycle = (0..p)
            .map(|i| self.cycle[((k_hi + 1 + i - self.anchor).rem_euclid(p)) as usize])
            .collect();
        CAConfig {
            left_cycle,
            core: self.core.clone(),
        }
    }
}

/// Runs `steps` synchronous steps and returns every intermediate line,
/// the initial one included.
pub fn simulate(
    d: &ValidatedDiagram,
    rule: &RuleTable,
    cfg: &CAConfig,
    steps: u64,
) -> Result<Vec<CAConfig>> {
    let mut aut = Automaton::new(d, rule, cfg)?;
    let mut out = Vec::with_capacity(steps as usize + 1);
    out.push(aut.snapshot());
    for _ in 0..steps {
        aut.step()?;
        out.push(aut.snapshot());
    }
    Ok(out)
}
