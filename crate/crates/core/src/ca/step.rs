//! Cell states of the automaton: short windows of one array row.
//!
//! Cell k of the automaton carries the w-symbol window of some array row at
//! columns k-w+1 ..= k, so cells k <= 0 hold nothing but clock symbols. The
//! staircase arrangement (the row index drops by one per cell moving along
//! the line) makes the next window of every cell a local function of its
//! neighbours, which is what the rule table captures.
//!
//! Windows are stored in ascending column order but displayed and serialized
//! in descending order, matching the rendered array where deep columns sit on
//! the left and the clocks on the right.

use crate::error::{Error, Result};
use crate::spacetime::{format_symbol, parse_symbol, Symbol};
use crate::validated::ValidatedDiagram;

/// Upper bound on the window width a cell can carry.
pub const MAX_STEP_WIDTH: usize = 6;

/// A fixed-capacity window of symbols; unused slots are padded with the
/// clock symbol so equality and hashing can use the whole array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    len: u8,
    syms: [Symbol; MAX_STEP_WIDTH],
}

impl Step {
    /// Builds a window from symbols in ascending column order.
    pub fn from_slice(window: &[Symbol]) -> Step {
        assert!(
            window.len() <= MAX_STEP_WIDTH,
            "window width {} exceeds the cap {MAX_STEP_WIDTH}",
            window.len()
        );
        let mut syms = [Symbol::Clock; MAX_STEP_WIDTH];
        syms[..window.len()].copy_from_slice(window);
        Step {
            len: window.len() as u8,
            syms,
        }
    }

    /// The all-clock window: what every cell k <= 0 shows forever.
    pub fn clocks(w: usize) -> Step {
        Step::from_slice(&vec![Symbol::Clock; w])
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Symbols in ascending column order: `as_slice()[i]` is the window's
    /// lowest column plus `i`.
    pub fn as_slice(&self) -> &[Symbol] {
        &self.syms[..self.len as usize]
    }

    /// Named symbols in display order: highest column first, the way the
    /// rendered array reads left to right.
    pub fn to_named(&self, d: &ValidatedDiagram) -> Vec<String> {
        self.as_slice()
            .iter()
            .rev()
            .map(|&s| format_symbol(d, s))
            .collect()
    }

    /// Parses the display order written by `to_named` and checks that the
    /// window is internally row-consistent.
    pub fn parse_named(d: &ValidatedDiagram, names: &[String]) -> Result<Step> {
        if names.is_empty() || names.len() > MAX_STEP_WIDTH {
            return Err(Error::ParseError(format!(
                "cell window must hold 1..={MAX_STEP_WIDTH} symbols, got {}",
                names.len()
            )));
        }
        let mut syms: Vec<Symbol> = names
            .iter()
            .map(|n| parse_symbol(d, n))
            .collect::<Result<_>>()?;
        syms.reverse();
        let step = Step::from_slice(&syms);
        step.check_consistency(d)?;
        Ok(step)
    }

    /// A window cut from one array row must read, in ascending columns, as
    /// clocks, then at most one clock edge, then template edges, with each
    /// edge's range matching the vertex one column below it.
    pub fn check_consistency(&self, d: &ValidatedDiagram) -> Result<()> {
        let bad = |detail: String| Error::ParseError(format!("window is not row-consistent: {detail}"));
        let syms = self.as_slice();
        for pair in syms.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            match (lo, hi) {
                (_, Symbol::Clock) => {
                    if lo != Symbol::Clock {
                        return Err(bad("clock symbol above an edge".into()));
                    }
                }
                (lo, Symbol::ClockEdge { .. }) => {
                    if lo != Symbol::Clock {
                        return Err(bad("clock edge not directly above the clock column".into()));
                    }
                }
                (Symbol::Clock, Symbol::Edge { .. }) => {
                    return Err(bad("template edge directly above a clock".into()));
                }
                (lo, Symbol::Edge { vertex, template, label }) => {
                    let word = d.template(template).word(vertex).ok_or_else(|| {
                        bad(format!(
                            "vertex {} has no word in template {}",
                            d.label(vertex),
                            d.template(template).id
                        ))
                    })?;
                    let range = *word.get(label as usize).ok_or_else(|| {
                        bad(format!(
                            "label {label} out of range for vertex {}",
                            d.label(vertex)
                        ))
                    })?;
                    let below = match lo {
                        Symbol::ClockEdge { vertex, .. } | Symbol::Edge { vertex, .. } => vertex,
                        Symbol::Clock => unreachable!(),
                    };
                    if below != range {
                        return Err(bad(format!(
                            "edge with range {} sits above vertex {}",
                            d.label(range),
                            d.label(below)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
