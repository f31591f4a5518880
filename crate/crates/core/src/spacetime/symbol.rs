//! The finite alphabet of the two-dimensional edge array.
//!
//! Column j of a path's encoding holds its level-j edge, keyed by the
//! template active at that level rather than by the level number. That is
//! what keeps the alphabet finite when the schedule is eventually periodic.

use crate::error::{Error, Result};
use crate::validated::{TemplateIdx, ValidatedDiagram, VertexId};

/// One cell of the edge array.
///
/// The derived ordering (clock first, then clock edges, then template edges,
/// each by their numeric ids) gives tiles and rule tables a stable sort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// Columns j <= 0: below the clock edge.
    Clock,
    /// Column 1: the clock edge, as source vertex plus edge label.
    ClockEdge { vertex: VertexId, label: u32 },
    /// Columns j >= 2: the level-j edge as source vertex, active template,
    /// and edge label within the source's word.
    Edge {
        vertex: VertexId,
        template: TemplateIdx,
        label: u32,
    },
}

/// Compact text form: `C`, `a!0`, or `a@T1#2`.
pub fn format_symbol(d: &ValidatedDiagram, sym: Symbol) -> String {
    match sym {
        Symbol::Clock => "C".to_string(),
        Symbol::ClockEdge { vertex, label } => format!("{}!{}", d.label(vertex), label),
        Symbol::Edge {
            vertex,
            template,
            label,
        } => format!(
            "{}@{}#{}",
            d.label(vertex),
            d.template(template).id,
            label
        ),
    }
}

/// Parses the text form back, validating every part against the diagram.
pub fn parse_symbol(d: &ValidatedDiagram, s: &str) -> Result<Symbol> {
    if s == "C" {
        return Ok(Symbol::Clock);
    }
    if let Some((vertex, rest)) = s.split_once('@') {
        let (tid, label) = rest.rsplit_once('#').ok_or_else(|| {
            Error::ParseError(format!("symbol {s} is missing the '#' label part"))
        })?;
        let vertex = lookup_vertex(d, vertex, s)?;
        let template = d
            .template_idx(&tid.into())
            .ok_or_else(|| Error::ParseError(format!("symbol {s} names unknown template {tid}")))?;
        let label: u32 = parse_label(label, s)?;
        let word = d.template(template).word(vertex).ok_or_else(|| {
            Error::ParseError(format!(
                "symbol {s}: vertex absent from the template's sources"
            ))
        })?;
        if label as usize >= word.len() {
            return Err(Error::ParseError(format!(
                "symbol {s}: label {label} out of range (word length {})",
                word.len()
            )));
        }
        return Ok(Symbol::Edge {
            vertex,
            template,
            label,
        });
    }
    if let Some((vertex, label)) = s.split_once('!') {
        let vertex = lookup_vertex(d, vertex, s)?;
        let label: u32 = parse_label(label, s)?;
        let count = d.clock_edges(vertex).ok_or_else(|| {
            Error::ParseError(format!("symbol {s}: vertex absent at level 1"))
        })?;
        if label >= count {
            return Err(Error::ParseError(format!(
                "symbol {s}: clock label {label} out of range ({count} clock edges)"
            )));
        }
        return Ok(Symbol::ClockEdge { vertex, label });
    }
    Err(Error::ParseError(format!(
        "symbol {s} is not 'C', a clock edge 'v!n', or an edge 'v@T#n'"
    )))
}

fn lookup_vertex(d: &ValidatedDiagram, name: &str, whole: &str) -> Result<VertexId> {
    d.vertex_id(&name.into()).ok_or_else(|| {
        Error::ParseError(format!("symbol {whole} names unknown vertex {name}"))
    })
}

fn parse_label(text: &str, whole: &str) -> Result<u32> {
    text.parse()
        .map_err(|_| Error::ParseError(format!("symbol {whole} has a bad label number")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{DiagramSpec, VertexLabel};
    use crate::validated::validate;

    fn abb_ab() -> ValidatedDiagram {
        let v = VertexLabel::new;
        validate(&DiagramSpec::stationary([
            (v("a"), vec![v("a"), v("b"), v("b")]),
            (v("b"), vec![v("a"), v("b")]),
        ]))
        .unwrap()
    }

    #[test]
    fn symbols_round_trip_through_text() {
        let d = abb_ab();
        for text in ["C", "a!0", "b!0", "a@T1#2", "b@T1#1"] {
            let sym = parse_symbol(&d, text).unwrap();
            assert_eq!(format_symbol(&d, sym), text);
        }
    }

    #[test]
    fn parse_rejects_out_of_range_and_unknown_parts() {
        let d = abb_ab();
        for text in ["a@T1#3", "b@T1#2", "x@T1#0", "a@T9#0", "a!1", "x!0", "a#1", ""] {
            assert!(parse_symbol(&d, text).is_err(), "{text} should not parse");
        }
    }

    #[test]
    fn ordering_puts_clock_first() {
        let d = abb_ab();
        let clock = Symbol::Clock;
        let ce = parse_symbol(&d, "a!0").unwrap();
        let e = parse_symbol(&d, "a@T1#0").unwrap();
        assert!(clock < ce && ce < e);
    }
}
