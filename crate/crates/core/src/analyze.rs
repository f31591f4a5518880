//! Structural property report for a validated diagram.
//!
//! Everything here is decidable from the finite template data: width, the
//! focus chain, primitivity (positivity of incidence-matrix products over
//! repeated schedule cycles), proper ordering (unique extremal chains), and
//! the equal-path-number property.

use serde::Serialize;

use crate::diagram::VertexLabel;
use crate::validated::ValidatedDiagram;

/// Focus vertex per schedule slot: entries for the prefix levels, then one
/// cycle's worth that repeats forever.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FocusChain {
    pub prefix: Vec<VertexLabel>,
    pub cycle: Vec<VertexLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PropertyReport {
    /// max(|V_n|, |E_n|) over all levels.
    pub width_k: usize,
    /// Present iff every level's minimal edges share one range.
    pub focus: Option<FocusChain>,
    /// Some telescoping makes every incidence count positive.
    pub primitive: bool,
    /// Number of consecutive levels whose composition witnesses primitivity.
    pub primitivity_span: Option<usize>,
    /// Unique minimal and unique maximal path exist.
    pub properly_ordered: bool,
    /// Every vertex of a level has the same number of outgoing edges.
    pub equal_path_number: bool,
}

/// Compute the full property report.
pub fn analyze(d: &ValidatedDiagram) -> PropertyReport {
    let focus = d.is_focused().then(|| {
        let plen = d.schedule_prefix_len();
        let clen = d.schedule_cycle_len();
        let slot_focus = |slot: usize| {
            let t = d.template_at_level(slot + 2);
            d.label(d.template(t).focus().unwrap()).clone()
        };
        FocusChain {
            prefix: (0..plen).map(slot_focus).collect(),
            cycle: (plen..plen + clen).map(slot_focus).collect(),
        }
    });
    let primitivity_span = primitivity_span(d);
    PropertyReport {
        width_k: d.width_k(),
        focus,
        primitive: primitivity_span.is_some(),
        primitivity_span,
        properly_ordered: d.is_properly_ordered(),
        equal_path_number: equal_path_number(d),
    }
}

fn equal_path_number(d: &ValidatedDiagram) -> bool {
    let clocks: Vec<u32> = d
        .level1_vertices()
        .iter()
        .map(|&v| d.clock_edges(v).unwrap())
        .collect();
    if clocks.windows(2).any(|w| w[0] != w[1]) {
        return false;
    }
    let slots = d.schedule_prefix_len() + d.schedule_cycle_len();
    for slot in 0..slots {
        let n = slot + 2;
        let lens: Vec<usize> = d
            .vertices_at_level(n)
            .iter()
            .map(|&v| d.word_at(n, v).unwrap().len())
            .collect();
        if lens.windows(2).any(|w| w[0] != w[1]) {
            return false;
        }
    }
    true
}

/// Boolean incidence product over whole schedule cycles. Returns the number
/// of composed levels at the first all-positive power, bounded by widthK^2
/// cycle repetitions.
fn primitivity_span(d: &ValidatedDiagram) -> Option<usize> {
    let plen = d.schedule_prefix_len();
    let clen = d.schedule_cycle_len();
    // One full cycle of incidence matrices, composed top-down: paths from
    // level plen+clen+1 to level plen+1. Both ends carry the same vertex set
    // by level consistency, so the product is square over that set.
    let base = plen + 2;
    let verts: Vec<_> = d.vertices_at_level(base - 1).to_vec();
    let n = verts.len();
    let pos = |v: crate::validated::VertexId| verts.iter().position(|&u| u == v).unwrap();
    let mut cycle_product = vec![vec![false; n]; n];
    for (i, &a) in verts.iter().enumerate() {
        // Walk every path from (a, base+clen-1) down to level base-1.
        let mut frontier = vec![a];
        for level in (base..base + clen).rev() {
            let mut next = Vec::new();
            for v in frontier {
                next.extend(d.word_at(level, v).unwrap().iter().copied());
            }
            next.sort();
            next.dedup();
            frontier = next;
        }
        for v in frontier {
            cycle_product[pos(v)][i] = true;
        }
    }
    let bound = d.width_k() * d.width_k();
    let mut power = cycle_product.clone();
    for k in 1..=bound.max(1) {
        if power.iter().all(|row| row.iter().all(|&b| b)) {
            return Some(k * clen);
        }
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).any(|m| power[i][m] && cycle_product[m][j]);
            }
        }
        power = next;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::DiagramSpec;
    use crate::validated::validate;

    fn v(s: &str) -> VertexLabel {
        VertexLabel::new(s)
    }

    fn analyze_stationary(words: Vec<(&str, &str)>) -> PropertyReport {
        let spec = DiagramSpec::stationary(words.into_iter().map(|(src, w)| {
            (
                v(src),
                w.chars().map(|c| v(&c.to_string())).collect::<Vec<_>>(),
            )
        }));
        analyze(&validate(&spec).unwrap())
    }

    #[test]
    fn abb_ab_report() {
        let r = analyze_stationary(vec![("a", "abb"), ("b", "ab")]);
        assert_eq!(r.width_k, 5);
        let focus = r.focus.expect("focused");
        assert_eq!(focus.prefix, Vec::<VertexLabel>::new());
        assert_eq!(focus.cycle, vec![v("a")]);
        assert!(r.primitive);
        // The single incidence matrix is already positive.
        assert_eq!(r.primitivity_span, Some(1));
        assert!(r.properly_ordered);
        assert!(!r.equal_path_number, "word lengths 3 and 2 differ");
    }

    #[test]
    fn dyadic_report() {
        let r = analyze_stationary(vec![("a", "aa")]);
        assert_eq!(r.width_k, 2);
        assert!(r.focus.is_some());
        assert!(r.primitive);
        assert!(r.properly_ordered);
        assert!(r.equal_path_number);
    }

    #[test]
    fn swap_words_give_two_maximal_chains() {
        let r = analyze_stationary(vec![("a", "ba"), ("b", "ab")]);
        assert!(!r.properly_ordered);
        assert!(r.primitive, "each word already meets both letters");
        assert_eq!(r.primitivity_span, Some(1));
        assert!(r.focus.is_none(), "minimal ranges differ");
    }

    #[test]
    fn reducible_words_are_not_primitive() {
        // tau(a) = ab, tau(b) = bb: no path from b back to a, ever.
        let r = analyze_stationary(vec![("a", "ab"), ("b", "bb")]);
        assert!(!r.primitive);
        assert_eq!(r.primitivity_span, None);
        assert!(!r.properly_ordered, "two minimal chains");
    }

    #[test]
    fn primitivity_agrees_with_brute_force_path_counts() {
        // Independent oracle: positive path counts between levels separated
        // by the reported span.
        let cases = vec![
            vec![("a", "abb"), ("b", "ab")],
            vec![("a", "ab"), ("b", "ba")],
            vec![("a", "ba"), ("b", "aab")],
        ];
        for words in cases {
            let spec = DiagramSpec::stationary(words.iter().map(|(s, w)| {
                (
                    v(s),
                    w.chars().map(|c| v(&c.to_string())).collect::<Vec<_>>(),
                )
            }));
            let d = validate(&spec).unwrap();
            let r = analyze(&d);
            let span = r.primitivity_span.expect("primitive");
            for &a in d.vertices_at_level(span + 1) {
                for &b in d.vertices_at_level(1) {
                    assert!(
                        d.path_count(a, span + 1, b, 1).unwrap() > 0,
                        "{words:?}: no path {a:?} -> {b:?} across {span} levels"
                    );
                }
            }
        }
    }

    #[test]
    fn report_serializes_with_camel_case_keys() {
        let r = analyze_stationary(vec![("a", "aa")]);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"widthK\""), "{json}");
        assert!(json.contains("\"properlyOrdered\""), "{json}");
        assert!(json.contains("\"equalPathNumber\""), "{json}");
    }
}
