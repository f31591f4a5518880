//! Ordered Bratteli diagram descriptions.
//!
//! A diagram is given by finitely many level templates plus an eventually
//! periodic schedule assigning a template to every level n >= 2. Level 1 is
//! the clock level: it records how many edges run from each level-1 vertex
//! down to the root. Edges at a level are ordered by the position of their
//! range in the template word, so a template word fully describes both the
//! edges and their order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Characters reserved by the compact symbol syntax (`a@T1#2`, `a!0`).
const RESERVED: &[char] = &['@', '!', '#'];

/// A vertex name. Nonempty, free of the reserved symbol delimiters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexLabel(pub String);

impl VertexLabel {
    pub fn new(s: impl Into<String>) -> Self {
        VertexLabel(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::BadVertexLabel {
                label: self.0.clone(),
                detail: "empty label".into(),
            });
        }
        if self.0.chars().any(|c| RESERVED.contains(&c)) {
            return Err(Error::BadVertexLabel {
                label: self.0.clone(),
                detail: "labels may not contain '@', '!' or '#'".into(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexLabel {
    fn from(s: &str) -> Self {
        VertexLabel(s.to_string())
    }
}

/// A template name, e.g. `T1`. Same character restrictions as vertex labels.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TemplateId(pub String);

impl TemplateId {
    pub fn new(s: impl Into<String>) -> Self {
        TemplateId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TemplateId {
    fn from(s: &str) -> Self {
        TemplateId(s.to_string())
    }
}

/// One level's edge structure: for every source vertex, the ordered word of
/// ranges of its outgoing edges. A vertex missing from the map does not occur
/// at levels using this template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelTemplate {
    pub id: TemplateId,
    pub ranges: BTreeMap<VertexLabel, Vec<VertexLabel>>,
}

impl LevelTemplate {
    pub fn new(
        id: impl Into<TemplateId>,
        ranges: impl IntoIterator<Item = (VertexLabel, Vec<VertexLabel>)>,
    ) -> Self {
        LevelTemplate {
            id: id.into(),
            ranges: ranges.into_iter().collect(),
        }
    }

    /// Vertices present at a level using this template.
    pub fn sources(&self) -> impl Iterator<Item = &VertexLabel> {
        self.ranges.keys()
    }

    /// Set of vertices hit by at least one edge of this template.
    pub fn range_set(&self) -> BTreeSet<&VertexLabel> {
        self.ranges.values().flatten().collect()
    }

    /// Total number of edges at a level using this template.
    pub fn edge_count(&self) -> usize {
        self.ranges.values().map(Vec::len).sum()
    }
}

/// Eventually periodic assignment of templates to levels 2, 3, ...
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub prefix: Vec<TemplateId>,
    pub cycle: Vec<TemplateId>,
}

impl Schedule {
    /// Template id for level `n` (n >= 2).
    pub fn template_for_level(&self, n: usize) -> &TemplateId {
        debug_assert!(n >= 2);
        let slot = n - 2;
        if slot < self.prefix.len() {
            &self.prefix[slot]
        } else {
            &self.cycle[(slot - self.prefix.len()) % self.cycle.len()]
        }
    }
}

/// Serializable description of an ordered Bratteli diagram.
///
/// The JSON form is
/// `{"alphabet":[...], "level1":{...}, "templates":{id:{vertex:word}},
///   "schedule":{"prefix":[...],"cycle":[...]}}`
/// where a word is a plain string when every alphabet label is a single
/// character and an array of labels otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramSpec {
    pub alphabet: Vec<VertexLabel>,
    pub level1: BTreeMap<VertexLabel, u32>,
    pub templates: Vec<LevelTemplate>,
    pub schedule: Schedule,
}

impl DiagramSpec {
    /// Stationary diagram: one template repeated at every level, one clock
    /// edge per level-1 vertex.
    pub fn stationary(
        words: impl IntoIterator<Item = (VertexLabel, Vec<VertexLabel>)>,
    ) -> DiagramSpec {
        let ranges: BTreeMap<VertexLabel, Vec<VertexLabel>> = words.into_iter().collect();
        let alphabet: Vec<VertexLabel> = ranges.keys().cloned().collect();
        let level1 = alphabet.iter().map(|v| (v.clone(), 1)).collect();
        DiagramSpec {
            alphabet,
            level1,
            templates: vec![LevelTemplate {
                id: TemplateId::new("T1"),
                ranges,
            }],
            schedule: Schedule {
                prefix: vec![],
                cycle: vec![TemplateId::new("T1")],
            },
        }
    }

    /// Structural sanity checks that do not need level-by-level analysis:
    /// label syntax, alphabet closure, schedule template references.
    pub(crate) fn check_wellformed(&self) -> Result<()> {
        let alphabet: BTreeSet<&VertexLabel> = self.alphabet.iter().collect();
        if alphabet.len() != self.alphabet.len() {
            return Err(Error::BadVertexLabel {
                label: String::new(),
                detail: "alphabet contains duplicate labels".into(),
            });
        }
        for v in &self.alphabet {
            v.validate()?;
        }
        for (v, n) in &self.level1 {
            if !alphabet.contains(v) {
                return Err(Error::BadVertexLabel {
                    label: v.0.clone(),
                    detail: "level-1 vertex not in alphabet".into(),
                });
            }
            if *n == 0 {
                return Err(Error::ZeroClockEdges { vertex: v.0.clone() });
            }
        }
        if self.level1.is_empty() {
            return Err(Error::LevelMismatch {
                level: 1,
                detail: "level 1 has no vertices".into(),
            });
        }
        let mut ids = BTreeSet::new();
        for t in &self.templates {
            if !ids.insert(&t.id) {
                return Err(Error::BadTemplate {
                    id: t.id.0.clone(),
                    detail: "duplicate template id".into(),
                });
            }
            if t.ranges.is_empty() {
                return Err(Error::BadTemplate {
                    id: t.id.0.clone(),
                    detail: "template has no source vertices".into(),
                });
            }
            for (src, word) in &t.ranges {
                if !alphabet.contains(src) {
                    return Err(Error::BadVertexLabel {
                        label: src.0.clone(),
                        detail: format!("template {} source not in alphabet", t.id),
                    });
                }
                if word.is_empty() {
                    return Err(Error::BadTemplate {
                        id: t.id.0.clone(),
                        detail: format!("source {src} has an empty word"),
                    });
                }
                for r in word {
                    if !alphabet.contains(r) {
                        return Err(Error::BadVertexLabel {
                            label: r.0.clone(),
                            detail: format!("template {} range not in alphabet", t.id),
                        });
                    }
                }
            }
        }
        if self.schedule.cycle.is_empty() {
            return Err(Error::EmptySchedule);
        }
        for id in self.schedule.prefix.iter().chain(&self.schedule.cycle) {
            if !self.templates.iter().any(|t| &t.id == id) {
                return Err(Error::UnknownTemplate { id: id.0.clone() });
            }
        }
        Ok(())
    }

    /// Canonical pretty-printed JSON: templates sorted by id, map keys sorted.
    /// Parsing the output reproduces the value byte-for-byte.
    pub fn to_canonical_json(&self) -> String {
        let mut sorted = self.clone();
        sorted.templates.sort_by(|a, b| a.id.cmp(&b.id));
        let mut s = serde_json::to_string_pretty(&sorted).expect("diagram serialization");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<DiagramSpec> {
        let spec: DiagramSpec =
            serde_json::from_str(s).map_err(|e| Error::ParseError(e.to_string()))?;
        spec.check_wellformed()?;
        Ok(spec)
    }
}

// ── JSON representation ──

#[derive(Serialize, Deserialize)]
struct DiagramSpecRepr {
    alphabet: Vec<VertexLabel>,
    level1: BTreeMap<VertexLabel, u32>,
    templates: BTreeMap<TemplateId, BTreeMap<VertexLabel, WordRepr>>,
    schedule: Schedule,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WordRepr {
    Compact(String),
    Labels(Vec<VertexLabel>),
}

impl Serialize for DiagramSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let compact = self.alphabet.iter().all(|v| v.0.chars().count() == 1);
        let templates = self
            .templates
            .iter()
            .map(|t| {
                let ranges = t
                    .ranges
                    .iter()
                    .map(|(src, word)| {
                        let repr = if compact {
                            WordRepr::Compact(word.iter().map(|v| v.0.as_str()).collect())
                        } else {
                            WordRepr::Labels(word.clone())
                        };
                        (src.clone(), repr)
                    })
                    .collect();
                (t.id.clone(), ranges)
            })
            .collect();
        DiagramSpecRepr {
            alphabet: self.alphabet.clone(),
            level1: self.level1.clone(),
            templates,
            schedule: self.schedule.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiagramSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = DiagramSpecRepr::deserialize(deserializer)?;
        let single_char: BTreeMap<char, VertexLabel> = repr
            .alphabet
            .iter()
            .filter(|v| v.0.chars().count() == 1)
            .map(|v| (v.0.chars().next().unwrap(), v.clone()))
            .collect();
        let mut templates = Vec::new();
        for (id, ranges_repr) in repr.templates {
            let mut ranges = BTreeMap::new();
            for (src, word) in ranges_repr {
                let word = match word {
                    WordRepr::Labels(labels) => labels,
                    WordRepr::Compact(s) => s
                        .chars()
                        .map(|c| {
                            single_char.get(&c).cloned().ok_or_else(|| {
                                D::Error::custom(format!(
                                    "word character '{c}' in template {id} is not a single-character alphabet label"
                                ))
                            })
                        })
                        .collect::<std::result::Result<Vec<_>, _>>()?,
                };
                ranges.insert(src, word);
            }
            templates.push(LevelTemplate { id, ranges });
        }
        Ok(DiagramSpec {
            alphabet: repr.alphabet,
            level1: repr.level1,
            templates,
            schedule: repr.schedule,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> VertexLabel {
        VertexLabel::new(s)
    }

    /// Stationary two-vertex diagram with words a -> abb, b -> ab.
    pub(crate) fn abb_ab() -> DiagramSpec {
        DiagramSpec::stationary([
            (v("a"), vec![v("a"), v("b"), v("b")]),
            (v("b"), vec![v("a"), v("b")]),
        ])
    }

    #[test]
    fn stationary_constructor_fills_level1_with_ones() {
        let d = abb_ab();
        assert_eq!(d.level1.len(), 2);
        assert!(d.level1.values().all(|&n| n == 1));
        assert_eq!(d.schedule.prefix, Vec::<TemplateId>::new());
        assert_eq!(d.schedule.cycle, vec![TemplateId::new("T1")]);
    }

    #[test]
    fn compact_words_serialize_as_strings() {
        let d = abb_ab();
        let json = d.to_canonical_json();
        assert!(json.contains("\"abb\""), "expected compact word: {json}");
        let back = DiagramSpec::from_json(&json).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn multichar_labels_serialize_as_arrays() {
        let d = DiagramSpec::stationary([
            (v("v0"), vec![v("v0"), v("v1")]),
            (v("v1"), vec![v("v0"), v("v0")]),
        ]);
        let json = d.to_canonical_json();
        assert!(json.contains('['), "expected array words: {json}");
        let back = DiagramSpec::from_json(&json).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn canonical_json_is_a_fixpoint() {
        let json = abb_ab().to_canonical_json();
        let again = DiagramSpec::from_json(&json).unwrap().to_canonical_json();
        assert_eq!(json, again);
    }

    #[test]
    fn parses_the_handwritten_form() {
        let json = r#"{
            "alphabet": ["a", "b"],
            "level1": {"a": 1, "b": 1},
            "templates": {"T1": {"a": "abb", "b": "ab"}},
            "schedule": {"prefix": [], "cycle": ["T1"]}
        }"#;
        let d = DiagramSpec::from_json(json).unwrap();
        assert_eq!(d, abb_ab());
    }

    #[test]
    fn rejects_reserved_characters_in_labels() {
        let d = DiagramSpec::stationary([(v("a@x"), vec![v("a@x")])]);
        assert!(matches!(
            d.check_wellformed(),
            Err(Error::BadVertexLabel { .. })
        ));
    }

    #[test]
    fn rejects_empty_cycle() {
        let mut d = abb_ab();
        d.schedule.cycle.clear();
        assert_eq!(d.check_wellformed(), Err(Error::EmptySchedule));
    }

    #[test]
    fn rejects_zero_clock_edges() {
        let mut d = abb_ab();
        d.level1.insert(v("a"), 0);
        assert!(matches!(
            d.check_wellformed(),
            Err(Error::ZeroClockEdges { .. })
        ));
    }

    #[test]
    fn rejects_unknown_schedule_template() {
        let mut d = abb_ab();
        d.schedule.cycle = vec![TemplateId::new("T9")];
        assert!(matches!(
            d.check_wellformed(),
            Err(Error::UnknownTemplate { .. })
        ));
    }
}
