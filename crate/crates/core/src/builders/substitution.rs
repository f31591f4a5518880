//! Stationary diagrams from primitive proper substitutions.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::diagram::{DiagramSpec, VertexLabel};
use crate::error::{Error, Result};

/// A substitution on a finite alphabet: one replacement word per letter.
///
/// The substitution is *proper* when every replacement word starts with the
/// same letter and every replacement word ends with the same letter. Proper
/// primitive substitutions give stationary diagrams that are focused and
/// properly ordered, which is exactly what the compilation pipeline needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionSpec {
    pub words: BTreeMap<VertexLabel, Vec<VertexLabel>>,
}

impl SubstitutionSpec {
    /// Convenience constructor from string pairs, splitting each word into
    /// single-character labels.
    pub fn from_chars(pairs: &[(&str, &str)]) -> Self {
        let words = pairs
            .iter()
            .map(|(letter, word)| {
                (
                    VertexLabel::new(*letter),
                    word.chars().map(|c| VertexLabel::new(c.to_string())).collect(),
                )
            })
            .collect();
        SubstitutionSpec { words }
    }

    fn check_closed(&self) -> Result<()> {
        if self.words.is_empty() {
            return Err(Error::EmptySubstitution);
        }
        for (letter, word) in &self.words {
            letter.validate()?;
            if word.is_empty() {
                return Err(Error::BadSubstitution {
                    vertex: letter.to_string(),
                    detail: "empty replacement word".into(),
                });
            }
            for l in word {
                if !self.words.contains_key(l) {
                    return Err(Error::BadSubstitution {
                        vertex: letter.to_string(),
                        detail: format!("letter {l} is not in the alphabet"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Why the substitution fails to be proper, if it does. Proper means all
    /// words share a first letter and all words share a last letter.
    pub fn proper_violation(&self) -> Option<String> {
        let mut iter = self.words.iter();
        let (l0, w0) = iter.next()?;
        let (first, last) = (w0.first()?, w0.last()?);
        for (letter, word) in iter {
            if word.first() != Some(first) {
                return Some(format!(
                    "words for {l0} and {letter} start with different letters"
                ));
            }
            if word.last() != Some(last) {
                return Some(format!(
                    "words for {l0} and {letter} end with different letters"
                ));
            }
        }
        None
    }

    /// All words share a first letter and all words share a last letter.
    pub fn is_proper(&self) -> bool {
        self.proper_violation().is_none()
    }

    /// Some power of the incidence matrix is strictly positive.
    pub fn is_primitive(&self) -> bool {
        let letters: Vec<&VertexLabel> = self.words.keys().collect();
        let n = letters.len();
        let index: BTreeMap<&VertexLabel, usize> =
            letters.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        // reach[i][j]: letter j occurs in the current power's expansion of i.
        let mut reach = vec![vec![false; n]; n];
        for (i, letter) in letters.iter().enumerate() {
            for l in &self.words[*letter] {
                reach[i][index[l]] = true;
            }
        }
        let base = reach.clone();
        // (n - 1)^2 + 1 powers suffice for primitivity of an n x n matrix.
        let bound = (n - 1) * (n - 1) + 1;
        for _ in 0..bound {
            if reach.iter().all(|row| row.iter().all(|&b| b)) {
                return true;
            }
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if reach[i][k] {
                        for j in 0..n {
                            if base[k][j] {
                                next[i][j] = true;
                            }
                        }
                    }
                }
            }
            if next == reach {
                return false;
            }
            reach = next;
        }
        reach.iter().all(|row| row.iter().all(|&b| b))
    }
}

/// Builds the stationary diagram of a primitive proper substitution: one
/// clock edge per letter at level one and the substitution itself as the
/// repeating template everywhere above.
pub fn from_substitution(sub: &SubstitutionSpec) -> Result<DiagramSpec> {
    sub.check_closed()?;
    if let Some(detail) = sub.proper_violation() {
        return Err(Error::NotProper { detail });
    }
    if !sub.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let spec = DiagramSpec::stationary(sub.words.clone());
    spec.check_wellformed()?;
    Ok(spec)
}

// Serialization mirrors the diagram format: words become plain strings when
// every letter is a single character, arrays of labels otherwise.

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WordRepr {
    Compact(String),
    Labels(Vec<VertexLabel>),
}

impl Serialize for SubstitutionSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let compact = self.words.keys().all(|l| l.as_str().chars().count() == 1);
        let map: BTreeMap<&VertexLabel, WordRepr> = self
            .words
            .iter()
            .map(|(letter, word)| {
                let repr = if compact {
                    WordRepr::Compact(word.iter().map(|l| l.as_str()).collect())
                } else {
                    WordRepr::Labels(word.clone())
                };
                (letter, repr)
            })
            .collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SubstitutionSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw: BTreeMap<VertexLabel, WordRepr> = BTreeMap::deserialize(deserializer)?;
        let mut words = BTreeMap::new();
        for (letter, repr) in raw {
            let word = match repr {
                WordRepr::Compact(s) => {
                    s.chars().map(|c| VertexLabel::new(c.to_string())).collect()
                }
                WordRepr::Labels(ls) => ls,
            };
            words.insert(letter, word);
        }
        let spec = SubstitutionSpec { words };
        spec.check_closed().map_err(D::Error::custom)?;
        Ok(spec)
    }
}
