//! Bratteli-Vershik systems compiled into one-dimensional cellular automata.
//!
//! The pipeline: describe an ordered Bratteli diagram by level templates and
//! an eventually periodic schedule ([`diagram`]), validate and analyze it
//! ([`validated`], [`analyze`]), walk the adic transformation ([`vershik`]),
//! lay orbits out as spacetime diagrams and harvest local rules from them
//! ([`spacetime`]), then synthesize a one-dimensional cellular automaton
//! whose run encodes the orbit and verify the conjugacy empirically ([`ca`]).
//! Diagram builders for substitution, odometer and Toeplitz systems live in
//! [`builders`].

pub mod analyze;
pub mod builders;
pub mod ca;
pub mod diagram;
pub mod error;
pub mod path;
pub mod render;
pub mod spacetime;
pub mod telescope;
pub mod validated;
pub mod vershik;

pub use analyze::{analyze, PropertyReport};
pub use diagram::{DiagramSpec, LevelTemplate, Schedule, TemplateId, VertexLabel};
pub use error::{Error, Result};
pub use path::{PathRep, Tail};
pub use validated::{validate, ValidatedDiagram};
