//! The automaton synthesized from a diagram: cell windows, the harvested
//! local rule, the initial diagonal line, simulation, decoding, and the
//! orbit-level verification that ties it all back to the adic system.

mod decode;
mod engine;
mod rule;
mod step;

pub use decode::{decode, verify_conjugacy, ConjugacyReport, InjectivityWitness, MismatchSample};
pub use engine::{make_x_init, parse_config, simulate, Automaton, CAConfig};
pub use rule::{
    build_rule, enumerate_steps, parse_rule, synthesize, Certificate, HarvestSpec, RuleTable,
    StepSet,
};
pub use step::{Step, MAX_STEP_WIDTH};
