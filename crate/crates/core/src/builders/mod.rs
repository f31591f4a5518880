//! Diagram builders for the three example families: primitive proper
//! substitutions, odometers given by quotient sequences, and Toeplitz
//! sequences given by staged periodic fillings.

mod odometer;
mod substitution;
mod toeplitz;

pub use odometer::{
    digit_radices, from_odometer, odometer_canonical, oplus, OdometerSpec, PrimeMultiplicity,
};
pub use substitution::{from_substitution, SubstitutionSpec};
pub use toeplitz::{from_toeplitz, FillReport, TailStage, ToeplitzSpec, ToeplitzStage, WordCollection};
