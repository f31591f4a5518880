//! Diagnostic errors shared by every stage of the pipeline.
//!
//! Each variant names the invariant that failed and carries enough context to
//! reproduce the failure. Nothing here panics; callers decide whether a
//! variant is fatal (CLI exit 1) or expected (a rejected input).

use thiserror::Error;

/// Pipeline-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // ── diagram validation ──
    #[error("level mismatch at level {level}: {detail}")]
    LevelMismatch { level: usize, detail: String },

    #[error("schedule cycle is empty")]
    EmptySchedule,

    #[error("vertex {vertex} has zero clock edges at level 1")]
    ZeroClockEdges { vertex: String },

    #[error("schedule references unknown template {id}")]
    UnknownTemplate { id: String },

    #[error("bad vertex label {label}: {detail}")]
    BadVertexLabel { label: String, detail: String },

    #[error("template {id} is invalid: {detail}")]
    BadTemplate { id: String, detail: String },

    // ── telescoping ──
    #[error("cut gaps must be strictly positive")]
    CutsNotMonotone,

    #[error("cuts break eventual periodicity: {detail}")]
    CutsBreakPeriodicity { detail: String },

    // ── paths ──
    #[error("label {label} out of range at level {level} (max {max})")]
    LabelOutOfRange { level: usize, label: u32, max: u32 },

    #[error("maximal tail undefined: no unique maximal chain above level {level}")]
    MaxTailUndefined { level: usize },

    #[error("path levels out of range: {detail}")]
    BadLevels { detail: String },

    #[error("diagram is not focused: minimal edges at level {level} have distinct ranges")]
    NotFocused { level: usize },

    #[error("diagram is not properly ordered")]
    NotProperlyOrdered,

    #[error("no non-extremal level found within extension bound {bound}")]
    ExtensionBoundExceeded { bound: usize },

    #[error("inconsistent path: {detail}")]
    InconsistentPath { detail: String },

    #[error("path count overflowed u64")]
    CountOverflow,

    // ── substitution builder ──
    #[error("substitution has no words")]
    EmptySubstitution,

    #[error("substitution word for {vertex} is invalid: {detail}")]
    BadSubstitution { vertex: String, detail: String },

    #[error("substitution is not proper: {detail}")]
    NotProper { detail: String },

    #[error("substitution is not primitive")]
    NotPrimitive,

    // ── odometer builder ──
    #[error("quotient sequence is empty")]
    EmptyQuotients,

    #[error("quotient {quotient} is too small: every quotient must be at least 2")]
    QuotientTooSmall { quotient: u64 },

    #[error("digit {digit} out of range at position {position} (quotient {quotient})")]
    DigitOutOfRange {
        position: usize,
        digit: u64,
        quotient: u64,
    },

    // ── Toeplitz builder ──
    #[error("stage {stage} is invalid: {detail}")]
    BadStage { stage: usize, detail: String },

    #[error("first stage fills every residue, so the sequence is shift-periodic")]
    PeriodicAtFirstStage,

    #[error("stage {stage} fill at offset {offset} overlaps an already periodic position")]
    FillOverlapsPeriodic { stage: usize, offset: u64 },

    #[error("incomplete fill: {holes} holes remain in the window after all stages")]
    IncompleteFill { holes: usize },

    #[error("width bound {bound} violated: {detail}")]
    WidthBoundViolated { bound: u64, detail: String },

    #[error("word collection at level {level} did not stabilize in the window")]
    UnstabilizedWords { level: usize },

    // ── spacetime ──
    #[error("row width {width} exceeds tail knowledge: {detail}")]
    WidthExceedsTailKnowledge { width: usize, detail: String },

    #[error("insufficient coverage: {detail}")]
    InsufficientCoverage { detail: String },

    #[error("patch is inadmissible at row {m}, column {j}: {detail}")]
    InadmissiblePatch { m: i64, j: i64, detail: String },

    // ── rule synthesis ──
    #[error("deduction shape is ambiguous at width {w}: context {context} maps to both {out_a} and {out_b}")]
    AmbiguousRule {
        w: usize,
        context: String,
        out_a: String,
        out_b: String,
    },

    #[error("insufficient harvest: {detail}")]
    InsufficientHarvest { detail: String },

    #[error("unsupported rule parameters: {detail}")]
    UnsupportedParams { detail: String },

    // ── simulation / decoding ──
    #[error("unseen context at cell {cell}: {context}")]
    UnseenContext { cell: i64, context: String },

    #[error("left fill is not invariant under the rule at phase {phase}")]
    LeftFillNotInvariant { phase: usize },

    #[error("the static clock region would change at cell {cell}")]
    ClockRegionDisturbed { cell: i64 },

    #[error("decoded symbols disagree on overlap at column {column}")]
    DecodeInconsistent { column: usize },

    // ── verification ──
    #[error("conjugacy mismatch at step {step}: decoded {decoded} expected {expected}")]
    Mismatch {
        step: u64,
        decoded: String,
        expected: String,
    },

    // ── serialization ──
    #[error("parse error: {0}")]
    ParseError(String),
}

/// Convenient alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
