//! Simulations of a looped quantum interferometer whose arms sit in a
//! gravitational field and in an accelerated frame.
//!
//! * [`gauge_phase`]: Lagrangians, actions on sampled paths, the gauge
//!   parameter relating the two frames and U(1) phase composition.
//! * [`loop_interferometer`]: the n-pass amplitude series, its infinite-loop
//!   limit and the convergence classifier.
//! * [`cow_model`]: a mass particle in the loop, arm phases from actions.
//! * [`deutsch_jozsa`]: Deutsch-Jozsa with a per-branch gravitational phase,
//!   cross-checked by a binary-tree path sum.
//! * [`verify`]: the invariant suite run by `gravloop verify`.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`). The `*64`
//! and `*32` aliases below name the concrete instantiations.

pub mod cow_model;
pub mod deutsch_jozsa;
mod error;
pub mod gauge_phase;
pub mod loop_interferometer;
pub mod scalar;
pub mod verify;

pub use cow_model::{ArmPhases, CowConfig};
pub use deutsch_jozsa::{
    BooleanFunction, DjOutcome, FunctionClass, PerturbationConfig, QuantumRegister, Verdict,
};
pub use error::{Error, Result};
pub use gauge_phase::{ActionKind, FieldConfig, PhaseFactor, PhysicalConstants, Trajectory};
pub use loop_interferometer::{
    BeamSplitterConfig, LoopFactor, LoopOutputState, SeriesClassification, SeriesKind, TraceRow,
};
pub use scalar::Real;

pub use num_complex::Complex;

pub type Complex64 = Complex<f64>;
pub type Complex32 = Complex<f32>;

pub type PhysicalConstants64 = PhysicalConstants<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type FieldConfig64 = FieldConfig<f64>;
pub type PhaseFactor64 = PhaseFactor<f64>;
pub type BeamSplitterConfig64 = BeamSplitterConfig<f64>;
pub type LoopFactor64 = LoopFactor<f64>;
pub type LoopOutputState64 = LoopOutputState<f64>;
pub type TraceRow64 = TraceRow<f64>;
pub type CowConfig64 = CowConfig<f64>;
pub type ArmPhases64 = ArmPhases<f64>;
pub type QuantumRegister64 = QuantumRegister<f64>;
pub type PerturbationConfig64 = PerturbationConfig<f64>;
pub type DjOutcome64 = DjOutcome<f64>;

pub type PhysicalConstants32 = PhysicalConstants<f32>;
pub type Trajectory32 = Trajectory<f32>;
pub type FieldConfig32 = FieldConfig<f32>;
pub type PhaseFactor32 = PhaseFactor<f32>;
pub type BeamSplitterConfig32 = BeamSplitterConfig<f32>;
pub type LoopFactor32 = LoopFactor<f32>;
pub type LoopOutputState32 = LoopOutputState<f32>;
pub type CowConfig32 = CowConfig<f32>;
pub type QuantumRegister32 = QuantumRegister<f32>;
pub type PerturbationConfig32 = PerturbationConfig<f32>;
