//! Distributed correlation synthesis with unionized coset codes.

pub mod field;
pub mod prob;
pub mod region;
pub mod scalar;
pub mod soft_cover;
pub mod synthesis;
pub mod ucc;

pub use scalar::{Real, Scalar};

pub type Pmf = prob::Pmf<f64>;
pub type Pmf32 = prob::Pmf<f32>;
pub type JointPmf = prob::JointPmf<f64>;
pub type JointPmf32 = prob::JointPmf<f32>;
pub type CondPmf = prob::CondPmf<f64>;
pub type CondPmf32 = prob::CondPmf<f32>;
pub type SynthesisProblem = synthesis::SynthesisProblem<f64>;
pub type AuxPmf = region::AuxPmf<f64>;
pub type InequalitySystem = region::LinearInequalitySystem<f64>;
pub type ExactInequalitySystem = region::LinearInequalitySystem<num_rational::BigRational>;
