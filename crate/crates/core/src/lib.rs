//! Simulation of separated EPR pairs in two pictures: the entangled singlet,
//! and "disentangled" pairs whose inter-particle interference has decohered
//! into a mixture of anti-correlated product states along a shared random
//! axis.
//!
//! The crate provides the two-qubit linear algebra ([`qstate`]), named
//! states ([`states`]), the decoherence map ([`disentangle`]), photon pair
//! symmetries ([`symmetry`]), closed-form probabilities and correlations
//! ([`correlations`]), ensemble averages with seeded Monte Carlo
//! ([`ensemble`]), CHSH evaluation ([`chsh`]) and an event-level coincidence
//! simulator ([`experiment`]) with stable output formats ([`output`]).

pub mod chsh;
pub mod correlations;
pub mod disentangle;
pub mod ensemble;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod output;
pub mod qstate;
pub mod rng;
pub mod states;
pub mod symmetry;

pub use chsh::{
    ChshSettings, CorrelationModel, DisentangledModel, EntangledModel, ViolationReport,
};
pub use correlations::{AnalyzerPair, JointProbabilities, ParticleKind};
pub use disentangle::Branch;
pub use ensemble::{EnsembleGeometry, GeometryKind, McEstimate};
pub use error::{Error, Result};
pub use experiment::{CountsTable, ExperimentConfig, PairModel, SweepConfig, VisibilityFit};
pub use geometry::{DirectionAxis, Vec3};
pub use qstate::{ComplexMatrix, ComplexScalar, DensityOperator, Ket, Subsystem};
pub use states::{BellLabel, Sign};
pub use symmetry::{HelicityState, SymmetryClassification};
