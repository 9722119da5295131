//! Detection probabilities, expectation values and correlation functions
//! for the entangled singlet and for disentangled pairs along a fixed axis.
//!
//! Every probability has a closed form and a Born-rule route through the
//! density operators; the `*_born` functions exist so the two can be
//! compared.

use serde::{Deserialize, Serialize};

use crate::disentangle::disentangled_mixture;
use crate::error::{Error, Result};
use crate::geometry::{DirectionAxis, Vec3};
use crate::qstate::{tensor_product, DensityOperator, Subsystem, TOL};
use crate::states::{epr_density, outcome_projector, pauli_projection, spin_on, spinor, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParticleKind {
    Fermion,
    Photon,
}

/// Analyzer directions: `a` acts on particle 1, `b` on particle 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzerPair {
    a: Vec3,
    b: Vec3,
    kind: ParticleKind,
}

impl AnalyzerPair {
    pub fn new(a: Vec3, b: Vec3, kind: ParticleKind) -> Result<Self> {
        Ok(AnalyzerPair {
            a: a.require_unit()?,
            b: b.require_unit()?,
            kind,
        })
    }

    /// `a = x̂`, `b` rotated by `theta_ab` in the xy plane.
    pub fn with_angle(theta_ab: f64, kind: ParticleKind) -> Self {
        AnalyzerPair {
            a: Vec3::X,
            b: Vec3::in_xy_plane(theta_ab),
            kind,
        }
    }

    /// Photon polarizer orientations `alpha`, `beta` (radians, transverse
    /// plane). The helicity-frame analyzers sit at the doubled angles.
    pub fn from_polarizer_angles(alpha: f64, beta: f64) -> Self {
        AnalyzerPair {
            a: Vec3::in_xy_plane(2.0 * alpha),
            b: Vec3::in_xy_plane(2.0 * beta),
            kind: ParticleKind::Photon,
        }
    }

    pub fn a(&self) -> Vec3 {
        self.a
    }

    pub fn b(&self) -> Vec3 {
        self.b
    }

    pub fn kind(&self) -> ParticleKind {
        self.kind
    }

    pub fn cos_ab(&self) -> f64 {
        self.a.dot(self.b)
    }

    /// Angle between the analyzers in the spin (helicity) frame.
    pub fn theta_ab(&self) -> f64 {
        self.a.angle_to(self.b)
    }

    /// The angle an experimenter would quote: `θab` for fermions, the
    /// polarizer angle `θab/2` for photons.
    pub fn reported_angle(&self) -> f64 {
        match self.kind {
            ParticleKind::Fermion => self.theta_ab(),
            ParticleKind::Photon => 0.5 * self.theta_ab(),
        }
    }
}

/// Joint outcome probabilities `P₊₊, P₊₋, P₋₊, P₋₋`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointProbabilities {
    pub p_pp: f64,
    pub p_pm: f64,
    pub p_mp: f64,
    pub p_mm: f64,
}

impl JointProbabilities {
    pub fn new(p_pp: f64, p_pm: f64, p_mp: f64, p_mm: f64) -> Result<Self> {
        let j = JointProbabilities {
            p_pp,
            p_pm,
            p_mp,
            p_mm,
        };
        let cells = j.cells();
        if cells.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("joint probabilities"));
        }
        if cells.iter().any(|&p| !(-TOL..=1.0 + TOL).contains(&p)) {
            return Err(Error::InvalidConfig(format!(
                "probability outside [0, 1]: {cells:?}"
            )));
        }
        let sum: f64 = cells.iter().sum();
        if (sum - 1.0).abs() > TOL {
            return Err(Error::InvalidConfig(format!("probabilities sum to {sum}")));
        }
        Ok(j)
    }

    /// `P₊₊ = P₋₋ = (1 − c)/4`, `P₊₋ = P₋₊ = (1 + c)/4`, the shape shared
    /// by every model here; `E = −c`.
    pub fn anticorrelated(c: f64) -> Self {
        let same = 0.25 * (1.0 - c);
        let diff = 0.25 * (1.0 + c);
        JointProbabilities {
            p_pp: same,
            p_pm: diff,
            p_mp: diff,
            p_mm: same,
        }
    }

    pub fn cells(&self) -> [f64; 4] {
        [self.p_pp, self.p_pm, self.p_mp, self.p_mm]
    }

    pub fn sum(&self) -> f64 {
        self.cells().iter().sum()
    }

    /// `(P¹₊, P²₊)`.
    pub fn marginals_plus(&self) -> (f64, f64) {
        (self.p_pp + self.p_pm, self.p_pp + self.p_mp)
    }

    pub fn max_abs_diff(&self, other: &JointProbabilities) -> f64 {
        self.cells()
            .iter()
            .zip(other.cells())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `E = P₊₊ − P₊₋ − P₋₊ + P₋₋`.
pub fn correlation(joint: &JointProbabilities) -> f64 {
    joint.p_pp - joint.p_pm - joint.p_mp + joint.p_mm
}

/// Outcome probabilities `(p₊, p₋)` for one particle of the branch with
/// particle 1 in `|+⟩` and particle 2 in `|−⟩` along `axis`.
pub fn single_probabilities(
    axis: &DirectionAxis,
    analyzer: Vec3,
    particle: Subsystem,
) -> Result<(f64, f64)> {
    let analyzer = analyzer.require_unit()?;
    let cos_t = analyzer.dot(axis.vector()).clamp(-1.0, 1.0);
    let up = 0.5 * (1.0 + cos_t); // cos²(θ/2)
    let down = 0.5 * (1.0 - cos_t); // sin²(θ/2)
    Ok(match particle {
        Subsystem::First => (up, down),
        Subsystem::Second => (down, up),
    })
}

/// Same as [`single_probabilities`], computed as `|⟨s|±⟩_a|²` in the frame
/// whose z axis is the quantization axis. `phase` is the arbitrary
/// azimuth of the analyzer spinors in that frame.
pub fn single_probabilities_born(
    axis: &DirectionAxis,
    analyzer: Vec3,
    particle: Subsystem,
    phase: f64,
) -> Result<(f64, f64)> {
    let analyzer = analyzer.require_unit()?;
    let theta_a = analyzer.angle_to(axis.vector());
    let relative = DirectionAxis::from_angles(theta_a, 0.0)?;
    let state = match particle {
        Subsystem::First => spinor(&DirectionAxis::z(), Sign::Plus, phase),
        Subsystem::Second => spinor(&DirectionAxis::z(), Sign::Minus, phase),
    };
    let p = |sign| spinor(&relative, sign, phase).inner(&state).norm_sqr();
    Ok((p(Sign::Plus), p(Sign::Minus)))
}

/// `(⟨a·σ¹ b·σ²⟩, ⟨a·σ¹⟩, ⟨b·σ²⟩)` on the singlet by explicit matrix algebra.
pub fn entangled_expectations(pair: &AnalyzerPair) -> (f64, f64, f64) {
    let rho = epr_density();
    let sa = pauli_projection(pair.a).expect("validated");
    let sb = pauli_projection(pair.b).expect("validated");
    let joint = rho.expectation(&tensor_product(&sa, &sb));
    let one = rho.expectation(&spin_on(Subsystem::First, pair.a).expect("validated"));
    let two = rho.expectation(&spin_on(Subsystem::Second, pair.b).expect("validated"));
    (joint, one, two)
}

pub fn entangled_joint_probabilities(pair: &AnalyzerPair) -> JointProbabilities {
    JointProbabilities::anticorrelated(pair.cos_ab())
}

fn born_joint(rho: &DensityOperator, a: Vec3, b: Vec3) -> Result<JointProbabilities> {
    let p = |s1, s2| -> Result<f64> {
        let proj = tensor_product(&outcome_projector(a, s1)?, &outcome_projector(b, s2)?);
        Ok(rho.expectation(&proj))
    };
    JointProbabilities::new(
        p(Sign::Plus, Sign::Plus)?,
        p(Sign::Plus, Sign::Minus)?,
        p(Sign::Minus, Sign::Plus)?,
        p(Sign::Minus, Sign::Minus)?,
    )
}

/// `Tr{ρ_EPR (Πa ⊗ Πb)}` for each outcome pair.
pub fn entangled_joint_probabilities_born(pair: &AnalyzerPair) -> Result<JointProbabilities> {
    born_joint(&epr_density(), pair.a, pair.b)
}

/// Closed form with `cos θa cos θb = (a·P̂)(P̂·b)`.
pub fn disentangled_joint_probabilities_fixed_axis(
    pair: &AnalyzerPair,
    axis: &DirectionAxis,
) -> JointProbabilities {
    let p = axis.vector();
    JointProbabilities::anticorrelated(pair.a.dot(p) * p.dot(pair.b))
}

pub fn disentangled_joint_probabilities_born(
    pair: &AnalyzerPair,
    axis: &DirectionAxis,
) -> Result<JointProbabilities> {
    born_joint(&disentangled_mixture(axis), pair.a, pair.b)
}

/// Both routes, failing if they disagree by more than `1e-12`.
pub fn disentangled_joint_probabilities_checked(
    pair: &AnalyzerPair,
    axis: &DirectionAxis,
) -> Result<JointProbabilities> {
    let closed = disentangled_joint_probabilities_fixed_axis(pair, axis);
    let born = disentangled_joint_probabilities_born(pair, axis)?;
    let diff = closed.max_abs_diff(&born);
    if diff > TOL {
        return Err(Error::PathMismatch(diff));
    }
    Ok(closed)
}
