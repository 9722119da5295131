//! Ensemble averages over the random shared quantization axis.
//!
//! Fermion pairs average over the whole sphere; photon pairs over the
//! circle of directions transverse to propagation. Each average has a
//! closed form and a seeded Monte Carlo estimator.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::correlations::{correlation, disentangled_joint_probabilities_fixed_axis, AnalyzerPair};
use crate::error::{Error, Result};
use crate::geometry::{DirectionAxis, Vec3, UNIT_TOL};
use crate::qstate::Subsystem;
use crate::rng::{map_blocks, RunningStats};

/// Substream tag for axis draws in this module.
const TAG_AXES: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Sphere,
    TransverseCircle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleGeometry {
    kind: GeometryKind,
    propagation_axis: Vec3,
}

impl EnsembleGeometry {
    pub fn sphere() -> Self {
        EnsembleGeometry {
            kind: GeometryKind::Sphere,
            propagation_axis: Vec3::Z,
        }
    }

    pub fn transverse_circle(propagation_axis: Vec3) -> Result<Self> {
        Ok(EnsembleGeometry {
            kind: GeometryKind::TransverseCircle,
            propagation_axis: propagation_axis.require_unit()?,
        })
    }

    /// Photons travelling along ẑ.
    pub fn photon_default() -> Self {
        EnsembleGeometry {
            kind: GeometryKind::TransverseCircle,
            propagation_axis: Vec3::Z,
        }
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn propagation_axis(&self) -> Vec3 {
        self.propagation_axis
    }

    /// `⟨P̂P̂⟩` contracted with `a`, `b`: `a·b/3` on the sphere,
    /// `a·(I − n̂n̂)·b/2` on the circle.
    pub fn averaged_dyad(&self, a: Vec3, b: Vec3) -> f64 {
        match self.kind {
            GeometryKind::Sphere => a.dot(b) / 3.0,
            GeometryKind::TransverseCircle => {
                let n = self.propagation_axis;
                0.5 * (a.dot(b) - a.dot(n) * n.dot(b))
            }
        }
    }

    /// Factor `k` in the averaged correlation `E = −k·cos θab`.
    pub fn prefactor(&self) -> f64 {
        match self.kind {
            GeometryKind::Sphere => 1.0 / 3.0,
            GeometryKind::TransverseCircle => 0.5,
        }
    }
}

/// Uniform direction on the sphere or on the transverse circle.
pub fn sample_direction<R: Rng + ?Sized>(geometry: &EnsembleGeometry, rng: &mut R) -> Vec3 {
    match geometry.kind {
        GeometryKind::Sphere => {
            let cos_t = 2.0 * rng.random::<f64>() - 1.0;
            let phi = TAU * rng.random::<f64>();
            let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
            let (sp, cp) = phi.sin_cos();
            Vec3::new(sin_t * cp, sin_t * sp, cos_t)
        }
        GeometryKind::TransverseCircle => {
            let chi = TAU * rng.random::<f64>();
            let (u, v) = geometry.propagation_axis.orthonormal_frame();
            let (s, c) = chi.sin_cos();
            u * c + v * s
        }
    }
}

pub fn sample_axis<R: Rng + ?Sized>(geometry: &EnsembleGeometry, rng: &mut R) -> DirectionAxis {
    DirectionAxis::from_vector(sample_direction(geometry, rng))
        .expect("sampled directions are unit")
}

/// The first `n` axis directions of the `(seed)` ensemble, in sample order.
pub fn sample_directions(geometry: &EnsembleGeometry, n: u64, seed: u64) -> Vec<Vec3> {
    map_blocks(n, seed, TAG_AXES, |rng, range| {
        range
            .map(|_| sample_direction(geometry, rng))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl McEstimate {
    fn from_stats(stats: RunningStats, seed: u64) -> Self {
        McEstimate {
            mean: stats.mean,
            std_error: stats.std_error(),
            n_samples: stats.count,
            seed,
        }
    }

    /// `(mean − target)/std_error`; infinite if the error is zero and the
    /// mean misses.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = self.mean - target;
        if d == 0.0 {
            0.0
        } else {
            d / self.std_error
        }
    }
}

fn require_in_plane(geometry: &EnsembleGeometry, v: Vec3) -> Result<()> {
    if geometry.kind == GeometryKind::TransverseCircle {
        let along = v.dot(geometry.propagation_axis);
        if along.abs() > UNIT_TOL {
            return Err(Error::OutOfPlaneAnalyzer(along));
        }
    }
    Ok(())
}

/// Closed-form ensemble-averaged correlation `−a·⟨P̂P̂⟩·b`.
pub fn analytic_average_correlation(
    pair: &AnalyzerPair,
    geometry: &EnsembleGeometry,
) -> Result<f64> {
    require_in_plane(geometry, pair.a())?;
    require_in_plane(geometry, pair.b())?;
    Ok(-geometry.averaged_dyad(pair.a(), pair.b()))
}

fn estimate<F>(n_samples: u64, seed: u64, per_block: F) -> Result<McEstimate>
where
    F: Fn(&mut crate::rng::StreamRng, std::ops::Range<u64>) -> RunningStats + Sync,
{
    if n_samples == 0 {
        return Err(Error::InvalidConfig("n_samples must be at least 1".into()));
    }
    let mut total = RunningStats::default();
    for block in map_blocks(n_samples, seed, TAG_AXES, per_block) {
        total.merge(&block);
    }
    Ok(McEstimate::from_stats(total, seed))
}

/// Monte Carlo estimate of the ensemble-averaged correlation.
pub fn mc_average_correlation(
    pair: &AnalyzerPair,
    geometry: &EnsembleGeometry,
    n_samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    estimate(n_samples, seed, |rng, range| {
        let mut stats = RunningStats::default();
        for _ in range {
            let axis = DirectionAxis::from_vector(sample_direction(geometry, rng))
                .expect("sampled directions are unit");
            stats.push(correlation(&disentangled_joint_probabilities_fixed_axis(
                pair, &axis,
            )));
        }
        stats
    })
}

/// How a single-particle expectation is evaluated for each sampled axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchSampling {
    /// Expectation in the equal two-branch mixture; zero for every axis.
    Mixture,
    /// Each pair is in one branch, drawn with probability 1/2.
    PerPair,
}

/// Monte Carlo estimate of `⟨n̂·σ⟩` for one particle, averaged over axes.
pub fn mc_average_singles(
    geometry: &EnsembleGeometry,
    analyzer: Vec3,
    particle: Subsystem,
    sampling: BranchSampling,
    n_samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    let analyzer = analyzer.require_unit()?;
    // particle 1 carries +, particle 2 carries − in the PlusMinus branch
    let branch_sign = match particle {
        Subsystem::First => 1.0,
        Subsystem::Second => -1.0,
    };
    estimate(n_samples, seed, |rng, range| {
        let mut stats = RunningStats::default();
        for _ in range {
            let p = sample_direction(geometry, rng);
            let along = analyzer.dot(p);
            let value = match sampling {
                BranchSampling::Mixture => {
                    0.5 * (branch_sign * along) + 0.5 * (-branch_sign * along)
                }
                BranchSampling::PerPair => {
                    if rng.random::<bool>() {
                        branch_sign * along
                    } else {
                        -branch_sign * along
                    }
                }
            };
            stats.push(value);
        }
        stats
    })
}
