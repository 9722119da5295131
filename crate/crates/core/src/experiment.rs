//! Event-level coincidence experiment: per-pair outcome sampling, count
//! tables, normalized correlations and visibility fits.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chsh::{combine, ChshSettings};
use crate::correlations::{
    disentangled_joint_probabilities_fixed_axis, entangled_joint_probabilities, AnalyzerPair,
    JointProbabilities, ParticleKind,
};
use crate::ensemble::{sample_direction, EnsembleGeometry};
use crate::error::{Error, Result};
use crate::geometry::{DirectionAxis, Vec3};
use crate::rng::map_blocks;

/// Default number of sweep angles.
pub const DEFAULT_ANGLES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairModel {
    Entangled,
    Disentangled,
}

pub fn default_geometry(kind: ParticleKind) -> EnsembleGeometry {
    match kind {
        ParticleKind::Fermion => EnsembleGeometry::sphere(),
        ParticleKind::Photon => EnsembleGeometry::photon_default(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: PairModel,
    pub kind: ParticleKind,
    pub n_pairs: u64,
    pub seed: u64,
    pub settings: AnalyzerPair,
    pub geometry: Option<EnsembleGeometry>,
}

impl ExperimentConfig {
    pub fn new(
        model: PairModel,
        kind: ParticleKind,
        n_pairs: u64,
        seed: u64,
        settings: AnalyzerPair,
        geometry: Option<EnsembleGeometry>,
    ) -> Result<Self> {
        let config = ExperimentConfig {
            model,
            kind,
            n_pairs,
            seed,
            settings,
            geometry,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pairs == 0 {
            return Err(Error::InvalidConfig("n_pairs must be at least 1".into()));
        }
        if self.model == PairModel::Disentangled && self.geometry.is_none() {
            return Err(Error::InvalidConfig(
                "disentangled model requires a geometry".into(),
            ));
        }
        Ok(())
    }

    /// Substream tag derived from the analyzer settings, so that a
    /// configuration's events do not depend on where it sits in a sweep.
    fn stream_tag(&self) -> u64 {
        let a = self.settings.a().to_array();
        let b = self.settings.b().to_array();
        a.iter()
            .chain(&b)
            .fold(0x9e37_79b9_7f4a_7c15_u64, |acc, x| {
                (acc ^ x.to_bits())
                    .rotate_left(23)
                    .wrapping_mul(0x100_0000_01b3)
            })
    }
}

/// Coincidence counters `N₊₊, N₊₋, N₋₊, N₋₋`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CountsTable {
    pub n_pp: u64,
    pub n_pm: u64,
    pub n_mp: u64,
    pub n_mm: u64,
}

impl CountsTable {
    pub fn new(n_pp: u64, n_pm: u64, n_mp: u64, n_mm: u64) -> Self {
        CountsTable {
            n_pp,
            n_pm,
            n_mp,
            n_mm,
        }
    }

    pub fn total(&self) -> u64 {
        self.n_pp + self.n_pm + self.n_mp + self.n_mm
    }

    pub fn cells(&self) -> [u64; 4] {
        [self.n_pp, self.n_pm, self.n_mp, self.n_mm]
    }

    fn record(&mut self, cell: usize) {
        match cell {
            0 => self.n_pp += 1,
            1 => self.n_pm += 1,
            2 => self.n_mp += 1,
            _ => self.n_mm += 1,
        }
    }

    pub fn merge(&mut self, other: &CountsTable) {
        self.n_pp += other.n_pp;
        self.n_pm += other.n_pm;
        self.n_mp += other.n_mp;
        self.n_mm += other.n_mm;
    }

    /// Empirical cell frequencies.
    pub fn frequencies(&self) -> Result<[f64; 4]> {
        let n = self.total();
        if n == 0 {
            return Err(Error::NoCoincidences);
        }
        Ok(self.cells().map(|c| c as f64 / n as f64))
    }
}

/// Index of the joint outcome selected by a uniform draw `u ∈ [0, 1)`.
fn draw_cell(p: &JointProbabilities, u: f64) -> usize {
    let mut acc = p.p_pp;
    if u < acc {
        return 0;
    }
    acc += p.p_pm;
    if u < acc {
        return 1;
    }
    acc += p.p_mp;
    if u < acc {
        return 2;
    }
    3
}

fn sample_pair<R: Rng + ?Sized>(config: &ExperimentConfig, rng: &mut R) -> usize {
    let probs = match config.model {
        PairModel::Entangled => entangled_joint_probabilities(&config.settings),
        PairModel::Disentangled => {
            let geometry = config.geometry.as_ref().expect("validated");
            let axis = DirectionAxis::from_vector(sample_direction(geometry, rng))
                .expect("sampled directions are unit");
            disentangled_joint_probabilities_fixed_axis(&config.settings, &axis)
        }
    };
    draw_cell(&probs, rng.random::<f64>())
}

/// Simulates `n_pairs` ideal coincidence events.
pub fn run_pairs(config: &ExperimentConfig) -> Result<CountsTable> {
    config.validate()?;
    let blocks = map_blocks(
        config.n_pairs,
        config.seed,
        config.stream_tag(),
        |rng, range| {
            let mut counts = CountsTable::default();
            for _ in range {
                counts.record(sample_pair(config, rng));
            }
            counts
        },
    );
    let mut total = CountsTable::default();
    for b in &blocks {
        total.merge(b);
    }
    Ok(total)
}

/// `E = (N₊₊ − N₊₋ − N₋₊ + N₋₋)/(N₊₊ + N₊₋ + N₋₊ + N₋₋)`.
pub fn normalized_correlation(counts: &CountsTable) -> Result<f64> {
    let n = counts.total();
    if n == 0 {
        return Err(Error::NoCoincidences);
    }
    let signed = (counts.n_pp + counts.n_mm) as f64 - (counts.n_pm + counts.n_mp) as f64;
    Ok(signed / n as f64)
}

/// Standard error of the ±1 product mean, `√((1 − Ê²)/(n − 1))`.
pub fn correlation_std_error(counts: &CountsTable) -> Result<f64> {
    let e = normalized_correlation(counts)?;
    let n = counts.total();
    if n < 2 {
        return Ok(0.0);
    }
    Ok(((1.0 - e * e).max(0.0) / (n - 1) as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilityFit {
    pub v: f64,
    pub residual: f64,
}

/// Least-squares fit of `E(θ) = −V cos θ` to `(θ, E)` points.
pub fn fit_visibility_points(points: &[(f64, f64)]) -> Result<VisibilityFit> {
    let mut thetas: Vec<f64> = points.iter().map(|p| p.0).collect();
    thetas.sort_by(|a, b| a.total_cmp(b));
    thetas.dedup();
    if thetas.len() < 2 {
        return Err(Error::TooFewAngles(thetas.len()));
    }
    if points.iter().all(|(t, _)| t.cos().abs() < 1e-12) {
        return Err(Error::DegenerateDesign);
    }
    let sxy: f64 = points.iter().map(|(t, e)| e * t.cos()).sum();
    let sxx: f64 = points.iter().map(|(t, _)| t.cos() * t.cos()).sum();
    let v = -sxy / sxx;
    let sq: f64 = points.iter().map(|(t, e)| (e + v * t.cos()).powi(2)).sum();
    Ok(VisibilityFit {
        v,
        residual: (sq / points.len() as f64).sqrt(),
    })
}

/// Visibility from measured count tables.
pub fn fit_visibility(sweep: &[(f64, CountsTable)]) -> Result<VisibilityFit> {
    let points = sweep
        .iter()
        .map(|(t, c)| Ok((*t, normalized_correlation(c)?)))
        .collect::<Result<Vec<_>>>()?;
    fit_visibility_points(&points)
}

/// `n` equally spaced angles covering `[0, π]`.
pub fn sweep_angles(n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|i| PI * (i as f64 / (n - 1) as f64)).collect(),
    }
}

/// Everything in an [`ExperimentConfig`] except the analyzer settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub model: PairModel,
    pub kind: ParticleKind,
    pub n_pairs: u64,
    pub seed: u64,
    pub geometry: Option<EnsembleGeometry>,
}

impl SweepConfig {
    /// Uses the natural ensemble of `kind` for the disentangled model.
    pub fn new(model: PairModel, kind: ParticleKind, n_pairs: u64, seed: u64) -> Self {
        let geometry = match model {
            PairModel::Entangled => None,
            PairModel::Disentangled => Some(default_geometry(kind)),
        };
        SweepConfig {
            model,
            kind,
            n_pairs,
            seed,
            geometry,
        }
    }

    pub fn at(&self, settings: AnalyzerPair) -> Result<ExperimentConfig> {
        ExperimentConfig::new(
            self.model,
            self.kind,
            self.n_pairs,
            self.seed,
            settings,
            self.geometry,
        )
    }

    /// Analyzers `x̂` and `b` at `theta_ab` from `x̂`, in the xy plane.
    pub fn at_angle(&self, theta_ab: f64) -> Result<ExperimentConfig> {
        self.at(AnalyzerPair::with_angle(theta_ab, self.kind))
    }

    /// `E = −k cos θ` predicted for this model.
    pub fn prefactor(&self) -> f64 {
        match (self.model, self.geometry) {
            (PairModel::Disentangled, Some(g)) => g.prefactor(),
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta_ab_rad: f64,
    pub counts: CountsTable,
    pub e_hat: f64,
    pub std_err: f64,
}

/// Runs one count table per angle; each angle has its own substream.
pub fn run_sweep(config: &SweepConfig, angles: &[f64]) -> Result<Vec<SweepRow>> {
    angles
        .iter()
        .map(|&theta| {
            let counts = run_pairs(&config.at_angle(theta)?)?;
            Ok(SweepRow {
                theta_ab_rad: theta,
                counts,
                e_hat: normalized_correlation(&counts)?,
                std_err: correlation_std_error(&counts)?,
            })
        })
        .collect()
}

pub fn fit_sweep(rows: &[SweepRow]) -> Result<VisibilityFit> {
    let sweep: Vec<(f64, CountsTable)> = rows.iter().map(|r| (r.theta_ab_rad, r.counts)).collect();
    fit_visibility(&sweep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsensitivityReport {
    /// Factor applied to the disentangled correlations.
    pub rescale: f64,
    /// `(θ, E_entangled, rescale·E_disentangled)` per angle.
    pub rows: Vec<(f64, f64, f64)>,
    pub max_abs_diff: f64,
}

fn insensitivity(rescale: f64, rows: Vec<(f64, f64, f64)>) -> InsensitivityReport {
    let max_abs_diff = rows.iter().map(|r| (r.1 - r.2).abs()).fold(0.0, f64::max);
    InsensitivityReport {
        rescale,
        rows,
        max_abs_diff,
    }
}

/// Runs both models over the same angles and compares the entangled curve
/// with the disentangled one rescaled by `1/k`.
pub fn prefactor_insensitivity_demo(
    entangled: &SweepConfig,
    disentangled: &SweepConfig,
    angles: &[f64],
) -> Result<InsensitivityReport> {
    if entangled.model != PairModel::Entangled || disentangled.model != PairModel::Disentangled {
        return Err(Error::InvalidConfig(
            "expected an entangled and a disentangled sweep".into(),
        ));
    }
    let ent = run_sweep(entangled, angles)?;
    let dis = run_sweep(disentangled, angles)?;
    let rescale = 1.0 / disentangled.prefactor();
    let rows = ent
        .iter()
        .zip(&dis)
        .map(|(e, d)| (e.theta_ab_rad, e.e_hat, rescale * d.e_hat))
        .collect();
    Ok(insensitivity(rescale, rows))
}

/// The same comparison on exact correlations.
pub fn prefactor_insensitivity_analytic(
    geometry: &EnsembleGeometry,
    angles: &[f64],
) -> InsensitivityReport {
    let k = geometry.prefactor();
    let rows = angles
        .iter()
        .map(|&t| {
            let (a, b) = (Vec3::X, Vec3::in_xy_plane(t));
            (t, -a.dot(b), (1.0 / k) * -geometry.averaged_dyad(a, b))
        })
        .collect();
    insensitivity(1.0 / k, rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshEstimate {
    pub correlations: [f64; 4],
    pub std_errors: [f64; 4],
    pub s: f64,
    pub std_error: f64,
}

/// Estimates `S` from four simulated count tables.
pub fn simulate_chsh(template: &SweepConfig, settings: &ChshSettings) -> Result<ChshEstimate> {
    let mut correlations = [0.0; 4];
    let mut std_errors = [0.0; 4];
    for (i, (a, b)) in settings.pairs().into_iter().enumerate() {
        let pair = AnalyzerPair::new(a, b, template.kind)?;
        let counts = run_pairs(&template.at(pair)?)?;
        correlations[i] = normalized_correlation(&counts)?;
        std_errors[i] = correlation_std_error(&counts)?;
    }
    Ok(ChshEstimate {
        correlations,
        std_errors,
        s: combine(correlations),
        std_error: std_errors.iter().map(|s| s * s).sum::<f64>().sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draw_cell_respects_zero_cells() {
        let p = JointProbabilities::anticorrelated(1.0);
        for u in [0.0, 0.25, 0.4999, 0.5, 0.75, 0.999_999_999] {
            let c = draw_cell(&p, u);
            assert!(c == 1 || c == 2);
        }
    }

    #[test]
    fn normalized_correlation_golden() {
        assert_eq!(
            normalized_correlation(&CountsTable::new(0, 500, 500, 0)).unwrap(),
            -1.0
        );
        assert_eq!(
            normalized_correlation(&CountsTable::new(250, 250, 250, 250)).unwrap(),
            0.0
        );
        assert_eq!(
            normalized_correlation(&CountsTable::default()),
            Err(Error::NoCoincidences)
        );
    }

    #[test]
    fn single_event() {
        let cfg = SweepConfig::new(PairModel::Disentangled, ParticleKind::Fermion, 1, 4)
            .at_angle(0.7)
            .unwrap();
        let c = run_pairs(&cfg).unwrap();
        assert_eq!(c.total(), 1);
        assert_eq!(c.cells().iter().filter(|&&x| x == 1).count(), 1);
    }

    #[test]
    fn config_validation() {
        let pair = AnalyzerPair::with_angle(0.0, ParticleKind::Fermion);
        assert!(ExperimentConfig::new(
            PairModel::Disentangled,
            ParticleKind::Fermion,
            10,
            0,
            pair,
            None
        )
        .is_err());
        assert!(ExperimentConfig::new(
            PairModel::Entangled,
            ParticleKind::Fermion,
            0,
            0,
            pair,
            None
        )
        .is_err());
    }

    #[test]
    fn fit_errors() {
        assert_eq!(
            fit_visibility_points(&[(0.3, 0.1), (0.3, 0.2)]),
            Err(Error::TooFewAngles(1))
        );
        let half = PI / 2.0;
        assert_eq!(
            fit_visibility_points(&[(half, 0.0), (-half, 0.0)]),
            Err(Error::DegenerateDesign)
        );
    }

    #[test]
    fn exact_points_recover_visibility() {
        for v in [1.0, 0.5, 0.46] {
            let pts: Vec<(f64, f64)> = sweep_angles(12)
                .into_iter()
                .map(|t| (t, -v * t.cos()))
                .collect();
            let fit = fit_visibility_points(&pts).unwrap();
            assert!((fit.v - v).abs() < 1e-12);
            assert!(fit.residual < 1e-12);
        }
    }

    #[test]
    fn sweep_angles_cover_range() {
        let a = sweep_angles(12);
        assert_eq!(a.len(), 12);
        assert_eq!(a[0], 0.0);
        assert_eq!(a[11], PI);
    }
}
