//! CHSH statistic `S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)` for any
//! correlation model, with a grid-plus-refinement search for the settings
//! that maximize `|S|`.

use std::f64::consts::{PI, SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleGeometry;
use crate::error::Result;
use crate::geometry::Vec3;

pub const CLASSICAL_BOUND: f64 = 2.0;
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;
/// Margin above the classical bound required to call a violation.
pub const VIOLATION_MARGIN: f64 = 1e-9;

/// Grid points per angle in the coarse search.
const GRID: usize = 18;
const REFINE_STOP: f64 = 1e-12;

/// A correlation function `E(a, b)` with values in `[−1, 1]`.
pub trait CorrelationModel: Sync {
    fn correlation(&self, a: Vec3, b: Vec3) -> f64;
}

impl<F> CorrelationModel for F
where
    F: Fn(Vec3, Vec3) -> f64 + Sync,
{
    fn correlation(&self, a: Vec3, b: Vec3) -> f64 {
        self(a, b)
    }
}

/// The singlet, `E = −a·b`.
#[derive(Debug, Clone, Copy, Default)]
pub struct EntangledModel;

impl CorrelationModel for EntangledModel {
    fn correlation(&self, a: Vec3, b: Vec3) -> f64 {
        -a.dot(b)
    }
}

/// Disentangled pairs after the ensemble average, `E = −a·⟨P̂P̂⟩·b`.
#[derive(Debug, Clone, Copy)]
pub struct DisentangledModel {
    pub geometry: EnsembleGeometry,
}

impl CorrelationModel for DisentangledModel {
    fn correlation(&self, a: Vec3, b: Vec3) -> f64 {
        -self.geometry.averaged_dyad(a, b)
    }
}

/// `E = −k·a·b`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledCosine(pub f64);

impl CorrelationModel for ScaledCosine {
    fn correlation(&self, a: Vec3, b: Vec3) -> f64 {
        -self.0 * a.dot(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub a: Vec3,
    pub a_prime: Vec3,
    pub b: Vec3,
    pub b_prime: Vec3,
}

impl ChshSettings {
    pub fn new(a: Vec3, a_prime: Vec3, b: Vec3, b_prime: Vec3) -> Result<Self> {
        Ok(ChshSettings {
            a: a.require_unit()?,
            a_prime: a_prime.require_unit()?,
            b: b.require_unit()?,
            b_prime: b_prime.require_unit()?,
        })
    }

    /// Settings in the xy plane at the given angles from x̂.
    pub fn planar(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Self {
        ChshSettings {
            a: Vec3::in_xy_plane(a),
            a_prime: Vec3::in_xy_plane(a_prime),
            b: Vec3::in_xy_plane(b),
            b_prime: Vec3::in_xy_plane(b_prime),
        }
    }

    /// `(0, π/2)` against `(π/4, 3π/4)`.
    pub fn standard_optimum() -> Self {
        ChshSettings::planar(0.0, PI / 2.0, PI / 4.0, 3.0 * PI / 4.0)
    }

    /// Azimuths in the xy plane, `[a, a′, b, b′]`.
    pub fn planar_angles(&self) -> [f64; 4] {
        [self.a, self.a_prime, self.b, self.b_prime].map(|v| v.y.atan2(v.x).rem_euclid(TAU))
    }

    /// The four `(left, right)` analyzer pairs in the order of `S`.
    pub fn pairs(&self) -> [(Vec3, Vec3); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }
}

/// Combines four correlations in the fixed sign pattern `(+, −, +, +)`.
pub fn combine(e: [f64; 4]) -> f64 {
    e[0] - e[1] + e[2] + e[3]
}

pub fn chsh_value<M: CorrelationModel + ?Sized>(model: &M, settings: &ChshSettings) -> f64 {
    combine(settings.pairs().map(|(l, r)| model.correlation(l, r)))
}

fn spherical(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

/// Maximizes `f` by compass search from `x`, starting at `step`.
fn refine(x: &mut [f64], mut step: f64, f: impl Fn(&[f64]) -> f64) -> f64 {
    let mut best = f(x);
    while step > REFINE_STOP {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let old = x[i];
                x[i] = old + dir * step;
                let v = f(x);
                if v > best {
                    best = v;
                    improved = true;
                } else {
                    x[i] = old;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Searches for the settings maximizing `|S|`.
///
/// A coarse grid over planar angles (ties go to the lowest grid index) is
/// followed by compass refinement; with `restricted_to_plane == false` the
/// refinement continues over all eight spherical angles.
pub fn optimize_settings<M: CorrelationModel + ?Sized>(
    model: &M,
    restricted_to_plane: bool,
) -> (ChshSettings, f64) {
    let grid: Vec<f64> = (0..GRID).map(|i| TAU * i as f64 / GRID as f64).collect();
    let planar_score =
        |x: &[f64]| chsh_value(model, &ChshSettings::planar(x[0], x[1], x[2], x[3])).abs();

    let mut best = [0.0; 4];
    let mut best_val = f64::NEG_INFINITY;
    for &a in &grid {
        for &ap in &grid {
            for &b in &grid {
                for &bp in &grid {
                    let v = planar_score(&[a, ap, b, bp]);
                    if v > best_val {
                        best_val = v;
                        best = [a, ap, b, bp];
                    }
                }
            }
        }
    }

    let spacing = TAU / GRID as f64;
    refine(&mut best, 0.5 * spacing, planar_score);
    if restricted_to_plane {
        let settings = ChshSettings::planar(best[0], best[1], best[2], best[3]);
        let s = chsh_value(model, &settings).abs();
        return (settings, s);
    }

    let to_settings = |x: &[f64]| ChshSettings {
        a: spherical(x[0], x[1]),
        a_prime: spherical(x[2], x[3]),
        b: spherical(x[4], x[5]),
        b_prime: spherical(x[6], x[7]),
    };
    let half = PI / 2.0;
    let mut x = [half, best[0], half, best[1], half, best[2], half, best[3]];
    refine(&mut x, 0.5 * spacing, |x| {
        chsh_value(model, &to_settings(x)).abs()
    });
    let settings = to_settings(&x);
    let s = chsh_value(model, &settings).abs();
    (settings, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub s: f64,
    pub classical_bound: f64,
    pub tsirelson_bound: f64,
    pub violates: bool,
}

pub fn violation_report<M: CorrelationModel + ?Sized>(
    model: &M,
    settings: &ChshSettings,
) -> ViolationReport {
    report_for(chsh_value(model, settings))
}

pub fn report_for(s: f64) -> ViolationReport {
    ViolationReport {
        s,
        classical_bound: CLASSICAL_BOUND,
        tsirelson_bound: TSIRELSON_BOUND,
        violates: s.abs() > CLASSICAL_BOUND + VIOLATION_MARGIN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_settings_values() {
        let s = chsh_value(&EntangledModel, &ChshSettings::standard_optimum());
        assert!((s.abs() - TSIRELSON_BOUND).abs() < 1e-9);
        let s = chsh_value(&ScaledCosine(0.5), &ChshSettings::standard_optimum());
        assert!((s.abs() - SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn degenerate_settings_bounded() {
        let s = ChshSettings::planar(0.3, 0.3, 1.4, 1.4);
        let v = chsh_value(&EntangledModel, &s);
        assert!((v - 2.0 * EntangledModel.correlation(s.a, s.b)).abs() < 1e-15);
        assert!(v.abs() <= 2.0);
    }

    #[test]
    fn null_model() {
        let r = violation_report(&|_: Vec3, _: Vec3| 0.0, &ChshSettings::standard_optimum());
        assert_eq!(r.s, 0.0);
        assert!(!r.violates);
    }

    #[test]
    fn refine_finds_quadratic_peak() {
        let mut x = [0.0, 0.0];
        let v = refine(&mut x, 0.3, |x| {
            -((x[0] - 0.123).powi(2) + (x[1] + 0.7).powi(2))
        });
        assert!(v > -1e-20);
        assert!((x[0] - 0.123).abs() < 1e-10 && (x[1] + 0.7).abs() < 1e-10);
    }
}
