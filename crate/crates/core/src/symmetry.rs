//! Discrete two-photon symmetries acting on helicity product states.
//!
//! Helicity states share the two-qubit space with spin states under
//! `|+⟩ → R`, `|−⟩ → L`, so the basis order is `(RR, RL, LR, LL)`. The
//! first label belongs to the photon travelling along `+κ`.
//!
//! * `R⊥` (rotation by π about a transverse axis) fixes `RR`, `LL` and
//!   exchanges `RL ↔ LR`.
//! * Parity `Π` (inversion through the source) exchanges `RR ↔ LL`. It
//!   sends `|κ,R⟩|−κ,L⟩` to `|−κ,L⟩|κ,R⟩`, the same configuration, so `RL`
//!   and `LR` are each parity-even.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::qstate::{ComplexMatrix, Ket, TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Helicity {
    R,
    L,
}

/// Helicity product state `|left_photon, right_photon⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HelicityState {
    pub left_photon: Helicity,
    pub right_photon: Helicity,
}

impl HelicityState {
    pub const ALL: [HelicityState; 4] = [
        HelicityState::new(Helicity::R, Helicity::R),
        HelicityState::new(Helicity::R, Helicity::L),
        HelicityState::new(Helicity::L, Helicity::R),
        HelicityState::new(Helicity::L, Helicity::L),
    ];

    pub const fn new(left_photon: Helicity, right_photon: Helicity) -> Self {
        HelicityState {
            left_photon,
            right_photon,
        }
    }

    pub fn index(self) -> usize {
        let bit = |h| match h {
            Helicity::R => 0,
            Helicity::L => 1,
        };
        2 * bit(self.left_photon) + bit(self.right_photon)
    }

    pub fn ket(self) -> Ket {
        Ket::basis(4, self.index()).expect("index < 4")
    }
}

impl fmt::Display for HelicityState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{:?}{:?}>", self.left_photon, self.right_photon)
    }
}

fn permutation(images: [usize; 4]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (from, to) in images.into_iter().enumerate() {
        m.set(to, from, crate::qstate::ONE);
    }
    m
}

/// Two-photon parity as a permutation matrix on `(RR, RL, LR, LL)`.
pub fn parity_matrix() -> ComplexMatrix {
    permutation([3, 1, 2, 0])
}

/// Transverse π-rotation as a permutation matrix on `(RR, RL, LR, LL)`.
pub fn r_perp_matrix() -> ComplexMatrix {
    permutation([0, 2, 1, 3])
}

fn apply(op: &ComplexMatrix, state: &Ket) -> Ket {
    Ket::new(state.apply(op)).expect("permutations preserve the norm")
}

pub fn apply_parity(state: &Ket) -> Ket {
    apply(&parity_matrix(), state)
}

pub fn apply_r_perp(state: &Ket) -> Ket {
    apply(&r_perp_matrix(), state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Eigen {
    Even,
    Odd,
    NotEigenstate,
}

impl fmt::Display for Eigen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Eigen::Even => "even",
            Eigen::Odd => "odd",
            Eigen::NotEigenstate => "not an eigenstate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymmetryClassification {
    pub parity: Eigen,
    pub r_perp: Eigen,
}

fn eigen_sign(state: &Ket, image: &Ket) -> Eigen {
    let close = |sign: f64| {
        state
            .amplitudes()
            .iter()
            .zip(image.amplitudes())
            .all(|(a, b)| (b - a * sign).norm() <= TOL)
    };
    if close(1.0) {
        Eigen::Even
    } else if close(-1.0) {
        Eigen::Odd
    } else {
        Eigen::NotEigenstate
    }
}

pub fn classify(state: &Ket) -> SymmetryClassification {
    SymmetryClassification {
        parity: eigen_sign(state, &apply_parity(state)),
        r_perp: eigen_sign(state, &apply_r_perp(state)),
    }
}

/// Bell states written in helicity labels.
pub fn helicity_bell(label: crate::states::BellLabel) -> Ket {
    use crate::states::BellLabel::*;
    let h = FRAC_1_SQRT_2;
    let amps = match label {
        PhiPlus => [h, 0.0, 0.0, h],
        PhiMinus => [h, 0.0, 0.0, -h],
        PsiPlus => [0.0, h, h, 0.0],
        PsiMinus => [0.0, h, -h, 0.0],
    };
    Ket::from_real(&amps).expect("normalized")
}
