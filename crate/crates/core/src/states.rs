//! Named states: z-basis products, Bell states, arbitrary-axis spinors and
//! the singlet density operator.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{DirectionAxis, Vec3};
use crate::qstate::{tensor_product, ComplexMatrix, DensityOperator, Ket, Subsystem, ONE, ZERO};

/// A measurement or spin outcome, `±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "Phi+",
            BellLabel::PhiMinus => "Phi-",
            BellLabel::PsiPlus => "Psi+",
            BellLabel::PsiMinus => "Psi-",
        }
    }
}

/// `|Φ±⟩ = (|++⟩ ± |−−⟩)/√2`, `|Ψ±⟩ = (|+−⟩ ± |−+⟩)/√2`.
pub fn bell_state(label: BellLabel) -> Ket {
    let h = FRAC_1_SQRT_2;
    let amps = match label {
        BellLabel::PhiPlus => [h, 0.0, 0.0, h],
        BellLabel::PhiMinus => [h, 0.0, 0.0, -h],
        BellLabel::PsiPlus => [0.0, h, h, 0.0],
        BellLabel::PsiMinus => [0.0, h, -h, 0.0],
    };
    Ket::from_real(&amps).expect("Bell states are normalized")
}

/// Singlet density operator `|Ψ⁻⟩⟨Ψ⁻|`.
pub fn epr_density() -> DensityOperator {
    DensityOperator::pure(&bell_state(BellLabel::PsiMinus))
}

/// Spin state along `axis` with an explicit azimuthal phase:
///
/// `|+⟩ = (cos θ/2, sin θ/2·e^{+iφ})`, `|−⟩ = (−sin θ/2·e^{−iφ}, cos θ/2)`.
///
/// Only when `phase == axis.phi()` is this an eigenvector of `axis·σ`; the
/// phase is kept separate so the two particles of a pair can carry
/// different azimuths.
pub fn spinor(axis: &DirectionAxis, sign: Sign, phase: f64) -> Ket {
    let half = 0.5 * axis.theta();
    let (s, c) = half.sin_cos();
    let amps = match sign {
        Sign::Plus => vec![Complex64::new(c, 0.0), Complex64::from_polar(s, phase)],
        Sign::Minus => vec![-Complex64::from_polar(s, -phase), Complex64::new(c, 0.0)],
    };
    Ket::new(amps).expect("spinor is normalized")
}

/// Eigen-spinor of `axis·σ`, i.e. `spinor(axis, sign, axis.phi())`.
pub fn axis_spinor(axis: &DirectionAxis, sign: Sign) -> Ket {
    spinor(axis, sign, axis.phi())
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    let i = Complex64::new(0.0, 1.0);
    ComplexMatrix::new(2, 2, vec![ZERO, -i, i, ZERO]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[1.0, -1.0])
}

/// `v·σ` for any real vector, without a norm check.
pub fn pauli_dot(v: Vec3) -> ComplexMatrix {
    ComplexMatrix::new(
        2,
        2,
        vec![
            Complex64::new(v.z, 0.0),
            Complex64::new(v.x, -v.y),
            Complex64::new(v.x, v.y),
            Complex64::new(-v.z, 0.0),
        ],
    )
    .expect("finite vector")
}

/// `n̂·σ` for a unit vector `n̂`.
pub fn pauli_projection(n: Vec3) -> Result<ComplexMatrix> {
    Ok(pauli_dot(n.require_unit()?))
}

/// Projector `(I ± n̂·σ)/2` onto the `±` outcome along `n̂`.
pub fn outcome_projector(n: Vec3, sign: Sign) -> Result<ComplexMatrix> {
    let op = pauli_projection(n)?;
    Ok((&ComplexMatrix::identity(2) + &op.scale_real(sign.value())).scale_real(0.5))
}

/// `n̂·σ ⊗ I` or `I ⊗ n̂·σ`.
pub fn spin_on(particle: Subsystem, n: Vec3) -> Result<ComplexMatrix> {
    let op = pauli_projection(n)?;
    let id = ComplexMatrix::identity(2);
    Ok(match particle {
        Subsystem::First => tensor_product(&op, &id),
        Subsystem::Second => tensor_product(&id, &op),
    })
}
