//! Loss of inter-particle interference with conservation of angular
//! momentum along a shared quantization axis.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::DirectionAxis;
use crate::qstate::{tensor_product, ComplexMatrix, DensityOperator};
use crate::states::{axis_spinor, Sign};

/// One definite anti-correlated branch of a disentangled pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// Particle 1 up, particle 2 down along the axis.
    PlusMinus,
    /// Particle 1 down, particle 2 up along the axis.
    MinusPlus,
}

impl Branch {
    pub fn signs(self) -> (Sign, Sign) {
        match self {
            Branch::PlusMinus => (Sign::Plus, Sign::Minus),
            Branch::MinusPlus => (Sign::Minus, Sign::Plus),
        }
    }
}

/// Unitary whose columns are the two-particle product eigenbasis along
/// `axis`, ordered `(++, +−, −+, −−)`.
pub fn product_basis(axis: &DirectionAxis) -> ComplexMatrix {
    let plus = axis_spinor(axis, Sign::Plus);
    let minus = axis_spinor(axis, Sign::Minus);
    let single = ComplexMatrix::from_columns(&[&plus, &minus]);
    tensor_product(&single, &single)
}

/// Erases every off-diagonal element of `rho` in the product eigenbasis of
/// `axis` and returns to the z basis.
pub fn decohere_offdiagonal(
    rho: &DensityOperator,
    axis: &DirectionAxis,
) -> Result<DensityOperator> {
    let u = product_basis(axis);
    let u_dag = u.adjoint();
    let in_axis_basis = u_dag.matmul(rho.matrix()).matmul(&u);
    let dephased = in_axis_basis.diagonal_part();
    DensityOperator::new(u.matmul(&dephased).matmul(&u_dag))
}

/// `ρ¹(s₁) ⊗ ρ²(s₂)` for the branch's signs along `axis`.
pub fn branch_pair(axis: &DirectionAxis, branch: Branch) -> DensityOperator {
    let (s1, s2) = branch.signs();
    let one = axis_spinor(axis, s1);
    let two = axis_spinor(axis, s2);
    DensityOperator::pure(&one.tensor(&two))
}

/// Equal mixture of the two anti-correlated branches along `axis`.
pub fn disentangled_mixture(axis: &DirectionAxis) -> DensityOperator {
    let pm = branch_pair(axis, Branch::PlusMinus);
    let mp = branch_pair(axis, Branch::MinusPlus);
    DensityOperator::mixture(&[(0.5, &pm), (0.5, &mp)])
        .expect("mixture of two product states is a density operator")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use crate::qstate::{partial_trace, Subsystem};
    use crate::states::{epr_density, outcome_projector, spin_on};

    fn diag_half() -> ComplexMatrix {
        ComplexMatrix::diagonal(&[0.0, 0.5, 0.5, 0.0])
    }

    #[test]
    fn singlet_along_z() {
        let out = decohere_offdiagonal(&epr_density(), &DirectionAxis::z()).unwrap();
        assert!(out.matrix().max_abs_diff(&diag_half()) < 1e-15);
        assert!(
            disentangled_mixture(&DirectionAxis::z())
                .matrix()
                .max_abs_diff(&diag_half())
                < 1e-15
        );
    }

    #[test]
    fn diagonal_state_unchanged() {
        let rho = DensityOperator::new(ComplexMatrix::diagonal(&[0.0, 1.0, 0.0, 0.0])).unwrap();
        let out = decohere_offdiagonal(&rho, &DirectionAxis::z()).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn singlet_along_x_by_change_of_basis() {
        let x = DirectionAxis::x();
        let out = decohere_offdiagonal(&epr_density(), &x).unwrap();
        // brute force: build the x-basis projectors directly from (I ± σx)/2
        let p = outcome_projector(Vec3::X, Sign::Plus).unwrap();
        let m = outcome_projector(Vec3::X, Sign::Minus).unwrap();
        let expected = (&tensor_product(&p, &m) + &tensor_product(&m, &p)).scale_real(0.5);
        assert!(out.matrix().max_abs_diff(&expected) < 1e-12);
        // and in the x basis it is diag(0, ½, ½, 0)
        let u = product_basis(&x);
        let back = u.adjoint().matmul(out.matrix()).matmul(&u);
        assert!(back.max_abs_diff(&diag_half()) < 1e-12);
        // anisotropy: differs from the z result as a matrix
        assert!(out.matrix().max_abs_diff(&diag_half()) > 0.1);
    }

    #[test]
    fn branches() {
        let z = DirectionAxis::z();
        let pm = branch_pair(&z, Branch::PlusMinus);
        assert!(
            pm.matrix()
                .max_abs_diff(&ComplexMatrix::diagonal(&[0.0, 1.0, 0.0, 0.0]))
                < 1e-15
        );

        let x = DirectionAxis::x();
        let pm = branch_pair(&x, Branch::PlusMinus);
        let p = outcome_projector(Vec3::X, Sign::Plus).unwrap();
        let m = outcome_projector(Vec3::X, Sign::Minus).unwrap();
        assert!(pm.matrix().max_abs_diff(&tensor_product(&p, &m)) < 1e-12);
        assert!((pm.purity() - 1.0).abs() < 1e-12);
        let rank = pm.eigenvalues().iter().filter(|&&e| e > 1e-9).count();
        assert_eq!(rank, 1);
    }

    #[test]
    fn mixture_properties_for_some_axes() {
        for (t, p) in [(0.4, 0.1), (1.9, 3.3), (2.8, 5.9)] {
            let axis = DirectionAxis::from_angles(t, p).unwrap();
            let rho = disentangled_mixture(&axis);
            assert!((rho.purity() - 0.5).abs() < 1e-12);
            let total = &spin_on(Subsystem::First, axis.vector()).unwrap()
                + &spin_on(Subsystem::Second, axis.vector()).unwrap();
            assert!(rho.expectation(&total).abs() < 1e-12);
            for side in [Subsystem::First, Subsystem::Second] {
                let r = partial_trace(&rho, side).unwrap();
                assert!(
                    r.matrix()
                        .max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5))
                        < 1e-12
                );
            }
        }
    }
}
