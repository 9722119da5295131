//! Dense complex linear algebra for one and two qubits.
//!
//! Two-qubit operators use the product basis ordering `(|++⟩, |+−⟩, |−+⟩, |−−⟩)`,
//! i.e. index `2·i₁ + i₂` with `0 ↔ +` and `1 ↔ −`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexScalar = Complex64;

/// Tolerance for Hermiticity, trace and norm checks.
pub const TOL: f64 = 1e-12;
/// Floor applied to eigenvalues in the positivity check.
pub const PSD_FLOOR: f64 = -1e-10;
/// Smallest admissible branch weight in [`conditional_reduce`].
pub const MIN_BRANCH_WEIGHT: f64 = 1e-14;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Builds a complex scalar, rejecting NaN and infinities.
pub fn scalar(re: f64, im: f64) -> Result<ComplexScalar> {
    if re.is_finite() && im.is_finite() {
        Ok(Complex64::new(re, im))
    } else {
        Err(Error::NonFinite("complex scalar"))
    }
}

fn all_finite(values: &[Complex64]) -> bool {
    values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Which particle of the pair an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    First,
    Second,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::First => Subsystem::Second,
            Subsystem::Second => Subsystem::First,
        }
    }
}

/// A normalized pure state of one (dim 2) or two (dim 4) qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<Complex64>,
}

impl Ket {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 2 && amplitudes.len() != 4 {
            return Err(Error::Dimension {
                expected: "2 or 4".into(),
                got: amplitudes.len().to_string(),
            });
        }
        if !all_finite(&amplitudes) {
            return Err(Error::NonFinite("ket amplitudes"));
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Ket { amplitudes })
    }

    /// Real amplitudes, mostly for literal basis and Bell states.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Ket::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The `index`-th computational basis vector.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Dimension {
                expected: format!("index < {dim}"),
                got: index.to_string(),
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ket::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|self⟩⊗|other⟩`.
    pub fn tensor(&self, other: &Ket) -> Ket {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ket { amplitudes }
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        m
    }

    /// Applies an operator without re-checking the norm of the result.
    pub fn apply(&self, op: &ComplexMatrix) -> Vec<Complex64> {
        op.mul_vec(&self.amplitudes)
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols != data.len() {
            return Err(Error::Dimension {
                expected: format!("{rows}×{cols} entries"),
                got: data.len().to_string(),
            });
        }
        if !all_finite(&data) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        ComplexMatrix::new(
            rows,
            cols,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given kets.
    pub fn from_columns(columns: &[&Ket]) -> Self {
        let rows = columns[0].dim();
        let cols = columns.len();
        let mut m = ComplexMatrix::zeros(rows, cols);
        for (j, ket) in columns.iter().enumerate() {
            for i in 0..rows {
                m.data[i * cols + j] = ket.amplitudes[i];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn adjoint(&self) -> Self {
        let mut m = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut m = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    m.data[i * rhs.cols + j] += a * rhs.get(k, j);
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    /// Keeps only the diagonal.
    pub fn diagonal_part(&self) -> Self {
        let mut m = ComplexMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows.min(self.cols) {
            m.set(i, i, self.get(i, i));
        }
        m
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &ComplexMatrix) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Kronecker product, `(a ⊗ b)[i·rows_b + k, j·cols_b + l] = a[i,j]·b[k,l]`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a.get(i, j);
            for k in 0..b.rows {
                for l in 0..b.cols {
                    m.data[(i * b.rows + k) * cols + j * b.cols + l] = aij * b.get(k, l);
                }
            }
        }
    }
    m
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// 2×2 uses the closed-form quadratic. Larger matrices are embedded as the
/// real symmetric `[[A, −B], [B, A]]` (for `H = A + iB`) and diagonalized by
/// cyclic Jacobi rotations; each eigenvalue of `H` appears twice there.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    assert!(m.is_square(), "eigenvalues of a non-square matrix");
    let n = m.rows;
    if n == 1 {
        return vec![m.get(0, 0).re];
    }
    if n == 2 {
        let a = m.get(0, 0).re;
        let d = m.get(1, 1).re;
        let b = m.get(0, 1);
        let half_tr = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        return vec![half_tr - disc, half_tr + disc];
    }

    let size = 2 * n;
    let mut s = vec![0.0; size * size];
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            s[i * size + j] = z.re;
            s[(i + n) * size + (j + n)] = z.re;
            s[i * size + (j + n)] = -z.im;
            s[(i + n) * size + j] = z.im;
        }
    }
    let mut eig = jacobi_symmetric(&mut s, size);
    eig.sort_by(|a, b| a.total_cmp(b));
    eig.into_iter().step_by(2).collect()
}

fn jacobi_symmetric(a: &mut [f64], n: usize) -> Vec<f64> {
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// A validated density operator on one or two qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Checks shape, Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || (matrix.rows != 2 && matrix.rows != 4) {
            return Err(Error::Dimension {
                expected: "square 2×2 or 4×4".into(),
                got: format!("{}×{}", matrix.rows, matrix.cols),
            });
        }
        let defect = matrix.hermiticity_defect();
        if defect > TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(Error::TraceNotUnit(tr.re));
        }
        let min_eig = hermitian_eigenvalues(&matrix)[0];
        if min_eig < PSD_FLOOR {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(DensityOperator { matrix })
    }

    pub fn pure(ket: &Ket) -> Self {
        DensityOperator {
            matrix: ket.projector(),
        }
    }

    /// Convex combination `Σ wᵢ ρᵢ`; weights must sum to one.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let dim = parts[0].1.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            acc = &acc + &rho.matrix.scale_real(*w);
        }
        DensityOperator::new(acc)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `Tr(ρ·O)`; the real part for Hermitian `O`.
    pub fn expectation(&self, observable: &ComplexMatrix) -> f64 {
        self.matrix.matmul(observable).trace().re
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `U ρ U†`, re-validated.
    pub fn conjugate_by(&self, unitary: &ComplexMatrix) -> Result<Self> {
        DensityOperator::new(unitary.matmul(&self.matrix).matmul(&unitary.adjoint()))
    }
}

fn require_two_qubit(rho: &DensityOperator) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::Dimension {
            expected: "4×4 two-qubit operator".into(),
            got: format!("{0}×{0}", rho.dim()),
        });
    }
    Ok(())
}

/// Reduced state after tracing out `traced` from a two-qubit operator.
pub fn partial_trace(rho: &DensityOperator, traced: Subsystem) -> Result<DensityOperator> {
    require_two_qubit(rho)?;
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            let v: Complex64 = (0..2)
                .map(|k| match traced {
                    Subsystem::Second => m.get(2 * i + k, 2 * j + k),
                    Subsystem::First => m.get(2 * k + i, 2 * k + j),
                })
                .sum();
            out.set(i, j, v);
        }
    }
    DensityOperator::new(out)
}

/// Projects `on` onto `|k⟩` and traces it out: returns the branch weight
/// `Tr{(|k⟩⟨k| on `on`) ρ}` and the normalized state of the other particle.
pub fn conditional_reduce(
    rho: &DensityOperator,
    projector_ket: &Ket,
    on: Subsystem,
) -> Result<(f64, DensityOperator)> {
    require_two_qubit(rho)?;
    if projector_ket.dim() != 2 {
        return Err(Error::Dimension {
            expected: "single-qubit ket".into(),
            got: projector_ket.dim().to_string(),
        });
    }
    let m = rho.matrix();
    let k = projector_ket.amplitudes();
    let mut out = ComplexMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            let mut v = ZERO;
            for p in 0..2 {
                for q in 0..2 {
                    let entry = match on {
                        Subsystem::Second => m.get(2 * i + p, 2 * j + q),
                        Subsystem::First => m.get(2 * p + i, 2 * q + j),
                    };
                    v += k[p].conj() * entry * k[q];
                }
            }
            out.set(i, j, v);
        }
    }
    let weight = out.trace().re;
    if weight < MIN_BRANCH_WEIGHT {
        return Err(Error::ZeroProbabilityBranch(weight));
    }
    let conditional = DensityOperator::new(out.scale_real(1.0 / weight))?;
    Ok((weight.min(1.0), conditional))
}
