//! Matrix and vector domain types and the basic operator functionals.
//!
//! Inner products are linear in the first argument: `⟨a, b⟩ = Σ aᵢ·conj(bᵢ)`.

use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::config::ToleranceConfig;
use crate::error::{Error, Result};
use crate::spectral;

pub type C64 = Complex64;

/// Dense square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.data)
    }
}

impl ComplexMatrix {
    /// Wraps a nalgebra matrix, checking shape and finiteness.
    pub fn new(data: DMatrix<C64>) -> Result<Self> {
        let (rows, cols) = data.shape();
        if rows == 0 {
            return Err(Error::Empty);
        }
        if rows != cols {
            return Err(Error::NotSquare { rows, row: 0, cols });
        }
        for r in 0..rows {
            for c in 0..cols {
                let z = data[(r, c)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Self { data })
    }

    pub(crate) fn from_na(data: DMatrix<C64>) -> Self {
        debug_assert!(data.is_square() && data.nrows() > 0);
        Self { data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { rows: n, row: i, cols: r.len() });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Real-entried matrix from row slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        Self::new(DMatrix::from_fn(n, n, f))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity of dimension 0");
        Self { data: DMatrix::identity(n, n) }
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "zero matrix of dimension 0");
        Self { data: DMatrix::zeros(n, n) }
    }

    pub fn diag(d: &[C64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    /// Ones on the first subdiagonal: `e_j ↦ e_{j+1}`, last basis vector ↦ 0.
    pub fn shift_truncation(n: usize) -> Result<Self> {
        Self::from_fn(n, |i, j| if i == j + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    /// Ones on the superdiagonal.
    pub fn jordan_block(n: usize) -> Result<Self> {
        Self::from_fn(n, |i, j| if j == i + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self { data: self.data.adjoint() }
    }

    /// `Re T = (T + T*)/2`.
    pub fn real_part(&self) -> DMatrix<C64> {
        (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0)
    }

    /// `Im T = (T − T*)/(2i)`.
    pub fn imag_part(&self) -> DMatrix<C64> {
        (&self.data - self.data.adjoint()) * C64::new(0.0, -0.5)
    }

    /// `Re(e^{iθ}T)`.
    pub fn rotated_real_part(&self, theta: f64) -> DMatrix<C64> {
        rotated_real_part(&self.data, theta)
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self { data: &self.data * alpha }
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = DMatrix::identity(self.n(), self.n());
        for _ in 0..k {
            out = &out * &self.data;
        }
        Self { data: out }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    /// `T − γI`.
    pub fn shifted(&self, gamma: C64) -> Self {
        let mut data = self.data.clone();
        for i in 0..self.n() {
            data[(i, i)] -= gamma;
        }
        Self { data }
    }

    pub fn apply(&self, x: &ComplexVector) -> Result<ComplexVector> {
        check_dim(self.n(), x.len())?;
        Ok(ComplexVector { data: &self.data * &x.data })
    }
}

pub(crate) fn rotated_real_part(m: &DMatrix<C64>, theta: f64) -> DMatrix<C64> {
    let phase = C64::from_polar(1.0, theta);
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| (phase * m[(i, j)] + (phase * m[(j, i)]).conj()) * 0.5)
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.data[idx]
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n(), rhs.n(), "dimension mismatch in matrix sum");
        ComplexMatrix { data: &self.data + &rhs.data }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n(), rhs.n(), "dimension mismatch in matrix difference");
        ComplexMatrix { data: &self.data - &rhs.data }
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n(), rhs.n(), "dimension mismatch in matrix product");
        ComplexMatrix { data: &self.data * &rhs.data }
    }
}

/// Complex column vector with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVector {
    data: DVector<C64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(i) = entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        Ok(Self { data: DVector::from_vec(entries) })
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub(crate) fn from_na(data: DVector<C64>) -> Self {
        Self { data }
    }

    /// Standard basis vector `e_i` (zero-based).
    pub fn basis(n: usize, i: usize) -> Self {
        assert!(i < n);
        let mut data = DVector::zeros(n);
        data[i] = C64::new(1.0, 0.0);
        Self { data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_vector(&self) -> &DVector<C64> {
        &self.data
    }

    pub fn entries(&self) -> &[C64] {
        self.data.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn inner(&self, other: &ComplexVector) -> C64 {
        inner(&self.data, &other.data)
    }

    pub fn scale(&self, alpha: C64) -> Self {
        Self { data: &self.data * alpha }
    }

    pub fn add_scaled(&self, alpha: C64, other: &ComplexVector) -> Self {
        Self { data: &self.data + &other.data * alpha }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
}

/// `⟨a, b⟩ = b* a`.
pub(crate) fn inner(a: &DVector<C64>, b: &DVector<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

impl Serialize for ComplexVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for z in self.data.iter() {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}

/// A vector of norm one, up to the recorded `norm_defect`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitVector {
    v: ComplexVector,
    norm_defect: f64,
}

impl UnitVector {
    /// Scales `v` to unit length.
    pub fn normalize(v: &ComplexVector) -> Result<Self> {
        let nrm = v.norm();
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let u = ComplexVector { data: &v.data / C64::new(nrm, 0.0) };
        let norm_defect = (u.norm() - 1.0).abs();
        Ok(Self { v: u, norm_defect })
    }

    /// Accepts `v` as-is if its norm is within `unit_tol` of one.
    pub fn checked(v: ComplexVector, unit_tol: f64) -> Result<Self> {
        let norm_defect = (v.norm() - 1.0).abs();
        if norm_defect > unit_tol {
            return Err(Error::NotUnit { defect: norm_defect, tol: unit_tol });
        }
        Ok(Self { v, norm_defect })
    }

    pub(crate) fn from_na(v: DVector<C64>) -> Self {
        let nrm = v.norm();
        let data = if nrm > 0.0 { v / C64::new(nrm, 0.0) } else { v };
        let norm_defect = (data.norm() - 1.0).abs();
        Self { v: ComplexVector { data }, norm_defect }
    }

    pub fn basis(n: usize, i: usize) -> Self {
        Self { v: ComplexVector::basis(n, i), norm_defect: 0.0 }
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.v
    }

    pub fn as_vector(&self) -> &DVector<C64> {
        &self.v.data
    }

    pub fn norm_defect(&self) -> f64 {
        self.norm_defect
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }
}

impl Serialize for UnitVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.v.serialize(s)
    }
}

/// A complex number of modulus one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unimodular(C64);

impl Unimodular {
    pub fn from_phase(theta: f64) -> Self {
        Self(C64::from_polar(1.0, theta))
    }

    /// Phase of a nonzero complex number; `None` for zero.
    pub fn phase_of(z: C64) -> Option<Self> {
        let r = z.norm();
        (r > 0.0 && r.is_finite()).then(|| Self(z / r))
    }

    pub fn value(&self) -> C64 {
        self.0
    }
}

impl Serialize for Unimodular {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

/// A certified value of a norm-like functional.
///
/// `lower ≤ value ≤ upper` always holds. `attained` is the functional
/// re-evaluated at `witness`: it equals `lower` for supremum-type functionals
/// and `upper` for infimum-type ones.
#[derive(Clone, Debug, Serialize)]
pub struct RadiusResult {
    pub value: f64,
    pub witness: UnitVector,
    pub lower: f64,
    pub upper: f64,
    pub attained: f64,
    pub sweep_resolution: f64,
}

/// Orthonormal basis of the top right-singular subspace; its unit sphere is `M_T`.
#[derive(Clone, Debug)]
pub struct NormingBasis {
    pub v: DMatrix<C64>,
    pub sigma_max: f64,
    /// `σ_max²` minus the largest squared singular value outside the cluster
    /// (zero when the cluster is the whole space).
    pub gap: f64,
}

impl NormingBasis {
    pub fn dim(&self) -> usize {
        self.v.ncols()
    }

    /// Lifts coordinates `y` to the vector `V·y`.
    pub fn lift(&self, y: &DVector<C64>) -> DVector<C64> {
        &self.v * y
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub fn adjoint(t: &ComplexMatrix) -> ComplexMatrix {
    t.adjoint()
}

/// `‖T‖`, the largest singular value, with a top right singular vector as witness.
pub fn op_norm(t: &ComplexMatrix) -> Result<RadiusResult> {
    let s = spectral::svd(t.as_matrix())?;
    let value = s.values[0];
    let witness = UnitVector::from_na(s.v.column(0).into_owned());
    let attained = (t.as_matrix() * witness.as_vector()).norm();
    Ok(RadiusResult {
        value,
        lower: attained.min(value),
        upper: value,
        attained,
        witness,
        sweep_resolution: 0.0,
    })
}

/// `m(T)`; in finite dimensions this is the smallest singular value.
pub fn min_modulus(t: &ComplexMatrix) -> Result<RadiusResult> {
    let s = spectral::svd(t.as_matrix())?;
    let k = s.values.len() - 1;
    let value = s.values[k];
    let witness = UnitVector::from_na(s.v.column(k).into_owned());
    let attained = (t.as_matrix() * witness.as_vector()).norm();
    Ok(RadiusResult {
        value,
        lower: value,
        upper: attained.max(value),
        attained,
        witness,
        sweep_resolution: 0.0,
    })
}

/// Orthonormal basis for the right singular vectors whose squared singular
/// values lie within `subspace_tol·σ_max²` of `σ_max²`.
pub fn norming_basis(t: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<NormingBasis> {
    let s = spectral::svd(t.as_matrix())?;
    let sigma_max = s.values[0];
    if sigma_max == 0.0 {
        return Err(Error::ZeroOperator);
    }
    let top = sigma_max * sigma_max;
    let cutoff = top * (1.0 - cfg.subspace_tol);
    let k = s.values.iter().take_while(|&&v| v * v >= cutoff).count().max(1);
    let next = s.values.get(k).map_or(0.0, |v| v * v);
    Ok(NormingBasis {
        v: s.v.columns(0, k).into_owned(),
        sigma_max,
        gap: top - next,
    })
}

/// `x ⊗ y`, the operator `z ↦ ⟨z, y⟩ x`.
pub fn rank_one(x: &ComplexVector, y: &ComplexVector) -> Result<ComplexMatrix> {
    check_dim(x.len(), y.len())?;
    Ok(ComplexMatrix::from_na(x.as_vector() * y.as_vector().adjoint()))
}

/// `⟨Tx, x⟩`.
pub fn rayleigh(t: &ComplexMatrix, x: &UnitVector) -> Result<C64> {
    check_dim(t.n(), x.len())?;
    Ok(rayleigh_raw(t.as_matrix(), x.as_vector()))
}

pub(crate) fn rayleigh_raw(m: &DMatrix<C64>, x: &DVector<C64>) -> C64 {
    inner(&(m * x), x)
}
