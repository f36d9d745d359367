//! Seeded random matrix ensembles.
//!
//! Instance `i` of a run draws from its own ChaCha20 stream `i`, so any
//! instance can be regenerated alone and the draw order does not depend on
//! scheduling. Entries are drawn row-major, real part before imaginary part.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exec;
use crate::operator::{ComplexMatrix, ComplexVector, C64};
use crate::rng::GaussianStream;
use crate::spectral;

/// Stream offset for the partner operator of a pair.
const PARTNER_STREAM: u64 = 1 << 62;
/// Stream offset for auxiliary scalars and vectors.
const AUX_STREAM: u64 = 1 << 61;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnsembleKind {
    Ginibre,
    Hermitian,
    Normal,
    Unitary,
    Nilpotent2,
    RankOne,
    ShiftTruncation,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 7] = [
        EnsembleKind::Ginibre,
        EnsembleKind::Hermitian,
        EnsembleKind::Normal,
        EnsembleKind::Unitary,
        EnsembleKind::Nilpotent2,
        EnsembleKind::RankOne,
        EnsembleKind::ShiftTruncation,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EnsembleKind::Ginibre => "ginibre",
            EnsembleKind::Hermitian => "hermitian",
            EnsembleKind::Normal => "normal",
            EnsembleKind::Unitary => "unitary",
            EnsembleKind::Nilpotent2 => "nilpotent2",
            EnsembleKind::RankOne => "rank_one",
            EnsembleKind::ShiftTruncation => "shift_truncation",
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown ensemble kind {s:?}")))
    }
}

/// How the partner `S` of a pair relates to `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pairing {
    /// `S` drawn independently from the same ensemble.
    Independent,
    /// `S` built so that `T ∥ S`.
    Parallel,
    /// `S` built so that `T ⊥_B S`.
    Orthogonal,
}

impl Pairing {
    pub fn as_str(&self) -> &'static str {
        match self {
            Pairing::Independent => "independent",
            Pairing::Parallel => "parallel",
            Pairing::Orthogonal => "orthogonal",
        }
    }
}

impl FromStr for Pairing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Pairing::Independent, Pairing::Parallel, Pairing::Orthogonal]
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown pairing {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub scale: f64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n: usize, count: usize, seed: u64) -> Self {
        Self { kind, n, count, seed, scale: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Invalid("ensemble dimension must be at least 1".into()));
        }
        if self.count == 0 {
            return Err(Error::Invalid("ensemble count must be at least 1".into()));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::Invalid(format!("ensemble scale must be positive, got {}", self.scale)));
        }
        if self.kind == EnsembleKind::Nilpotent2 && self.n < 2 {
            return Err(Error::Invalid("nilpotent2 needs n >= 2".into()));
        }
        Ok(())
    }
}

/// All instances of the ensemble.
pub fn generate(spec: &EnsembleSpec) -> Result<Vec<ComplexMatrix>> {
    spec.validate()?;
    exec::map_indexed(spec.count, |i| instance(spec, i)).into_iter().collect()
}

/// Instance `index`, generated independently of the others.
pub fn instance(spec: &EnsembleSpec, index: usize) -> Result<ComplexMatrix> {
    spec.validate()?;
    let mut g = GaussianStream::new(spec.seed, index as u64);
    draw(spec.kind, spec.n, &mut g).map(|m| m.scale(C64::new(spec.scale, 0.0)))
}

fn ginibre(n: usize, g: &mut GaussianStream) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            m[(r, c)] = g.complex_normal();
        }
    }
    m
}

/// Haar unitary: QR of a Ginibre matrix with the phases of `diag(R)` moved into `Q`.
fn haar_unitary(n: usize, g: &mut GaussianStream) -> DMatrix<C64> {
    let qr = ginibre(n, g).qr();
    let (mut q, r) = qr.unpack();
    for c in 0..n {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for row in 0..n {
            q[(row, c)] *= phase;
        }
    }
    q
}

fn draw(kind: EnsembleKind, n: usize, g: &mut GaussianStream) -> Result<ComplexMatrix> {
    let m = match kind {
        EnsembleKind::Ginibre => ginibre(n, g),
        EnsembleKind::Hermitian => {
            let a = ginibre(n, g);
            (&a + a.adjoint()) * C64::new(0.5, 0.0)
        }
        EnsembleKind::Unitary => haar_unitary(n, g),
        EnsembleKind::Normal => {
            let u = haar_unitary(n, g);
            let d = DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| g.complex_normal()));
            &u * d * u.adjoint()
        }
        EnsembleKind::Nilpotent2 => {
            if n < 2 {
                return Err(Error::Invalid("nilpotent2 needs n >= 2".into()));
            }
            let p = n / 2;
            let mut m = DMatrix::zeros(n, n);
            for r in 0..p {
                for c in p..n {
                    m[(r, c)] = g.complex_normal();
                }
            }
            m
        }
        EnsembleKind::RankOne => {
            let x = g.complex_vector(n);
            let y = g.complex_vector(n);
            &x * y.adjoint()
        }
        EnsembleKind::ShiftTruncation => return ComplexMatrix::shift_truncation(n),
    };
    ComplexMatrix::new(m)
}

/// Instance `index` together with a partner `S` related as `pairing` asks.
pub fn instance_pair(spec: &EnsembleSpec, index: usize, pairing: Pairing) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let t = instance(spec, index)?;
    let mut g = GaussianStream::new(spec.seed, PARTNER_STREAM | index as u64);
    let n = spec.n;
    let s = match pairing {
        Pairing::Independent => {
            let mut pg = GaussianStream::new(spec.seed, PARTNER_STREAM | index as u64);
            draw(spec.kind, n, &mut pg)?.into_matrix() * C64::new(spec.scale, 0.0)
        }
        Pairing::Parallel => parallel_partner(&t, &mut g)?,
        Pairing::Orthogonal => orthogonal_partner(&t, &mut g)?,
    };
    Ok((t, ComplexMatrix::new(s)?))
}

/// `S = s·e^{iφ}·u x* + P R Q` with `(u, x)` a top singular pair of `T`, `P`
/// and `Q` the projections off `u` and `x`, and `‖PRQ‖ < s`. Then `x` norms
/// both operators and `|⟨Tx, Sx⟩| = ‖T‖‖S‖`.
fn parallel_partner(t: &ComplexMatrix, g: &mut GaussianStream) -> Result<DMatrix<C64>> {
    let n = t.n();
    let dec = spectral::svd(t.as_matrix())?;
    let u = dec.u.column(0).into_owned();
    let x = dec.v.column(0).into_owned();
    let s = 0.5 + 1.5 * g.uniform();
    let phase = C64::from_polar(1.0, std::f64::consts::TAU * g.uniform());
    let eye = DMatrix::<C64>::identity(n, n);
    let pu = &eye - &u * u.adjoint();
    let px = &eye - &x * x.adjoint();
    let rest = &pu * ginibre(n, g) * &px;
    let rest_norm = spectral::spectral_norm(&rest)?;
    let rest = if rest_norm > 0.0 {
        rest * C64::new(0.9 * s * g.uniform() / rest_norm, 0.0)
    } else {
        rest
    };
    Ok(&u * x.adjoint() * (phase * s) + rest)
}

/// A random `S` with the rank-one correction `u(u*Sx)x*` removed, where
/// `(u, x)` is a top singular pair of `T`; then `⟨Tx, Sx⟩ = 0`.
fn orthogonal_partner(t: &ComplexMatrix, g: &mut GaussianStream) -> Result<DMatrix<C64>> {
    let dec = spectral::svd(t.as_matrix())?;
    let u = dec.u.column(0).into_owned();
    let x = dec.v.column(0).into_owned();
    let s = ginibre(t.n(), g);
    let coeff = (u.adjoint() * &s * &x)[(0, 0)];
    Ok(&s - &u * x.adjoint() * coeff)
}

/// Two vectors for the rank-one battery, related as `pairing` asks:
/// independent, `y = αx`, or `y ⊥ x`.
pub fn instance_vectors(spec: &EnsembleSpec, index: usize, pairing: Pairing) -> Result<(ComplexVector, ComplexVector)> {
    spec.validate()?;
    let mut g = GaussianStream::new(spec.seed, index as u64);
    let x = g.complex_vector(spec.n) * C64::new(spec.scale, 0.0);
    let y = g.complex_vector(spec.n) * C64::new(spec.scale, 0.0);
    let y = match pairing {
        Pairing::Independent => y,
        Pairing::Parallel => {
            let alpha = g.complex_normal();
            let alpha = if alpha.norm() > 1e-3 { alpha } else { C64::new(1.0, 0.0) };
            &x * alpha
        }
        Pairing::Orthogonal => {
            let coeff = x.dotc(&y) / x.norm_squared();
            let y = &y - &x * coeff;
            if y.norm() > 0.0 || spec.n == 1 {
                y
            } else {
                DVector::from_fn(spec.n, |i, _| if i == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
            }
        }
    };
    Ok((ComplexVector::new(x.iter().copied().collect())?, ComplexVector::new(y.iter().copied().collect())?))
}

/// A nonzero scalar with modulus uniform in `[‖T‖/2, 2‖T‖]` and uniform phase.
pub fn instance_shift(spec: &EnsembleSpec, index: usize, norm: f64) -> C64 {
    let mut g = GaussianStream::new(spec.seed, AUX_STREAM | index as u64);
    let base = if norm > 0.0 { norm } else { 1.0 };
    let modulus = base * (0.5 + 1.5 * g.uniform());
    C64::from_polar(modulus, std::f64::consts::TAU * g.uniform())
}
