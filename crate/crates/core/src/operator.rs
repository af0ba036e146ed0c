//! Dense complex operators on the chain Hilbert space.

use faer::{c64, Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the hermitian flag.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Absolute tolerance for the unitary flag.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixKind {
    Hermitian,
    Unitary,
    General,
}

/// A dense square complex matrix tagged with the structure it is known to have.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    entries: Mat<c64>,
    kind: MatrixKind,
}

impl OperatorMatrix {
    pub fn general(entries: Mat<c64>) -> Self {
        assert_eq!(entries.nrows(), entries.ncols(), "operator must be square");
        Self {
            entries,
            kind: MatrixKind::General,
        }
    }

    /// Flags `entries` as hermitian after checking `max|M - M^H| < 1e-12 max|M|`.
    pub fn hermitian(entries: Mat<c64>) -> Result<Self> {
        let op = Self::general(entries);
        let deviation = op.hermiticity_defect();
        if deviation > HERMITIAN_TOL * op.max_abs().max(f64::MIN_POSITIVE) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            kind: MatrixKind::Hermitian,
            ..op
        })
    }

    /// Flags `entries` as unitary after checking `max|M M^H - I| < 1e-10`.
    pub fn unitary(entries: Mat<c64>) -> Result<Self> {
        let op = Self::general(entries);
        let deviation = op.unitarity_defect();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self {
            kind: MatrixKind::Unitary,
            ..op
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: Mat::identity(dim, dim),
            kind: MatrixKind::Hermitian,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn is_hermitian(&self) -> bool {
        self.kind == MatrixKind::Hermitian
    }

    pub fn entries(&self) -> MatRef<'_, c64> {
        self.entries.as_ref()
    }

    pub fn into_entries(self) -> Mat<c64> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> c64 {
        self.entries[(row, col)]
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(self.entries.as_ref())
    }

    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        max_abs_diff(self.entries.as_ref(), other.entries.as_ref())
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.entries;
        let n = m.nrows();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn unitarity_defect(&self) -> f64 {
        let prod = &self.entries * self.entries.adjoint();
        let n = prod.nrows();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                let target = if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn matmul(&self, other: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix::general(&self.entries * &other.entries)
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &OperatorMatrix) -> Mat<c64> {
        &self.entries * &other.entries - &other.entries * &self.entries
    }

    /// Largest entry of the commutator.
    pub fn commutator_norm(&self, other: &OperatorMatrix) -> f64 {
        max_abs(self.commutator(other).as_ref())
    }

    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        let mut out = vec![c64::new(0.0, 0.0); n];
        for (j, &vj) in v.iter().enumerate() {
            if vj == c64::new(0.0, 0.0) {
                continue;
            }
            let col = self.entries.col(j);
            for (o, &m) in out.iter_mut().zip(col.iter()) {
                *o += m * vj;
            }
        }
        out
    }

    /// Largest eigenvalue modulus bound used to scale relative tolerances.
    pub fn scale(&self) -> f64 {
        // max row sum of moduli bounds the spectral radius
        let m = &self.entries;
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

pub fn max_abs(m: MatRef<'_, c64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    assert_eq!(a.nrows(), b.nrows());
    assert_eq!(a.ncols(), b.ncols());
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// `c M` entrywise.
pub fn scaled(m: MatRef<'_, c64>, c: c64) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * c)
}

/// Hermitian inner product `<u|v>`.
pub fn inner(u: &[c64], v: &[c64]) -> c64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
