//! Kink (domain-wall) bases and spin-texture projections of eigenstates.

use faer::c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::pauli::site_mask;
use crate::spectrum::SpectrumResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KinkKind {
    /// Built from the fully polarized state `|up ... up>`.
    Ferro,
    /// Built from `|up down ... up down>`.
    Neel,
}

/// `4N` computational basis states reached by flipping sites `1, 2, ...`
/// cyclically, one at a time, starting from a reference state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KinkBasis {
    pub kind: KinkKind,
    pub two_n: usize,
    /// Basis index of the `j`-th vector (0-based `j`).
    pub indices: Vec<usize>,
}

impl KinkBasis {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn dim(&self) -> usize {
        1usize << self.two_n
    }

    /// Dense amplitude vector of the `j`-th state (1-based, as in `|F_j>`).
    pub fn vector(&self, j: usize) -> Vec<c64> {
        let mut v = vec![c64::new(0.0, 0.0); self.dim()];
        v[self.indices[j - 1]] = c64::new(1.0, 0.0);
        v
    }
}

pub fn kink_basis(p: &ModelParams, kind: KinkKind) -> KinkBasis {
    let two_n = p.two_n();
    let mut state = match kind {
        KinkKind::Ferro => 0,
        KinkKind::Neel => (1..=two_n)
            .filter(|s| s % 2 == 0)
            .fold(0usize, |acc, s| acc | site_mask(two_n, s)),
    };
    let mut indices = Vec::with_capacity(2 * two_n);
    for k in 0..2 * two_n {
        indices.push(state);
        state ^= site_mask(two_n, k % two_n + 1);
    }
    KinkBasis {
        kind,
        two_n,
        indices,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TextureRow {
    pub energy: f64,
    /// `alpha_j = <K_j|psi>` for every basis vector.
    pub alpha: Vec<c64>,
    /// Norm of the part of `psi` outside the span of the basis.
    pub delta: f64,
}

pub fn texture_projections(spec: &SpectrumResult, basis: &KinkBasis) -> Result<Vec<TextureRow>> {
    if spec.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: spec.dim(),
        });
    }
    let mut in_basis = vec![false; spec.dim()];
    for &i in &basis.indices {
        in_basis[i] = true;
    }
    Ok((0..spec.len())
        .map(|n| {
            let col = spec.eigenvectors.col(n);
            let alpha = basis.indices.iter().map(|&i| col[i]).collect();
            let outside: f64 = (0..spec.dim())
                .filter(|&i| !in_basis[i])
                .map(|i| col[i].norm_sqr())
                .sum();
            TextureRow {
                energy: spec.eigenvalues[n],
                alpha,
                delta: outside.sqrt(),
            }
        })
        .collect())
}
