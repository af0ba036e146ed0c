//! Hamiltonian of the twisted chain and the symmetry operators built directly
//! on the computational basis.

use faer::{c64, Mat};

use crate::error::Result;
use crate::operator::OperatorMatrix;
use crate::params::ModelParams;
use crate::pauli::{Pauli, PauliString};
use crate::sparse::SparseOperator;

/// Maps a possibly wrapped 1-based site onto `(site, twist sign)`.
fn wrap(two_n: usize, site: usize, op: Pauli) -> (usize, Pauli, f64) {
    if site <= two_n {
        (site, op, 1.0)
    } else {
        (site - two_n, op, op.twist_sign())
    }
}

fn string(two_n: usize, coeff: c64, factors: &[(usize, Pauli)]) -> PauliString {
    let mut sign = 1.0;
    let ops = factors
        .iter()
        .map(|&(site, op)| {
            let (s, o, g) = wrap(two_n, site, op);
            sign *= g;
            (s, o)
        })
        .collect();
    PauliString::new(coeff * sign, ops)
}

/// All Pauli strings of the Hamiltonian, without the constant shift.
pub fn hamiltonian_terms(p: &ModelParams) -> Vec<PauliString> {
    let two_n = p.two_n();
    let c = p.couplings();
    let j1 = |op: Pauli| if op == Pauli::Z { c.j1z } else { c.j1x };
    let j3 = |op: Pauli| if op == Pauli::Z { c.j3z } else { c.j3x };
    let mut terms = Vec::with_capacity(12 * two_n);
    for j in 1..=two_n {
        let stagger = if j % 2 == 0 { 1.0 } else { -1.0 };
        for op in Pauli::ALL {
            terms.push(string(two_n, -j1(op), &[(j, op), (j + 1, op)]));
            terms.push(string(two_n, -c.j2, &[(j, op), (j + 2, op)]));
        }
        for op in Pauli::ALL {
            let (next, last) = op.cyclic_partners();
            let k = j3(op) * stagger;
            terms.push(string(two_n, -k, &[(j + 1, op), (j, next), (j + 2, last)]));
            terms.push(string(two_n, k, &[(j + 1, op), (j, last), (j + 2, next)]));
        }
    }
    terms
}

/// Sparse form of the Hamiltonian (no size limit beyond memory).
pub fn sparse_hamiltonian(p: &ModelParams) -> SparseOperator {
    SparseOperator::from_pauli_strings(p.two_n(), &hamiltonian_terms(p))
}

/// Dense hermitian Hamiltonian matrix.
pub fn build_hamiltonian(p: &ModelParams) -> Result<OperatorMatrix> {
    p.require_dense()?;
    OperatorMatrix::hermitian(sparse_hamiltonian(p).to_dense())
}

/// Image of a basis index under the two-site translation composed with the twist:
/// `|s1 s2 ... s2N> -> |s3 ... s2N, !s1, !s2>`.
pub fn shift_index(two_n: usize, index: usize) -> usize {
    let dim_mask = (1usize << two_n) - 1;
    let head = index >> (two_n - 2);
    ((index << 2) | (head ^ 0b11)) & dim_mask
}

/// Two-site translation followed by the boundary twist, as a permutation matrix.
pub fn direct_shift(p: &ModelParams) -> Result<OperatorMatrix> {
    p.require_dense()?;
    let dim = p.dim();
    let mut m = Mat::zeros(dim, dim);
    for s in 0..dim {
        m[(shift_index(p.two_n(), s), s)] = c64::new(1.0, 0.0);
    }
    OperatorMatrix::unitary(m)
}

/// Global spin flip, the product of sigma^x over all sites.
pub fn global_flip(p: &ModelParams) -> Result<OperatorMatrix> {
    p.require_dense()?;
    let dim = p.dim();
    let mut m = Mat::zeros(dim, dim);
    for s in 0..dim {
        m[(s ^ (dim - 1), s)] = c64::new(1.0, 0.0);
    }
    OperatorMatrix::unitary(m)
}
