//! Pauli operators acting on computational basis states of a 2N-site chain.
//!
//! Site 1 is the leftmost tensor factor, i.e. the most significant bit of a
//! basis index. Bit value 0 is spin up.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// `(next, next-next)` in the cyclic order x -> y -> z.
    pub fn cyclic_partners(self) -> (Pauli, Pauli) {
        match self {
            Pauli::X => (Pauli::Y, Pauli::Z),
            Pauli::Y => (Pauli::Z, Pauli::X),
            Pauli::Z => (Pauli::X, Pauli::Y),
        }
    }

    /// Sign picked up under conjugation by sigma^x.
    pub fn twist_sign(self) -> f64 {
        match self {
            Pauli::X => 1.0,
            Pauli::Y | Pauli::Z => -1.0,
        }
    }
}

/// Bit mask of 1-based `site` in a chain of `two_n` sites.
#[inline]
pub fn site_mask(two_n: usize, site: usize) -> usize {
    debug_assert!(site >= 1 && site <= two_n);
    1usize << (two_n - site)
}

/// A product of single-site Pauli operators on distinct sites, with a coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    pub coeff: Complex64,
    /// `(site, operator)` with 1-based, pairwise distinct sites.
    pub ops: Vec<(usize, Pauli)>,
}

impl PauliString {
    pub fn new(coeff: Complex64, ops: Vec<(usize, Pauli)>) -> Self {
        Self { coeff, ops }
    }

    /// Image of basis state `index`: returns `(new_index, amplitude)`.
    pub fn apply(&self, two_n: usize, index: usize) -> (usize, Complex64) {
        let mut amp = self.coeff;
        let mut out = index;
        for &(site, op) in &self.ops {
            let mask = site_mask(two_n, site);
            let down = out & mask != 0;
            match op {
                Pauli::X => out ^= mask,
                Pauli::Y => {
                    amp *= if down {
                        Complex64::new(0.0, -1.0)
                    } else {
                        Complex64::new(0.0, 1.0)
                    };
                    out ^= mask;
                }
                Pauli::Z => {
                    if down {
                        amp = -amp;
                    }
                }
            }
        }
        (out, amp)
    }
}

/// Computational basis index from a spin pattern (`true` = down), site 1 first.
pub fn basis_index(spins_down: &[bool]) -> usize {
    spins_down
        .iter()
        .fold(0usize, |acc, &down| (acc << 1) | usize::from(down))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_site_actions() {
        let up = 0b00;
        let s = PauliString::new(Complex64::new(1.0, 0.0), vec![(1, Pauli::Y)]);
        let (i, amp) = s.apply(2, up);
        assert_eq!(i, 0b10);
        assert_eq!(amp, Complex64::new(0.0, 1.0));
        let (i, amp) = s.apply(2, 0b10);
        assert_eq!(i, 0b00);
        assert_eq!(amp, Complex64::new(0.0, -1.0));
        let z = PauliString::new(Complex64::new(1.0, 0.0), vec![(2, Pauli::Z)]);
        assert_eq!(z.apply(2, 0b01).1, Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn xyz_product_is_i_times_identity_on_one_site() {
        // sigma^x sigma^y sigma^z = i; apply z first, then y, then x.
        for state in [0usize, 1] {
            let mut idx = state;
            let mut amp = Complex64::new(1.0, 0.0);
            for op in [Pauli::Z, Pauli::Y, Pauli::X] {
                let (i, a) = PauliString::new(Complex64::new(1.0, 0.0), vec![(1, op)]).apply(1, idx);
                idx = i;
                amp *= a;
            }
            assert_eq!(idx, state);
            assert!((amp - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn basis_index_puts_site_one_first() {
        assert_eq!(basis_index(&[true, false, false, false]), 0b1000);
        assert_eq!(basis_index(&[false, false, true, true]), 0b0011);
    }
}
