//! Monomials as fixed-length exponent vectors.
//!
//! `Ord` on `Monomial` is graded reverse lexicographic with x1 > x2 > ... >
//! xn. That order is the canonical storage and serialization order for
//! polynomial terms; Groebner computations that need a different order go
//! through `MonomialOrder` instead of `Ord`.

use std::cmp::Ordering;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    /// The constant monomial 1.
    pub fn unit(nvars: usize) -> Self {
        Monomial { exps: vec![0; nvars] }
    }

    /// x_{var+1} as a monomial (0-based variable index).
    pub fn var(nvars: usize, var: usize) -> Self {
        assert!(var < nvars, "variable index out of range");
        let mut exps = vec![0; nvars];
        exps[var] = 1;
        Monomial { exps }
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, var: usize) -> u32 {
        self.exps[var]
    }

    /// Total degree = sum of exponents.
    pub fn degree(&self) -> u64 {
        self.exps.iter().map(|&e| e as u64).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        }
    }

    /// self / other, when other divides self.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        debug_assert_eq!(self.nvars(), other.nvars());
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            if a < b {
                return None;
            }
            exps.push(a - b);
        }
        Some(Monomial { exps })
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| *a.max(b))
                .collect(),
        }
    }

    /// True when the monomials share no variable.
    pub fn coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn pow(&self, k: u32) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .map(|&e| e.checked_mul(k).expect("exponent overflow"))
                .collect(),
        }
    }

    /// Relabels variables into a ring with `new_nvars` variables; `map[i]`
    /// is the destination slot of variable i. Panics unless injective on
    /// the variables actually present.
    pub fn embed(&self, new_nvars: usize, map: &[usize]) -> Monomial {
        assert_eq!(map.len(), self.exps.len());
        let mut exps = vec![0u32; new_nvars];
        for (i, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                assert!(map[i] < new_nvars, "variable image out of range");
                assert_eq!(exps[map[i]], 0, "variable map not injective");
                exps[map[i]] = e;
            }
        }
        Monomial { exps }
    }
}

impl Ord for Monomial {
    /// Graded reverse lexicographic: higher total degree wins; on equal
    /// degree the rightmost differing exponent decides, smaller exponent
    /// winning.
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.nvars(), other.nvars());
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.exps.iter().rev().zip(other.exps.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => {}
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(exps: &[u32]) -> Monomial {
        Monomial::new(exps.to_vec())
    }

    #[test]
    fn grevlex_degree_first() {
        assert!(m(&[2, 0]) > m(&[0, 1]));
        assert!(m(&[0, 0, 3]) > m(&[1, 1, 0]));
    }

    #[test]
    fn grevlex_ties_by_rightmost_smallest() {
        // Degree-2 monomials in 3 variables, descending:
        // x1^2 > x1*x2 > x2^2 > x1*x3 > x2*x3 > x3^2.
        let expected = [
            m(&[2, 0, 0]),
            m(&[1, 1, 0]),
            m(&[0, 2, 0]),
            m(&[1, 0, 1]),
            m(&[0, 1, 1]),
            m(&[0, 0, 2]),
        ];
        for w in expected.windows(2) {
            assert!(w[0] > w[1], "{:?} should exceed {:?}", w[0], w[1]);
        }
        assert!(m(&[1, 0, 0]) > m(&[0, 1, 0]));
        assert!(m(&[0, 1, 0]) > m(&[0, 0, 1]));
    }

    #[test]
    fn division_and_lcm() {
        let a = m(&[3, 1]);
        let b = m(&[1, 0]);
        assert_eq!(a.try_div(&b), Some(m(&[2, 1])));
        assert_eq!(b.try_div(&a), None);
        assert_eq!(a.lcm(&m(&[0, 4])), m(&[3, 4]));
        assert!(m(&[1, 0]).coprime(&m(&[0, 2])));
        assert!(!m(&[1, 1]).coprime(&m(&[0, 2])));
    }

    #[test]
    fn embedding_relabels() {
        let a = m(&[2, 1]);
        assert_eq!(a.embed(4, &[2, 3]), m(&[0, 0, 2, 1]));
    }
}
