//! Exact k-th roots of polynomials over Q.

use num_bigint::BigInt;

use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::rational::{rational_nth_root, Rational};

/// Returns r with r^k = p, when such r exists over Q. For even k the root
/// with positive leading coefficient is returned; for odd k the sign is
/// forced by p. Panics if k == 0.
pub fn poly_nth_root(p: &Polynomial, k: u32) -> Option<Polynomial> {
    assert!(k >= 1, "root index must be positive");
    if k == 1 {
        return Some(p.clone());
    }
    if p.is_zero() {
        return Some(Polynomial::zero(p.nvars()));
    }
    let (lm, lc) = p.leading().unwrap();
    if p.total_degree() % (k as i64) != 0 {
        return None;
    }
    let root_lm_exps: Option<Vec<u32>> = lm
        .exps()
        .iter()
        .map(|&e| if e % k == 0 { Some(e / k) } else { None })
        .collect();
    let root_lm = Monomial::new(root_lm_exps?);
    let root_lc = rational_nth_root(lc, k)?;

    // Each further term u of the root is pinned by the leading term of
    // p - s^k, which must equal k * t^(k-1) * u for t the root's own
    // leading term.
    let denom_m = root_lm.pow(k - 1);
    let denom_c = &root_lc.clone().pow((k - 1) as i32) * Rational::from_integer(BigInt::from(k));
    let mut terms = vec![(root_lm, root_lc)];
    loop {
        let s = Polynomial::from_terms(p.nvars(), terms.iter().cloned());
        let diff = p - &s.pow(k);
        if diff.is_zero() {
            return Some(s);
        }
        let (dm, dc) = diff.leading().unwrap();
        let qm = dm.try_div(&denom_m)?;
        let qc = dc / &denom_c;
        // Terms must strictly decrease; otherwise p has no root.
        if qm >= terms.last().unwrap().0 {
            return None;
        }
        terms.push((qm, qc));
    }
}
