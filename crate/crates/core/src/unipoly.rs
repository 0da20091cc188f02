//! Dense univariate polynomials over Q, used for minimal polynomials.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::poly::Polynomial;
use crate::rational::Rational;

/// Coefficients ascending by power, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    /// Reads a one-variable Polynomial into dense form.
    pub fn from_univariate(p: &Polynomial) -> Self {
        assert_eq!(p.nvars(), 1, "univariate ring expected");
        let deg = p.total_degree().max(0) as usize;
        let mut coeffs = vec![Rational::zero(); deg + 1];
        for (m, c) in p.terms() {
            coeffs[m.exp(0) as usize] = c.clone();
        }
        UniPoly::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    /// Applies the polynomial to a multivariate argument, exactly.
    pub fn eval_poly(&self, at: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero(at.nvars());
        // Horner from the top coefficient down.
        for c in self.coeffs.iter().rev() {
            acc = &acc.checked_mul(at).expect("same ring") + &Polynomial::constant(at.nvars(), c.clone());
        }
        acc
    }

    pub fn eval(&self, at: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &acc * at + c;
        }
        acc
    }
}

impl fmt::Display for UniPoly {
    /// Same conventions as the multivariate printer, with variable T.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            if first {
                if negative {
                    f.write_str("-")?;
                }
                first = false;
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let mag = c.abs();
            let var = match k {
                0 => None,
                1 => Some("T".to_string()),
                _ => Some(format!("T^{k}")),
            };
            match var {
                None => write!(f, "{mag}")?,
                Some(v) => {
                    if mag.is_one() {
                        f.write_str(&v)?;
                    } else {
                        write!(f, "{mag}*{v}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use crate::text::parse_polynomial;

    #[test]
    fn display_forms() {
        let p = UniPoly::from_coeffs(vec![rat_int(-2), rat_int(0), rat_int(1)]);
        assert_eq!(p.to_string(), "T^2 - 2");
        let q = UniPoly::from_coeffs(vec![rat_int(0), rat_int(-1), rat_int(0), rat_int(0), rat_int(1)]);
        assert_eq!(q.to_string(), "T^4 - T");
        let lin = UniPoly::from_coeffs(vec![rat(1, 2), rat_int(3)]);
        assert_eq!(lin.to_string(), "3*T + 1/2");
        assert_eq!(UniPoly::zero().to_string(), "0");
        assert_eq!(UniPoly::from_coeffs(vec![rat_int(0), rat_int(1)]).to_string(), "T");
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = UniPoly::from_coeffs(vec![rat_int(1), rat_int(0), rat_int(0)]);
        assert_eq!(p.degree(), 0);
        assert_eq!(UniPoly::from_coeffs(vec![]).degree(), -1);
    }

    #[test]
    fn evaluation() {
        // T^2 - 2 at T = x1 + 1.
        let p = UniPoly::from_coeffs(vec![rat_int(-2), rat_int(0), rat_int(1)]);
        let at = parse_polynomial("x1 + 1", 1).unwrap();
        assert_eq!(p.eval_poly(&at), parse_polynomial("x1^2 + 2*x1 - 1", 1).unwrap());
        assert_eq!(p.eval(&rat_int(3)), rat_int(7));
        assert!(p.is_monic());
    }
}
