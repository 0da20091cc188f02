//! Sparse exact polynomials over Q in variables x1..xn.
//!
//! Terms are stored strictly descending under the canonical grevlex order
//! with no zero coefficients, so structural equality is semantic equality
//! and printing is deterministic.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::monomial::Monomial;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("operands live in different rings ({0} vs {1} variables)")]
    NvarsMismatch(usize, usize),
    #[error("expected {expected} substitution images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error("substitution images live in inconsistent rings")]
    ImageRings,
    #[error("permutation is not a bijection on 0..{0}")]
    BadPermutation(usize),
    #[error("matrix is not square")]
    NotSquare,
    #[error("evaluation point has wrong dimension")]
    PointDimension,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: Vec<(Monomial, Rational)>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: Vec::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        if c.is_zero() {
            Self::zero(nvars)
        } else {
            Polynomial { nvars, terms: vec![(Monomial::unit(nvars), c)] }
        }
    }

    /// x_{var+1} (0-based index).
    pub fn var(nvars: usize, var: usize) -> Self {
        Polynomial {
            nvars,
            terms: vec![(Monomial::var(nvars, var), Rational::one())],
        }
    }

    pub fn term(nvars: usize, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.nvars(), nvars);
        if c.is_zero() {
            Self::zero(nvars)
        } else {
            Polynomial { nvars, terms: vec![(m, c)] }
        }
    }

    /// Builds from arbitrary (monomial, coefficient) pairs, combining
    /// duplicates and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "term in wrong ring");
            if c.is_zero() {
                continue;
            }
            match acc.entry(m) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    *e.get_mut() += c;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
            }
        }
        Polynomial {
            nvars,
            terms: acc.into_iter().rev().collect(),
        }
    }

    /// Internal constructor; terms must already be strictly descending with
    /// nonzero coefficients.
    pub(crate) fn from_sorted_terms(nvars: usize, terms: Vec<(Monomial, Rational)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Polynomial { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_unit())
    }

    /// Some(c) when the polynomial is the constant c (including 0).
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            Some(Rational::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    /// Leading term under the canonical grevlex order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.first().map(|(m, c)| (m, c))
    }

    /// Total degree with the convention deg 0 = -1.
    pub fn total_degree(&self) -> i64 {
        // grevlex is graded, so the leading term carries the total degree.
        match self.terms.first() {
            None => -1,
            Some((m, _)) => m.degree() as i64,
        }
    }

    /// Degree in a single variable (-1 for the zero polynomial).
    pub fn degree_in(&self, var: usize) -> i64 {
        self.terms
            .iter()
            .map(|(m, _)| m.exp(var) as i64)
            .max()
            .unwrap_or(-1)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        match self.terms.binary_search_by(|(tm, _)| m.cmp(tm)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// Coefficient of x_{var}^k, as a polynomial with that variable zeroed.
    pub fn coefficient_of_power(&self, var: usize, k: u32) -> Polynomial {
        let picked = self.terms.iter().filter(|(m, _)| m.exp(var) == k).map(|(m, c)| {
            let mut exps = m.exps().to_vec();
            exps[var] = 0;
            (Monomial::new(exps), c.clone())
        });
        Polynomial::from_terms(self.nvars, picked)
    }

    /// (degree in var, coefficient polynomial of that power).
    pub fn leading_in_var(&self, var: usize) -> (i64, Polynomial) {
        let d = self.degree_in(var);
        if d < 0 {
            (d, Polynomial::zero(self.nvars))
        } else {
            (d, self.coefficient_of_power(var, d as u32))
        }
    }

    fn check_ring(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            Err(PolyError::NvarsMismatch(self.nvars, other.nvars))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        Ok(self.merged(other, false))
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        Ok(self.merged(other, true))
    }

    fn merged(&self, other: &Polynomial, negate: bool) -> Polynomial {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match ma.cmp(mb) {
                std::cmp::Ordering::Greater => {
                    out.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((mb.clone(), if negate { -cb.clone() } else { cb.clone() }));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { ca - cb } else { ca + cb };
                    if !c.is_zero() {
                        out.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(
            other.terms[j..]
                .iter()
                .map(|(m, c)| (m.clone(), if negate { -c.clone() } else { c.clone() })),
        );
        Polynomial { nvars: self.nvars, terms: out }
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_ring(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Polynomial::zero(self.nvars));
        }
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.entry(m) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() += c;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                }
            }
        }
        Ok(Polynomial {
            nvars: self.nvars,
            terms: acc.into_iter().rev().collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, t)| (m.clone(), t * c)).collect(),
        }
    }

    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(tm, tc)| (tm.mul(m), tc * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        if k == 0 {
            return Polynomial::one(self.nvars);
        }
        let mut base = self.clone();
        let mut acc: Option<Polynomial> = None;
        let mut k = k;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => &a * &base,
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = &base * &base;
        }
        acc.unwrap()
    }

    pub fn partial_derivative(&self, var: usize) -> Polynomial {
        assert!(var < self.nvars, "variable index out of range");
        let terms = self.terms.iter().filter(|(m, _)| m.exp(var) > 0).map(|(m, c)| {
            let e = m.exp(var);
            let mut exps = m.exps().to_vec();
            exps[var] = e - 1;
            (Monomial::new(exps), c * Rational::from_integer(BigInt::from(e)))
        });
        Polynomial::from_terms(self.nvars, terms)
    }

    /// Exact composition p(images); the result lives in the images' ring.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial, PolyError> {
        if images.len() != self.nvars {
            return Err(PolyError::ImageCount { expected: self.nvars, got: images.len() });
        }
        let out_nvars = match images.first() {
            Some(p) => p.nvars,
            None => {
                return Ok(Polynomial::from_terms(
                    0,
                    self.terms
                        .iter()
                        .map(|(_, c)| (Monomial::unit(0), c.clone())),
                ))
            }
        };
        if images.iter().any(|p| p.nvars != out_nvars) {
            return Err(PolyError::ImageRings);
        }
        let mut max_exp = vec![0u32; self.nvars];
        for (m, _) in &self.terms {
            for (i, mx) in max_exp.iter_mut().enumerate() {
                *mx = (*mx).max(m.exp(i));
            }
        }
        // Power table per variable, filled up to the largest exponent used.
        let mut pows: Vec<Vec<Polynomial>> = Vec::with_capacity(self.nvars);
        for (i, &mx) in max_exp.iter().enumerate() {
            let mut table = vec![Polynomial::one(out_nvars)];
            for k in 1..=mx as usize {
                let next = &table[k - 1] * &images[i];
                table.push(next);
            }
            let _ = i;
            pows.push(table);
        }
        let mut acc = Polynomial::zero(out_nvars);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(out_nvars, c.clone());
            for i in 0..self.nvars {
                let e = m.exp(i) as usize;
                if e > 0 {
                    t = &t * &pows[i][e];
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::PointDimension);
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, v) in point.iter().enumerate() {
                let e = m.exp(i);
                if e > 0 {
                    t *= num_traits::pow::pow(v.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Renames variable i to perm[i]; perm must be a bijection.
    pub fn permute_variables(&self, perm: &[usize]) -> Result<Polynomial, PolyError> {
        if perm.len() != self.nvars {
            return Err(PolyError::BadPermutation(self.nvars));
        }
        let mut seen = vec![false; self.nvars];
        for &p in perm {
            if p >= self.nvars || seen[p] {
                return Err(PolyError::BadPermutation(self.nvars));
            }
            seen[p] = true;
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.embed(self.nvars, perm), c.clone()));
        Ok(Polynomial::from_terms(self.nvars, terms))
    }

    /// Relabels variables into a (usually larger) ring; `map[i]` is the new
    /// slot of variable i.
    pub fn embed(&self, new_nvars: usize, map: &[usize]) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.embed(new_nvars, map), c.clone()));
        Polynomial::from_terms(new_nvars, terms)
    }

    /// Exact division; None when other does not divide self.
    pub fn div_exact(&self, other: &Polynomial) -> Option<Polynomial> {
        assert_eq!(self.nvars, other.nvars);
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Polynomial::zero(self.nvars));
        }
        let (dm, dc) = other.leading().unwrap();
        let mut rem = self.clone();
        let mut q: Vec<(Monomial, Rational)> = Vec::new();
        while let Some((lm, lc)) = rem.leading() {
            let qm = lm.try_div(dm)?;
            let qc = lc / dc;
            // Leading monomials strictly decrease, so q stays sorted.
            rem = rem.merged(&other.mul_term(&qm, &qc), true);
            q.push((qm, qc));
        }
        Some(Polynomial::from_sorted_terms(self.nvars, q))
    }

    /// Scales to integer coefficients with content 1 and positive leading
    /// coefficient. The zero polynomial is returned unchanged.
    pub fn integer_normalized(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut denom_lcm = BigInt::one();
        let mut numer_gcd = BigInt::zero();
        for (_, c) in &self.terms {
            denom_lcm = denom_lcm.lcm(c.denom());
            numer_gcd = numer_gcd.gcd(c.numer());
        }
        let mut factor = Rational::new(denom_lcm, numer_gcd);
        if self.terms[0].1.is_negative() == factor.is_positive() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// Scales so the canonical leading coefficient is 1.
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
        }
    }

    /// Largest term count reached while multiplying out; a cheap size proxy
    /// used by budget checks.
    pub fn term_budget_weight(&self) -> usize {
        self.terms.len()
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, other: &Polynomial) -> Polynomial {
        self.checked_add(other).expect("ring mismatch in +")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, other: &Polynomial) -> Polynomial {
        self.checked_sub(other).expect("ring mismatch in -")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, other: &Polynomial) -> Polynomial {
        self.checked_mul(other).expect("ring mismatch in *")
    }
}
