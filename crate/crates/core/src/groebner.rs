//! Buchberger's algorithm and the zero-dimensional toolkit built on it.
//!
//! Pairs are selected degree-graded with a deterministic tie-break, and the
//! two classical discard rules (coprime leading terms, chain rule) keep the
//! queue small. Working polynomials are rescaled to integer content 1 after
//! every reduction so coefficient growth stays tame; the final reduced basis
//! is monic over Q and sorted, which makes it unique for a fixed ideal and
//! order.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_traits::{One, Zero};

use crate::monomial::Monomial;
use crate::order::MonomialOrder;
use crate::poly::Polynomial;
use crate::rational::Rational;
use crate::unipoly::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroebnerError {
    #[error("pair budget exhausted after {pairs} S-pairs")]
    PairBudget { pairs: usize },
    #[error("term budget exhausted (a reduction grew past {terms} terms)")]
    TermBudget { terms: usize },
    #[error("quotient ring is not finite dimensional")]
    InfiniteQuotient,
    #[error("staircase enumeration larger than {0} monomials")]
    StaircaseTooLarge(usize),
    #[error("element lives in a different ring than the basis")]
    RingMismatch,
}

/// Caps on a single basis computation. The defaults are far above anything
/// the test corpus needs; scans lower them to turn runaway inputs into
/// explicit budget records instead of hangs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_pairs: usize,
    pub max_terms: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_pairs: 50_000, max_terms: 500_000 }
    }
}

const STAIRCASE_CAP: usize = 1_000_000;

/// Terms sorted strictly descending under the active order.
#[derive(Clone)]
struct WPoly {
    terms: Vec<(Monomial, Rational)>,
}

impl WPoly {
    fn from_poly(p: &Polynomial, ord: &MonomialOrder) -> Self {
        let mut terms: Vec<(Monomial, Rational)> = p.terms().to_vec();
        terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        WPoly { terms }
    }

    fn to_poly(&self, nvars: usize) -> Polynomial {
        Polynomial::from_terms(nvars, self.terms.iter().cloned())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn leading(&self) -> &(Monomial, Rational) {
        &self.terms[0]
    }

    /// self - c * m * other, merged under ord.
    fn sub_scaled(&self, other: &WPoly, m: &Monomial, c: &Rational, ord: &MonomialOrder) -> WPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut i = 0;
        let mut j = 0;
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let mb = other.terms[j].0.mul(m);
            match ord.cmp(ma, &mb) {
                std::cmp::Ordering::Greater => {
                    out.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((mb, -(&other.terms[j].1 * c)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let coeff = ca - &(&other.terms[j].1 * c);
                    if !coeff.is_zero() {
                        out.push((ma.clone(), coeff));
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
                .map(|(mb, cb)| (mb.mul(m), -(cb * c))),
        );
        WPoly { terms: out }
    }

    fn normalize_primitive(&mut self, nvars: usize, ord: &MonomialOrder) {
        if self.terms.is_empty() {
            return;
        }
        let p = self.to_poly(nvars).integer_normalized();
        *self = WPoly::from_poly(&p, ord);
    }
}

/// Full reduction: every term of the result is divisible by no basis
/// leading monomial.
fn reduce_full(
    mut p: WPoly,
    basis: &[WPoly],
    ord: &MonomialOrder,
    budget: &Budget,
) -> Result<WPoly, GroebnerError> {
    let mut out: Vec<(Monomial, Rational)> = Vec::new();
    'outer: while !p.is_zero() {
        if p.terms.len() + out.len() > budget.max_terms {
            return Err(GroebnerError::TermBudget { terms: budget.max_terms });
        }
        let (lm, lc) = p.leading().clone();
        for g in basis {
            if g.is_zero() {
                continue;
            }
            let (gm, gc) = g.leading();
            if let Some(q) = lm.try_div(gm) {
                let c = &lc / gc;
                p = p.sub_scaled(g, &q, &c, ord);
                continue 'outer;
            }
        }
        out.push(p.terms.remove(0));
    }
    Ok(WPoly { terms: out })
}

fn s_poly(f: &WPoly, g: &WPoly, ord: &MonomialOrder) -> WPoly {
    let (fm, fc) = f.leading();
    let (gm, gc) = g.leading();
    let lcm = fm.lcm(gm);
    let mf = lcm.try_div(fm).unwrap();
    let mg = lcm.try_div(gm).unwrap();
    let scaled = WPoly {
        terms: f
            .terms
            .iter()
            .map(|(m, c)| (m.mul(&mf), c / fc))
            .collect(),
    };
    // Leading terms cancel by construction.
    scaled.sub_scaled(g, &mg, &(Rational::one() / gc), ord)
}

#[derive(Clone)]
pub struct GroebnerBasis {
    nvars: usize,
    order: MonomialOrder,
    gens: Vec<Polynomial>,
    work: Vec<WPoly>,
}

impl GroebnerBasis {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    /// Reduced, monic generators, ascending by leading monomial.
    pub fn gens(&self) -> &[Polynomial] {
        &self.gens
    }

    /// True when the basis is {1}, i.e. the ideal is the whole ring.
    pub fn is_trivial(&self) -> bool {
        self.gens.len() == 1 && self.gens[0].is_constant() && !self.gens[0].is_zero()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.work.iter().map(|w| w.leading().0.clone()).collect()
    }

    /// Unique remainder of p modulo the basis.
    pub fn normal_form(&self, p: &Polynomial) -> Result<Polynomial, GroebnerError> {
        if p.nvars() != self.nvars {
            return Err(GroebnerError::RingMismatch);
        }
        let w = WPoly::from_poly(p, &self.order);
        let r = reduce_full(w, &self.work, &self.order, &Budget::default())?;
        Ok(r.to_poly(self.nvars))
    }

    pub fn contains(&self, p: &Polynomial) -> Result<bool, GroebnerError> {
        Ok(self.normal_form(p)?.is_zero())
    }
}

pub fn buchberger(gens: &[Polynomial], order: MonomialOrder) -> Result<GroebnerBasis, GroebnerError> {
    buchberger_with_budget(gens, order, &Budget::default())
}

pub fn buchberger_with_budget(
    gens: &[Polynomial],
    order: MonomialOrder,
    budget: &Budget,
) -> Result<GroebnerBasis, GroebnerError> {
    assert!(!gens.is_empty(), "need at least one generator to fix the ring");
    let nvars = gens[0].nvars();
    assert!(gens.iter().all(|g| g.nvars() == nvars), "generators in different rings");

    let mut basis: Vec<WPoly> = Vec::new();
    for g in gens {
        if g.is_zero() {
            continue;
        }
        let mut w = WPoly::from_poly(g, &order);
        w.normalize_primitive(nvars, &order);
        basis.push(w);
    }
    if basis.is_empty() {
        // Zero ideal: empty basis, normal form is the identity.
        return Ok(GroebnerBasis { nvars, order, gens: Vec::new(), work: Vec::new() });
    }

    // Pair queue keyed by (lcm degree, lcm exponents, indices): degree-graded
    // selection with a total deterministic tie-break.
    type PairKey = (u64, Vec<u32>, usize, usize);
    let mut queue: BTreeSet<PairKey> = BTreeSet::new();
    let mut treated: HashSet<(usize, usize)> = HashSet::new();
    let key_of = |basis: &[WPoly], i: usize, j: usize| -> PairKey {
        let lcm = basis[i].leading().0.lcm(&basis[j].leading().0);
        (lcm.degree(), lcm.exps().to_vec(), i, j)
    };
    for j in 1..basis.len() {
        for i in 0..j {
            queue.insert(key_of(&basis, i, j));
        }
    }

    let mut pairs_done = 0usize;
    while let Some(key) = queue.pop_first() {
        let (_, lcm_exps, i, j) = key;
        treated.insert((i, j));
        pairs_done += 1;
        if pairs_done > budget.max_pairs {
            return Err(GroebnerError::PairBudget { pairs: budget.max_pairs });
        }
        let lmi = basis[i].leading().0.clone();
        let lmj = basis[j].leading().0.clone();
        // Product criterion: coprime leading monomials reduce to zero.
        if lmi.coprime(&lmj) {
            continue;
        }
        // Chain criterion: a third element dividing the lcm whose pairs with
        // both ends were already treated makes this pair redundant.
        let lcm = Monomial::new(lcm_exps);
        let redundant = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k].leading().0.divides(&lcm)
                && treated.contains(&(i.min(k), i.max(k)))
                && treated.contains(&(j.min(k), j.max(k)))
        });
        if redundant {
            continue;
        }
        let s = s_poly(&basis[i], &basis[j], &order);
        let mut h = reduce_full(s, &basis, &order, budget)?;
        if h.is_zero() {
            continue;
        }
        h.normalize_primitive(nvars, &order);
        let new_idx = basis.len();
        basis.push(h);
        for k in 0..new_idx {
            queue.insert(key_of(&basis, k, new_idx));
        }
    }

    // Minimalize: keep only elements whose leading monomial no other kept
    // element divides.
    let lms: Vec<Monomial> = basis.iter().map(|w| w.leading().0.clone()).collect();
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            if lms[j].divides(&lms[i]) && (lms[j] != lms[i] || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let mut reduced: Vec<WPoly> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(w, k)| k.then_some(w))
        .collect();

    // Inter-reduce tails; leading monomials are untouched, so one pass
    // leaves every element in normal form with respect to the others.
    for i in 0..reduced.len() {
        let me = reduced[i].clone();
        let others: Vec<WPoly> = reduced
            .iter()
            .enumerate()
            .filter_map(|(j, w)| (j != i).then(|| w.clone()))
            .collect();
        reduced[i] = reduce_full(me, &others, &order, budget)?;
    }

    // Monic with respect to the basis order (not the canonical print
    // order), ascending by leading monomial.
    reduced.sort_by(|a, b| order.cmp(&a.leading().0, &b.leading().0));
    let mut gens = Vec::with_capacity(reduced.len());
    let mut work = Vec::with_capacity(reduced.len());
    for mut w in reduced {
        let inv = w.leading().1.recip();
        for (_, c) in w.terms.iter_mut() {
            *c *= &inv;
        }
        gens.push(w.to_poly(nvars));
        work.push(w);
    }
    Ok(GroebnerBasis { nvars, order, gens, work })
}

/// Generators of the ideal intersected with the subring of kept variables.
pub fn elimination_ideal(
    gens: &[Polynomial],
    eliminate: &[usize],
) -> Result<Vec<Polynomial>, GroebnerError> {
    elimination_ideal_with_budget(gens, eliminate, &Budget::default())
}

pub fn elimination_ideal_with_budget(
    gens: &[Polynomial],
    eliminate: &[usize],
    budget: &Budget,
) -> Result<Vec<Polynomial>, GroebnerError> {
    let order = MonomialOrder::eliminating(eliminate.to_vec());
    let gb = buchberger_with_budget(gens, order, budget)?;
    let elim_set: HashSet<usize> = eliminate.iter().copied().collect();
    Ok(gb
        .gens()
        .iter()
        .filter(|p| {
            p.terms()
                .iter()
                .all(|(m, _)| elim_set.iter().all(|&v| m.exp(v) == 0))
        })
        .cloned()
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Staircase {
    Finite(Vec<Monomial>),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotientDim {
    Finite(usize),
    Infinite,
}

/// Standard monomials of the quotient (those outside the leading-term
/// ideal), or the infinite marker. Finiteness criterion: every variable
/// must show up as a pure power among the leading monomials.
pub fn staircase(gb: &GroebnerBasis) -> Result<Staircase, GroebnerError> {
    if gb.is_trivial() {
        return Ok(Staircase::Finite(Vec::new()));
    }
    let lms = gb.leading_monomials();
    if lms.is_empty() {
        // Zero ideal: infinite for any ring with variables.
        return Ok(if gb.nvars() == 0 {
            Staircase::Finite(vec![Monomial::unit(0)])
        } else {
            Staircase::Infinite
        });
    }
    let n = gb.nvars();
    let mut bounds = vec![None::<u32>; n];
    for lm in &lms {
        let support: Vec<usize> = (0..n).filter(|&i| lm.exp(i) > 0).collect();
        if support.len() == 1 {
            let v = support[0];
            let e = lm.exp(v);
            bounds[v] = Some(bounds[v].map_or(e, |b| b.min(e)));
        }
    }
    let Some(bounds) = bounds.into_iter().collect::<Option<Vec<u32>>>() else {
        return Ok(Staircase::Infinite);
    };
    let mut cells: usize = 1;
    for &b in &bounds {
        cells = cells
            .checked_mul(b as usize)
            .filter(|&c| c <= STAIRCASE_CAP)
            .ok_or(GroebnerError::StaircaseTooLarge(STAIRCASE_CAP))?;
    }
    let mut standard = Vec::new();
    let mut exps = vec![0u32; n];
    'cells: loop {
        let m = Monomial::new(exps.clone());
        if !lms.iter().any(|lm| lm.divides(&m)) {
            standard.push(m);
        }
        // Odometer over the box below the pure-power bounds.
        for i in 0..n {
            exps[i] += 1;
            if exps[i] < bounds[i] {
                continue 'cells;
            }
            exps[i] = 0;
        }
        break;
    }
    standard.sort();
    Ok(Staircase::Finite(standard))
}

pub fn quotient_dimension(gb: &GroebnerBasis) -> Result<QuotientDim, GroebnerError> {
    Ok(match staircase(gb)? {
        Staircase::Finite(ms) => QuotientDim::Finite(ms.len()),
        Staircase::Infinite => QuotientDim::Infinite,
    })
}

/// Monic minimal polynomial of elem in the finite-dimensional quotient:
/// normal forms of successive powers are row-reduced until the first linear
/// dependence appears.
pub fn minpoly_in_quotient(gb: &GroebnerBasis, elem: &Polynomial) -> Result<UniPoly, GroebnerError> {
    if elem.nvars() != gb.nvars() {
        return Err(GroebnerError::RingMismatch);
    }
    let standard = match staircase(gb)? {
        Staircase::Finite(ms) => ms,
        Staircase::Infinite => return Err(GroebnerError::InfiniteQuotient),
    };
    let dim = standard.len();
    if dim == 0 {
        // Zero ring: everything is annihilated by T.
        return Ok(UniPoly::from_coeffs(vec![Rational::zero(), Rational::one()]));
    }
    let index: HashMap<&Monomial, usize> = standard.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let to_vec = |p: &Polynomial| -> Vec<Rational> {
        let mut v = vec![Rational::zero(); dim];
        for (m, c) in p.terms() {
            let i = *index.get(m).expect("normal form touches only standard monomials");
            v[i] = c.clone();
        }
        v
    };

    // Echelon rows with the power combination that produced them.
    let mut rows: Vec<(usize, Vec<Rational>, Vec<Rational>)> = Vec::new();
    let mut cur = gb.normal_form(&Polynomial::one(gb.nvars()))?;
    for k in 0..=dim {
        let mut w = to_vec(&cur);
        let mut combo = vec![Rational::zero(); k + 1];
        combo[k] = Rational::one();
        for (pivot, row, rcombo) in &rows {
            if w[*pivot].is_zero() {
                continue;
            }
            let f = w[*pivot].clone();
            for (wi, ri) in w.iter_mut().zip(row) {
                *wi -= &f * ri;
            }
            for (ci, rc) in combo.iter_mut().zip(rcombo) {
                *ci -= &f * rc;
            }
        }
        if w.iter().all(|c| c.is_zero()) {
            return Ok(UniPoly::from_coeffs(combo));
        }
        let pivot = w.iter().position(|c| !c.is_zero()).unwrap();
        let inv = w[pivot].recip();
        for wi in w.iter_mut() {
            *wi *= &inv;
        }
        let mut combo_scaled = combo;
        for ci in combo_scaled.iter_mut() {
            *ci *= &inv;
        }
        rows.push((pivot, w, combo_scaled));
        cur = gb.normal_form(&cur.checked_mul(elem).map_err(|_| GroebnerError::RingMismatch)?)?;
    }
    unreachable!("dim+1 power vectors cannot stay independent in a dim-dimensional space");
}
