//! Polynomial endomorphisms of Q[x1..xn]: composition, Keller checking,
//! inversion through the graph ideal, and the two normalization moves
//! (monic-in-last-variable, generic linear recombination).
//!
//! Composition convention: `compose(f, g)` is "f after g", i.e. coordinate i
//! of the result is f_i(g_1, .., g_n). Recombining coordinates linearly
//! therefore reads `compose(h, f)` with h linear.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::groebner::{buchberger_with_budget, Budget, GroebnerError};
use crate::matrix::{poly_det, rational_det};
use crate::monomial::Monomial;
use crate::order::MonomialOrder;
use crate::poly::Polynomial;
use crate::rational::{rat_int, Rational};
use crate::text::parse_polynomial;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EndoError {
    #[error("map needs {expected} coordinates, got {got}")]
    CoordCount { expected: usize, got: usize },
    #[error("coordinates live in different rings")]
    RingMismatch,
    #[error("maps act on different rings ({0} vs {1} variables)")]
    NvarsMismatch(usize, usize),
    #[error("map is not dominant (zero Jacobian determinant)")]
    NotDominant,
    #[error("coordinate {0} is not monic in the last variable")]
    NotMonic(usize),
    #[error("resample budget of {budget} draws exhausted")]
    ResampleBudget { budget: usize },
    #[error("exponent overflow while building the monic-making change of variables")]
    ExponentOverflow,
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapFileError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `nvars:` header")]
    MissingHeader,
    #[error("coordinate x{0} missing")]
    MissingCoord(usize),
}

/// An endomorphism of Q[x1..xn], stored as its n coordinate images.
/// Provenance metadata (generator family, seed, parameters) rides along as
/// key=value pairs; two maps compare equal on coordinates alone.
#[derive(Debug, Clone)]
pub struct PolyMap {
    coords: Vec<Polynomial>,
    metadata: BTreeMap<String, String>,
}

impl PartialEq for PolyMap {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}

impl Eq for PolyMap {}

impl PolyMap {
    pub fn new(coords: Vec<Polynomial>) -> Result<Self, EndoError> {
        let n = coords.len();
        if n == 0 {
            return Err(EndoError::CoordCount { expected: 1, got: 0 });
        }
        if coords.iter().any(|c| c.nvars() != n) {
            let got = coords.iter().map(|c| c.nvars()).find(|&m| m != n).unwrap();
            if coords.iter().all(|c| c.nvars() == got) {
                return Err(EndoError::CoordCount { expected: got, got: n });
            }
            return Err(EndoError::RingMismatch);
        }
        Ok(PolyMap { coords, metadata: BTreeMap::new() })
    }

    pub fn identity(n: usize) -> Self {
        let coords = (0..n).map(|i| Polynomial::var(n, i)).collect();
        PolyMap { coords, metadata: BTreeMap::new() }
    }

    pub fn nvars(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Polynomial] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Polynomial {
        &self.coords[i]
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn set_metadata(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    /// Coordinate total degrees l_i (-1 for a zero coordinate).
    pub fn degrees(&self) -> Vec<i64> {
        self.coords.iter().map(|c| c.total_degree()).collect()
    }

    pub fn max_degree(&self) -> i64 {
        self.degrees().into_iter().max().unwrap_or(-1)
    }

    pub fn is_identity(&self) -> bool {
        *self == PolyMap::identity(self.nvars())
    }

    pub fn jacobian(&self) -> Vec<Vec<Polynomial>> {
        let n = self.nvars();
        self.coords
            .iter()
            .map(|c| (0..n).map(|j| c.partial_derivative(j)).collect())
            .collect()
    }

    pub fn jacobian_det(&self) -> Polynomial {
        poly_det(&self.jacobian()).expect("jacobian matrix is square")
    }

    pub fn is_dominant(&self) -> bool {
        !self.jacobian_det().is_zero()
    }

    /// Jacobian determinant a nonzero constant.
    pub fn is_keller(&self) -> bool {
        let d = self.jacobian_det();
        d.is_constant() && !d.is_zero()
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Vec<Rational>, EndoError> {
        self.coords
            .iter()
            .map(|c| c.eval(point).map_err(|_| EndoError::NvarsMismatch(self.nvars(), point.len())))
            .collect()
    }

    /// Canonical file form: `nvars:` header, provenance comments sorted by
    /// key, then one `xi -> poly` line per coordinate.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("nvars: {}\n", self.nvars());
        for (k, v) in &self.metadata {
            out.push_str(&format!("# {k}={v}\n"));
        }
        for (i, c) in self.coords.iter().enumerate() {
            out.push_str(&format!("x{} -> {c}\n", i + 1));
        }
        out
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_file_string())
    }
}

pub fn parse_map_str(input: &str) -> Result<PolyMap, MapFileError> {
    let mut nvars: Option<usize> = None;
    let mut metadata = BTreeMap::new();
    let mut coords: Vec<Option<Polynomial>> = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some((k, v)) = comment.split_once('=') {
                metadata.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("nvars:") {
            if nvars.is_some() {
                return Err(MapFileError::Syntax { line: lineno, msg: "duplicate nvars header".into() });
            }
            let n: usize = rest.trim().parse().map_err(|_| MapFileError::Syntax {
                line: lineno,
                msg: format!("bad variable count {:?}", rest.trim()),
            })?;
            if n == 0 {
                return Err(MapFileError::Syntax { line: lineno, msg: "nvars must be positive".into() });
            }
            nvars = Some(n);
            coords = vec![None; n];
            continue;
        }
        let n = nvars.ok_or(MapFileError::MissingHeader)?;
        let (lhs, rhs) = line.split_once("->").ok_or_else(|| MapFileError::Syntax {
            line: lineno,
            msg: "expected `xi -> polynomial`".into(),
        })?;
        let lhs = lhs.trim();
        let var: usize = lhs
            .strip_prefix('x')
            .and_then(|s| s.parse().ok())
            .filter(|&v| v >= 1 && v <= n)
            .ok_or_else(|| MapFileError::Syntax {
                line: lineno,
                msg: format!("bad coordinate name {lhs:?}"),
            })?;
        if coords[var - 1].is_some() {
            return Err(MapFileError::Syntax {
                line: lineno,
                msg: format!("coordinate x{var} given twice"),
            });
        }
        let poly = parse_polynomial(rhs.trim(), n)
            .map_err(|e| MapFileError::Syntax { line: lineno, msg: e.to_string() })?;
        coords[var - 1] = Some(poly);
    }
    if nvars.is_none() {
        return Err(MapFileError::MissingHeader);
    }
    let coords: Vec<Polynomial> = coords
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or(MapFileError::MissingCoord(i + 1)))
        .collect::<Result<_, _>>()?;
    let mut map = PolyMap::new(coords).expect("validated while parsing");
    map.metadata = metadata;
    Ok(map)
}

/// f after g: coordinate i is f_i(g_1, .., g_n).
pub fn compose(f: &PolyMap, g: &PolyMap) -> Result<PolyMap, EndoError> {
    if f.nvars() != g.nvars() {
        return Err(EndoError::NvarsMismatch(f.nvars(), g.nvars()));
    }
    let coords = f
        .coords
        .iter()
        .map(|c| c.substitute(g.coords()).expect("shapes checked"))
        .collect();
    PolyMap::new(coords)
}

/// Generators y_i - F_i(x) of the graph ideal in Q[x1..xn, y1..yn]
/// (x block first, y_i at index n+i).
pub fn graph_ideal(f: &PolyMap) -> Vec<Polynomial> {
    let n = f.nvars();
    let embed_map: Vec<usize> = (0..n).collect();
    f.coords
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let y = Polynomial::var(2 * n, n + i);
            &y - &c.embed(2 * n, &embed_map)
        })
        .collect()
}

/// Keep only terms free of the first n variables and re-read the rest as a
/// polynomial in the y block; None if any term touches the x block.
pub(crate) fn strip_to_tail_block(p: &Polynomial, n: usize) -> Option<Polynomial> {
    debug_assert_eq!(p.nvars(), 2 * n);
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        if (0..n).any(|i| m.exp(i) > 0) {
            return None;
        }
        let exps: Vec<u32> = (n..2 * n).map(|i| m.exp(i)).collect();
        terms.push((Monomial::new(exps), c.clone()));
    }
    Some(Polynomial::from_terms(n, terms))
}

pub fn invert(f: &PolyMap) -> Result<Option<PolyMap>, EndoError> {
    invert_with_budget(f, &Budget::default())
}

/// Inverse automorphism, if one exists. An automorphism has constant
/// nonzero Jacobian, so non-Keller maps are rejected without touching the
/// graph ideal; candidates extracted from the reduced basis are verified by
/// composing both ways.
pub fn invert_with_budget(f: &PolyMap, budget: &Budget) -> Result<Option<PolyMap>, EndoError> {
    if !f.is_keller() {
        return Ok(None);
    }
    invert_via_groebner(f, budget)
}

/// The graph-ideal route, usable on any map: eliminate the x block from
/// (y_i - F_i); for an automorphism the reduced basis is exactly
/// {x_i - G_i(y)} and G is the inverse.
pub fn invert_via_groebner(f: &PolyMap, budget: &Budget) -> Result<Option<PolyMap>, EndoError> {
    let n = f.nvars();
    let order = MonomialOrder::eliminating((0..n).collect());
    let gb = buchberger_with_budget(&graph_ideal(f), order, budget)?;
    let lms = gb.leading_monomials();
    let mut candidate: Vec<Option<Polynomial>> = vec![None; n];
    for (g, lm) in gb.gens().iter().zip(&lms) {
        for i in 0..n {
            if *lm == Monomial::var(2 * n, i) {
                // Basis is monic: g = x_i + tail, so G_i = -tail.
                let tail = g - &Polynomial::var(2 * n, i);
                if let Some(t) = strip_to_tail_block(&tail, n) {
                    candidate[i] = Some(-&t);
                }
            }
        }
    }
    let Some(coords) = candidate.into_iter().collect::<Option<Vec<_>>>() else {
        return Ok(None);
    };
    let g = PolyMap::new(coords)?;
    let id = PolyMap::identity(n);
    if compose(f, &g)? == id && compose(&g, f)? == id {
        Ok(Some(g))
    } else {
        Ok(None)
    }
}

pub fn is_monic_in_last(p: &Polynomial) -> bool {
    !p.is_zero() && p.leading_in_var(p.nvars() - 1).1.is_constant()
}

/// Compose with the triangular change x_i += x_n^(m_i) so every coordinate
/// becomes monic in x_n. Exponents m_i = (D+1)^i with D the maximum
/// coordinate degree: exponent vectors of degree <= D are base-(D+1)
/// digits, so distinct monomials land on distinct top x_n powers and the
/// leading x_n coefficient is a single original (constant) coefficient.
pub fn make_monic_in_last(f: &PolyMap) -> Result<(PolyMap, PolyMap), EndoError> {
    if !f.is_dominant() {
        return Err(EndoError::NotDominant);
    }
    let n = f.nvars();
    let delta = f.max_degree().max(1) as u32;
    let base = delta + 1;
    let mut coords = Vec::with_capacity(n);
    for i in 0..n - 1 {
        let m = base
            .checked_pow((i + 1) as u32)
            .ok_or(EndoError::ExponentOverflow)?;
        let shift = Polynomial::term(n, Monomial::var(n, n - 1).pow(m), rat_int(1));
        coords.push(&Polynomial::var(n, i) + &shift);
    }
    coords.push(Polynomial::var(n, n - 1));
    let g = PolyMap::new(coords)?;
    let composed = compose(f, &g)?;
    debug_assert!(composed.coords().iter().all(is_monic_in_last));
    Ok((composed, g))
}

const LINEAR_DRAW_BUDGET: usize = 100;

/// Replace the coordinates by a random invertible linear recombination
/// sum_k c_{ik} F_k, redrawing until every new coordinate is still monic in
/// x_n (the recombined leading coefficients must all be nonzero).
pub fn generic_linear_compose(f: &PolyMap, seed: u64) -> Result<(PolyMap, PolyMap), EndoError> {
    let n = f.nvars();
    if let Some(i) = f.coords().iter().position(|c| !is_monic_in_last(c)) {
        return Err(EndoError::NotMonic(i));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..LINEAR_DRAW_BUDGET {
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(-5..=5)).collect())
            .collect();
        let rational_rows: Vec<Vec<Rational>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| rat_int(v)).collect())
            .collect();
        if rational_det(&rational_rows).expect("square draw").is_zero() {
            continue;
        }
        let coords: Vec<Polynomial> = rows
            .iter()
            .map(|row| {
                let mut acc = Polynomial::zero(n);
                for (k, &c) in row.iter().enumerate() {
                    if c != 0 {
                        acc = &acc + &Polynomial::var(n, k).scale(&rat_int(c));
                    }
                }
                acc
            })
            .collect();
        let h = PolyMap::new(coords)?;
        let recombined = compose(&h, f)?;
        if recombined.coords().iter().all(is_monic_in_last) {
            return Ok((recombined, h));
        }
    }
    Err(EndoError::ResampleBudget { budget: LINEAR_DRAW_BUDGET })
}
