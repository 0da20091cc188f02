//! Field-theoretic measurements for a dominant map F: the extension degree
//! D = [C(x1..xn) : C(F1..Fn)] realized as a generic fiber count, the
//! per-coordinate minimal polynomial degrees d_i, linearity of x_n over
//! C(F, x1..x_{n-1}) with an explicit rational witness, and membership in
//! the subalgebra C[F].
//!
//! Sampling protocol: specialization values are integers in [-10^4, 10^4];
//! every measured number needs two agreeing independent draws, with a third
//! draw as tie-breaker. Fibers of the augmented systems (tower, linearity)
//! are taken over the image of a random base point, since an independent
//! random target misses the image variety and yields empty fibers.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::endo::{graph_ideal, strip_to_tail_block, PolyMap};
use crate::groebner::{
    buchberger_with_budget, quotient_dimension, Budget, GroebnerBasis, GroebnerError, QuotientDim,
};
use crate::groebner::minpoly_in_quotient;
use crate::monomial::Monomial;
use crate::order::MonomialOrder;
use crate::poly::Polynomial;
use crate::rational::{rat_int, Rational};
use crate::text::format_polynomial_with;
use crate::unipoly::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtError {
    #[error("map is not dominant (zero Jacobian determinant)")]
    NotDominant,
    #[error("map is not Keller")]
    NotKeller,
    #[error("no usable specialization after {attempts} attempts (degenerate fibers)")]
    DegenerateSamples { attempts: usize },
    #[error("three independent draws disagree: {0:?}")]
    Disagreement(Vec<u32>),
    #[error("specialized and symbolic paths disagree (fast {fast}, symbolic {symbolic})")]
    PathMismatch { fast: u32, symbolic: u32 },
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

const SAMPLE_RANGE: i64 = 10_000;
const DEGENERATE_RETRIES: usize = 8;
const SYMBOLIC_MAX_NVARS: usize = 2;
const SYMBOLIC_MAX_DEGREE: i64 = 6;

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|_| rat_int(rng.random_range(-SAMPLE_RANGE..=SAMPLE_RANGE)))
        .collect()
}

/// F_j - c_j plus optional pinned coordinates x_i - v.
fn fiber_gens(f: &PolyMap, c: &[Rational], pins: &[(usize, Rational)]) -> Vec<Polynomial> {
    let n = f.nvars();
    let mut gens: Vec<Polynomial> = f
        .coords()
        .iter()
        .zip(c)
        .map(|(fj, cj)| fj - &Polynomial::constant(n, cj.clone()))
        .collect();
    for (i, v) in pins {
        gens.push(&Polynomial::var(n, *i) - &Polynomial::constant(n, v.clone()));
    }
    gens
}

/// One draw of a measurement; Ok(None) flags a degenerate (empty or
/// positive-dimensional) fiber to be resampled.
type Draw<T> = Result<Option<T>, ExtError>;

fn sample_until_finite<T>(
    rng: &mut ChaCha8Rng,
    mut measure: impl FnMut(&mut ChaCha8Rng) -> Draw<T>,
) -> Result<T, ExtError> {
    for _ in 0..DEGENERATE_RETRIES {
        if let Some(v) = measure(rng)? {
            return Ok(v);
        }
    }
    Err(ExtError::DegenerateSamples { attempts: DEGENERATE_RETRIES })
}

/// Two-draw agreement with third-draw arbitration, comparing by key.
fn agreed_measure<T>(
    rng: &mut ChaCha8Rng,
    key: impl Fn(&T) -> u32,
    mut measure: impl FnMut(&mut ChaCha8Rng) -> Draw<T>,
) -> Result<T, ExtError> {
    let a = sample_until_finite(rng, &mut measure)?;
    let b = sample_until_finite(rng, &mut measure)?;
    if key(&a) == key(&b) {
        return Ok(a);
    }
    let c = sample_until_finite(rng, &mut measure)?;
    if key(&c) == key(&a) {
        Ok(a)
    } else if key(&c) == key(&b) {
        Ok(b)
    } else {
        Err(ExtError::Disagreement(vec![key(&a), key(&b), key(&c)]))
    }
}

fn finite_fiber_basis(
    f: &PolyMap,
    c: &[Rational],
    pins: &[(usize, Rational)],
    budget: &Budget,
) -> Result<Option<(GroebnerBasis, usize)>, ExtError> {
    let gb = buchberger_with_budget(&fiber_gens(f, c, pins), MonomialOrder::GrevLex, budget)?;
    match quotient_dimension(&gb)? {
        QuotientDim::Finite(0) | QuotientDim::Infinite => Ok(None),
        QuotientDim::Finite(d) => Ok(Some((gb, d))),
    }
}

pub fn extension_degree(f: &PolyMap, seed: u64) -> Result<u32, ExtError> {
    extension_degree_with_budget(f, seed, &Budget::default())
}

/// D as the cardinality of the fiber over a random target, with the
/// two-draw protocol. Requires a dominant map.
pub fn extension_degree_with_budget(f: &PolyMap, seed: u64, budget: &Budget) -> Result<u32, ExtError> {
    if !f.is_dominant() {
        return Err(ExtError::NotDominant);
    }
    let n = f.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    agreed_measure(&mut rng, |d| *d, |rng| {
        let c = random_point(rng, n);
        Ok(finite_fiber_basis(f, &c, &[], budget)?.map(|(_, d)| d as u32))
    })
}

pub fn coordinate_minpoly(f: &PolyMap, i: usize, seed: u64) -> Result<(u32, UniPoly), ExtError> {
    coordinate_minpoly_with_budget(f, i, seed, &Budget::default())
}

/// Degree d_i of the minimal polynomial of x_i over C(F), plus one
/// specialized minimal polynomial. Fast path: minimal polynomial of x_i in
/// the fiber quotient at random c, two agreeing draws. For small maps the
/// symbolic parameter path runs as a cross-check and must agree.
pub fn coordinate_minpoly_with_budget(
    f: &PolyMap,
    i: usize,
    seed: u64,
    budget: &Budget,
) -> Result<(u32, UniPoly), ExtError> {
    if !f.is_dominant() {
        return Err(ExtError::NotDominant);
    }
    let n = f.nvars();
    assert!(i < n, "coordinate index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi = Polynomial::var(n, i);
    let mp = agreed_measure(
        &mut rng,
        |mp: &UniPoly| mp.degree() as u32,
        |rng| {
            let c = random_point(rng, n);
            match finite_fiber_basis(f, &c, &[], budget)? {
                None => Ok(None),
                Some((gb, _)) => Ok(Some(minpoly_in_quotient(&gb, &xi)?)),
            }
        },
    )?;
    let fast = mp.degree() as u32;
    if symbolic_path_eligible(f) {
        let relation = symbolic_coordinate_relation(f, i)?;
        let symbolic = relation.degree_in(0).max(0) as u32;
        if symbolic != fast {
            return Err(ExtError::PathMismatch { fast, symbolic });
        }
    }
    Ok((fast, mp))
}

pub(crate) fn symbolic_path_eligible(f: &PolyMap) -> bool {
    f.nvars() <= SYMBOLIC_MAX_NVARS && f.max_degree() <= SYMBOLIC_MAX_DEGREE
}

/// Rebuild p, whose support must lie inside `picks`, in the smaller ring
/// whose variable k is picks[k].
pub(crate) fn restrict_vars(p: &Polynomial, picks: &[usize], total: usize) -> Option<Polynomial> {
    debug_assert_eq!(p.nvars(), total);
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        for v in 0..total {
            if m.exp(v) > 0 && !picks.contains(&v) {
                return None;
            }
        }
        let exps: Vec<u32> = picks.iter().map(|&v| m.exp(v)).collect();
        terms.push((Monomial::new(exps), c.clone()));
    }
    Some(Polynomial::from_terms(picks.len(), terms))
}

/// The defining relation P(x_i, t1..tn) of x_i over the parameter field
/// C(t) with t_j standing for F_j: eliminate the other x variables from
/// (F_j(x) - t_j). Returned in a compact ring where variable 0 is x_i and
/// variables 1..=n are t1..tn. The relation generates a principal prime
/// ideal, so the elimination returns exactly one polynomial.
pub fn symbolic_coordinate_relation(f: &PolyMap, i: usize) -> Result<Polynomial, ExtError> {
    let n = f.nvars();
    assert!(i < n, "coordinate index out of range");
    let ring = 2 * n;
    let embed: Vec<usize> = (0..n).collect();
    let gens: Vec<Polynomial> = f
        .coords()
        .iter()
        .enumerate()
        .map(|(j, fj)| &fj.embed(ring, &embed) - &Polynomial::var(ring, n + j))
        .collect();
    let eliminate: Vec<usize> = (0..n).filter(|&k| k != i).collect();
    let order = MonomialOrder::eliminating(eliminate);
    let gb = buchberger_with_budget(&gens, order, &Budget::default())?;
    let kept: Vec<Polynomial> = gb
        .gens()
        .iter()
        .filter(|p| {
            p.terms()
                .iter()
                .all(|(m, _)| (0..n).all(|k| k == i || m.exp(k) == 0))
        })
        .cloned()
        .collect();
    if kept.len() != 1 {
        return Err(ExtError::Inconsistency(format!(
            "expected one defining relation, found {}",
            kept.len()
        )));
    }
    let picks: Vec<usize> = std::iter::once(i).chain(n..ring).collect();
    restrict_vars(&kept[0], &picks, ring)
        .ok_or_else(|| ExtError::Inconsistency("relation touches an eliminated variable".into()))
}

/// Coefficients of the relation as polynomials in t alone, ascending in
/// powers of the distinguished first variable.
pub fn coordinate_relation_coefficients(relation: &Polynomial) -> Vec<Polynomial> {
    let total = relation.nvars();
    let deg = relation.degree_in(0).max(0);
    let picks: Vec<usize> = (1..total).collect();
    (0..=deg as u32)
        .map(|k| {
            restrict_vars(&relation.coefficient_of_power(0, k), &picks, total)
                .expect("coefficient is free of the distinguished variable")
        })
        .collect()
}

pub fn tower_degree(f: &PolyMap, i: usize, seed: u64) -> Result<u32, ExtError> {
    tower_degree_with_budget(f, i, seed, &Budget::default())
}

/// [C(x) : C(F, x_i)], counted as the fiber of the augmented system
/// (F - F(a), x_i - a_i) over the image of a random base point a.
pub fn tower_degree_with_budget(
    f: &PolyMap,
    i: usize,
    seed: u64,
    budget: &Budget,
) -> Result<u32, ExtError> {
    if !f.is_dominant() {
        return Err(ExtError::NotDominant);
    }
    let n = f.nvars();
    assert!(i < n, "coordinate index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    agreed_measure(&mut rng, |d| *d, |rng| {
        let a = random_point(rng, n);
        let c = f.eval(&a).expect("point dimension matches");
        let pins = [(i, a[i].clone())];
        Ok(finite_fiber_basis(f, &c, &pins, budget)?.map(|(_, d)| d as u32))
    })
}

/// x_n expressed over C(F, x1..x_{n-1}): a v + b = 0 with v the last
/// variable, a and b free of v. Lives in the 2n-variable graph ring
/// (x block then tag block); tags print as F1..Fn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormanekWitness {
    n: usize,
    pub a: Polynomial,
    pub b: Polynomial,
}

impl FormanekWitness {
    /// Exact check of the defining identity a(F, x) x_n + b(F, x) = 0.
    pub fn verify(&self, f: &PolyMap) -> bool {
        let n = self.n;
        let ring = 2 * n;
        let images: Vec<Polynomial> = (0..ring)
            .map(|v| {
                if v < n {
                    Polynomial::var(n, v)
                } else {
                    f.coord(v - n).clone()
                }
            })
            .collect();
        let a_sub = self.a.substitute(&images).expect("ring shapes align");
        let b_sub = self.b.substitute(&images).expect("ring shapes align");
        if a_sub.is_zero() {
            return false;
        }
        let lhs = &(&a_sub * &Polynomial::var(n, n - 1)) + &b_sub;
        lhs.is_zero()
    }

    fn namer(&self) -> impl Fn(usize) -> String + '_ {
        let n = self.n;
        move |v| {
            if v < n {
                format!("x{}", v + 1)
            } else {
                format!("F{}", v - n + 1)
            }
        }
    }
}

impl fmt::Display for FormanekWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let namer = self.namer();
        write!(
            f,
            "x{} = -({}) / ({})",
            self.n,
            format_polynomial_with(&self.b, &namer),
            format_polynomial_with(&self.a, &namer)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormanekReport {
    pub ok: bool,
    /// Minimal polynomial degree of x_n over C(F, x1..x_{n-1}).
    pub measured_degree: u32,
    pub witness: Option<FormanekWitness>,
}

pub fn verify_formanek(f: &PolyMap, seed: u64) -> Result<FormanekReport, ExtError> {
    verify_formanek_with_budget(f, seed, &Budget::default())
}

/// Measures the degree of x_n over C(F, x1..x_{n-1}) by specializing at
/// the image of a random base point; when the degree is 1 the explicit
/// witness is pulled out of the graph ideal.
pub fn verify_formanek_with_budget(
    f: &PolyMap,
    seed: u64,
    budget: &Budget,
) -> Result<FormanekReport, ExtError> {
    if !f.is_dominant() {
        return Err(ExtError::NotDominant);
    }
    let n = f.nvars();
    let xn = Polynomial::var(n, n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let measured_degree = agreed_measure(&mut rng, |d| *d, |rng| {
        let a = random_point(rng, n);
        let c = f.eval(&a).expect("point dimension matches");
        let pins: Vec<(usize, Rational)> = (0..n - 1).map(|k| (k, a[k].clone())).collect();
        match finite_fiber_basis(f, &c, &pins, budget)? {
            None => Ok(None),
            Some((gb, _)) => Ok(Some(minpoly_in_quotient(&gb, &xn)?.degree() as u32)),
        }
    })?;
    if measured_degree != 1 {
        return Ok(FormanekReport { ok: false, measured_degree, witness: None });
    }
    let witness = formanek_witness_with_budget(f, budget)?.ok_or_else(|| {
        ExtError::Inconsistency("specialization says degree 1 but no linear relation found".into())
    })?;
    Ok(FormanekReport { ok: true, measured_degree, witness: Some(witness) })
}

pub fn formanek_witness(f: &PolyMap) -> Result<Option<FormanekWitness>, ExtError> {
    formanek_witness_with_budget(f, &Budget::default())
}

/// Symbolic extraction: in the graph ideal (tags y_j - F_j), under an
/// order eliminating only x_n, a reduced-basis element of x_n-degree 1
/// reads a x_n + b with a, b free of x_n; minimality of the reduced basis
/// forces a to survive the substitution y -> F, so x_n = -b/a over
/// C(F, x1..x_{n-1}). No such element means the degree exceeds 1.
pub fn formanek_witness_with_budget(
    f: &PolyMap,
    budget: &Budget,
) -> Result<Option<FormanekWitness>, ExtError> {
    let n = f.nvars();
    let order = MonomialOrder::eliminating(vec![n - 1]);
    let gb = buchberger_with_budget(&graph_ideal(f), order, budget)?;
    for g in gb.gens() {
        if g.degree_in(n - 1) == 1 {
            let a = g.coefficient_of_power(n - 1, 1);
            let b = g.coefficient_of_power(n - 1, 0);
            let witness = FormanekWitness { n, a, b };
            if !witness.verify(f) {
                return Err(ExtError::Inconsistency(
                    "extracted linear relation fails the substitution check".into(),
                ));
            }
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

/// h written as a polynomial in the tags y1..yn with y_j standing for F_j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipWitness {
    pub expression: Polynomial,
}

impl MembershipWitness {
    /// Substituting F into the expression must reproduce h exactly.
    pub fn verify(&self, f: &PolyMap, h: &Polynomial) -> bool {
        self.expression.substitute(f.coords()).as_ref() == Ok(h)
    }
}

impl fmt::Display for MembershipWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_polynomial_with(&self.expression, &|v| format!("y{}", v + 1)))
    }
}

/// Reusable membership tester for the subalgebra C[F1..Fn]: one graph
/// basis serves any number of queries.
pub struct SubalgebraOracle {
    n: usize,
    gb: GroebnerBasis,
}

impl SubalgebraOracle {
    pub fn new(f: &PolyMap) -> Result<Self, ExtError> {
        Self::with_budget(f, &Budget::default())
    }

    pub fn with_budget(f: &PolyMap, budget: &Budget) -> Result<Self, ExtError> {
        let n = f.nvars();
        let order = MonomialOrder::eliminating((0..n).collect());
        let gb = buchberger_with_budget(&graph_ideal(f), order, budget)?;
        Ok(SubalgebraOracle { n, gb })
    }

    /// h is in C[F] iff its normal form against the graph basis uses only
    /// tag variables; that normal form is the witness.
    pub fn membership(&self, h: &Polynomial) -> Result<Option<MembershipWitness>, ExtError> {
        let embed: Vec<usize> = (0..self.n).collect();
        let nf = self.gb.normal_form(&h.embed(2 * self.n, &embed))?;
        match strip_to_tail_block(&nf, self.n) {
            None => Ok(None),
            Some(expression) => Ok(Some(MembershipWitness { expression })),
        }
    }
}

pub fn subalgebra_membership(h: &Polynomial, f: &PolyMap) -> Result<Option<MembershipWitness>, ExtError> {
    let oracle = SubalgebraOracle::new(f)?;
    let witness = oracle.membership(h)?;
    if let Some(w) = &witness {
        if !w.verify(f, h) {
            return Err(ExtError::Inconsistency(
                "membership witness fails the substitution check".into(),
            ));
        }
    }
    Ok(witness)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootClosure {
    Consistent { power_member: bool, base_member: bool },
    /// g^m lands in C[F] but g does not; must never happen for Keller maps.
    Violation,
}

/// Membership of g^m versus membership of g, without any hypothesis on F.
pub fn root_closure_verdict_any(g: &Polynomial, m: u32, f: &PolyMap) -> Result<RootClosure, ExtError> {
    assert!(m >= 1, "exponent must be positive");
    let oracle = SubalgebraOracle::new(f)?;
    let power_member = oracle.membership(&g.pow(m))?.is_some();
    let base_member = oracle.membership(g)?.is_some();
    if power_member && !base_member {
        Ok(RootClosure::Violation)
    } else {
        Ok(RootClosure::Consistent { power_member, base_member })
    }
}

/// Root-closure consistency check under the Keller hypothesis, where a
/// Violation would contradict the closure of C[F] under roots.
pub fn root_closure_check(g: &Polynomial, m: u32, f: &PolyMap) -> Result<RootClosure, ExtError> {
    if !f.is_keller() {
        return Err(ExtError::NotKeller);
    }
    root_closure_verdict_any(g, m, f)
}

/// The full measurement bundle for one dominant map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionReport {
    /// D = [C(x) : C(F)].
    pub degree: u32,
    /// d_i, the coordinate minimal polynomial degrees.
    pub coordinate_degrees: Vec<u32>,
    pub formanek_ok: bool,
    pub witness: Option<FormanekWitness>,
    /// Which computation path produced each number.
    pub notes: Vec<String>,
}

impl ExtensionReport {
    pub fn compute(f: &PolyMap, seed: u64) -> Result<Self, ExtError> {
        Self::compute_with_budget(f, seed, &Budget::default())
    }

    pub fn compute_with_budget(f: &PolyMap, seed: u64, budget: &Budget) -> Result<Self, ExtError> {
        let n = f.nvars();
        let mut notes = Vec::new();
        let degree = extension_degree_with_budget(f, seed, budget)?;
        notes.push(format!("D={degree} by agreeing specialized fiber counts"));
        let mut coordinate_degrees = Vec::with_capacity(n);
        for i in 0..n {
            let (d, _) = coordinate_minpoly_with_budget(f, i, seed.wrapping_add(1 + i as u64), budget)?;
            notes.push(if symbolic_path_eligible(f) {
                format!("d{}={d} by specialization, symbolic cross-check agreed", i + 1)
            } else {
                format!("d{}={d} by specialization", i + 1)
            });
            coordinate_degrees.push(d);
        }
        let formanek = verify_formanek_with_budget(f, seed.wrapping_add(1 + n as u64), budget)?;
        notes.push(format!(
            "x{n} has degree {} over C(F, x1..x{})",
            formanek.measured_degree,
            n - 1
        ));
        Ok(ExtensionReport {
            degree,
            coordinate_degrees,
            formanek_ok: formanek.ok,
            witness: formanek.witness,
            notes,
        })
    }
}
