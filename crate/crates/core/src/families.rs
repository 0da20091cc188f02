//! Seeded generators for the map families used by the scan corpus.
//!
//! Triangular, affine and composed maps are automorphisms by construction.
//! Druzkowski maps are Keller because the linear part is strictly lower
//! triangular. The Lang-Maslamani and Essen forms have no constructive
//! recipe here, so those generators rejection-sample against is_keller.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::endo::{compose, EndoError, PolyMap};
use crate::matrix::{rational_det, rational_rank};
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::rational::{rat_int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Triangular,
    Affine,
    Composed,
    Druzkowski,
    LangMaslamani,
    EssenForm,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Triangular,
        Family::Affine,
        Family::Composed,
        Family::Druzkowski,
        Family::LangMaslamani,
        Family::EssenForm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Triangular => "triangular",
            Family::Affine => "affine",
            Family::Composed => "composed",
            Family::Druzkowski => "druzkowski",
            Family::LangMaslamani => "lang_maslamani",
            Family::EssenForm => "essen_form",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family {s:?}"))
    }
}

/// Everything that determines a generated map; equal specs give
/// byte-identical maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub seed: u64,
    pub n: usize,
    /// Degree bound for nonlinear parts (ignored by affine).
    pub degree: u32,
    /// Number of factors for the composed family.
    pub factors: usize,
    /// Count of leading linear coordinates in the Essen form.
    pub r: usize,
}

impl GeneratorSpec {
    pub fn new(family: Family, seed: u64, n: usize) -> Self {
        GeneratorSpec { family, seed, n, degree: 2, factors: 2, r: 1 }
    }
}

const REJECTION_BUDGET: usize = 1000;

fn nonzero_int(rng: &mut ChaCha8Rng) -> i64 {
    loop {
        let v = rng.random_range(-5..=5);
        if v != 0 {
            return v;
        }
    }
}

/// Random monomial over the given variables with total degree in [1, bound].
fn random_monomial(rng: &mut ChaCha8Rng, nvars: usize, vars: &[usize], bound: u32) -> Monomial {
    let degree = rng.random_range(1..=bound.max(1));
    let mut exps = vec![0u32; nvars];
    for _ in 0..degree {
        exps[vars[rng.random_range(0..vars.len())]] += 1;
    }
    Monomial::new(exps)
}

/// x_i -> c_i x_i + p_i(x_{i+1}..x_n) with c_i a nonzero constant; the
/// Jacobian matrix is triangular with constant diagonal.
fn triangular(rng: &mut ChaCha8Rng, n: usize, degree: u32) -> PolyMap {
    let coords = (0..n)
        .map(|i| {
            let mut p = Polynomial::var(n, i).scale(&rat_int(nonzero_int(rng)));
            let later: Vec<usize> = (i + 1..n).collect();
            if !later.is_empty() {
                for _ in 0..rng.random_range(1..=2) {
                    let m = random_monomial(rng, n, &later, degree);
                    p = &p + &Polynomial::term(n, m, rat_int(nonzero_int(rng)));
                }
            }
            if rng.random_range(0..4) == 0 {
                p = &p + &Polynomial::constant(n, rat_int(nonzero_int(rng)));
            }
            p
        })
        .collect();
    PolyMap::new(coords).expect("square by construction")
}

fn affine(rng: &mut ChaCha8Rng, n: usize) -> Result<PolyMap, EndoError> {
    for _ in 0..REJECTION_BUDGET {
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
        let coords = rows
            .iter()
            .map(|row| {
                let mut p = Polynomial::constant(n, rat_int(rng.random_range(-5..=5)));
                for (k, &c) in row.iter().enumerate() {
                    if c != 0 {
                        p = &p + &Polynomial::var(n, k).scale(&rat_int(c));
                    }
                }
                p
            })
            .collect();
        return PolyMap::new(coords);
    }
    Err(EndoError::ResampleBudget { budget: REJECTION_BUDGET })
}

fn composed(rng: &mut ChaCha8Rng, n: usize, degree: u32, factors: usize) -> Result<PolyMap, EndoError> {
    let mut acc = PolyMap::identity(n);
    for _ in 0..factors {
        let factor = if rng.random_range(0..2) == 0 {
            triangular(rng, n, degree)
        } else {
            affine(rng, n)?
        };
        acc = compose(&factor, &acc)?;
    }
    Ok(acc)
}

/// F_i = x_i + ((Ax)_i)^3 with A strictly lower triangular, so each cubed
/// linear form only involves earlier variables and the Jacobian is
/// unitriangular.
pub fn druzkowski_from_matrix(a: &[Vec<Rational>]) -> Result<PolyMap, EndoError> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(EndoError::RingMismatch);
    }
    let coords = (0..n)
        .map(|i| {
            let mut linear = Polynomial::zero(n);
            for (j, c) in a[i].iter().enumerate() {
                if !c.is_zero() {
                    linear = &linear + &Polynomial::var(n, j).scale(c);
                }
            }
            &Polynomial::var(n, i) + &linear.pow(3)
        })
        .collect();
    PolyMap::new(coords)
}

fn druzkowski(rng: &mut ChaCha8Rng, n: usize) -> (PolyMap, Vec<Vec<Rational>>) {
    let a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if j < i { rat_int(rng.random_range(-5..=5)) } else { rat_int(0) })
                .collect()
        })
        .collect();
    let map = druzkowski_from_matrix(&a).expect("square by construction");
    (map, a)
}

/// x_i + lambda_i M_i, rejection-sampled until the Jacobian determinant is
/// a nonzero constant.
fn lang_maslamani(rng: &mut ChaCha8Rng, n: usize, degree: u32) -> Result<PolyMap, EndoError> {
    let all: Vec<usize> = (0..n).collect();
    for _ in 0..REJECTION_BUDGET {
        let coords: Vec<Polynomial> = (0..n)
            .map(|i| {
                let m = random_monomial(rng, n, &all, degree);
                &Polynomial::var(n, i) + &Polynomial::term(n, m, rat_int(nonzero_int(rng)))
            })
            .collect();
        let map = PolyMap::new(coords)?;
        if map.is_keller() {
            return Ok(map);
        }
    }
    Err(EndoError::ResampleBudget { budget: REJECTION_BUDGET })
}

/// First r coordinates random linear forms, the rest x_i + lambda_i M_i,
/// rejection-sampled against is_keller.
fn essen_form(rng: &mut ChaCha8Rng, n: usize, r: usize, degree: u32) -> Result<PolyMap, EndoError> {
    assert!(r <= n, "linear block larger than the map");
    let all: Vec<usize> = (0..n).collect();
    for _ in 0..REJECTION_BUDGET {
        let coords: Vec<Polynomial> = (0..n)
            .map(|i| {
                if i < r {
                    let mut p = Polynomial::zero(n);
                    for k in 0..n {
                        let c = rng.random_range(-5..=5);
                        if c != 0 {
                            p = &p + &Polynomial::var(n, k).scale(&rat_int(c));
                        }
                    }
                    p
                } else {
                    let m = random_monomial(rng, n, &all, degree);
                    &Polynomial::var(n, i) + &Polynomial::term(n, m, rat_int(nonzero_int(rng)))
                }
            })
            .collect();
        let Ok(map) = PolyMap::new(coords) else { continue };
        if map.is_keller() {
            return Ok(map);
        }
    }
    Err(EndoError::ResampleBudget { budget: REJECTION_BUDGET })
}

fn format_matrix(a: &[Vec<Rational>]) -> String {
    a.iter()
        .map(|row| row.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn parse_matrix(text: &str) -> Option<Vec<Vec<Rational>>> {
    let rows: Vec<Vec<Rational>> = text
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|c| crate::rational::parse_signed_rational(c.trim()))
                .collect::<Option<Vec<_>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    (!rows.is_empty()).then_some(rows)
}

/// Deterministic map generation: the spec (family, seed, sizes) fully
/// determines the output, and provenance is recorded in the map metadata.
pub fn generate_family(spec: &GeneratorSpec) -> Result<PolyMap, EndoError> {
    assert!(spec.n >= 1, "maps need at least one variable");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut map = match spec.family {
        Family::Triangular => triangular(&mut rng, spec.n, spec.degree),
        Family::Affine => affine(&mut rng, spec.n)?,
        Family::Composed => composed(&mut rng, spec.n, spec.degree, spec.factors)?,
        Family::Druzkowski => {
            let (map, a) = druzkowski(&mut rng, spec.n);
            let mut map = map;
            map.set_metadata("matrix", format_matrix(&a));
            map
        }
        Family::LangMaslamani => lang_maslamani(&mut rng, spec.n, spec.degree)?,
        Family::EssenForm => essen_form(&mut rng, spec.n, spec.r, spec.degree)?,
    };
    map.set_metadata("family", spec.family);
    map.set_metadata("seed", spec.seed);
    map.set_metadata("n", spec.n);
    map.set_metadata("degree", spec.degree);
    if spec.family == Family::Composed {
        map.set_metadata("factors", spec.factors);
    }
    if spec.family == Family::EssenForm {
        map.set_metadata("r", spec.r);
    }
    Ok(map)
}

/// n - rank(A) over Q.
pub fn druzkowski_corank(a: &[Vec<Rational>]) -> Result<usize, EndoError> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(EndoError::RingMismatch);
    }
    Ok(n - rational_rank(a))
}
