//! Shared fixtures for the integration suites, most importantly a fiber
//! counting oracle that never touches the Groebner engine: generic linear
//! change, evaluated Euclidean resultants, Lagrange interpolation and a
//! squarefree root count, all on plain coefficient vectors.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use keller_core::endo::compose;
use keller_core::families::generate_family;
use keller_core::{Family, GeneratorSpec, Monomial, PolyMap, Polynomial, Rational};

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Dense univariate polynomial, ascending coefficients, no trailing zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Uni(Vec<Rational>);

impl Uni {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Uni(coeffs)
    }

    pub fn zero() -> Self {
        Uni(Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn deg(&self) -> i64 {
        self.0.len() as i64 - 1
    }

    pub fn lc(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Uni {
        if c.is_zero() {
            return Uni::zero();
        }
        Uni(self.0.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Uni) -> Uni {
        let mut out = vec![Rational::zero(); self.0.len().max(other.0.len())];
        for (i, a) in self.0.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in other.0.iter().enumerate() {
            out[i] += b;
        }
        Uni::new(out)
    }

    pub fn sub(&self, other: &Uni) -> Uni {
        self.add(&other.scale(&q(-1)))
    }

    pub fn mul(&self, other: &Uni) -> Uni {
        if self.is_zero() || other.is_zero() {
            return Uni::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Uni::new(out)
    }

    /// Remainder of self by a nonzero divisor.
    pub fn rem(&self, div: &Uni) -> Uni {
        assert!(!div.is_zero(), "division by zero polynomial");
        let mut r = self.clone();
        let dlc = div.lc();
        while !r.is_zero() && r.deg() >= div.deg() {
            let shift = (r.deg() - div.deg()) as usize;
            let factor = &r.lc() / &dlc;
            let mut sub = vec![Rational::zero(); shift];
            sub.extend(div.0.iter().map(|c| c * &factor));
            r = r.sub(&Uni::new(sub));
        }
        r
    }

    pub fn derivative(&self) -> Uni {
        if self.0.len() <= 1 {
            return Uni::zero();
        }
        Uni::new(
            self.0[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * &q((i + 1) as i64))
                .collect(),
        )
    }

    pub fn monic(&self) -> Uni {
        if self.is_zero() {
            return Uni::zero();
        }
        let inv = Rational::one() / self.lc();
        self.scale(&inv)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }
}

/// Monic gcd by the plain Euclidean algorithm over Q.
pub fn uni_gcd(a: &Uni, b: &Uni) -> Uni {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    a.monic()
}

/// Number of distinct roots over the algebraic closure: the degree of the
/// squarefree part r / gcd(r, r').
pub fn distinct_root_count(r: &Uni) -> usize {
    assert!(!r.is_zero());
    if r.deg() == 0 {
        return 0;
    }
    (r.deg() - uni_gcd(r, &r.derivative()).deg()) as usize
}

/// res(a, b) with the degree convention given by the actual degrees, via
/// the Euclidean recurrence res(a, b) = (-1)^(mn) lc(b)^(m - deg r) res(b, r).
pub fn resultant(a: &Uni, b: &Uni) -> Rational {
    let (mut a, mut b) = (a.clone(), b.clone());
    if a.is_zero() || b.is_zero() {
        return Rational::zero();
    }
    let mut acc = Rational::one();
    let mut negate = false;
    loop {
        if b.deg() == 0 {
            let out = &acc * &b.lc().pow(a.deg() as i32);
            return if negate { -out } else { out };
        }
        if a.deg() < b.deg() {
            if (a.deg() * b.deg()) % 2 == 1 {
                negate = !negate;
            }
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let r = a.rem(&b);
        if r.is_zero() {
            return Rational::zero();
        }
        if (a.deg() * b.deg()) % 2 == 1 {
            negate = !negate;
        }
        acc = &acc * &b.lc().pow((a.deg() - r.deg()) as i32);
        a = b;
        b = r;
    }
}

/// Exact Lagrange interpolation through distinct sample points.
pub fn interpolate(points: &[(Rational, Rational)]) -> Uni {
    let mut acc = Uni::zero();
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut num = Uni::new(vec![Rational::one()]);
        let mut den = Rational::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            num = num.mul(&Uni::new(vec![-xj, Rational::one()]));
            den = &den * &(xi - xj);
        }
        acc = acc.add(&num.scale(&(yi / &den)));
    }
    acc
}

/// Coefficient vector in x1 of p(x1, tau), read straight off the terms.
pub fn slice_in_x1(p: &Polynomial, tau: &Rational) -> Uni {
    let d = p.degree_in(0).max(0) as usize;
    let mut out = vec![Rational::zero(); d + 1];
    for (m, c) in p.terms() {
        let e = m.exps();
        out[e[0] as usize] += c * &tau.pow(e[1] as i32);
    }
    Uni::new(out)
}

/// Generic fiber cardinality of a dominant map C^2 -> C^2, measured
/// without elimination theory: compose with a random linear automorphism
/// so distinct fiber points get distinct x2 coordinates and the leading
/// x1 coefficients become constants, then interpolate the resultant
/// R(x2) = Res_x1(G1 - t1, G2 - t2) from evaluated Euclidean resultants
/// and count its distinct roots. Special draws only lose solutions, so
/// the maximum over a few draws is the generic count.
pub fn fiber_degree_oracle(f: &PolyMap, seed: u64) -> Option<u32> {
    assert_eq!(f.nvars(), 2, "oracle is specific to the plane");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<u32> = None;
    for _ in 0..4 {
        let m = loop {
            let m: Vec<i64> = (0..4).map(|_| rng.random_range(-6..=6)).collect();
            if m[0] * m[3] - m[1] * m[2] != 0 {
                break m;
            }
        };
        let x1 = Polynomial::var(2, 0);
        let x2 = Polynomial::var(2, 1);
        let lin = PolyMap::new(vec![
            &x1.scale(&q(m[0])) + &x2.scale(&q(m[1])),
            &x1.scale(&q(m[2])) + &x2.scale(&q(m[3])),
        ])
        .expect("square system");
        let g = compose(f, &lin).expect("same ring");
        let t: Vec<Rational> = (0..2).map(|_| q(rng.random_range(-100..=100))).collect();
        let shifted: Vec<Polynomial> = (0..2)
            .map(|i| g.coord(i) - &Polynomial::constant(2, t[i].clone()))
            .collect();
        let d: Vec<i64> = shifted.iter().map(|p| p.degree_in(0)).collect();
        if d[0] < 1 || d[1] < 1 {
            continue;
        }
        // degree bound for R(x2) straight from the Sylvester matrix shape
        let bound = d[1] * shifted[0].total_degree() + d[0] * shifted[1].total_degree();
        let mut points = Vec::new();
        let mut tau_iter = (0..).flat_map(|k: i64| if k == 0 { vec![0] } else { vec![k, -k] });
        while points.len() < (bound + 1) as usize {
            let tau = q(tau_iter.next().expect("unbounded"));
            let u: Vec<Uni> = shifted.iter().map(|p| slice_in_x1(p, &tau)).collect();
            // degree drop at this tau would change the Sylvester convention
            if u[0].deg() != d[0] || u[1].deg() != d[1] {
                continue;
            }
            points.push((tau, resultant(&u[0], &u[1])));
        }
        let r = interpolate(&points);
        if r.is_zero() {
            continue;
        }
        // one fresh sample confirms the interpolation really is R
        loop {
            let tau = q(tau_iter.next().expect("unbounded"));
            let u: Vec<Uni> = shifted.iter().map(|p| slice_in_x1(p, &tau)).collect();
            if u[0].deg() != d[0] || u[1].deg() != d[1] {
                continue;
            }
            assert_eq!(r.eval(&tau), resultant(&u[0], &u[1]), "interpolation degree bound too low");
            break;
        }
        let count = distinct_root_count(&r) as u32;
        if count > 0 && best.map_or(true, |b| count > b) {
            best = Some(count);
        }
    }
    best
}

/// Mixed-family Keller corpus; n cycles through the given sizes.
pub fn keller_corpus(count: usize, sizes: &[usize], base_seed: u64) -> Vec<PolyMap> {
    let families = [
        Family::Triangular,
        Family::Affine,
        Family::Composed,
        Family::Druzkowski,
        Family::LangMaslamani,
        Family::EssenForm,
    ];
    (0..count)
        .map(|i| {
            let mut spec =
                GeneratorSpec::new(families[i % families.len()], base_seed + i as u64, sizes[i % sizes.len()]);
            spec.degree = 2;
            generate_family(&spec).expect("family generator")
        })
        .collect()
}

/// n = 2 corpus restricted to families whose coordinate degrees stay <= 3.
pub fn low_degree_corpus_2d(count: usize, base_seed: u64) -> Vec<PolyMap> {
    let families = [
        Family::Triangular,
        Family::Affine,
        Family::Druzkowski,
        Family::LangMaslamani,
        Family::EssenForm,
    ];
    (0..count)
        .map(|i| {
            let mut spec = GeneratorSpec::new(families[i % families.len()], base_seed + i as u64, 2);
            spec.degree = 3;
            let f = generate_family(&spec).expect("family generator");
            assert!(f.max_degree() <= 3);
            f
        })
        .collect()
}

pub fn power_map(a: u32, b: u32) -> PolyMap {
    PolyMap::new(vec![
        Polynomial::term(2, Monomial::var(2, 0).pow(a), q(1)),
        Polynomial::term(2, Monomial::var(2, 1).pow(b), q(1)),
    ])
    .expect("power map")
}

pub fn parse_map(text: &str) -> PolyMap {
    keller_core::endo::parse_map_str(text).expect("fixture map")
}
