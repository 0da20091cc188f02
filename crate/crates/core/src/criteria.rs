//! Certificate engine. Applies sufficient conditions for invertibility as
//! decision rules, recovers coordinates from quadratic and special cubic
//! annihilators, tests exchange-involution symmetry, decomposes 2D maps
//! with an affine first coordinate, and evaluates the degree and gcd
//! conjecture predicates.

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::endo::{invert_with_budget, EndoError, PolyMap};
use crate::extension::{
    coordinate_minpoly_with_budget, coordinate_relation_coefficients,
    extension_degree_with_budget, restrict_vars, symbolic_coordinate_relation,
    symbolic_path_eligible, verify_formanek_with_budget, ExtError, FormanekReport,
    MembershipWitness, SubalgebraOracle,
};
use crate::groebner::{buchberger_with_budget, Budget, GroebnerError};
use crate::monomial::Monomial;
use crate::order::MonomialOrder;
use crate::poly::Polynomial;
use crate::rational::{gcd_u64, rat, rat_int, Rational};
use crate::root::poly_nth_root;
use crate::unipoly::UniPoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CriteriaError {
    #[error("map is not Keller")]
    NotKeller,
    #[error("first coordinate is not affine of degree 1")]
    NotAffineFirst,
    #[error("annihilator relation does not vanish on the map")]
    RelationDoesNotHold,
    #[error("degenerate annihilator (all coefficients zero)")]
    DegenerateInput,
    #[error("annihilator exponent must be at least 1")]
    ZeroExponent,
    #[error("annihilator coefficients must live in the n-variable tag ring")]
    CoefficientRing,
    #[error("not supported: {0}")]
    NotSupported(String),
    #[error("symbolic path unsupported for this map size")]
    SymbolicUnsupported,
    #[error("soundness failure: rule {rule} certified a map that does not invert")]
    Soundness { rule: CertificateRule },
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
    #[error(transparent)]
    Ext(#[from] ExtError),
    #[error(transparent)]
    Endo(#[from] EndoError),
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
}

fn inconsistent(msg: &str) -> CriteriaError {
    CriteriaError::Inconsistency(msg.to_string())
}

/// Which sufficient condition fired. The serialized names are part of the
/// report format and must stay stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateRule {
    #[serde(rename = "KELLER_BIRATIONAL")]
    KellerBirational,
    #[serde(rename = "WANG_QUADRATIC_DEGREE")]
    WangQuadraticDegree,
    #[serde(rename = "MAGNUS_CLASSICAL_2D")]
    MagnusClassical2d,
    #[serde(rename = "NAKAI_BABA_2D")]
    NakaiBaba2d,
    #[serde(rename = "MINPOLY_QUADRATIC")]
    MinpolyQuadratic,
    #[serde(rename = "MINPOLY_POWER")]
    MinpolyPower,
    #[serde(rename = "MINPOLY_GCD_2D")]
    MinpolyGcd2d,
    #[serde(rename = "MINPOLY_GCD_LE2_2D")]
    MinpolyGcdLe2_2d,
    #[serde(rename = "MINPOLY_SYMMETRIC_PRIME_2D")]
    MinpolySymmetricPrime2d,
    #[serde(rename = "MINPOLY_GCD_N")]
    MinpolyGcdN,
    #[serde(rename = "DEGREE1_COMPONENT")]
    Degree1Component,
    #[serde(rename = "FORMANEK_ADJUNCTION")]
    FormanekAdjunction,
    #[serde(rename = "NONE")]
    None,
}

impl CertificateRule {
    pub fn name(self) -> &'static str {
        match self {
            CertificateRule::KellerBirational => "KELLER_BIRATIONAL",
            CertificateRule::WangQuadraticDegree => "WANG_QUADRATIC_DEGREE",
            CertificateRule::MagnusClassical2d => "MAGNUS_CLASSICAL_2D",
            CertificateRule::NakaiBaba2d => "NAKAI_BABA_2D",
            CertificateRule::MinpolyQuadratic => "MINPOLY_QUADRATIC",
            CertificateRule::MinpolyPower => "MINPOLY_POWER",
            CertificateRule::MinpolyGcd2d => "MINPOLY_GCD_2D",
            CertificateRule::MinpolyGcdLe2_2d => "MINPOLY_GCD_LE2_2D",
            CertificateRule::MinpolySymmetricPrime2d => "MINPOLY_SYMMETRIC_PRIME_2D",
            CertificateRule::MinpolyGcdN => "MINPOLY_GCD_N",
            CertificateRule::Degree1Component => "DEGREE1_COMPONENT",
            CertificateRule::FormanekAdjunction => "FORMANEK_ADJUNCTION",
            CertificateRule::None => "NONE",
        }
    }

    pub const ALL: [CertificateRule; 13] = [
        CertificateRule::KellerBirational,
        CertificateRule::WangQuadraticDegree,
        CertificateRule::MagnusClassical2d,
        CertificateRule::NakaiBaba2d,
        CertificateRule::MinpolyQuadratic,
        CertificateRule::MinpolyPower,
        CertificateRule::MinpolyGcd2d,
        CertificateRule::MinpolyGcdLe2_2d,
        CertificateRule::MinpolySymmetricPrime2d,
        CertificateRule::MinpolyGcdN,
        CertificateRule::Degree1Component,
        CertificateRule::FormanekAdjunction,
        CertificateRule::None,
    ];
}

impl fmt::Display for CertificateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub rule: CertificateRule,
    /// Rule-specific details: degrees, gcds, recovered coordinates.
    pub evidence: BTreeMap<String, String>,
    pub verified_by_inversion: bool,
}

/// Shared measurement cache for one map: the inverse, the extension degree
/// D, the minimal polynomial degrees d_i, and the linearity check of x_n
/// over C(F, x_1..x_{n-1}) are each computed at most once. Sub-seeds
/// follow the same derivation the extension report uses, so rerunning a
/// single measurement with the recorded seed reproduces it.
pub struct MapAnalysis {
    map: PolyMap,
    seed: u64,
    budget: Budget,
    inverse: OnceCell<Result<Option<PolyMap>, EndoError>>,
    degree: OnceCell<Result<u32, ExtError>>,
    minpoly_degrees: OnceCell<Result<Vec<u32>, ExtError>>,
    formanek: OnceCell<Result<FormanekReport, ExtError>>,
}

impl MapAnalysis {
    pub fn new(map: PolyMap, seed: u64) -> Self {
        Self::with_budget(map, seed, Budget::default())
    }

    pub fn with_budget(map: PolyMap, seed: u64, budget: Budget) -> Self {
        MapAnalysis {
            map,
            seed,
            budget,
            inverse: OnceCell::new(),
            degree: OnceCell::new(),
            minpoly_degrees: OnceCell::new(),
            formanek: OnceCell::new(),
        }
    }

    pub fn map(&self) -> &PolyMap {
        &self.map
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn inverse(&self) -> Result<Option<PolyMap>, CriteriaError> {
        self.inverse
            .get_or_init(|| invert_with_budget(&self.map, &self.budget))
            .clone()
            .map_err(Into::into)
    }

    pub fn extension_degree(&self) -> Result<u32, CriteriaError> {
        self.degree
            .get_or_init(|| extension_degree_with_budget(&self.map, self.seed, &self.budget))
            .clone()
            .map_err(Into::into)
    }

    pub fn minpoly_degrees(&self) -> Result<Vec<u32>, CriteriaError> {
        self.minpoly_degrees
            .get_or_init(|| {
                (0..self.map.nvars())
                    .map(|i| {
                        let sub = self.seed.wrapping_add(1 + i as u64);
                        coordinate_minpoly_with_budget(&self.map, i, sub, &self.budget)
                            .map(|(d, _)| d)
                    })
                    .collect()
            })
            .clone()
            .map_err(Into::into)
    }

    pub fn formanek(&self) -> Result<FormanekReport, CriteriaError> {
        let sub = self.seed.wrapping_add(1 + self.map.nvars() as u64);
        self.formanek
            .get_or_init(|| verify_formanek_with_budget(&self.map, sub, &self.budget))
            .clone()
            .map_err(Into::into)
    }

    /// Tries the rules in a fixed order and returns the first that fires.
    /// Cheap degree conditions come first, then the extension degree, then
    /// the minimal polynomial conditions. Every non-NONE certificate is
    /// cross-checked against an actual inverse; a certified map that does
    /// not invert is a hard soundness error, never a certificate.
    pub fn classify(&self) -> Result<Certificate, CriteriaError> {
        if !self.map.is_keller() {
            return Err(CriteriaError::NotKeller);
        }
        let n = self.map.nvars();
        let degs = self.map.degrees();
        let mut evidence = BTreeMap::new();
        evidence.insert("coordinate_degrees".to_string(), join_list(&degs));

        let rule = 'rule: {
            if degs.iter().all(|&l| l <= 2) {
                break 'rule Some(CertificateRule::WangQuadraticDegree);
            }
            if n == 2 {
                if let Some(j) = degs.iter().position(|&l| l == 1) {
                    evidence.insert("affine_component".to_string(), (j + 1).to_string());
                    if degs[0] == 1 {
                        let (_, c) = cmw_decompose_2d(&self.map)?;
                        evidence.insert("cmw_coefficients".to_string(), join_list(&c));
                    }
                    break 'rule Some(CertificateRule::Degree1Component);
                }
                let g = gcd_u64(degs[0] as u64, degs[1] as u64);
                evidence.insert("degree_gcd".to_string(), g.to_string());
                if g == 1 {
                    break 'rule Some(CertificateRule::MagnusClassical2d);
                }
                if g == 2 {
                    break 'rule Some(CertificateRule::NakaiBaba2d);
                }
            }
            let big_d = self.extension_degree()?;
            evidence.insert("extension_degree".to_string(), big_d.to_string());
            if big_d == 1 {
                break 'rule Some(CertificateRule::KellerBirational);
            }
            let d = self.minpoly_degrees()?;
            evidence.insert("minpoly_degrees".to_string(), join_list(&d));
            if d.iter().filter(|&&di| di <= 2).count() >= n - 1 {
                break 'rule Some(CertificateRule::MinpolyQuadratic);
            }
            if n == 2 {
                let g = gcd_u64(d[0] as u64, d[1] as u64);
                evidence.insert("minpoly_gcd".to_string(), g.to_string());
                if g == 1 {
                    assert_all_ones(&d)?;
                    break 'rule Some(CertificateRule::MinpolyGcd2d);
                }
                if g == 2 {
                    break 'rule Some(CertificateRule::MinpolyGcdLe2_2d);
                }
                if symbolic_path_eligible(&self.map) {
                    let report = check_exchange_symmetry(&self.map)?;
                    if report.relation_degree() != d[0] {
                        return Err(CriteriaError::Inconsistency(format!(
                            "symbolic relation degree {} disagrees with measured d_1 = {}",
                            report.relation_degree(),
                            d[0]
                        )));
                    }
                    if report.uniformly_signed()
                        && report.conjugate_containment
                        && (is_prime(d[0]) || is_prime(d[1]))
                    {
                        evidence.insert("symmetry".to_string(), report.uniform_label().to_string());
                        let p = if is_prime(d[0]) { d[0] } else { d[1] };
                        evidence.insert("prime_degree".to_string(), p.to_string());
                        break 'rule Some(CertificateRule::MinpolySymmetricPrime2d);
                    }
                }
            }
            if all_pairwise_coprime(&d) {
                evidence.insert("pairwise_gcds".to_string(), join_list(&pairwise_gcds_of(&d)));
                assert_all_ones(&d)?;
                break 'rule Some(CertificateRule::MinpolyGcdN);
            }
            // Last resort: membership of the first n-1 coordinates means
            // adjoining x_n alone already yields the whole ring, and one
            // adjoined generator suffices for invertibility.
            let oracle = SubalgebraOracle::with_budget(&self.map, &self.budget)?;
            let mut parts = Vec::new();
            let mut all = true;
            for j in 0..n - 1 {
                match oracle.membership(&Polynomial::var(n, j))? {
                    Some(w) => parts.push(format!("x{} = {}", j + 1, w)),
                    None => {
                        all = false;
                        break;
                    }
                }
            }
            if all {
                evidence.insert("recovered".to_string(), parts.join("; "));
                break 'rule Some(CertificateRule::FormanekAdjunction);
            }
            None
        };

        finish_certificate(self, rule, evidence)
    }

    /// The gcd family of minimal polynomial rules alone, with the
    /// proof-mandated degree assertions.
    pub fn minpoly_gcd_certificate(&self) -> Result<Certificate, CriteriaError> {
        if !self.map.is_keller() {
            return Err(CriteriaError::NotKeller);
        }
        let n = self.map.nvars();
        let d = self.minpoly_degrees()?;
        let mut evidence = BTreeMap::new();
        evidence.insert("minpoly_degrees".to_string(), join_list(&d));
        let rule = if n == 2 {
            // two-variable Keller maps pin d_1 = d_2 (both coordinates
            // generate the same extension)
            if d[0] != d[1] {
                return Err(CriteriaError::Inconsistency(format!(
                    "two-variable Keller maps must have d_1 = d_2, measured {},{}",
                    d[0], d[1]
                )));
            }
            let g = gcd_u64(d[0] as u64, d[1] as u64);
            evidence.insert("minpoly_gcd".to_string(), g.to_string());
            if g == 1 {
                assert_all_ones(&d)?;
                Some(CertificateRule::MinpolyGcd2d)
            } else if g == 2 {
                Some(CertificateRule::MinpolyGcdLe2_2d)
            } else {
                None
            }
        } else if all_pairwise_coprime(&d) {
            evidence.insert("pairwise_gcds".to_string(), join_list(&pairwise_gcds_of(&d)));
            assert_all_ones(&d)?;
            Some(CertificateRule::MinpolyGcdN)
        } else {
            None
        };
        finish_certificate(self, rule, evidence)
    }

    /// Annihilator route: quadratic recoveries (or power recoveries when
    /// some exponent exceeds 1) for n-1 distinct coordinates certify the
    /// map. Incomplete coverage falls through to NONE.
    pub fn certify_annihilators(
        &self,
        inputs: &[AnnihilatorInput],
    ) -> Result<Certificate, CriteriaError> {
        if !self.map.is_keller() {
            return Err(CriteriaError::NotKeller);
        }
        let n = self.map.nvars();
        let mut recovered: BTreeMap<usize, Recovery> = BTreeMap::new();
        let mut power_used = false;
        for inp in inputs {
            if recovered.contains_key(&inp.j) {
                continue;
            }
            if let Some(rec) = recover_coordinate_quadratic(&self.map, inp)? {
                if rec.coordinate.is_some() {
                    power_used |= inp.m > 1;
                    recovered.insert(inp.j, rec);
                }
            }
        }
        let mut evidence = BTreeMap::new();
        let parts: Vec<String> = recovered
            .iter()
            .map(|(j, r)| {
                let w = r.coordinate.as_ref().expect("kept recoveries are complete");
                format!("x{} = {}", j + 1, w)
            })
            .collect();
        evidence.insert("recovered".to_string(), parts.join("; "));
        let rule = (recovered.len() >= n - 1).then(|| {
            if power_used {
                CertificateRule::MinpolyPower
            } else {
                CertificateRule::MinpolyQuadratic
            }
        });
        finish_certificate(self, rule, evidence)
    }
}

pub fn classify(f: &PolyMap, seed: u64) -> Result<Certificate, CriteriaError> {
    MapAnalysis::new(f.clone(), seed).classify()
}

pub fn minpoly_gcd_criterion(f: &PolyMap, seed: u64) -> Result<Certificate, CriteriaError> {
    MapAnalysis::new(f.clone(), seed).minpoly_gcd_certificate()
}

pub fn certify_from_annihilators(
    f: &PolyMap,
    inputs: &[AnnihilatorInput],
    seed: u64,
) -> Result<Certificate, CriteriaError> {
    MapAnalysis::new(f.clone(), seed).certify_annihilators(inputs)
}

fn finish_certificate(
    analysis: &MapAnalysis,
    rule: Option<CertificateRule>,
    mut evidence: BTreeMap<String, String>,
) -> Result<Certificate, CriteriaError> {
    match rule {
        Some(rule) => {
            if analysis.inverse()?.is_none() {
                return Err(CriteriaError::Soundness { rule });
            }
            Ok(Certificate { rule, evidence, verified_by_inversion: true })
        }
        Option::None => {
            let inverted = analysis.inverse()?.is_some();
            evidence.insert(
                "inversion".to_string(),
                if inverted { "succeeded" } else { "failed" }.to_string(),
            );
            Ok(Certificate {
                rule: CertificateRule::None,
                evidence,
                verified_by_inversion: inverted,
            })
        }
    }
}

fn join_list<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn is_prime(d: u32) -> bool {
    if d < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= d {
        if d % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

fn pairwise_gcds_of(d: &[u32]) -> Vec<u64> {
    let mut out = Vec::new();
    for u in 0..d.len() {
        for v in u + 1..d.len() {
            out.push(gcd_u64(d[u] as u64, d[v] as u64));
        }
    }
    out
}

fn all_pairwise_coprime(d: &[u32]) -> bool {
    pairwise_gcds_of(d).iter().all(|&g| g == 1)
}

fn assert_all_ones(d: &[u32]) -> Result<(), CriteriaError> {
    if d.iter().any(|&x| x != 1) {
        return Err(CriteriaError::Inconsistency(format!(
            "coprime minpoly degrees force every d_i = 1, measured {}",
            join_list(d)
        )));
    }
    Ok(())
}

/// A quadratic (or special cubic) relation annihilating x_j^m, with
/// coefficients in the tag ring: variable k of each coefficient stands
/// for F_{k+1}, the presentation membership witnesses use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnihilatorInput {
    pub j: usize,
    pub m: u32,
    pub a: Polynomial,
    pub b: Polynomial,
    pub c: Polynomial,
    /// Constant term of the cubic variant; treated as zero when absent.
    pub d: Option<Polynomial>,
}

/// Witness chain produced by a successful recovery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recovery {
    /// x_j^m written over the tags.
    pub power: MembershipWitness,
    /// x_j itself, through root closure; absent only off the Keller
    /// hypothesis.
    pub coordinate: Option<MembershipWitness>,
}

fn realize(p: &Polynomial, f: &PolyMap) -> Result<Polynomial, CriteriaError> {
    if p.nvars() != f.nvars() {
        return Err(CriteriaError::CoefficientRing);
    }
    p.substitute(f.coords()).map_err(|_| CriteriaError::CoefficientRing)
}

fn membership_chain(
    f: &PolyMap,
    j: usize,
    m: u32,
    power: &Polynomial,
) -> Result<Option<Recovery>, CriteriaError> {
    let oracle = SubalgebraOracle::new(f)?;
    let Some(pw) = oracle.membership(power)? else {
        return Ok(None);
    };
    let coordinate = if m == 1 {
        Some(pw.clone())
    } else {
        oracle.membership(&Polynomial::var(f.nvars(), j))?
    };
    Ok(Some(Recovery { power: pw, coordinate }))
}

/// Completing the square: from a (x_j^m)^2 + b x_j^m + c = 0 the shifted
/// element a x_j^m + b/2 squares into the subalgebra, so root closure and
/// the fraction field intersection pull x_j^m (and then x_j) into C[F].
/// The relation is verified before anything else; the map itself is not
/// required to be Keller, membership simply fails off hypothesis.
pub fn recover_coordinate_quadratic(
    f: &PolyMap,
    inp: &AnnihilatorInput,
) -> Result<Option<Recovery>, CriteriaError> {
    let n = f.nvars();
    assert!(inp.j < n, "coordinate index out of range");
    if inp.m == 0 {
        return Err(CriteriaError::ZeroExponent);
    }
    let a = realize(&inp.a, f)?;
    let b = realize(&inp.b, f)?;
    let c = realize(&inp.c, f)?;
    if a.is_zero() && b.is_zero() && c.is_zero() {
        return Err(CriteriaError::DegenerateInput);
    }
    let t = Polynomial::var(n, inp.j).pow(inp.m);
    let relation = &(&(&a * &(&t * &t)) + &(&b * &t)) + &c;
    if !relation.is_zero() {
        return Err(CriteriaError::RelationDoesNotHold);
    }
    let solved = if a.is_zero() {
        // degree-1 relation: x_j^m = -c/b
        c.scale(&rat_int(-1))
            .div_exact(&b)
            .ok_or_else(|| inconsistent("linear annihilator does not divide"))?
    } else {
        let half_b = b.scale(&rat(1, 2));
        let s = &(&half_b * &half_b) - &(&a * &c);
        let Some(root) = poly_nth_root(&s, 2) else {
            return Ok(None);
        };
        let u = &(&a * &t) + &half_b;
        let signed = if u == root {
            root
        } else if u == root.scale(&rat_int(-1)) {
            root.scale(&rat_int(-1))
        } else {
            return Err(inconsistent("completed square root does not match"));
        };
        (&signed - &half_b)
            .div_exact(&a)
            .ok_or_else(|| inconsistent("quadratic annihilator does not divide"))?
    };
    if solved != t {
        return Err(inconsistent("solved power differs from x_j^m"));
    }
    membership_chain(f, inp.j, inp.m, &t)
}

/// The cubic case with b^2 = 3ac exactly: then (a x_j^m + b/3)^3 lands in
/// the subalgebra and the quadratic argument repeats. A nonzero
/// epsilon = ac - b^2/3 is the open general cubic and is rejected.
pub fn recover_coordinate_cubic_special(
    f: &PolyMap,
    inp: &AnnihilatorInput,
) -> Result<Option<Recovery>, CriteriaError> {
    let n = f.nvars();
    assert!(inp.j < n, "coordinate index out of range");
    if inp.m == 0 {
        return Err(CriteriaError::ZeroExponent);
    }
    let a = realize(&inp.a, f)?;
    if a.is_zero() {
        // leading coefficient zero: this is the quadratic case
        let lowered = AnnihilatorInput {
            j: inp.j,
            m: inp.m,
            a: inp.b.clone(),
            b: inp.c.clone(),
            c: inp.d.clone().unwrap_or_else(|| Polynomial::zero(n)),
            d: Option::None,
        };
        return recover_coordinate_quadratic(f, &lowered);
    }
    let b = realize(&inp.b, f)?;
    let c = realize(&inp.c, f)?;
    let d = match &inp.d {
        Some(p) => realize(p, f)?,
        Option::None => Polynomial::zero(n),
    };
    let t = Polynomial::var(n, inp.j).pow(inp.m);
    let relation =
        &(&(&(&a * &t.pow(3)) + &(&b * &(&t * &t))) + &(&c * &t)) + &d;
    if !relation.is_zero() {
        return Err(CriteriaError::RelationDoesNotHold);
    }
    let third_b = b.scale(&rat(1, 3));
    let eps = &(&a * &c) - &(&third_b * &b);
    if !eps.is_zero() {
        return Err(CriteriaError::NotSupported(
            "general cubic annihilator (nonzero epsilon): open case".to_string(),
        ));
    }
    let s = &b.pow(3).scale(&rat(1, 27)) - &(&(&a * &a) * &d);
    let Some(root) = poly_nth_root(&s, 3) else {
        return Ok(None);
    };
    let u = &(&a * &t) + &third_b;
    if u != root {
        return Err(inconsistent("completed cube root does not match"));
    }
    let solved = (&root - &third_b)
        .div_exact(&a)
        .ok_or_else(|| inconsistent("cubic annihilator does not divide"))?;
    if solved != t {
        return Err(inconsistent("solved power differs from x_j^m"));
    }
    membership_chain(f, inp.j, inp.m, &t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryTag {
    Symmetric,
    Skew,
    Neither,
}

impl fmt::Display for SymmetryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryTag::Symmetric => "symmetric",
            SymmetryTag::Skew => "skew",
            SymmetryTag::Neither => "neither",
        })
    }
}

/// How a two-variable polynomial transforms under the exchange involution
/// x1 <-> x2. Zero counts as symmetric.
pub fn exchange_tag(p: &Polynomial) -> SymmetryTag {
    assert_eq!(p.nvars(), 2, "exchange involution lives on two variables");
    let swapped = p.permute_variables(&[1, 0]).expect("swap is a permutation");
    if swapped == *p {
        SymmetryTag::Symmetric
    } else if swapped == p.scale(&rat_int(-1)) {
        SymmetryTag::Skew
    } else {
        SymmetryTag::Neither
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeReport {
    /// Minimal polynomial coefficients c_k materialized as polynomials in
    /// x, ascending in powers of x_1.
    pub coefficients: Vec<Polynomial>,
    pub tags: Vec<SymmetryTag>,
    /// Whether sum c_k(x) x_2^k vanishes, making x_2 a root of the same
    /// relation as x_1.
    pub conjugate_containment: bool,
}

impl ExchangeReport {
    pub fn relation_degree(&self) -> u32 {
        (self.coefficients.len() - 1) as u32
    }

    fn all_symmetric(&self) -> bool {
        self.tags.iter().all(|t| *t == SymmetryTag::Symmetric)
    }

    fn all_skew(&self) -> bool {
        self.tags
            .iter()
            .zip(&self.coefficients)
            .all(|(t, c)| *t == SymmetryTag::Skew || c.is_zero())
    }

    /// All coefficients transform with one uniform sign.
    pub fn uniformly_signed(&self) -> bool {
        self.all_symmetric() || self.all_skew()
    }

    pub fn uniform_label(&self) -> &'static str {
        if self.all_symmetric() {
            "symmetric"
        } else {
            "skew"
        }
    }
}

/// Tags each coefficient of the minimal polynomial of x_1 over C[F] under
/// the exchange involution and tests conjugate containment. Uses the
/// symbolic relation, so the map must fit the symbolic size budget.
pub fn check_exchange_symmetry(f: &PolyMap) -> Result<ExchangeReport, CriteriaError> {
    assert_eq!(f.nvars(), 2, "exchange symmetry is a two-variable notion");
    if !f.is_dominant() {
        return Err(CriteriaError::Ext(ExtError::NotDominant));
    }
    if !symbolic_path_eligible(f) {
        return Err(CriteriaError::SymbolicUnsupported);
    }
    let relation = symbolic_coordinate_relation(f, 0)?;
    let coefficients: Vec<Polynomial> = coordinate_relation_coefficients(&relation)
        .iter()
        .map(|ck| ck.substitute(f.coords()).expect("tag count matches coordinates"))
        .collect();
    let tags: Vec<SymmetryTag> = coefficients.iter().map(exchange_tag).collect();
    let x2 = Polynomial::var(2, 1);
    let mut sum = Polynomial::zero(2);
    for (k, ck) in coefficients.iter().enumerate() {
        sum = &sum + &(ck * &x2.pow(k as u32));
    }
    Ok(ExchangeReport { coefficients, tags, conjugate_containment: sum.is_zero() })
}

/// With an affine first coordinate, the map factors through the affine
/// automorphism g = (F_1, complement) sharing its Jacobian determinant:
/// F_2 = g_2 + sum c_i F_1^i with constant c_i, because F_2 - g_2 has a
/// vanishing Jacobian against F_1. Returns g and the ascending c_i.
pub fn cmw_decompose_2d(f: &PolyMap) -> Result<(PolyMap, Vec<Rational>), CriteriaError> {
    assert_eq!(f.nvars(), 2, "decomposition is specific to two variables");
    if !f.is_keller() {
        return Err(CriteriaError::NotKeller);
    }
    let f1 = f.coord(0);
    if f1.total_degree() != 1 {
        return Err(CriteriaError::NotAffineFirst);
    }
    let alpha = f1.coefficient(&Monomial::var(2, 0));
    let beta = f1.coefficient(&Monomial::var(2, 1));
    let jac = f.jacobian_det().constant_value().expect("keller determinant is a constant");
    // complement line with alpha*delta - beta*gamma equal to the Jacobian
    let (gamma, delta) = if !alpha.is_zero() {
        (Rational::zero(), &jac / &alpha)
    } else {
        (-(&jac / &beta), Rational::zero())
    };
    let w = &Polynomial::var(2, 0).scale(&gamma) + &Polynomial::var(2, 1).scale(&delta);
    let g = PolyMap::new(vec![f1.clone(), w.clone()])?;
    let h = f.coord(1) - &w;
    let Some(c) = univariate_in(&h, f1)? else {
        return Err(inconsistent(
            "difference against the affine complement left the subalgebra C[F_1]",
        ));
    };
    let rebuilt = &w + &c.eval_poly(f1);
    if &rebuilt != f.coord(1) {
        return Err(inconsistent("decomposition does not rebuild F_2"));
    }
    Ok((g, c.coeffs().to_vec()))
}

/// h as a univariate polynomial in a, if h lies in C[a]: normal form
/// against the single tagged generator, then a tag-only check.
fn univariate_in(h: &Polynomial, a: &Polynomial) -> Result<Option<UniPoly>, GroebnerError> {
    let n = h.nvars();
    let ring = n + 1;
    let embed: Vec<usize> = (0..n).collect();
    let gen = &Polynomial::var(ring, n) - &a.embed(ring, &embed);
    let order = MonomialOrder::eliminating((0..n).collect());
    let gb = buchberger_with_budget(&[gen], order, &Budget::default())?;
    let nf = gb.normal_form(&h.embed(ring, &embed))?;
    Ok(restrict_vars(&nf, &[n], ring).map(|p| UniPoly::from_univariate(&p)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeConjectureRecord {
    pub n: usize,
    /// d, the minimum coordinate degree.
    pub min_degree: u32,
    /// D, the field extension degree.
    pub extension_degree: u32,
    /// d^(n-1), saturating at u64::MAX.
    pub bound: u64,
    pub holds: bool,
    /// False marks an out-of-hypothesis control run.
    pub keller: bool,
}

pub fn degree_conjecture_check(
    f: &PolyMap,
    seed: u64,
) -> Result<DegreeConjectureRecord, CriteriaError> {
    degree_conjecture_check_with_budget(f, seed, &Budget::default())
}

/// Tests D <= d^(n-1). Runs on any dominant map; non-Keller inputs are
/// permitted as controls and flagged.
pub fn degree_conjecture_check_with_budget(
    f: &PolyMap,
    seed: u64,
    budget: &Budget,
) -> Result<DegreeConjectureRecord, CriteriaError> {
    degree_conjecture_record(&MapAnalysis::with_budget(f.clone(), seed, *budget))
}

/// Same check against a shared analysis, reusing its cached extension
/// degree.
pub fn degree_conjecture_record(
    analysis: &MapAnalysis,
) -> Result<DegreeConjectureRecord, CriteriaError> {
    let extension_degree = analysis.extension_degree()?;
    let f = analysis.map();
    let n = f.nvars();
    let min_degree = f
        .degrees()
        .into_iter()
        .filter(|&l| l > 0)
        .min()
        .expect("dominant map has a nonconstant coordinate") as u32;
    let bound = (min_degree as u64).checked_pow(n as u32 - 1).unwrap_or(u64::MAX);
    Ok(DegreeConjectureRecord {
        n,
        min_degree,
        extension_degree,
        bound,
        holds: (extension_degree as u64) <= bound,
        keller: f.is_keller(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcdConjectureRecord {
    pub degrees: Vec<i64>,
    /// (u, v, gcd) over zero-based index pairs u < v.
    pub pairwise_gcds: Vec<(usize, usize, u64)>,
    pub applicable: bool,
    /// Only meaningful when applicable; inversion is not attempted
    /// otherwise.
    pub automorphism_confirmed: bool,
}

impl GcdConjectureRecord {
    pub fn counterexample_candidate(&self) -> bool {
        self.applicable && !self.automorphism_confirmed
    }
}

pub fn gcd_conjecture_check(f: &PolyMap) -> Result<GcdConjectureRecord, CriteriaError> {
    gcd_conjecture_check_with_budget(f, &Budget::default())
}

/// Applicable when all pairwise gcds of the coordinate degrees are 1; the
/// conjecture then predicts an automorphism, which is cross-checked by
/// actually inverting.
pub fn gcd_conjecture_check_with_budget(
    f: &PolyMap,
    budget: &Budget,
) -> Result<GcdConjectureRecord, CriteriaError> {
    gcd_conjecture_record(&MapAnalysis::with_budget(f.clone(), 0, *budget))
}

/// Same check against a shared analysis, reusing its cached inverse.
pub fn gcd_conjecture_record(
    analysis: &MapAnalysis,
) -> Result<GcdConjectureRecord, CriteriaError> {
    let f = analysis.map();
    if !f.is_keller() {
        return Err(CriteriaError::NotKeller);
    }
    let degrees = f.degrees();
    let mut pairwise_gcds = Vec::new();
    for u in 0..degrees.len() {
        for v in u + 1..degrees.len() {
            pairwise_gcds.push((u, v, gcd_u64(degrees[u] as u64, degrees[v] as u64)));
        }
    }
    let applicable = pairwise_gcds.iter().all(|&(_, _, g)| g == 1);
    let automorphism_confirmed = applicable && analysis.inverse()?.is_some();
    Ok(GcdConjectureRecord { degrees, pairwise_gcds, applicable, automorphism_confirmed })
}
