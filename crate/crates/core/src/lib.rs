//! Exact commutative-algebra toolkit for polynomial endomorphisms of
//! Q[x1..xn]: sparse rational polynomials, Groebner bases, field extension
//! degree measurements, Keller map generators and inversion, theorem-backed
//! automorphism certificates, and a reproducible scan harness.

pub mod monomial;
pub mod poly;
pub mod rational;

pub mod matrix;
pub mod root;
pub mod text;

pub mod groebner;
pub mod order;
pub mod unipoly;

pub mod endo;
pub mod extension;
pub mod families;

pub mod criteria;
pub mod scan;

pub use criteria::{Certificate, CertificateRule, CriteriaError, MapAnalysis};
pub use endo::{EndoError, MapFileError, PolyMap};
pub use extension::{ExtError, ExtensionReport};
pub use families::{Family, GeneratorSpec};
pub use groebner::{Budget, GroebnerBasis, GroebnerError, QuotientDim, Staircase};
pub use scan::{ScanConfig, ScanError, ScanOutcome, ScanRecord, ScanSummary};
pub use monomial::Monomial;
pub use order::MonomialOrder;
pub use poly::{PolyError, Polynomial};
pub use rational::Rational;
pub use unipoly::UniPoly;
