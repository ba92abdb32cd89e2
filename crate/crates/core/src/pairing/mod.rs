//! Symmetric bilinear pairing suites.
//!
//! Every equation in the scheme is written for a Type-1 pairing
//! `e: G1 x G1 -> G2`, so the [`Pairing`] trait exposes exactly that shape.
//! Two backends implement it:
//!
//! * [`TransparentSuite`]: `G1 = (Z_q, +)` with `P = 1` and
//!   `e(a, b) = g^(ab) mod p`. Discrete logs in `G1` are visible, which makes
//!   it a brute-force oracle for tests. It offers no security whatsoever.
//! * [`CurveSuite`]: the reduced Tate pairing on the supersingular curve
//!   `y^2 = x^3 + x` over `F_p`, `p = 3 mod 4`, made symmetric with the
//!   distortion map `(x, y) -> (-x, i*y)`.

mod curve;
mod transparent;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use thiserror::Error;

use crate::arith::{Scalar, ScalarField};

pub use curve::{search_curve_params, CurveParams, CurvePoint, CurveSuite, Fp2};
pub use transparent::{search_safe_prime_params, TransparentG1, TransparentG2, TransparentParams, TransparentSuite};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuiteError {
    #[error("{0} is not prime")]
    NotPrime(&'static str),
    #[error("group order q does not divide {0}")]
    OrderMismatch(&'static str),
    #[error("generator has order {0} instead of q")]
    BadGeneratorOrder(String),
    #[error("p must be 3 mod 4")]
    BadCharacteristic,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("element is not in the order-q subgroup")]
    NotInSubgroup,
    #[error("encoding has length {got}, expected {expected}")]
    BadLength { expected: usize, got: usize },
    #[error("malformed suite description: {0}")]
    Malformed(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BackendTag {
    Transparent,
    Curve,
}

impl fmt::Display for BackendTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendTag::Transparent => "transparent",
            BackendTag::Curve => "curve",
        })
    }
}

/// A symmetric pairing `e: G1 x G1 -> G2` over groups of prime order `q`.
///
/// Group elements produced by a suite's own operations are always valid.
/// Elements coming from outside must go through `g1_from_bytes` /
/// `g2_from_bytes`, which check subgroup membership; elements of a different
/// parameter set are rejected there.
pub trait Pairing: Clone + PartialEq + Eq + fmt::Debug + Send + Sync + 'static {
    type G1: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;
    type G2: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;

    fn backend(&self) -> BackendTag;
    fn scalars(&self) -> &ScalarField;
    fn params(&self) -> SuiteParams;

    /// The generator `P` of `G1`.
    fn generator(&self) -> Self::G1;
    fn g1_identity(&self) -> Self::G1;
    fn g1_add(&self, a: &Self::G1, b: &Self::G1) -> Self::G1;
    fn g1_neg(&self, a: &Self::G1) -> Self::G1;
    fn g1_mul(&self, k: &Scalar, a: &Self::G1) -> Self::G1;

    fn pair(&self, a: &Self::G1, b: &Self::G1) -> Self::G2;

    fn g2_unit(&self) -> Self::G2;
    fn g2_mul(&self, a: &Self::G2, b: &Self::G2) -> Self::G2;
    fn g2_pow(&self, z: &Self::G2, k: &Scalar) -> Self::G2;

    fn g1_to_bytes(&self, a: &Self::G1) -> Vec<u8>;
    fn g1_from_bytes(&self, bytes: &[u8]) -> Result<Self::G1, SuiteError>;
    fn g2_to_bytes(&self, z: &Self::G2) -> Vec<u8>;
    fn g2_from_bytes(&self, bytes: &[u8]) -> Result<Self::G2, SuiteError>;

    /// `k * P`.
    fn mul_gen(&self, k: &Scalar) -> Self::G1 {
        self.g1_mul(k, &self.generator())
    }

    fn g1_sub(&self, a: &Self::G1, b: &Self::G1) -> Self::G1 {
        self.g1_add(a, &self.g1_neg(b))
    }

    /// `sum c_i * X_i`; the empty sum is the identity.
    fn g1_lincomb<'a, I>(&self, terms: I) -> Self::G1
    where
        I: IntoIterator<Item = (&'a Scalar, &'a Self::G1)>,
    {
        terms.into_iter().fold(self.g1_identity(), |acc, (c, x)| {
            self.g1_add(&acc, &self.g1_mul(c, x))
        })
    }

    /// `prod Z_j ^ c_j`; the empty product is the unit.
    fn gt_prodpow<'a, I>(&self, terms: I) -> Self::G2
    where
        I: IntoIterator<Item = (&'a Self::G2, &'a Scalar)>,
        Self::G2: 'a,
    {
        terms.into_iter().fold(self.g2_unit(), |acc, (z, c)| {
            self.g2_mul(&acc, &self.g2_pow(z, c))
        })
    }

    fn g1_is_identity(&self, a: &Self::G1) -> bool {
        *a == self.g1_identity()
    }
}

/// Textual description of a suite: one `key = value` pair per line, with
/// all numbers in decimal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SuiteParams {
    Transparent(TransparentParams),
    Curve(CurveParams),
}

impl SuiteParams {
    pub fn build(&self) -> Result<AnySuite, SuiteError> {
        Ok(match self {
            SuiteParams::Transparent(p) => AnySuite::Transparent(TransparentSuite::new(p)?),
            SuiteParams::Curve(p) => AnySuite::Curve(CurveSuite::new(p)?),
        })
    }

    pub fn to_text(&self) -> String {
        match self {
            SuiteParams::Transparent(t) => format!(
                "backend = transparent\nq = {}\np = {}\ng = {}\n",
                t.q, t.p, t.g
            ),
            SuiteParams::Curve(c) => format!(
                "backend = curve\np = {}\nq = {}\ngx = {}\ngy = {}\n",
                c.p, c.q, c.gx, c.gy
            ),
        }
    }
}

impl FromStr for SuiteParams {
    type Err = SuiteError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut fields = std::collections::BTreeMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| SuiteError::Malformed(format!("expected key = value, got {line:?}")))?;
            if fields.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(SuiteError::Malformed(format!("duplicate key {}", k.trim())));
            }
        }
        let num = |key: &str| -> Result<BigUint, SuiteError> {
            let raw = fields
                .get(key)
                .ok_or_else(|| SuiteError::Malformed(format!("missing {key}")))?;
            BigUint::parse_bytes(raw.as_bytes(), 10)
                .ok_or_else(|| SuiteError::Malformed(format!("{key} is not a decimal integer")))
        };
        match fields.get("backend").map(String::as_str) {
            Some("transparent") => Ok(SuiteParams::Transparent(TransparentParams {
                q: num("q")?,
                p: num("p")?,
                g: num("g")?,
            })),
            Some("curve") => Ok(SuiteParams::Curve(CurveParams {
                p: num("p")?,
                q: num("q")?,
                gx: num("gx")?,
                gy: num("gy")?,
            })),
            Some(other) => Err(SuiteError::Malformed(format!("unknown backend {other}"))),
            None => Err(SuiteError::Malformed("missing backend".into())),
        }
    }
}

/// A suite whose backend is picked at runtime.
#[derive(Clone, Debug)]
pub enum AnySuite {
    Transparent(TransparentSuite),
    Curve(CurveSuite),
}

impl AnySuite {
    /// Named presets: `transparent` (q = 11), `transparent-large`
    /// (q just above 2^61) and `curve` (160-bit q).
    pub fn preset(name: &str) -> Option<AnySuite> {
        match name {
            "transparent" | "transparent-desk" => Some(AnySuite::Transparent(TransparentSuite::desk())),
            "transparent-large" => Some(AnySuite::Transparent(TransparentSuite::large())),
            "curve" => Some(AnySuite::Curve(CurveSuite::standard())),
            _ => None,
        }
    }

    pub fn params(&self) -> SuiteParams {
        match self {
            AnySuite::Transparent(s) => s.params(),
            AnySuite::Curve(s) => s.params(),
        }
    }
}

/// Runs `$body` with `$s` bound to the concrete suite inside an [`AnySuite`].
#[macro_export]
macro_rules! with_suite {
    ($any:expr, $s:ident => $body:expr) => {
        match $any {
            $crate::pairing::AnySuite::Transparent($s) => $body,
            $crate::pairing::AnySuite::Curve($s) => $body,
        }
    };
}
