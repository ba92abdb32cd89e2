use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{BackendTag, Pairing, SuiteError, SuiteParams};
use crate::arith::{byte_width, is_probable_prime, next_prime, to_fixed_be, Scalar, ScalarField};

/// `q` prime, `p` prime with `q | p - 1`, and `g` of order `q` modulo `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransparentParams {
    pub q: BigUint,
    pub p: BigUint,
    pub g: BigUint,
}

/// `G1` element: its own discrete logarithm, in `[0, q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransparentG1(BigUint);

/// `G2` element: a residue modulo `p` in the order-`q` subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransparentG2(BigUint);

impl TransparentG1 {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl TransparentG2 {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

/// Pairing with visible discrete logarithms. Test oracle only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransparentSuite {
    params: TransparentParams,
    zq: ScalarField,
    p_width: usize,
}

impl TransparentSuite {
    pub fn new(params: &TransparentParams) -> Result<Self, SuiteError> {
        let TransparentParams { q, p, g } = params;
        if !is_probable_prime(q) {
            return Err(SuiteError::NotPrime("q"));
        }
        if !is_probable_prime(p) {
            return Err(SuiteError::NotPrime("p"));
        }
        if !((p - 1u32) % q).is_zero() {
            return Err(SuiteError::OrderMismatch("p - 1"));
        }
        let g_red = g % p;
        // q prime, so g has order q iff g != 1 and g^q == 1.
        if g_red.is_one() || g_red.is_zero() {
            return Err(SuiteError::BadGeneratorOrder(if g_red.is_one() { "1" } else { "0" }.into()));
        }
        if !g_red.modpow(q, p).is_one() {
            return Err(SuiteError::BadGeneratorOrder("other than q".into()));
        }
        Ok(Self {
            params: TransparentParams { q: q.clone(), p: p.clone(), g: g_red },
            zq: ScalarField::new(q.clone()),
            p_width: byte_width(p),
        })
    }

    /// Hand-checkable parameters `q = 11, p = 23, g = 2`.
    pub fn desk() -> Self {
        Self::new(&TransparentParams {
            q: 11u32.into(),
            p: 23u32.into(),
            g: 2u32.into(),
        })
        .expect("desk parameters are valid")
    }

    /// Smallest `q >= 2^61` with `2q + 1` prime, `g = 4`. See
    /// [`search_safe_prime_params`].
    pub fn large() -> Self {
        let q = BigUint::from(2_305_843_009_213_697_249u64);
        let p = BigUint::from(4_611_686_018_427_394_499u64);
        Self::new(&TransparentParams { q, p, g: 4u32.into() }).expect("large parameters are valid")
    }

    pub fn transparent_params(&self) -> &TransparentParams {
        &self.params
    }

    /// The discrete log of `a` with respect to `P`.
    pub fn dlog(&self, a: &TransparentG1) -> Scalar {
        self.zq.reduce(&a.0)
    }

    /// Embeds a known discrete log as a `G1` element.
    pub fn from_dlog(&self, k: &Scalar) -> TransparentG1 {
        TransparentG1(k.value().clone())
    }
}

/// Searches for the smallest prime `q >= 2^bits` such that `p = 2q + 1` is
/// also prime. Squares other than 1 generate the order-`q` subgroup, so
/// `g = 4` always works.
pub fn search_safe_prime_params(bits: u64) -> TransparentParams {
    let mut q = next_prime(&(BigUint::one() << bits));
    loop {
        let p: BigUint = &q * 2u32 + 1u32;
        if is_probable_prime(&p) {
            return TransparentParams { q, p, g: 4u32.into() };
        }
        q = next_prime(&(q + 1u32));
    }
}

impl Pairing for TransparentSuite {
    type G1 = TransparentG1;
    type G2 = TransparentG2;

    fn backend(&self) -> BackendTag {
        BackendTag::Transparent
    }

    fn scalars(&self) -> &ScalarField {
        &self.zq
    }

    fn params(&self) -> SuiteParams {
        SuiteParams::Transparent(self.params.clone())
    }

    fn generator(&self) -> TransparentG1 {
        TransparentG1(BigUint::one())
    }

    fn g1_identity(&self) -> TransparentG1 {
        TransparentG1(BigUint::zero())
    }

    fn g1_add(&self, a: &TransparentG1, b: &TransparentG1) -> TransparentG1 {
        TransparentG1((&a.0 + &b.0) % &self.params.q)
    }

    fn g1_neg(&self, a: &TransparentG1) -> TransparentG1 {
        TransparentG1((&self.params.q - &a.0) % &self.params.q)
    }

    fn g1_mul(&self, k: &Scalar, a: &TransparentG1) -> TransparentG1 {
        TransparentG1((k.value() * &a.0) % &self.params.q)
    }

    fn pair(&self, a: &TransparentG1, b: &TransparentG1) -> TransparentG2 {
        let e = (&a.0 * &b.0) % &self.params.q;
        TransparentG2(self.params.g.modpow(&e, &self.params.p))
    }

    fn g2_unit(&self) -> TransparentG2 {
        TransparentG2(BigUint::one())
    }

    fn g2_mul(&self, a: &TransparentG2, b: &TransparentG2) -> TransparentG2 {
        TransparentG2((&a.0 * &b.0) % &self.params.p)
    }

    fn g2_pow(&self, z: &TransparentG2, k: &Scalar) -> TransparentG2 {
        TransparentG2(z.0.modpow(k.value(), &self.params.p))
    }

    fn g1_to_bytes(&self, a: &TransparentG1) -> Vec<u8> {
        to_fixed_be(&a.0, self.zq.byte_width())
    }

    fn g1_from_bytes(&self, bytes: &[u8]) -> Result<TransparentG1, SuiteError> {
        let expected = self.zq.byte_width();
        if bytes.len() != expected {
            return Err(SuiteError::BadLength { expected, got: bytes.len() });
        }
        let v = BigUint::from_bytes_be(bytes);
        if v >= self.params.q {
            return Err(SuiteError::NotInSubgroup);
        }
        Ok(TransparentG1(v))
    }

    fn g2_to_bytes(&self, z: &TransparentG2) -> Vec<u8> {
        to_fixed_be(&z.0, self.p_width)
    }

    fn g2_from_bytes(&self, bytes: &[u8]) -> Result<TransparentG2, SuiteError> {
        if bytes.len() != self.p_width {
            return Err(SuiteError::BadLength { expected: self.p_width, got: bytes.len() });
        }
        let v = BigUint::from_bytes_be(bytes);
        if v.is_zero() || v >= self.params.p || !v.modpow(&self.params.q, &self.params.p).is_one() {
            return Err(SuiteError::NotInSubgroup);
        }
        Ok(TransparentG2(v))
    }
}
