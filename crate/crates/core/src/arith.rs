//! Arithmetic modulo a prime: scalars of `Z_q`, primality testing and
//! uniform sampling.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;

/// An element of `Z_q`, always stored reduced modulo the field it came from.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar(BigUint);

impl Scalar {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn into_value(self) -> BigUint {
        self.0
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", self.0)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The prime field `Z_q` scalars live in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarField {
    q: BigUint,
    width: usize,
}

impl ScalarField {
    /// Caller guarantees `q` is prime.
    pub fn new(q: BigUint) -> Self {
        let width = byte_width(&q);
        Self { q, width }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.q
    }

    /// Width in bytes of the canonical scalar encoding.
    pub fn byte_width(&self) -> usize {
        self.width
    }

    pub fn zero(&self) -> Scalar {
        Scalar(BigUint::zero())
    }

    pub fn one(&self) -> Scalar {
        Scalar(BigUint::one())
    }

    pub fn from_u64(&self, v: u64) -> Scalar {
        Scalar(BigUint::from(v) % &self.q)
    }

    pub fn reduce(&self, v: &BigUint) -> Scalar {
        Scalar(v % &self.q)
    }

    /// Accepts only values already in `[0, q)`.
    pub fn try_from_biguint(&self, v: BigUint) -> Option<Scalar> {
        (v < self.q).then_some(Scalar(v))
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar((&a.0 + &b.0) % &self.q)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar((&a.0 + &self.q - &b.0) % &self.q)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        Scalar((&self.q - &a.0) % &self.q)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        Scalar((&a.0 * &b.0) % &self.q)
    }

    pub fn pow(&self, a: &Scalar, e: u64) -> Scalar {
        Scalar(a.0.modpow(&BigUint::from(e), &self.q))
    }

    /// `None` for zero.
    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return None;
        }
        a.0.modinv(&self.q).map(Scalar)
    }

    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a Scalar>) -> Scalar {
        let total = items
            .into_iter()
            .fold(BigUint::zero(), |acc, s| acc + &s.0);
        Scalar(total % &self.q)
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Scalar {
        Scalar(sample_below(rng, &self.q))
    }

    pub fn sample_nonzero<R: RngCore + ?Sized>(&self, rng: &mut R) -> Scalar {
        loop {
            let s = self.sample(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub fn to_bytes(&self, s: &Scalar) -> Vec<u8> {
        to_fixed_be(&s.0, self.width)
    }

    pub fn from_bytes(&self, bytes: &[u8]) -> Option<Scalar> {
        if bytes.len() != self.width {
            return None;
        }
        self.try_from_biguint(BigUint::from_bytes_be(bytes))
    }
}

pub(crate) fn byte_width(m: &BigUint) -> usize {
    (m.bits() as usize).div_ceil(8).max(1)
}

/// Big-endian encoding left-padded to `width` bytes.
pub(crate) fn to_fixed_be(v: &BigUint, width: usize) -> Vec<u8> {
    let raw = v.to_bytes_be();
    debug_assert!(raw.len() <= width || v.is_zero());
    let mut out = vec![0u8; width];
    if !v.is_zero() {
        out[width - raw.len()..].copy_from_slice(&raw);
    }
    out
}

/// Uniform integer in `[0, bound)` by rejection sampling on masked bytes.
pub fn sample_below<R: RngCore + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero(), "empty sampling range");
    let bits = bound.bits();
    let len = (bits as usize).div_ceil(8);
    let excess = (len as u64) * 8 - bits;
    let mut buf = vec![0u8; len];
    loop {
        rng.fill_bytes(&mut buf);
        buf[0] &= 0xffu8 >> excess;
        let candidate = BigUint::from_bytes_be(&buf);
        if &candidate < bound {
            return candidate;
        }
    }
}

const SMALL_PRIMES: [u32; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

/// Miller-Rabin with the first 24 primes as fixed bases.
///
/// Deterministic below 3.3e24 and a strong probable-prime test above that,
/// which is sufficient for parameter validation at the sizes used here.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = BigUint::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_one = n - 1u32;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'witness: for &a in &SMALL_PRIMES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest probable prime `>= start`.
pub fn next_prime(start: &BigUint) -> BigUint {
    let mut c = start.clone();
    if c <= BigUint::from(2u32) {
        return BigUint::from(2u32);
    }
    if c.is_even() {
        c += 1u32;
    }
    while !is_probable_prime(&c) {
        c += 2u32;
    }
    c
}
