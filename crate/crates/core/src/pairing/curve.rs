use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{BackendTag, Pairing, SuiteError, SuiteParams};
use crate::arith::{byte_width, is_probable_prime, next_prime, to_fixed_be, Scalar, ScalarField};

/// Supersingular curve `y^2 = x^3 + x` over `F_p` with a base point of
/// prime order `q`, `q | p + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveParams {
    pub p: BigUint,
    pub q: BigUint,
    pub gx: BigUint,
    pub gy: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CurvePoint {
    Infinity,
    Affine { x: BigUint, y: BigUint },
}

/// `re + im * i` with `i^2 = -1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fp2 {
    pub re: BigUint,
    pub im: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Fp {
    p: BigUint,
}

impl Fp {
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.p {
            s - &self.p
        } else {
            s
        }
    }

    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.p - b + a
        }
    }

    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.p
    }

    fn neg(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            BigUint::zero()
        } else {
            &self.p - a
        }
    }

    fn inv(&self, a: &BigUint) -> BigUint {
        a.modinv(&self.p).expect("inverse of a nonzero element of a prime field")
    }

    fn sqrt(&self, a: &BigUint) -> Option<BigUint> {
        // p = 3 mod 4
        let r = a.modpow(&((&self.p + 1u32) >> 2), &self.p);
        (self.mul(&r, &r) == a % &self.p).then_some(r)
    }

    fn fp2_mul(&self, a: &Fp2, b: &Fp2) -> Fp2 {
        let rr = self.mul(&a.re, &b.re);
        let ii = self.mul(&a.im, &b.im);
        let ri = self.mul(&a.re, &b.im);
        let ir = self.mul(&a.im, &b.re);
        Fp2 { re: self.sub(&rr, &ii), im: self.add(&ri, &ir) }
    }

    fn fp2_square(&self, a: &Fp2) -> Fp2 {
        // (a + bi)^2 = (a + b)(a - b) + 2ab i
        let s = self.add(&a.re, &a.im);
        let d = self.sub(&a.re, &a.im);
        let ab = self.mul(&a.re, &a.im);
        Fp2 { re: self.mul(&s, &d), im: self.add(&ab, &ab) }
    }

    fn fp2_conj(&self, a: &Fp2) -> Fp2 {
        Fp2 { re: a.re.clone(), im: self.neg(&a.im) }
    }

    fn fp2_inv(&self, a: &Fp2) -> Fp2 {
        let norm = self.add(&self.mul(&a.re, &a.re), &self.mul(&a.im, &a.im));
        let n_inv = self.inv(&norm);
        Fp2 { re: self.mul(&a.re, &n_inv), im: self.mul(&self.neg(&a.im), &n_inv) }
    }

    fn fp2_pow(&self, a: &Fp2, e: &BigUint) -> Fp2 {
        let mut acc = Fp2::one();
        for i in (0..e.bits()).rev() {
            acc = self.fp2_square(&acc);
            if e.bit(i) {
                acc = self.fp2_mul(&acc, a);
            }
        }
        acc
    }

    fn on_curve(&self, x: &BigUint, y: &BigUint) -> bool {
        let rhs = self.add(&self.mul(&self.mul(x, x), x), x);
        self.mul(y, y) == rhs
    }

    fn point_add(&self, a: &CurvePoint, b: &CurvePoint) -> CurvePoint {
        match (a, b) {
            (CurvePoint::Infinity, _) => b.clone(),
            (_, CurvePoint::Infinity) => a.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                if x1 == x2 {
                    if self.add(y1, y2).is_zero() {
                        return CurvePoint::Infinity;
                    }
                    return self.point_double(a);
                }
                let lambda = self.mul(&self.sub(y2, y1), &self.inv(&self.sub(x2, x1)));
                self.chord_result(&lambda, x1, y1, x2)
            }
        }
    }

    fn point_double(&self, a: &CurvePoint) -> CurvePoint {
        match a {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                if y.is_zero() {
                    return CurvePoint::Infinity;
                }
                let lambda = self.tangent_slope(x, y);
                self.chord_result(&lambda, x, y, x)
            }
        }
    }

    fn tangent_slope(&self, x: &BigUint, y: &BigUint) -> BigUint {
        let num = self.add(&self.mul(&BigUint::from(3u32), &self.mul(x, x)), &BigUint::one());
        self.mul(&num, &self.inv(&self.add(y, y)))
    }

    fn chord_result(&self, lambda: &BigUint, x1: &BigUint, y1: &BigUint, x2: &BigUint) -> CurvePoint {
        let x3 = self.sub(&self.sub(&self.mul(lambda, lambda), x1), x2);
        let y3 = self.sub(&self.mul(lambda, &self.sub(x1, &x3)), y1);
        CurvePoint::Affine { x: x3, y: y3 }
    }

    fn point_neg(&self, a: &CurvePoint) -> CurvePoint {
        match a {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine { x: x.clone(), y: self.neg(y) },
        }
    }

    fn point_mul(&self, k: &BigUint, a: &CurvePoint) -> CurvePoint {
        let mut acc = CurvePoint::Infinity;
        for i in (0..k.bits()).rev() {
            acc = self.point_double(&acc);
            if k.bit(i) {
                acc = self.point_add(&acc, a);
            }
        }
        acc
    }

    /// Line with slope `lambda` through `(xt, yt)`, evaluated at the
    /// distorted point `(-xb, i*yb)`.
    fn line_at_distorted(&self, lambda: &BigUint, xt: &BigUint, yt: &BigUint, xb: &BigUint, yb: &BigUint) -> Fp2 {
        let re = self.sub(&self.mul(lambda, &self.add(xb, xt)), yt);
        Fp2 { re, im: yb.clone() }
    }

    /// Miller function `f_{q,A}` evaluated at `phi(B)`. Vertical lines take
    /// values in `F_p` at distorted points and vanish under the final
    /// exponentiation, so they are skipped.
    fn miller(&self, q: &BigUint, a: &CurvePoint, b: &CurvePoint) -> Fp2 {
        let (CurvePoint::Affine { x: xa, y: ya }, CurvePoint::Affine { x: xb, y: yb }) = (a, b) else {
            return Fp2::one();
        };
        let mut f = Fp2::one();
        let mut t = a.clone();
        for i in (0..q.bits() - 1).rev() {
            if let CurvePoint::Affine { x: xt, y: yt } = &t {
                if yt.is_zero() {
                    t = CurvePoint::Infinity;
                } else {
                    let lambda = self.tangent_slope(xt, yt);
                    let l = self.line_at_distorted(&lambda, xt, yt, xb, yb);
                    f = self.fp2_mul(&self.fp2_square(&f), &l);
                    t = self.chord_result(&lambda, xt, yt, xt);
                }
            } else {
                f = self.fp2_square(&f);
            }
            if q.bit(i) {
                match &t {
                    CurvePoint::Affine { x: xt, y: yt } if xt == xa => {
                        if self.add(yt, ya).is_zero() {
                            t = CurvePoint::Infinity;
                        } else {
                            let lambda = self.tangent_slope(xt, yt);
                            f = self.fp2_mul(&f, &self.line_at_distorted(&lambda, xt, yt, xb, yb));
                            t = self.chord_result(&lambda, xt, yt, xt);
                        }
                    }
                    CurvePoint::Affine { x: xt, y: yt } => {
                        let lambda = self.mul(&self.sub(ya, yt), &self.inv(&self.sub(xa, xt)));
                        f = self.fp2_mul(&f, &self.line_at_distorted(&lambda, xt, yt, xb, yb));
                        t = self.chord_result(&lambda, xt, yt, xa);
                    }
                    CurvePoint::Infinity => t = a.clone(),
                }
            }
        }
        debug_assert_eq!(t, CurvePoint::Infinity, "base point order is not q");
        f
    }
}

impl Fp2 {
    pub fn one() -> Self {
        Fp2 { re: BigUint::one(), im: BigUint::zero() }
    }
}

/// Reduced Tate pairing with a distortion map on `y^2 = x^3 + x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSuite {
    params: CurveParams,
    fp: Fp,
    zq: ScalarField,
    cofactor: BigUint,
    generator: CurvePoint,
    width: usize,
}

impl CurveSuite {
    pub fn new(params: &CurveParams) -> Result<Self, SuiteError> {
        let CurveParams { p, q, gx, gy } = params;
        if !is_probable_prime(p) {
            return Err(SuiteError::NotPrime("p"));
        }
        if (p % 4u32) != BigUint::from(3u32) {
            return Err(SuiteError::BadCharacteristic);
        }
        if !is_probable_prime(q) || q <= &BigUint::from(3u32) {
            return Err(SuiteError::NotPrime("q"));
        }
        let (cofactor, rem) = (p + 1u32).div_rem(q);
        if !rem.is_zero() {
            return Err(SuiteError::OrderMismatch("p + 1"));
        }
        let fp = Fp { p: p.clone() };
        if gx >= p || gy >= p || !fp.on_curve(gx, gy) {
            return Err(SuiteError::NotOnCurve);
        }
        let generator = CurvePoint::Affine { x: gx.clone(), y: gy.clone() };
        if fp.point_mul(q, &generator) != CurvePoint::Infinity {
            return Err(SuiteError::NotInSubgroup);
        }
        Ok(Self {
            params: params.clone(),
            zq: ScalarField::new(q.clone()),
            cofactor,
            generator,
            width: byte_width(p),
            fp,
        })
    }

    /// 160-bit `q`, 166-bit `p`. Reproduced by [`search_curve_params`]`(159, 400)`.
    pub fn standard() -> Self {
        let n = |s: &str| BigUint::parse_bytes(s.as_bytes(), 10).unwrap();
        Self::new(&CurveParams {
            p: n("58460065493236116728147393308651320786237301742959"),
            q: n("730750818665451459101842416358141509827966271787"),
            gx: n("23143361933009451594555667123421051615430546210285"),
            gy: n("50490905534452627918728162530382284037561950895981"),
        })
        .expect("standard curve parameters are valid")
    }

    pub fn curve_params(&self) -> &CurveParams {
        &self.params
    }

    pub fn cofactor(&self) -> &BigUint {
        &self.cofactor
    }

    pub fn is_on_curve(&self, pt: &CurvePoint) -> bool {
        match pt {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => x < &self.params.p && y < &self.params.p && self.fp.on_curve(x, y),
        }
    }

    /// Validates an externally supplied point.
    pub fn point(&self, x: BigUint, y: BigUint) -> Result<CurvePoint, SuiteError> {
        let pt = CurvePoint::Affine { x, y };
        if !self.is_on_curve(&pt) {
            return Err(SuiteError::NotOnCurve);
        }
        if self.fp.point_mul(&self.params.q, &pt) != CurvePoint::Infinity {
            return Err(SuiteError::NotInSubgroup);
        }
        Ok(pt)
    }

    /// The unreduced Miller value `f_{q,A}(phi(B))`.
    pub fn miller_value(&self, a: &CurvePoint, b: &CurvePoint) -> Fp2 {
        self.fp.miller(&self.params.q, a, b)
    }

    fn final_exponentiation(&self, f: &Fp2) -> Fp2 {
        // f^(p-1) = conj(f) / f because the Frobenius acts as conjugation.
        let easy = self.fp.fp2_mul(&self.fp.fp2_conj(f), &self.fp.fp2_inv(f));
        self.fp.fp2_pow(&easy, &self.cofactor)
    }
}

/// Finds the smallest prime `q >= 2^q_bits` for which some cofactor
/// `c in {4, 8, .., max_cofactor}` makes `p = c*q - 1` prime, then takes as
/// base point `c * (x, y)` for the smallest `x >= 1` with `x^3 + x` a square
/// (`y` the smaller root) and `c * (x, y) != O`.
pub fn search_curve_params(q_bits: u64, max_cofactor: u32) -> CurveParams {
    let mut q = next_prime(&(BigUint::one() << q_bits));
    let (q, p, c) = loop {
        let found = (4..=max_cofactor).step_by(4).find_map(|c| {
            let p: BigUint = &q * c - 1u32;
            is_probable_prime(&p).then_some((p, c))
        });
        if let Some((p, c)) = found {
            break (q, p, c);
        }
        q = next_prime(&(q + 1u32));
    };
    let fp = Fp { p: p.clone() };
    let mut x = BigUint::one();
    loop {
        let rhs = fp.add(&fp.mul(&fp.mul(&x, &x), &x), &x);
        if let Some(y) = fp.sqrt(&rhs) {
            let y = y.clone().min(fp.neg(&y));
            let g = fp.point_mul(&BigUint::from(c), &CurvePoint::Affine { x: x.clone(), y });
            if let CurvePoint::Affine { x: gx, y: gy } = g {
                return CurveParams { p, q, gx, gy };
            }
        }
        x += 1u32;
    }
}

impl Pairing for CurveSuite {
    type G1 = CurvePoint;
    type G2 = Fp2;

    fn backend(&self) -> BackendTag {
        BackendTag::Curve
    }

    fn scalars(&self) -> &ScalarField {
        &self.zq
    }

    fn params(&self) -> SuiteParams {
        SuiteParams::Curve(self.params.clone())
    }

    fn generator(&self) -> CurvePoint {
        self.generator.clone()
    }

    fn g1_identity(&self) -> CurvePoint {
        CurvePoint::Infinity
    }

    fn g1_add(&self, a: &CurvePoint, b: &CurvePoint) -> CurvePoint {
        self.fp.point_add(a, b)
    }

    fn g1_neg(&self, a: &CurvePoint) -> CurvePoint {
        self.fp.point_neg(a)
    }

    fn g1_mul(&self, k: &Scalar, a: &CurvePoint) -> CurvePoint {
        self.fp.point_mul(k.value(), a)
    }

    fn pair(&self, a: &CurvePoint, b: &CurvePoint) -> Fp2 {
        if *a == CurvePoint::Infinity || *b == CurvePoint::Infinity {
            return Fp2::one();
        }
        self.final_exponentiation(&self.miller_value(a, b))
    }

    fn g2_unit(&self) -> Fp2 {
        Fp2::one()
    }

    fn g2_mul(&self, a: &Fp2, b: &Fp2) -> Fp2 {
        self.fp.fp2_mul(a, b)
    }

    fn g2_pow(&self, z: &Fp2, k: &Scalar) -> Fp2 {
        self.fp.fp2_pow(z, k.value())
    }

    /// `x || y`, each `width` bytes; the identity is all zeros, which is
    /// unambiguous because `(0, 0)` has order 2.
    fn g1_to_bytes(&self, a: &CurvePoint) -> Vec<u8> {
        match a {
            CurvePoint::Infinity => vec![0u8; 2 * self.width],
            CurvePoint::Affine { x, y } => {
                let mut out = to_fixed_be(x, self.width);
                out.extend(to_fixed_be(y, self.width));
                out
            }
        }
    }

    fn g1_from_bytes(&self, bytes: &[u8]) -> Result<CurvePoint, SuiteError> {
        if bytes.len() != 2 * self.width {
            return Err(SuiteError::BadLength { expected: 2 * self.width, got: bytes.len() });
        }
        if bytes.iter().all(|&b| b == 0) {
            return Ok(CurvePoint::Infinity);
        }
        let (x, y) = bytes.split_at(self.width);
        self.point(BigUint::from_bytes_be(x), BigUint::from_bytes_be(y))
    }

    fn g2_to_bytes(&self, z: &Fp2) -> Vec<u8> {
        let mut out = to_fixed_be(&z.re, self.width);
        out.extend(to_fixed_be(&z.im, self.width));
        out
    }

    fn g2_from_bytes(&self, bytes: &[u8]) -> Result<Fp2, SuiteError> {
        if bytes.len() != 2 * self.width {
            return Err(SuiteError::BadLength { expected: 2 * self.width, got: bytes.len() });
        }
        let (re, im) = bytes.split_at(self.width);
        let z = Fp2 { re: BigUint::from_bytes_be(re), im: BigUint::from_bytes_be(im) };
        if z.re >= self.params.p || z.im >= self.params.p || (z.re.is_zero() && z.im.is_zero()) {
            return Err(SuiteError::NotInSubgroup);
        }
        if self.fp.fp2_pow(&z, &self.params.q) != Fp2::one() {
            return Err(SuiteError::NotInSubgroup);
        }
        Ok(z)
    }
}
