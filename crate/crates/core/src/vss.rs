//! `(t, n)` Feldman verifiable secret sharing inside the proxy group.
//!
//! Every proxy signer deals a polynomial `f_i(x) = sum_{l<t} a_il x^l`,
//! publishes `A_il = a_il * P` and privately hands `f_i(j)` to each `P_j`.
//! After checking every subshare, `P_j` holds `r_j = sum_k f_k(j)` and
//! publishes `U_j = r_j * P`.

use std::collections::BTreeMap;

use rand::RngCore;

use crate::arith::{Scalar, ScalarField};
use crate::error::{Error, Result};
use crate::idkgc::SystemParams;
use crate::pairing::Pairing;

/// Checks `1 <= t <= n < q`.
pub fn check_threshold(zq: &ScalarField, t: usize, n: usize) -> Result<()> {
    if t == 0 || t > n {
        return Err(Error::InvalidThreshold { t, n });
    }
    if num_bigint::BigUint::from(n) >= *zq.modulus() {
        return Err(Error::GroupTooLarge { n });
    }
    Ok(())
}

pub(crate) fn check_index(index: usize, n: usize) -> Result<()> {
    if index == 0 || index > n {
        return Err(Error::IndexOutOfRange { index, n });
    }
    Ok(())
}

/// Horner evaluation of `sum coeffs[l] * x^l` over `Z_q`.
pub fn eval_poly(zq: &ScalarField, coeffs: &[Scalar], x: &Scalar) -> Scalar {
    coeffs
        .iter()
        .rev()
        .fold(zq.zero(), |acc, c| zq.add(&zq.mul(&acc, x), c))
}

#[derive(Clone, PartialEq, Eq)]
pub struct DealerPolynomial {
    dealer: usize,
    n: usize,
    coeffs: Vec<Scalar>,
}

impl std::fmt::Debug for DealerPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DealerPolynomial")
            .field("dealer", &self.dealer)
            .field("degree_bound", &self.coeffs.len())
            .finish_non_exhaustive()
    }
}

impl DealerPolynomial {
    pub fn dealer(&self) -> usize {
        self.dealer
    }

    pub fn threshold(&self) -> usize {
        self.coeffs.len()
    }

    pub fn group_size(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// `f(x)` at an arbitrary point, including 0.
    pub fn eval(&self, zq: &ScalarField, x: &Scalar) -> Scalar {
        eval_poly(zq, &self.coeffs, x)
    }

    /// The dealt secret `a_0 = f(0)`.
    pub fn constant(&self) -> &Scalar {
        &self.coeffs[0]
    }
}

/// `A_i0 .. A_i,t-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeldmanCommitments<S: Pairing> {
    pub dealer: usize,
    pub points: Vec<S::G1>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubShare {
    pub dealer: usize,
    pub recipient: usize,
    pub value: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretShare<S: Pairing> {
    pub holder: usize,
    pub r: Scalar,
    pub u: S::G1,
}

pub fn deal<S: Pairing, R: RngCore + ?Sized>(
    params: &SystemParams<S>,
    t: usize,
    n: usize,
    dealer: usize,
    rng: &mut R,
) -> Result<(DealerPolynomial, FeldmanCommitments<S>)> {
    let zq = params.suite.scalars();
    check_threshold(zq, t, n)?;
    let coeffs = (0..t).map(|_| zq.sample_nonzero(rng)).collect();
    deal_with_coefficients(params, n, dealer, coeffs)
}

/// [`deal`] with explicit coefficients `a_0 .. a_{t-1}`.
pub fn deal_with_coefficients<S: Pairing>(
    params: &SystemParams<S>,
    n: usize,
    dealer: usize,
    coeffs: Vec<Scalar>,
) -> Result<(DealerPolynomial, FeldmanCommitments<S>)> {
    let zq = params.suite.scalars();
    check_threshold(zq, coeffs.len(), n)?;
    check_index(dealer, n)?;
    let points = coeffs.iter().map(|a| params.suite.mul_gen(a)).collect();
    Ok((
        DealerPolynomial { dealer, n, coeffs },
        FeldmanCommitments { dealer, points },
    ))
}

/// `f_i(j)` for recipient `j`.
pub fn subshare(zq: &ScalarField, poly: &DealerPolynomial, recipient: usize) -> Result<SubShare> {
    check_index(recipient, poly.n)?;
    Ok(SubShare {
        dealer: poly.dealer,
        recipient,
        value: poly.eval(zq, &zq.from_u64(recipient as u64)),
    })
}

/// `f_i(j) * P == sum_k j^k * A_ik`.
pub fn verify_subshare<S: Pairing>(
    params: &SystemParams<S>,
    share: &SubShare,
    commitments: &FeldmanCommitments<S>,
) -> bool {
    if share.dealer != commitments.dealer || share.recipient == 0 || commitments.points.is_empty() {
        return false;
    }
    let zq = params.suite.scalars();
    let j = zq.from_u64(share.recipient as u64);
    let powers: Vec<Scalar> = (0..commitments.points.len() as u64).map(|k| zq.pow(&j, k)).collect();
    let expected = params.suite.g1_lincomb(powers.iter().zip(&commitments.points));
    params.suite.mul_gen(&share.value) == expected
}

/// `r_i = sum_k f_k(i)` over one subshare from each of the `n` dealers.
pub fn combine_shares<S: Pairing>(
    params: &SystemParams<S>,
    holder: usize,
    n: usize,
    subshares: &[SubShare],
) -> Result<SecretShare<S>> {
    check_index(holder, n)?;
    let mut by_dealer = BTreeMap::new();
    for share in subshares {
        if share.recipient != holder {
            return Err(Error::RecipientMismatch { expected: holder, got: share.recipient });
        }
        check_index(share.dealer, n)?;
        if by_dealer.insert(share.dealer, &share.value).is_some() {
            return Err(Error::DuplicateDealer(share.dealer));
        }
    }
    if let Some(k) = (1..=n).find(|k| !by_dealer.contains_key(k)) {
        return Err(Error::MissingDealer(k));
    }
    let zq = params.suite.scalars();
    let r = zq.sum(by_dealer.values().copied());
    let u = params.suite.mul_gen(&r);
    Ok(SecretShare { holder, r, u })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::idkgc::setup_with_master;
    use crate::pairing::TransparentSuite;
    use crate::rng::derive_rng;
    use proptest::prelude::*;

    fn desk() -> SystemParams<TransparentSuite> {
        let suite = TransparentSuite::desk();
        let s = suite.scalars().from_u64(4);
        setup_with_master(suite, s).unwrap().0
    }

    fn sc(params: &SystemParams<TransparentSuite>, v: &[u64]) -> Vec<Scalar> {
        v.iter().map(|&x| params.suite.scalars().from_u64(x)).collect()
    }

    #[test]
    fn desk_dealing_and_subshares() {
        let params = desk();
        let zq = params.suite.scalars();
        let (poly, comms) = deal_with_coefficients(&params, 5, 1, sc(&params, &[3, 2])).unwrap();
        let dl: Vec<_> = comms.points.iter().map(|a| params.suite.dlog(a)).collect();
        assert_eq!(dl, sc(&params, &[3, 2]));
        assert_eq!(subshare(zq, &poly, 5).unwrap().value, zq.from_u64(2));
        assert_eq!(subshare(zq, &poly, 1).unwrap().value, zq.from_u64(5));
        assert_eq!(poly.eval(zq, &zq.zero()), zq.from_u64(3));
        assert!(subshare(zq, &poly, 0).is_err());
        assert!(subshare(zq, &poly, 6).is_err());
    }

    #[test]
    fn desk_feldman_check() {
        let params = desk();
        let zq = params.suite.scalars();
        let (poly, comms) = deal_with_coefficients(&params, 5, 1, sc(&params, &[3, 2])).unwrap();
        let good = subshare(zq, &poly, 5).unwrap();
        assert!(verify_subshare(&params, &good, &comms));
        let bad = SubShare { value: zq.from_u64(3), ..good.clone() };
        assert!(!verify_subshare(&params, &bad, &comms));
        let wrong_dealer = SubShare { dealer: 2, ..good };
        assert!(!verify_subshare(&params, &wrong_dealer, &comms));
    }

    #[test]
    fn threshold_one_is_constant() {
        let params = desk();
        let zq = params.suite.scalars();
        let (poly, comms) = deal_with_coefficients(&params, 3, 2, sc(&params, &[5])).unwrap();
        for j in 1..=3 {
            let share = subshare(zq, &poly, j).unwrap();
            assert_eq!(share.value, zq.from_u64(5));
            assert!(verify_subshare(&params, &share, &comms));
            let other = SubShare { value: zq.from_u64(6), ..share };
            assert!(!verify_subshare(&params, &other, &comms));
        }
    }

    #[test]
    fn deal_preconditions() {
        let params = desk();
        let mut rng = derive_rng("t", &[]);
        assert_eq!(deal(&params, 3, 2, 1, &mut rng).unwrap_err(), Error::InvalidThreshold { t: 3, n: 2 });
        assert_eq!(deal(&params, 0, 2, 1, &mut rng).unwrap_err(), Error::InvalidThreshold { t: 0, n: 2 });
        assert_eq!(deal(&params, 2, 11, 1, &mut rng).unwrap_err(), Error::GroupTooLarge { n: 11 });
        assert!(deal(&params, 2, 10, 1, &mut rng).is_ok());
        assert_eq!(deal(&params, 2, 3, 4, &mut rng).unwrap_err(), Error::IndexOutOfRange { index: 4, n: 3 });
    }

    #[test]
    fn desk_combination() {
        let params = desk();
        let zq = params.suite.scalars();
        let (f1, _) = deal_with_coefficients(&params, 2, 1, sc(&params, &[3, 2])).unwrap();
        let (f2, _) = deal_with_coefficients(&params, 2, 2, sc(&params, &[1, 4])).unwrap();
        let shares_for = |i| vec![subshare(zq, &f1, i).unwrap(), subshare(zq, &f2, i).unwrap()];
        let s1 = combine_shares(&params, 1, 2, &shares_for(1)).unwrap();
        assert_eq!((s1.r.clone(), params.suite.dlog(&s1.u)), (zq.from_u64(10), zq.from_u64(10)));
        let s2 = combine_shares(&params, 2, 2, &shares_for(2)).unwrap();
        assert_eq!((s2.r.clone(), params.suite.dlog(&s2.u)), (zq.from_u64(5), zq.from_u64(5)));

        assert_eq!(
            combine_shares(&params, 1, 2, &shares_for(1)[..1]).unwrap_err(),
            Error::MissingDealer(2)
        );
        assert_eq!(
            combine_shares(&params, 1, 2, &shares_for(2)).unwrap_err(),
            Error::RecipientMismatch { expected: 1, got: 2 }
        );
        let mut dup = shares_for(1);
        dup[1] = dup[0].clone();
        assert_eq!(combine_shares(&params, 1, 2, &dup).unwrap_err(), Error::DuplicateDealer(1));
    }

    #[test]
    fn single_constant_dealer() {
        let params = desk();
        let zq = params.suite.scalars();
        let (f, _) = deal_with_coefficients(&params, 1, 1, sc(&params, &[5])).unwrap();
        let share = combine_shares(&params, 1, 1, &[subshare(zq, &f, 1).unwrap()]).unwrap();
        assert_eq!(share.r, zq.from_u64(5));
    }

    proptest! {
        #[test]
        fn honest_subshares_verify_and_tampered_ones_do_not(
            seed in any::<u64>(), t in 1usize..5, extra in 0usize..3, delta in 1u64..1000,
        ) {
            let suite = TransparentSuite::large();
            let s = suite.scalars().from_u64(7);
            let params = setup_with_master(suite, s).unwrap().0;
            let zq = params.suite.scalars();
            let n = t + extra;
            let mut rng = derive_rng("prop", &[&seed.to_be_bytes()]);
            let (poly, comms) = deal(&params, t, n, 1, &mut rng).unwrap();
            for j in 1..=n {
                let share = subshare(zq, &poly, j).unwrap();
                prop_assert!(verify_subshare(&params, &share, &comms));
                let bad = SubShare { value: zq.add(&share.value, &zq.from_u64(delta)), ..share };
                prop_assert!(!verify_subshare(&params, &bad, &comms));
            }
        }
    }
}
