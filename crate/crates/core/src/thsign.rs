//! Threshold signing by a quorum `D` of the proxy group.
//!
//! Round one: every signer `i` in `D` sends `(U_i, Y_i)` to the clerk, with
//! `Y_i = e(X*P, S_IDPi)^(r_i)`. The clerk forms
//! `U = sum eta_i U_i`, `Y = prod Y_i^(eta_i)` and `H = H3(m, U, Y)`.
//! Round two: every signer returns `V_i = U_i + H * SK_Pi`, the clerk checks
//! each against the published `C_i` and outputs `V = sum eta_i V_i`.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::arith::{Scalar, ScalarField};
use crate::error::{Error, Result};
use crate::idkgc::SystemParams;
use crate::pairing::Pairing;

/// Distinct party indices in `1..=n`, kept in ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignerSet {
    indices: Vec<usize>,
    n: usize,
}

impl SignerSet {
    pub fn new(indices: &[usize], n: usize) -> Result<Self> {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateIndex(w[0]));
        }
        for &i in &sorted {
            if i == 0 || i > n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
        }
        Ok(SignerSet { indices: sorted, n })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn group_size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// The lowest index, which acts as clerk.
    pub fn clerk(&self) -> Option<usize> {
        self.indices.first().copied()
    }
}

/// `eta_i` for each `i` in `D`.
pub type LagrangeCoeffs = BTreeMap<usize, Scalar>;

/// `eta_i = prod_{j != i} j / (j - i) mod q`.
pub fn lagrange_at_zero(zq: &ScalarField, indices: &[usize]) -> Result<LagrangeCoeffs> {
    let mut xs = BTreeMap::new();
    for &i in indices {
        let x = zq.reduce(&BigUint::from(i));
        if x.is_zero() {
            return Err(Error::ZeroIndex(i));
        }
        if xs.insert(i, x).is_some() {
            return Err(Error::DuplicateIndex(i));
        }
    }
    let mut seen = BTreeMap::new();
    for (&i, x) in &xs {
        if let Some(j) = seen.insert(x.value().clone(), i) {
            return Err(Error::DuplicateIndex(j.max(i)));
        }
    }
    let mut out = BTreeMap::new();
    for (&i, xi) in &xs {
        let (mut num, mut den) = (zq.one(), zq.one());
        for (&j, xj) in &xs {
            if j != i {
                num = zq.mul(&num, xj);
                den = zq.mul(&den, &zq.sub(xj, xi));
            }
        }
        let den_inv = zq.inv(&den).expect("distinct nonzero points");
        out.insert(i, zq.mul(&num, &den_inv));
    }
    Ok(out)
}

/// `X = Q_IDB * Q_IDC mod q`.
pub fn compute_x(zq: &ScalarField, q_b: &Scalar, q_c: &Scalar) -> Result<Scalar> {
    if q_b.is_zero() || q_c.is_zero() {
        return Err(Error::ZeroScalar("verifier public key"));
    }
    Ok(zq.mul(q_b, q_c))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YShare<S: Pairing> {
    pub index: usize,
    pub g_v: S::G2,
    pub y: S::G2,
}

/// `G_Vi = e(X*P, S_IDPi)`, `Y_i = G_Vi^(r_i)`.
pub fn make_y_share<S: Pairing>(
    params: &SystemParams<S>,
    index: usize,
    s_id: &S::G1,
    r_i: &Scalar,
    x: &Scalar,
) -> YShare<S> {
    let suite = &params.suite;
    let g_v = suite.pair(&suite.mul_gen(x), s_id);
    let y = suite.g2_pow(&g_v, r_i);
    YShare { index, g_v, y }
}

/// What signer `i` sends the clerk in round one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundOne<S: Pairing> {
    pub index: usize,
    pub u: S::G1,
    pub y: S::G2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignContext<S: Pairing> {
    pub message: Vec<u8>,
    pub signers: SignerSet,
    pub eta: LagrangeCoeffs,
    pub u_shares: BTreeMap<usize, S::G1>,
    pub u: S::G1,
    pub y: S::G2,
    pub h: Scalar,
}

/// Collects one round-one message per member of `D`, in any order.
pub fn build_context<S: Pairing>(
    params: &SystemParams<S>,
    message: &[u8],
    signers: &SignerSet,
    round_one: &[RoundOne<S>],
) -> Result<SignContext<S>> {
    let suite = &params.suite;
    let eta = lagrange_at_zero(suite.scalars(), signers.indices())?;
    let mut by_index = BTreeMap::new();
    for msg in round_one {
        if !signers.contains(msg.index) {
            return Err(Error::IndexOutOfRange { index: msg.index, n: signers.group_size() });
        }
        if by_index.insert(msg.index, msg).is_some() {
            return Err(Error::DuplicateIndex(msg.index));
        }
    }
    if let Some(&i) = signers.indices().iter().find(|i| !by_index.contains_key(i)) {
        return Err(Error::MissingMember(i));
    }
    let u = suite.g1_lincomb(by_index.iter().map(|(i, m)| (&eta[i], &m.u)));
    let y = suite.gt_prodpow(by_index.iter().map(|(i, m)| (&m.y, &eta[i])));
    let h = params.h3(message, &u, &y);
    let u_shares = by_index.into_iter().map(|(i, m)| (i, m.u.clone())).collect();
    Ok(SignContext { message: message.to_vec(), signers: signers.clone(), eta, u_shares, u, y, h })
}

/// `sigma_i = (U_i, V_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialSignature<S: Pairing> {
    pub index: usize,
    pub u: S::G1,
    pub v: S::G1,
}

/// `V_i = U_i + H * SK_Pi`.
pub fn partial_sign<S: Pairing>(
    params: &SystemParams<S>,
    h: &Scalar,
    index: usize,
    u_i: &S::G1,
    sk: &S::G1,
) -> PartialSignature<S> {
    let suite = &params.suite;
    PartialSignature { index, u: u_i.clone(), v: suite.g1_add(u_i, &suite.g1_mul(h, sk)) }
}

/// `e(P_pub, V_i) == e(P_pub, U_i) * C_i^H`.
pub fn clerk_verify_partial<S: Pairing>(
    params: &SystemParams<S>,
    partial: &PartialSignature<S>,
    c_i: &S::G2,
    h: &Scalar,
) -> bool {
    let suite = &params.suite;
    let lhs = suite.pair(&params.p_pub, &partial.v);
    let rhs = suite.g2_mul(&suite.pair(&params.p_pub, &partial.u), &suite.g2_pow(c_i, h));
    lhs == rhs
}

/// `sigma = (m, V_w, m_w, U, V)` together with `D` and `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregateSignature<S: Pairing> {
    pub message: Vec<u8>,
    pub v_w: S::G1,
    pub warrant: Vec<u8>,
    pub u: S::G1,
    pub v: S::G1,
    pub participants: Vec<usize>,
    pub n: usize,
}

/// Clerk side of round two. Every partial is checked against its published
/// commitment `C_i` and against the `U_i` it sent in round one; the first
/// failing signer, in index order, is named in the error.
pub fn aggregate<S: Pairing>(
    params: &SystemParams<S>,
    ctx: &SignContext<S>,
    warrant: &[u8],
    v_w: &S::G1,
    partials: &[PartialSignature<S>],
    commitments: &BTreeMap<usize, S::G2>,
) -> Result<AggregateSignature<S>> {
    let mut by_index = BTreeMap::new();
    for p in partials {
        if !ctx.signers.contains(p.index) {
            return Err(Error::IndexOutOfRange { index: p.index, n: ctx.signers.group_size() });
        }
        if by_index.insert(p.index, p).is_some() {
            return Err(Error::DuplicateIndex(p.index));
        }
    }
    for &i in ctx.signers.indices() {
        let p = by_index.get(&i).ok_or(Error::MissingMember(i))?;
        let c_i = commitments.get(&i).ok_or(Error::MissingMember(i))?;
        if p.u != ctx.u_shares[&i] || !clerk_verify_partial(params, p, c_i, &ctx.h) {
            return Err(Error::RejectedPartial(i));
        }
    }
    let v = params.suite.g1_lincomb(by_index.iter().map(|(i, p)| (&ctx.eta[i], &p.v)));
    Ok(AggregateSignature {
        message: ctx.message.clone(),
        v_w: v_w.clone(),
        warrant: warrant.to_vec(),
        u: ctx.u.clone(),
        v,
        participants: ctx.signers.indices().to_vec(),
        n: ctx.signers.group_size(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delegation::ProxyKeyShare;
    use crate::idkgc::setup_with_master;
    use crate::pairing::{CurveSuite, TransparentSuite};
    use crate::testkit::honest_run;
    use proptest::prelude::*;

    fn desk() -> SystemParams<TransparentSuite> {
        let suite = TransparentSuite::desk();
        let s = suite.scalars().from_u64(4);
        setup_with_master(suite, s).unwrap().0
    }

    fn etas(zq: &ScalarField, d: &[usize]) -> Vec<u64> {
        lagrange_at_zero(zq, d).unwrap().values().map(|e| e.value().try_into().unwrap()).collect()
    }

    #[test]
    fn desk_lagrange() {
        let zq = ScalarField::new(11u32.into());
        assert_eq!(etas(&zq, &[1, 2]), vec![2, 10]);
        assert_eq!(etas(&zq, &[1, 2, 3]), vec![3, 8, 1]);
        assert_eq!(etas(&zq, &[3, 1, 2]), vec![3, 8, 1]);
        assert_eq!(etas(&zq, &[5]), vec![1]);
        assert_eq!(lagrange_at_zero(&zq, &[1, 1]).unwrap_err(), Error::DuplicateIndex(1));
        assert_eq!(lagrange_at_zero(&zq, &[11]).unwrap_err(), Error::ZeroIndex(11));
        assert_eq!(lagrange_at_zero(&zq, &[1, 12]).unwrap_err(), Error::DuplicateIndex(12));
    }

    #[test]
    fn signer_sets() {
        assert_eq!(SignerSet::new(&[3, 1], 3).unwrap().indices(), &[1, 3]);
        assert_eq!(SignerSet::new(&[3, 1], 3).unwrap().clerk(), Some(1));
        assert_eq!(SignerSet::new(&[2, 2], 3).unwrap_err(), Error::DuplicateIndex(2));
        assert_eq!(SignerSet::new(&[0], 3).unwrap_err(), Error::IndexOutOfRange { index: 0, n: 3 });
        assert_eq!(SignerSet::new(&[4], 3).unwrap_err(), Error::IndexOutOfRange { index: 4, n: 3 });
    }

    #[test]
    fn desk_verifier_binding() {
        let zq = ScalarField::new(11u32.into());
        let x = compute_x(&zq, &zq.from_u64(3), &zq.from_u64(5)).unwrap();
        assert_eq!(x, zq.from_u64(4));
        assert_eq!(compute_x(&zq, &zq.from_u64(5), &zq.from_u64(3)).unwrap(), x);
        assert_eq!(compute_x(&zq, &zq.one(), &zq.from_u64(9)).unwrap(), zq.from_u64(9));
        assert!(compute_x(&zq, &zq.zero(), &zq.from_u64(3)).is_err());
    }

    #[test]
    fn desk_y_share() {
        let params = desk();
        let suite = TransparentSuite::desk();
        let zq = params.suite.scalars();
        let s_id = suite.from_dlog(&zq.from_u64(6));
        let share = make_y_share(&params, 1, &s_id, &zq.from_u64(10), &zq.from_u64(4));
        assert_eq!(share.g_v.value(), &4u32.into());
        let y: u64 = (0..10).fold(1, |acc, _| acc * 4 % 23);
        assert_eq!(share.y.value(), &y.into());
        let zero = make_y_share(&params, 1, &s_id, &zq.zero(), &zq.from_u64(4));
        assert_eq!(zero.y, suite.g2_unit());
    }

    #[test]
    fn desk_partial_and_clerk_check() {
        let params = desk();
        let suite = &params.suite;
        let zq = suite.scalars();
        let g = |v| suite.from_dlog(&zq.from_u64(v));
        let h = zq.from_u64(3);
        let partial = partial_sign(&params, &h, 1, &g(10), &g(5));
        assert_eq!(partial.v, g(3));
        let c1 = suite.pair(&params.p_pub, &g(5));
        assert_eq!(c1.value(), &6u32.into());
        assert_eq!(suite.pair(&params.p_pub, &g(3)).value(), &2u32.into());
        assert_eq!(13 * 216 % 23, 2);
        assert!(clerk_verify_partial(&params, &partial, &c1, &h));
        let tampered = PartialSignature { v: g(4), ..partial.clone() };
        assert!(!clerk_verify_partial(&params, &tampered, &c1, &h));

        assert_eq!(partial_sign(&params, &zq.zero(), 1, &g(10), &g(5)).v, g(10));
        assert_eq!(partial_sign(&params, &h, 1, &g(10), &g(0)).v, g(10));
        let unhashed = PartialSignature { v: g(10), ..partial };
        assert!(clerk_verify_partial(&params, &unhashed, &c1, &zq.zero()));
    }

    #[test]
    fn context_needs_every_member_once() {
        let params = desk();
        let suite = &params.suite;
        let zq = suite.scalars();
        let set = SignerSet::new(&[1, 2], 3).unwrap();
        let msg = |i: usize| RoundOne { index: i, u: suite.from_dlog(&zq.from_u64(i as u64)), y: suite.g2_unit() };
        assert_eq!(build_context(&params, b"m", &set, &[msg(1)]).unwrap_err(), Error::MissingMember(2));
        assert_eq!(build_context(&params, b"m", &set, &[msg(1), msg(1)]).unwrap_err(), Error::DuplicateIndex(1));
        assert!(build_context(&params, b"m", &set, &[msg(1), msg(3)]).is_err());
        let single = SignerSet::new(&[2], 3).unwrap();
        let ctx = build_context(&params, b"m", &single, &[msg(2)]).unwrap();
        assert_eq!(ctx.u, msg(2).u);
        assert_eq!(ctx.y, msg(2).y);
    }

    #[test]
    fn context_ignores_message_order() {
        let run = honest_run(TransparentSuite::large(), 3, 5, &[2, 4, 5], 9);
        let mut msgs: Vec<_> = run
            .y_shares
            .iter()
            .map(|y| RoundOne { index: y.index, u: run.registry[&y.index].clone(), y: y.y.clone() })
            .collect();
        msgs.reverse();
        let again = build_context(&run.params, &run.ctx.message, &run.ctx.signers, &msgs).unwrap();
        assert_eq!(again, run.ctx);
    }

    #[test]
    fn context_u_matches_vss_constants() {
        let run = honest_run(TransparentSuite::large(), 3, 4, &[1, 3, 4], 5);
        let zq = run.params.suite.scalars();
        let constants = zq.sum(run.vss_polys.iter().map(|f| f.constant()));
        assert_eq!(run.params.suite.dlog(&run.ctx.u), constants);
    }

    #[test]
    fn aggregate_names_the_bad_signer() {
        let run = honest_run(TransparentSuite::large(), 3, 5, &[1, 2, 4], 3);
        let params = &run.params;
        let mut partials: Vec<_> = [1usize, 2, 4]
            .iter()
            .map(|&i| partial_sign(params, &run.ctx.h, i, &run.registry[&i], &run.key_shares[i - 1].secret))
            .collect();
        partials[1].v = params.suite.g1_add(&partials[1].v, &params.suite.generator());
        let err = aggregate(params, &run.ctx, &run.warrant, &run.delegation.v_w, &partials, &run.commitments);
        assert_eq!(err.unwrap_err(), Error::RejectedPartial(2));
        let err = aggregate(params, &run.ctx, &run.warrant, &run.delegation.v_w, &partials[..1], &run.commitments);
        assert_eq!(err.unwrap_err(), Error::MissingMember(2));
    }

    #[test]
    fn single_signer_aggregate_is_its_partial() {
        let run = honest_run(TransparentSuite::large(), 1, 3, &[2], 4);
        let partial = partial_sign(&run.params, &run.ctx.h, 2, &run.registry[&2], &run.key_shares[1].secret);
        assert_eq!(run.sigma.v, partial.v);
        assert_eq!(run.sigma.participants, vec![2]);
        assert_eq!(run.sigma.n, 3);
    }

    /// `dlog(V) = dlog(U) + H * (sum_k s^-1 Q_IDPk + n * dlog(V_w))`, computed
    /// from the master secret.
    fn aggregate_oracle_holds(t: usize, n: usize, d: &[usize], seed: u64) {
        let run = honest_run(TransparentSuite::large(), t, n, d, seed);
        let suite = &run.params.suite;
        let zq = suite.scalars();
        let s_inv = run.master.inverse();
        let q_sum = zq.sum(run.proxies.iter().map(|k| &k.public));
        let inner = zq.add(
            &zq.mul(s_inv, &q_sum),
            &zq.mul(&zq.from_u64(n as u64), &suite.dlog(&run.delegation.v_w)),
        );
        let expect = zq.add(&suite.dlog(&run.sigma.u), &zq.mul(&run.ctx.h, &inner));
        assert_eq!(suite.dlog(&run.sigma.v), expect);
    }

    #[test]
    fn aggregate_matches_master_key_oracle() {
        for (t, n, d) in [(1, 1, &[1][..]), (1, 3, &[3]), (2, 3, &[1, 3]), (3, 5, &[1, 2, 5]), (5, 7, &[1, 3, 4, 6, 7])] {
            aggregate_oracle_holds(t, n, d, 11 + t as u64);
        }
    }

    #[test]
    fn curve_aggregate_identity() {
        let run = honest_run(CurveSuite::standard(), 2, 3, &[1, 3], 21);
        assert!(crate::dvverify::final_equation_holds(&run.params, &run.sigma, &run.proxy_keys(), &run.ctx.h));
    }

    #[test]
    fn key_shares_interpolate_to_total_proxy_secret() {
        let run = honest_run(TransparentSuite::large(), 3, 5, &[1, 2, 3], 8);
        let suite = &run.params.suite;
        let zq = suite.scalars();
        let total = zq.sum(run.proxy_secrets.iter().map(|s| suite.dlog(&s.value)).collect::<Vec<_>>().iter());
        let by_ids = zq.add(
            &zq.sum(run.proxies.iter().map(|k| suite.dlog(&k.secret)).collect::<Vec<_>>().iter()),
            &zq.mul(&zq.from_u64(5), &suite.dlog(&run.delegation.v_w)),
        );
        assert_eq!(total, by_ids);
        for d in [[1, 2, 3], [1, 4, 5], [2, 3, 5], [3, 4, 5]] {
            let eta = lagrange_at_zero(zq, &d).unwrap();
            let combined: Vec<&ProxyKeyShare<_>> = d.iter().map(|&i| &run.key_shares[i - 1]).collect();
            let interp = suite.g1_lincomb(combined.iter().map(|k| (&eta[&k.holder], &k.secret)));
            assert_eq!(suite.dlog(&interp), total);
        }
    }

    #[test]
    fn y_exponent_matches_closed_form() {
        let run = honest_run(TransparentSuite::large(), 2, 4, &[2, 3], 17);
        let suite = &run.params.suite;
        let zq = suite.scalars();
        // Y = e(P,P)^(X s^-1 sum eta_i r_i Q_IDPi)
        let inner = zq.sum(
            run.ctx
                .eta
                .iter()
                .map(|(&i, e)| zq.mul(&zq.mul(e, &run.shares[i - 1].r), &run.proxies[i - 1].public))
                .collect::<Vec<_>>()
                .iter(),
        );
        let exp = zq.mul(&zq.mul(&run.x, run.master.inverse()), &inner);
        assert_eq!(run.ctx.y, suite.g2_pow(&run.params.gt_base(), &exp));
    }

    proptest! {
        #[test]
        fn lagrange_interpolates_exactly(
            coeffs in proptest::collection::vec(any::<u64>(), 1..6),
            pool in proptest::collection::btree_set(1usize..40, 6..10),
            pick in any::<u64>(),
        ) {
            let zq = ScalarField::new(TransparentSuite::large().scalars().modulus().clone());
            let coeffs: Vec<Scalar> = coeffs.iter().map(|&c| zq.from_u64(c)).collect();
            let t = coeffs.len();
            let pool: Vec<usize> = pool.into_iter().collect();
            let start = (pick as usize) % (pool.len() - t + 1);
            let d = &pool[start..start + t];
            let eta = lagrange_at_zero(&zq, d).unwrap();
            prop_assert_eq!(zq.sum(eta.values()), zq.one());
            let f = |x: usize| crate::vss::eval_poly(&zq, &coeffs, &zq.from_u64(x as u64));
            let combined = zq.sum(d.iter().map(|&i| zq.mul(&eta[&i], &f(i))).collect::<Vec<_>>().iter());
            prop_assert_eq!(combined, coeffs[0].clone());
        }
    }
}
