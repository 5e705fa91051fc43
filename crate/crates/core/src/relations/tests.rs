use proptest::prelude::*;

use super::*;
use crate::numerics::rational::{int, pow2_inv, rat};

fn fin(v: &[Rational]) -> Sequence {
    Sequence::finite(v.to_vec()).unwrap()
}

fn ints(v: &[i64]) -> Sequence {
    fin(&v.iter().map(|&x| int(x)).collect::<Vec<_>>())
}

#[test]
fn majorize_examples() {
    let v = majorize(&ints(&[2, 1, 1]), &ints(&[3, 1, 0])).unwrap();
    assert_eq!(v.status, Status::Holds);
    assert_eq!(v.margin_trace, vec![int(1), int(1), int(0)]);

    let x = ints(&[5, 0, 2]);
    assert!(majorize(&x, &x).unwrap().holds());

    assert!(majorize(&ints(&[2, 2]), &ints(&[3, 1])).unwrap().holds());
    let v = majorize(&ints(&[3, 1]), &ints(&[2, 2])).unwrap();
    assert_eq!((v.status, v.witness), (Status::Fails, Some(1)));

    let v = majorize(&ints(&[1, 1]), &ints(&[3])).unwrap();
    assert_eq!(v.status, Status::Fails);
    assert!(reproduce(&ints(&[1, 1]), &ints(&[3]), &v));
}

#[test]
fn zero_shift_is_majorization() {
    let (x, e) = (ints(&[2, 1, 1]), ints(&[3, 1, 0]));
    let m = majorize(&x, &e).unwrap();
    let v = p_majorize(&x, &e, Cardinal::Finite(0), 64).unwrap();
    assert_eq!(v.witness, Some(1));
    assert_eq!((v.status, &v.margin_trace), (m.status, &m.margin_trace));
    let bad = p_majorize(&e, &x, Cardinal::Finite(0), 64).unwrap();
    let m = majorize(&e, &x).unwrap();
    assert_eq!((bad.status, bad.witness), (m.status, m.witness));
}

#[test]
fn finite_support_gives_every_p() {
    let (x, e) = (ints(&[2, 1, 1, 0]), ints(&[3, 1, 0, 0]));
    let v = p_majorize(&x, &e, Cardinal::Infinite, 64).unwrap();
    assert_eq!((v.status, v.witness), (Status::Holds, Some(2)));
    for p in 0..6 {
        assert!(p_majorize(&x, &e, Cardinal::Finite(p), 64).unwrap().holds());
    }
    // Σ^{n+1}ξ ≤ Σ^n η already at n = 1
    assert_eq!(p_majorize(&x, &e, Cardinal::Finite(1), 64).unwrap().witness, Some(1));
    assert_eq!(p_majorize(&x, &e, Cardinal::Finite(2), 64).unwrap().witness, Some(2));
}

fn geometric_eta(len: u32) -> Sequence {
    // η_k = 2^{1-k}
    Sequence::truncated((0..len).map(pow2_inv).collect(), Some(pow2_inv(len)))
        .unwrap()
        .with_tail_positive(true)
        .declare_monotone()
        .unwrap()
}

#[test]
fn shifted_geometric_pair() {
    let len = 40u32;
    let eta = geometric_eta(len);
    let mut terms = vec![rat(1, 2), rat(1, 2)];
    terms.extend((3..=len + 1).map(|m| pow2_inv(m - 2)));
    let xi = Sequence::truncated(terms, Some(pow2_inv(len - 1)))
        .unwrap()
        .with_tail_positive(true)
        .declare_monotone()
        .unwrap();
    let certs = vec![
        AnalyticCertificate::new(CertifiedRelation::Majorize, Status::Holds, IndexRule::Fixed(1), "geometric totals"),
        AnalyticCertificate::new(CertifiedRelation::PMajorize, Status::Holds, IndexRule::Fixed(1), "equality").at_p(1usize),
        AnalyticCertificate::new(CertifiedRelation::PMajorize, Status::Fails, IndexRule::Fixed(1), "strict excess").at_p(2usize),
    ];
    let c = Checker::new(512).with_certificates(certs);
    let one = c.p_majorize(&xi, &eta, Cardinal::Finite(1)).unwrap();
    assert_eq!((one.status, one.witness), (Status::Holds, Some(1)));
    assert!(one.margin_trace.iter().all(Zero::is_zero));
    let two = c.p_majorize(&xi, &eta, Cardinal::Finite(2)).unwrap();
    assert_eq!((two.status, two.witness), (Status::Fails, Some(1)));
    // Σ^n η − Σ^{n+2} ξ = −2^{−n}
    for (i, s) in two.margin_trace.iter().enumerate() {
        assert_eq!(*s, -pow2_inv(i as u32 + 1));
    }
    assert!(reproduce(&xi, &eta, &two));
    assert_eq!(c.p_majorize(&xi, &eta, Cardinal::Infinite).unwrap().status, Status::Fails);
}

/// ξ_k = (2^{k+1} − 3)/4^k and η_k = 2^{−k}.
fn quartic_pair(len: u32) -> (Sequence, Sequence, Vec<AnalyticCertificate>) {
    let one = num_bigint::BigInt::from(1);
    let xi_terms: Vec<_> = (1..=len + 1)
        .map(|k| Rational::new((&one << (k + 1)) - 3, &one << (2 * k)))
        .collect();
    let tail = xi_terms.last().cloned();
    let xi = Sequence::truncated(xi_terms, tail).unwrap().with_tail_positive(true);
    let eta = Sequence::truncated((1..=len).map(pow2_inv).collect(), Some(pow2_inv(len + 1)))
        .unwrap()
        .with_tail_positive(true)
        .declare_monotone()
        .unwrap();
    let certs = vec![
        AnalyticCertificate::new(CertifiedRelation::Majorize, Status::Holds, IndexRule::Fixed(1), "closed form"),
        AnalyticCertificate::new(CertifiedRelation::PMajorize, Status::Fails, IndexRule::Fixed(1), "positive margin")
            .at_p(1usize),
        AnalyticCertificate::new(CertifiedRelation::ApproxPMajorize, Status::Holds, IndexRule::Fixed(1), "margin 4^{-n-1}")
            .at_p(1usize)
            .with_eps(EpsRule::Log2 { offset: -1, floor: 1 }),
    ];
    (xi, eta, certs)
}

#[test]
fn approximate_but_not_shifted() {
    let (xi, eta, certs) = quartic_pair(60);
    let c = Checker::new(512).with_certificates(certs);
    assert!(c.majorize(&xi, &eta).unwrap().holds());
    let v = c.p_majorize(&xi, &eta, Cardinal::Finite(1)).unwrap();
    assert_eq!((v.status, v.witness), (Status::Fails, Some(1)));
    for (i, s) in v.margin_trace.iter().enumerate() {
        let n = i as u32 + 1;
        assert_eq!(*s, -pow2_inv(2 * n + 2));
    }
    let a = c.approx_p_majorize(&xi, &eta, Cardinal::Finite(1), &rat(1, 8)).unwrap();
    assert_eq!((a.status, a.witness), (Status::Holds, Some(2)));
    assert!(reproduce(&xi, &eta, &a));
    for k in 1..20u32 {
        let eps = pow2_inv(k);
        let a = c.approx_p_majorize(&xi, &eta, Cardinal::Finite(1), &eps).unwrap();
        assert_eq!(a.witness, Some((k as usize).saturating_sub(1).max(1)), "k={k}");
    }
    let curve = c
        .approx_curve(&xi, &eta, Cardinal::Finite(1), &hierarchy::default_eps_grid())
        .unwrap();
    assert_eq!(curve.all_epsilon, Status::Holds);
}

#[test]
fn truncated_without_certificates_is_unknown() {
    let (xi, eta, _) = quartic_pair(30);
    let v = p_majorize(&xi, &eta, Cardinal::Finite(1), 512).unwrap();
    assert_eq!(v.status, Status::Unknown);
    let v = strong_majorize(&xi, &eta, 512).unwrap();
    assert_eq!(v.status, Status::Unknown);
}

#[test]
fn contradicted_certificate_is_an_error() {
    let (xi, eta, mut certs) = quartic_pair(30);
    certs.push(
        AnalyticCertificate::new(CertifiedRelation::PMajorize, Status::Holds, IndexRule::Fixed(3), "wrong").at_p(1usize),
    );
    certs.remove(1);
    let err = Checker::new(512)
        .with_certificates(certs)
        .p_majorize(&xi, &eta, Cardinal::Finite(1))
        .unwrap_err();
    assert!(matches!(err, RelationError::CertificateContradiction { n: 3, .. }));
}

#[test]
fn epsilon_must_be_positive() {
    let x = ints(&[1]);
    assert_eq!(
        approx_p_majorize(&x, &x, Cardinal::Finite(1), &int(0), 8).unwrap_err(),
        RelationError::NonPositiveEpsilon
    );
}

#[test]
fn identical_sequences_satisfy_everything() {
    let x = ints(&[4, 2, 1, 0]);
    let r = hierarchy_check(&x, &x, 64).unwrap();
    assert!(r.is_consistent());
    assert_eq!(r.majorize, Status::Holds);
    assert_eq!(r.strong, Status::Holds);
    assert_eq!(r.p_infinite, Status::Holds);
    assert_eq!(r.approx_infinite, Status::Holds);
    assert!(r.p_majorize.iter().all(|(_, s, _)| *s == Status::Holds));
}

/// A random pair with `ξ ≺ η` built from random T-transforms of `η`.
fn arb_pair() -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>)> {
    (1usize..7)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0i64..6, n),
                prop::collection::vec((0..n, 0..n, 0i64..=4), 0..4),
            )
        })
        .prop_map(|(eta, moves)| {
            let eta: Vec<Rational> = eta.into_iter().map(int).collect();
            let mut xi = eta.clone();
            for (i, j, t) in moves {
                let t = rat(t, 4);
                let (a, b) = (xi[i].clone(), xi[j].clone());
                xi[i] = &t * &a + (int(1) - &t) * &b;
                xi[j] = &t * &b + (int(1) - &t) * &a;
            }
            (xi, eta)
        })
}

proptest! {
    #[test]
    fn t_transforms_are_majorized((xi, eta) in arb_pair()) {
        prop_assert!(majorize(&fin(&xi), &fin(&eta)).unwrap().holds());
    }

    #[test]
    fn witnesses_monotone_in_p((xi, eta) in arb_pair()) {
        let (x, e) = (fin(&xi), fin(&eta));
        let mut prev = None;
        for p in 1..8 {
            let v = p_majorize(&x, &e, Cardinal::Finite(p), 64).unwrap();
            prop_assert!(v.holds());
            prop_assert!(v.witness >= prev);
            prop_assert!(reproduce(&x, &e, &v));
            prev = v.witness;
        }
    }

    #[test]
    fn witnesses_monotone_in_eps((xi, eta) in arb_pair(), p in 1usize..4) {
        let (x, e) = (fin(&xi), fin(&eta));
        let mut prev = Some(0);
        for k in 0..6u32 {
            // decreasing ε: witnesses grow
            let v = approx_p_majorize(&x, &e, Cardinal::Finite(p), &pow2_inv(k), 64).unwrap();
            prop_assert!(v.witness >= prev);
            prev = v.witness;
        }
    }

    #[test]
    fn random_pairs_are_consistent(xi in prop::collection::vec(0i64..5, 1..6), eta in prop::collection::vec(0i64..5, 1..6)) {
        let x = fin(&xi.into_iter().map(int).collect::<Vec<_>>());
        let e = fin(&eta.into_iter().map(int).collect::<Vec<_>>());
        let r = Checker::new(64).with_p_bound(6).hierarchy(&x, &e, &hierarchy::default_eps_grid()).unwrap();
        prop_assert!(r.is_consistent(), "{:?}", r.violations().collect::<Vec<_>>());
        let m = majorize(&x, &e).unwrap();
        prop_assert!(reproduce(&x, &e, &m));
    }
}
