use lti_reach::algnum::spectral::qmat;
use lti_reach::approx::{set_target_semidecide, MembershipVerdict};
use lti_reach::model::{parse_problem, serialize_problem, Target};
use lti_reach::skolem::{plain_orbit_witness, reduce_nontangential, reduce_plain, verify_claims, ClaimStatus, Flavor, SkolemInstance};
use rug::Rational;
use std::time::Instant;

fn q(n: i64) -> Rational {
    Rational::from(n)
}

/// f(t) = e^{-t} cos 2t
fn damped_cos(flavor: Flavor) -> SkolemInstance {
    SkolemInstance::new(vec![q(1), q(0)], qmat(&[&[(-1, 1), (2, 1)], &[(-2, 1), (-1, 1)]]), vec![q(1), q(0)], flavor).unwrap()
}

/// f(t) = e^{-t} (1 + t)
fn sign_definite() -> SkolemInstance {
    SkolemInstance::new(vec![q(1), q(1)], qmat(&[&[(-1, 1), (1, 1)], &[(0, 1), (-1, 1)]]), vec![q(0), q(1)], Flavor::Nontangential).unwrap()
}

#[test]
fn damped_cos_plain_reaches_halfspace() {
    let r = reduce_plain(&damped_cos(Flavor::Plain)).unwrap();
    assert!(!r.sign_flipped);
    // f < 0 on (pi/4, 3pi/4): the first certified grid point is 4/5
    let t = plain_orbit_witness(&r, &q(4), 40).expect("certified orbit point");
    assert_eq!(t, Rational::from((4, 5)));
    let compact = r.compact.as_ref().unwrap();
    assert!(matches!(compact.target, Some(Target::BoxedHyperplane { .. })));
}

#[test]
fn decaying_exponential_plain_never_reaches() {
    let s = SkolemInstance::new(vec![q(1)], qmat(&[&[(-1, 1)]]), vec![q(1)], Flavor::Plain).unwrap();
    let r = reduce_plain(&s).unwrap();
    assert_eq!(plain_orbit_witness(&r, &q(50), 200), None);
}

#[test]
fn damped_cos_nontangential() {
    let r = reduce_nontangential(&damped_cos(Flavor::Nontangential)).unwrap();
    assert_eq!(r.alpha, 0);
    assert_eq!(r.restricted_from, None);
    let rep = set_target_semidecide(&r.problem, r.problem.target.as_ref().unwrap(), 16).unwrap();
    assert!(matches!(rep.verdict, MembershipVerdict::Reachable), "{:?}", rep.verdict);
    assert!(rep.witness.is_some());
    let start = Instant::now();
    let claims = verify_claims(&r, 1e-6).unwrap();
    for id in ['b', 'c', 'e', 'f'] {
        assert!(claims.passed(id), "{}", claims);
    }
    assert_eq!(claims.status('a'), Some(&ClaimStatus::Derived));
    assert!(claims.crossings > 0);
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn sign_definite_touches_only_the_limit_point() {
    let r = reduce_nontangential(&sign_definite()).unwrap();
    let rep = set_target_semidecide(&r.problem, r.problem.target.as_ref().unwrap(), 16).unwrap();
    assert!(!matches!(rep.verdict, MembershipVerdict::Reachable), "{:?}", rep.verdict);
    let claims = verify_claims(&r, 1e-6).unwrap();
    for id in ['b', 'c', 'e', 'f'] {
        assert!(claims.passed(id), "{}", claims);
    }
    assert_eq!(claims.crossings, 0);
}

#[test]
fn coarse_tolerance_is_inconclusive() {
    let r = reduce_nontangential(&sign_definite()).unwrap();
    let claims = verify_claims(&r, 10.0).unwrap();
    assert!(claims.claims.iter().any(|c| matches!(c.status, ClaimStatus::InconclusiveAtTolerance(_))), "{}", claims);
}

#[test]
fn unstable_uncontrollable_input_is_normalized() {
    // f(t) = e^{t} (1 - t); the third state never sees the input
    let s = SkolemInstance::new(
        vec![q(1), q(-1), q(5)],
        qmat(&[&[(1, 1), (1, 1), (0, 1)], &[(0, 1), (1, 1), (0, 1)], &[(0, 1), (0, 1), (2, 1)]]),
        vec![q(0), q(-1), q(0)],
        Flavor::Nontangential,
    )
    .unwrap();
    let r = reduce_nontangential(&s).unwrap();
    assert_eq!(r.alpha, 3);
    assert_eq!(r.restricted_from, Some(3));
    assert_eq!(r.a.rows, 2);
    let rep = set_target_semidecide(&r.problem, r.problem.target.as_ref().unwrap(), 16).unwrap();
    assert!(matches!(rep.verdict, MembershipVerdict::Reachable), "{:?}", rep.verdict);
}

#[test]
fn reductions_serialize() {
    for r in [reduce_plain(&damped_cos(Flavor::Plain)).unwrap(), reduce_nontangential(&damped_cos(Flavor::Nontangential)).unwrap()] {
        let text = serialize_problem(&r.problem);
        assert_eq!(parse_problem(&text).unwrap(), r.problem);
    }
}
