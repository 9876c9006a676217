use lti_reach::algnum::{AlgReal, Mat};
use lti_reach::approx::MembershipVerdict;
use lti_reach::exact::export::phi_blocks;
use lti_reach::exact::{
    boundary_algebraic_points, decide_exact, export_fo_formula, rational_power_form, BoundaryDescription, FOFormula, Theory,
};
use lti_reach::model::{amat, avec, Horizon, ReachProblem, Target};
use lti_reach::ReachError;

fn q(n: i64, d: i64) -> AlgReal {
    AlgReal::frac(n, d)
}

fn diag() -> ReachProblem {
    ReachProblem::new(amat(&[&[(-1, 2), (0, 1)], &[(0, 1), (-1, 3)]]), amat(&[&[(1, 1)], &[(1, 1)]]))
}

fn sqrt2_system() -> ReachProblem {
    let s2 = AlgReal::sqrt_rational(&2.into());
    let a = Mat::from_rows(vec![vec![AlgReal::from(-1), AlgReal::zero()], vec![AlgReal::zero(), s2.neg()]]);
    ReachProblem::new(a, amat(&[&[(1, 1), (1, 1)], &[(-1, 1), (1, 1)]]))
}

fn verdict(p: &ReachProblem, y: Vec<AlgReal>) -> MembershipVerdict {
    decide_exact(&p.clone().with_target(Target::Point(y))).unwrap().verdict
}

#[test]
fn diag_rational_power_form() {
    let p = diag();
    let rpf = rational_power_form(&p.a, &p.column(0)).unwrap();
    assert_eq!(rpf.powers, vec![2, 3]);
    assert_eq!(rpf.zero_cap, 1);
    // one switch at z: the boundary curve (2 - 4z^3, 3 - 6z^2)
    let z = q(1, 2);
    let pt = rpf.point(1, std::slice::from_ref(&z));
    let expect = [q(2, 1).sub(&q(4, 1).mul(&z.powi(3))), q(3, 1).sub(&q(6, 1).mul(&z.powi(2)))];
    for (a, b) in pt.iter().zip(&expect) {
        assert_eq!(a.abs(), b.abs());
    }
    assert_eq!(rpf.point(1, &[]), avec(&[(2, 1), (3, 1)]));
}

#[test]
fn diag_decision_triple() {
    let p = diag();
    assert_eq!(verdict(&p, avec(&[(0, 1), (0, 1)])).reachable(), Some(true));
    match verdict(&p, avec(&[(2, 1), (3, 1)])) {
        MembershipVerdict::BoundaryHit(w) => assert!(!w.bounded),
        v => panic!("expected a boundary hit, got {:?}", v),
    }
    assert!(matches!(verdict(&p, avec(&[(21, 10), (31, 10)])), MembershipVerdict::NotReachable));
}

#[test]
fn diag_interior_curve_point_is_boundary() {
    // z = 1/2 on the one-switch branch: (2 - 1/2, 3 - 3/2)
    let v = verdict(&diag(), avec(&[(3, 2), (3, 2)]));
    assert!(matches!(v, MembershipVerdict::BoundaryHit(_)), "{:?}", v);
}

#[test]
fn sqrt2_algebraic_boundary_points() {
    let p = sqrt2_system();
    let s2 = AlgReal::sqrt_rational(&2.into());
    for y in [avec(&[(2, 1), (0, 1)]), avec(&[(-2, 1), (0, 1)]), vec![AlgReal::zero(), s2.clone()], vec![AlgReal::zero(), s2.neg()]] {
        let v = verdict(&p, y.clone());
        assert!(matches!(v, MembershipVerdict::BoundaryHit(_)), "{:?} -> {:?}", y, v);
    }
    // the curve point at t = 1/2 is transcendental in its second coordinate;
    // algebraic neighbours are decided
    assert_eq!(verdict(&p, avec(&[(-1, 1), (1, 2)])).reachable(), Some(true));
    assert_eq!(verdict(&p, avec(&[(-1, 1), (13, 10)])).reachable(), Some(false));
}

#[test]
fn two_entry_columns_give_finite_candidates() {
    let p = sqrt2_system();
    match boundary_algebraic_points(&p.a, &p.column(0)).unwrap() {
        BoundaryDescription::FinitePointSet { candidates, .. } => {
            assert_eq!(candidates.len(), 2);
            let s2 = AlgReal::sqrt_rational(&2.into());
            let lim = vec![AlgReal::one(), s2.recip().neg()];
            assert!(candidates.contains(&lim));
        }
        d => panic!("{:?}", d),
    }
}

#[test]
fn complex_spectrum_is_rejected() {
    let p = ReachProblem::new(amat(&[&[(-1, 1), (-2, 1)], &[(2, 1), (-1, 1)]]), amat(&[&[(1, 1)], &[(0, 1)]]))
        .with_target(Target::Point(avec(&[(0, 1), (0, 1)])));
    assert!(matches!(decide_exact(&p), Err(ReachError::TagMismatch(_))));
}

#[test]
fn car_bounded_boundary() {
    let p = ReachProblem::new(amat(&[&[(0, 1), (1, 1)], &[(0, 1), (0, 1)]]), amat(&[&[(0, 1)], &[(1, 1)]]))
        .with_horizon(Horizon::Bounded(AlgReal::from(10)));
    match verdict(&p, avec(&[(50, 1), (10, 1)])) {
        MembershipVerdict::BoundaryHit(w) => assert!(w.bounded),
        v => panic!("{:?}", v),
    }
    // other bounded targets are left to the approximation
    let off = p.clone().with_target(Target::Point(avec(&[(51, 1), (10, 1)])));
    assert!(matches!(decide_exact(&off), Err(ReachError::TagMismatch(_))));
}

#[test]
fn diag_r0_export_structure() {
    let f = export_fo_formula(&diag(), Theory::R0).unwrap();
    assert_eq!(phi_blocks(&f).map(|b| b.len()), Some(2));
    let text = f.to_string();
    assert!(text.contains("forall"));
    assert_eq!(FOFormula::parse(&text).unwrap(), f);
}

#[test]
fn diag_r0_export_agrees_with_decision() {
    let f = export_fo_formula(&diag(), Theory::R0).unwrap();
    assert_eq!(f.check(&avec(&[(2, 1), (3, 1)])), Some(true));
    assert_eq!(f.check(&avec(&[(3, 2), (3, 2)])), Some(true));
    assert_eq!(f.check(&avec(&[(21, 10), (31, 10)])), Some(false));
    assert_eq!(f.check(&avec(&[(0, 1), (0, 1)])), Some(false));
}

#[test]
fn export_theory_adequacy() {
    let spiral = ReachProblem::new(amat(&[&[(-1, 1), (-2, 1)], &[(2, 1), (-1, 1)]]), amat(&[&[(1, 1)], &[(0, 1)]]));
    assert!(matches!(export_fo_formula(&spiral, Theory::Rexp), Err(ReachError::InadequateTheory(_))));
    let f = export_fo_formula(&spiral, Theory::RexpSin).unwrap();
    let text = f.to_string();
    assert!(text.contains("pi"));
    assert_eq!(FOFormula::parse(&text).unwrap(), f);
    let bounded = diag().with_horizon(Horizon::Bounded(AlgReal::from(10)));
    assert!(matches!(export_fo_formula(&bounded, Theory::R0), Err(ReachError::InadequateTheory(_))));
    let g = export_fo_formula(&bounded, Theory::Rexp).unwrap();
    assert_eq!(FOFormula::parse(&g.to_string()).unwrap(), g);
    let sq = export_fo_formula(&ReachProblem::new(sqrt2_system().a, amat(&[&[(1, 1)], &[(-1, 1)]])), Theory::Rexp).unwrap();
    assert_eq!(FOFormula::parse(&sq.to_string()).unwrap(), sq);
}
