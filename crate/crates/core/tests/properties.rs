use lti_reach::algnum::spectral::qmat;
use lti_reach::algnum::{AMat, AlgReal, DyInterval, Mat};
use lti_reach::boundary::SupportOracle;
use lti_reach::exact::{export_fo_formula, FOFormula, Theory};
use lti_reach::exppoly::{depth_budget, form_fc, isolate_sign_changes, zero_count_bound};
use lti_reach::model::{parse_problem, serialize_problem, Horizon, ReachProblem, Target};
use lti_reach::oracle::extremal_endpoint;
use lti_reach::skolem::{reduce_nontangential, Flavor, SkolemInstance};
use lti_reach::ReachError;
use proptest::prelude::*;
use rug::Rational;

fn q(n: i64, d: i64) -> AlgReal {
    AlgReal::frac(n, d)
}

fn diag(entries: &[(i64, i64)]) -> AMat {
    let n = entries.len();
    let mut a = Mat::zeros(n, n);
    for (i, &(num, den)) in entries.iter().enumerate() {
        a.set(i, i, q(num, den));
    }
    a
}

fn ivec(v: &[i64]) -> Vec<AlgReal> {
    v.iter().map(|&x| AlgReal::from(x)).collect()
}

fn nonzero(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, n).prop_filter("nonzero", |v| v.iter().any(|&x| x != 0))
}

/// Stable planar matrices with small integer entries.
fn stable_planar() -> impl Strategy<Value = [i64; 4]> {
    prop::array::uniform4(-3i64..=3).prop_filter("stable", |e| e[0] + e[3] < 0 && e[0] * e[3] - e[1] * e[2] > 0)
}

fn planar(e: &[i64; 4]) -> AMat {
    Mat::from_rows(vec![vec![AlgReal::from(e[0]), AlgReal::from(e[1])], vec![AlgReal::from(e[2]), AlgReal::from(e[3])]])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn real_spectrum_crossings_below_dimension(
        eig in prop::collection::vec(1i64..=8, 1..=4),
        seed in prop::collection::vec(-3i64..=3, 8),
    ) {
        let n = eig.len();
        let a = diag(&eig.iter().map(|&k| (-k, 2)).collect::<Vec<_>>());
        let b = ivec(&seed[..n]);
        let c = ivec(&seed[4..4 + n]);
        let f = form_fc(&a, &b, &c).unwrap();
        prop_assume!(!f.is_identically_zero());
        let pat = isolate_sign_changes(&f, &DyInterval::from_i64(30, 128), depth_budget()).unwrap();
        prop_assert!(pat.crossings.len() < n);
        prop_assert!(pat.crossings.len() <= zero_count_bound(&f, 30.0).unwrap());
        // every reported crossing has opposite signs at its ends
        for iv in &pat.crossings {
            let lo = f.eval(&DyInterval::point(iv.lo.clone()));
            let hi = f.eval(&DyInterval::point(iv.hi.clone()));
            prop_assert!(lo.sign().is_some() && lo.sign() == hi.sign().map(|s| -s));
        }
    }

    #[test]
    fn discrete_extremal_endpoint_respects_support(e in stable_planar(), b in nonzero(2), angle in 0u32..64) {
        let a = planar(&e);
        let b = ivec(&b);
        let oracle = match SupportOracle::new(&a, &b, &Horizon::Infinite) {
            Ok(o) => o,
            Err(ReachError::NotControllable) => return Ok(()),
            Err(err) => panic!("{}", err),
        };
        let th = std::f64::consts::PI * angle as f64 / 32.0;
        let cf = [th.cos(), th.sin()];
        let c: Vec<AlgReal> = cf.iter().map(|x| AlgReal::from(Rational::from_f64(*x).unwrap())).collect();
        let h = oracle.support(&c, 1e-9).unwrap().value();
        let pt = extremal_endpoint(&a, &Mat::from_cols(&[b]), &cf, &Rational::from(10), 200);
        let v = pt.x[0] * cf[0] + pt.x[1] * cf[1];
        prop_assert!(v <= h.hi.to_f64() + 2.0 * pt.err + 1e-9, "{} above {:?}", v, h);
    }

    #[test]
    fn bounded_support_grows_with_horizon(e in stable_planar(), b in nonzero(2), c in nonzero(2), t1 in 1i64..20, dt in 1i64..20) {
        let a = planar(&e);
        let (b, c) = (ivec(&b), ivec(&c));
        let short = SupportOracle::new(&a, &b, &Horizon::Bounded(q(t1, 4)));
        let long = SupportOracle::new(&a, &b, &Horizon::Bounded(q(t1 + dt, 4)));
        let (Ok(short), Ok(long)) = (short, long) else { return Ok(()) };
        let v1 = short.support(&c, 1e-9).unwrap().value();
        let v2 = long.support(&c, 1e-9).unwrap().value();
        prop_assert!(v2.hi >= v1.lo, "{:?} then {:?}", v1, v2);
    }

    #[test]
    fn nontangential_reduction_keeps_sign_changes(
        e in prop::array::uniform4(-2i64..=2),
        b in nonzero(2),
        c in nonzero(2),
    ) {
        let s = match SkolemInstance::new(
            c.iter().map(|&x| Rational::from(x)).collect(),
            qmat(&[&[(e[0], 1), (e[1], 1)], &[(e[2], 1), (e[3], 1)]]),
            b.iter().map(|&x| Rational::from(x)).collect(),
            Flavor::Nontangential,
        ) {
            Ok(s) => s,
            Err(_) => return Ok(()),
        };
        let r = match reduce_nontangential(&s) {
            Ok(r) => r,
            Err(ReachError::IdenticallyZero) => return Ok(()),
            Err(err) => panic!("{}", err),
        };
        let a0 = s.a.to_alg();
        let f0 = form_fc(&a0, &ivec(&b), &ivec(&c)).unwrap();
        let f1 = form_fc(&r.a, &r.b, &r.c).unwrap();
        let horizon = DyInterval::from_i64(6, 128);
        let (p0, p1) = match (isolate_sign_changes(&f0, &horizon, depth_budget()), isolate_sign_changes(&f1, &horizon, depth_budget())) {
            (Ok(p0), Ok(p1)) => (p0, p1),
            // tangential zeros exceed the budget on both sides alike
            _ => return Ok(()),
        };
        prop_assert_eq!(p0.crossings.len(), p1.crossings.len());
        for (x, y) in p0.crossings.iter().zip(&p1.crossings) {
            prop_assert!(x.overlaps(y));
        }
    }

    #[test]
    fn problem_documents_round_trip(e in prop::array::uniform4(-5i64..=5), d in 1i64..=7, b in nonzero(2), y in prop::collection::vec(-9i64..=9, 2)) {
        let a = Mat::from_rows(vec![vec![q(e[0], d), q(e[1], d)], vec![q(e[2], d), q(e[3], d)]]);
        let p = ReachProblem::new(a, Mat::from_cols(&[ivec(&b)])).with_target(Target::Point(ivec(&y)));
        prop_assert_eq!(parse_problem(&serialize_problem(&p)).unwrap(), p);
    }

    #[test]
    fn r0_export_round_trips(k1 in 1i64..=4, k2 in 1i64..=4, b in nonzero(2)) {
        prop_assume!(k1 != k2 && b.iter().all(|&x| x != 0));
        let p = ReachProblem::new(diag(&[(-1, k1), (-1, k2)]), Mat::from_cols(&[ivec(&b)]));
        let f = export_fo_formula(&p, Theory::R0).unwrap();
        prop_assert_eq!(FOFormula::parse(&f.to_string()).unwrap(), f);
    }
}
