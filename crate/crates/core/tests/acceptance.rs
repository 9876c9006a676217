//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints one PASS/FAIL line; the process fails if any does.

use lti_reach::algnum::spectral::qmat;
use lti_reach::algnum::{AMat, AlgReal, DyInterval, Mat};
use lti_reach::approx::{build_polytope_pair, build_problem_pair, minkowski_combine, set_target_semidecide, Location, MembershipVerdict, PolytopePair};
use lti_reach::boundary::{support_point, support_point_bounded, SupportOracle};
use lti_reach::exact::export::phi_blocks;
use lti_reach::exact::{boundary_algebraic_points, decide, decide_exact, export_fo_formula, BoundaryDescription, FOFormula, Theory};
use lti_reach::exppoly::{depth_budget, form_fc, isolate_sign_changes, zero_count_bound};
use lti_reach::model::{amat, avec, Horizon, ReachProblem, Target};
use lti_reach::oracle::{random_directions, sample_reachable_cloud};
use lti_reach::skolem::{plain_orbit_witness, reduce_nontangential, reduce_plain, verify_claims, Flavor, SkolemInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::Rational;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

/// `sqrt 2 (1 - (1/2)^{sqrt 2})`, evaluated offline with 200-bit arithmetic.
const Y_STAR: &str = "0.88358051340578003726182083586374515897875070290531";

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn r(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn alg(q: &Rational) -> AlgReal {
    AlgReal::from(q.clone())
}

fn diag_a() -> AMat {
    amat(&[&[(-1, 2), (0, 1)], &[(0, 1), (-1, 3)]])
}

fn diag() -> ReachProblem {
    ReachProblem::new(diag_a(), amat(&[&[(1, 1)], &[(1, 1)]]))
}

fn sqrt2_system() -> ReachProblem {
    let s2 = AlgReal::sqrt_rational(&2.into());
    let a = Mat::from_rows(vec![vec![AlgReal::from(-1), AlgReal::zero()], vec![AlgReal::zero(), s2.neg()]]);
    ReachProblem::new(a, amat(&[&[(1, 1), (1, 1)], &[(-1, 1), (1, 1)]]))
}

fn within(limit: Duration, start: Instant, what: &str) -> std::result::Result<(), String> {
    let el = start.elapsed();
    if el > limit {
        return Err(format!("{} took {:.2?}, limit {:?}", what, el, limit));
    }
    Ok(())
}

fn rational_of(x: f64) -> Rational {
    Rational::from_f64(x).expect("finite")
}

fn encl(y: &[Rational]) -> Vec<DyInterval> {
    y.iter().map(|q| DyInterval::from_rational(q, 128)).collect()
}

/// Euclidean distance from `y` to the planar inner hull (0 inside).
fn dist_to_inner(pair: &PolytopePair, y: &[f64]) -> f64 {
    let h: Vec<(f64, f64)> = pair.inner.iter().map(|v| (v[0].to_f64(), v[1].to_f64())).collect();
    let k = h.len();
    if k == 0 {
        return f64::INFINITY;
    }
    let (px, py) = (y[0], y[1]);
    let mut inside = k >= 3;
    let mut best = f64::INFINITY;
    for i in 0..k {
        let (ax, ay) = h[i];
        let (bx, by) = h[(i + 1) % k];
        let (ex, ey) = (bx - ax, by - ay);
        if ex * (py - ay) - ey * (px - ax) < 0.0 {
            inside = false;
        }
        let l2 = ex * ex + ey * ey;
        let s = if l2 > 0.0 { (((px - ax) * ex + (py - ay) * ey) / l2).clamp(0.0, 1.0) } else { 0.0 };
        best = best.min(((px - ax - s * ex).powi(2) + (py - ay - s * ey).powi(2)).sqrt());
    }
    if inside {
        0.0
    } else {
        best
    }
}

/// A boundary point of the true set: not certified inside `P-`, not cut off
/// by `P+`, and within `tol` of `P-`.
fn sandwiched(pair: &PolytopePair, y: &[DyInterval], tol: f64) -> std::result::Result<f64, String> {
    match pair.locate(y) {
        Location::Undetermined => {}
        l => return Err(format!("point {:?} located {:?}", y.iter().map(|v| v.mid_f64()).collect::<Vec<_>>(), l)),
    }
    let mid: Vec<f64> = y.iter().map(|v| v.mid_f64()).collect();
    let d = dist_to_inner(pair, &mid);
    if d > tol {
        return Err(format!("point {:?} is {:e} from the inner polytope", mid, d));
    }
    Ok(d)
}

fn criterion1() -> Check {
    let b = avec(&[(1, 1), (1, 1)]);
    let t = Instant::now();
    let sp = support_point(&diag_a(), &b, &avec(&[(1, 1), (1, 1)]), 1e-9).map_err(|e| e.to_string())?;
    within(Duration::from_secs(1), t, "support at (1, 1)")?;
    ensure!(sp.width() <= 1e-9, "width {:e}", sp.width());
    ensure!(sp.enclosure[0].contains_rational(&r(2, 1)) && sp.enclosure[1].contains_rational(&r(3, 1)), "(2, 3) not enclosed");
    let t = Instant::now();
    let sp2 = support_point(&diag_a(), &b, &avec(&[(-2, 1), (1, 1)]), 1e-9).map_err(|e| e.to_string())?;
    within(Duration::from_secs(1), t, "support at (-2, 1)")?;
    ensure!(sp2.width() <= 1e-9, "width {:e}", sp2.width());
    ensure!(sp2.enclosure.iter().all(|v| v.contains_rational(&r(-3, 2))), "(-3/2, -3/2) not enclosed");
    Ok(format!("widths {:.1e}, {:.1e}", sp.width(), sp2.width()))
}

fn criterion2() -> Check {
    let t = Instant::now();
    let pair = build_polytope_pair(&diag_a(), &avec(&[(1, 1), (1, 1)]), 8).map_err(|e| e.to_string())?;
    let tol = 2f64.powi(-8);
    ensure!(pair.gap <= tol, "gap {:e}", pair.gap);
    let mut worst = 0f64;
    for k in 0..32 {
        let alpha = Rational::from(1) + r(19 * k, 31);
        let x = Rational::from(2) - Rational::from(4) / alpha.clone().square() / alpha.clone();
        let y = Rational::from(3) - Rational::from(6) / alpha.square();
        for s in [1, -1] {
            let p = [Rational::from(&x * s), Rational::from(&y * s)];
            worst = worst.max(sandwiched(&pair, &encl(&p), tol)?);
        }
    }
    within(Duration::from_secs(30), t, "sweep")?;
    Ok(format!("64 points, gap {:.2e}, worst distance {:.2e}, {:.2?}", pair.gap, worst, t.elapsed()))
}

fn criterion3() -> Check {
    let t = Instant::now();
    let p1 = build_polytope_pair(&diag_a(), &avec(&[(1, 1), (1, 1)]), 8).map_err(|e| e.to_string())?;
    let p2 = build_polytope_pair(&diag_a(), &avec(&[(-1, 1), (1, 1)]), 8).map_err(|e| e.to_string())?;
    let id = Mat::identity(2);
    let sum = minkowski_combine(&[(p1, id.clone()), (p2, id)], &[]).map_err(|e| e.to_string())?;
    let tol = 2f64.powi(-6);
    ensure!(sum.gap <= tol, "combined gap {:e}", sum.gap);
    for (x, y) in [(4, 0), (0, 6), (0, -6), (-4, 0)] {
        sandwiched(&sum, &encl(&[r(x, 1), r(y, 1)]), tol)?;
    }
    within(Duration::from_secs(60), t, "combine")?;
    Ok(format!("gap {:.2e}, {:.2?}", sum.gap, t.elapsed()))
}

fn criterion4() -> Check {
    let p = sqrt2_system();
    let (red, pair) = build_problem_pair(&p, 8).map_err(|e| e.to_string())?;
    let tol = 2f64.powi(-8);
    ensure!(pair.gap <= tol, "gap {:e}", pair.gap);
    let digits = Y_STAR.trim_start_matches("0.");
    let ys = Rational::from((digits.parse::<rug::Integer>().map_err(|e| e.to_string())?, rug::Integer::from(10).pow(digits.len() as u32)));
    let eps = Rational::from((1, rug::Integer::from(10).pow(45u32)));
    let mut z: Vec<DyInterval> = Vec::new();
    for y in [Rational::from(&ys - &eps), Rational::from(&ys + &eps)] {
        let zi = red.coords(&[AlgReal::from(-1), alg(&y)]).ok_or("target outside the reduced span")?;
        let zi: Vec<DyInterval> = zi.iter().map(|v| v.enclosure(128)).collect();
        z = if z.is_empty() { zi } else { z.iter().zip(&zi).map(|(a, b)| a.hull(b)).collect() };
    }
    sandwiched(&pair, &z, tol)?;

    let s2 = AlgReal::sqrt_rational(&2.into());
    for j in 0..2 {
        match boundary_algebraic_points(&p.a, &p.column(j)).map_err(|e| e.to_string())? {
            BoundaryDescription::FinitePointSet { candidates, .. } => {
                let lim = p.a.solve(&p.column(j).iter().map(|x| x.neg()).collect::<Vec<_>>()).ok_or("singular A")?;
                let neg: Vec<AlgReal> = lim.iter().map(|x| x.neg()).collect();
                ensure!(candidates.len() == 2 && candidates.contains(&lim) && candidates.contains(&neg), "column {} candidates {:?}", j, candidates);
            }
            d => return Err(format!("column {}: {:?}", j, d)),
        }
    }
    let targets = vec![
        avec(&[(2, 1), (0, 1)]),
        vec![AlgReal::zero(), s2.clone()],
        avec(&[(0, 1), (0, 1)]),
        avec(&[(-1, 1), (1, 2)]),
        avec(&[(-1, 1), (13, 10)]),
        vec![AlgReal::one(), s2.recip()],
        vec![s2.clone(), s2.clone()],
        avec(&[(3, 1), (-1, 1)]),
    ];
    let mut names = Vec::new();
    for y in targets {
        let rep = decide(&p.clone().with_target(Target::Point(y.clone())), 16).map_err(|e| e.to_string())?;
        ensure!(!matches!(rep.verdict, MembershipVerdict::Unknown { .. }), "Unknown at {:?}", y);
        names.push(rep.verdict.name());
    }
    Ok(format!("gap {:.2e}; verdicts {}", pair.gap, names.join(",")))
}

fn criterion5() -> Check {
    let p = diag();
    let mut out = Vec::new();
    for (y, ok) in [
        (avec(&[(0, 1), (0, 1)]), &["Reachable"][..]),
        (avec(&[(2, 1), (3, 1)]), &["BoundaryHit", "NotReachable"][..]),
        (avec(&[(21, 10), (31, 10)]), &["NotReachable"][..]),
    ] {
        let t = Instant::now();
        let rep = decide_exact(&p.clone().with_target(Target::Point(y.clone()))).map_err(|e| e.to_string())?;
        within(Duration::from_secs(5), t, "decision")?;
        ensure!(ok.contains(&rep.verdict.name()), "{:?} gave {}", y, rep.verdict.name());
        ensure!(rep.verdict.reachable() != Some(true) || ok[0] == "Reachable", "boundary must not be reachable");
        out.push(rep.verdict.name());
    }
    Ok(out.join(", "))
}

fn criterion6() -> Check {
    let tau = AlgReal::from(10);
    let p = diag().with_horizon(Horizon::Bounded(tau.clone()));
    // the corner -A^{-1}(I - e^{A tau}) b is the support point for every c > 0
    let sp = support_point_bounded(&p.a, &p.column(0), &avec(&[(1, 1), (1, 1)]), &tau, 1e-12).map_err(|e| e.to_string())?;
    let corner = [2.0 * (1.0 - (-5.0f64).exp()), 3.0 * (1.0 - (-10.0f64 / 3.0).exp())];
    for i in 0..2 {
        ensure!((sp.enclosure[i].mid_f64() - corner[i]).abs() < 1e-12, "corner {:?} vs {:?}", sp.enclosure, corner);
    }
    // the tangent cone at the corner lies between (-1, -1) and -(e^{-5}, e^{-10/3})
    let near = |dx: f64, dy: f64| -> Vec<AlgReal> { [corner[0] + dx, corner[1] + dy].iter().map(|c| alg(&rational_of(*c))).collect() };
    let inside = decide(&p.clone().with_target(Target::Point(near(-1e-3, -3e-3))), 20).map_err(|e| e.to_string())?;
    ensure!(inside.verdict.reachable() == Some(true), "inner neighbour gave {}", inside.verdict.name());
    let outside = decide(&p.clone().with_target(Target::Point(near(1e-3, 1e-3))), 20).map_err(|e| e.to_string())?;
    ensure!(outside.verdict.reachable() == Some(false), "outer neighbour gave {}", outside.verdict.name());

    let car = ReachProblem::new(amat(&[&[(0, 1), (1, 1)], &[(0, 1), (0, 1)]]), amat(&[&[(0, 1)], &[(1, 1)]]))
        .with_horizon(Horizon::Bounded(tau.clone()))
        .with_target(Target::Point(avec(&[(50, 1), (10, 1)])));
    let hit = decide(&car, 20).map_err(|e| e.to_string())?;
    ensure!(matches!(&hit.verdict, MembershipVerdict::BoundaryHit(w) if w.bounded), "car gave {}", hit.verdict.name());
    ensure!(hit.verdict.reachable() == Some(true), "bounded boundary hit must map to Reachable");

    let taus: Vec<AlgReal> = [(1, 2), (1, 1), (2, 1), (5, 1), (10, 1), (20, 1)].iter().map(|&(n, d)| AlgReal::frac(n, d)).collect();
    let oracles: Vec<SupportOracle> =
        taus.iter().map(|t| SupportOracle::new(&p.a, &p.column(0), &Horizon::Bounded(t.clone()))).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let inf = SupportOracle::new(&p.a, &p.column(0), &Horizon::Infinite).map_err(|e| e.to_string())?;
    for dir in random_directions(2, 20, 6) {
        let c: Vec<AlgReal> = dir.iter().map(|x| alg(&rational_of(*x))).collect();
        let mut vals = Vec::new();
        for o in oracles.iter().chain(std::iter::once(&inf)) {
            vals.push(o.support(&c, 1e-9).map_err(|e| e.to_string())?.value());
        }
        for w in vals.windows(2) {
            ensure!(w[1].hi >= w[0].lo, "support decreased along {:?}: {:?} then {:?}", dir, w[0], w[1]);
        }
    }
    Ok("corner, neighbours, car boundary and 20 monotone directions".into())
}

fn rand_q(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rational {
    r(rng.gen_range(lo..=hi), den)
}

fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<AlgReal> {
    loop {
        let v: Vec<Rational> = (0..n).map(|_| rand_q(rng, -3, 3, 1)).collect();
        if v.iter().any(|x| *x != 0) {
            return v.iter().map(alg).collect();
        }
    }
}

fn from_q(rows: Vec<Vec<Rational>>) -> AMat {
    Mat::from_rows(rows.into_iter().map(|r| r.iter().map(alg).collect()).collect())
}

fn criterion7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let budget = depth_budget();
    let horizon = DyInterval::from_i64(20, 128);
    let mut done = 0;
    let mut most = 0;
    while done < 200 {
        let n = rng.gen_range(1..=4);
        let mut rows = vec![vec![Rational::new(); n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = -rand_q(&mut rng, 1, 6, 2);
            for x in row.iter_mut().skip(i + 1) {
                *x = rand_q(&mut rng, -2, 2, 1);
            }
        }
        let a = from_q(rows);
        let (b, c) = (rand_vec(&mut rng, n), rand_vec(&mut rng, n));
        let f = form_fc(&a, &b, &c).map_err(|e| e.to_string())?;
        if f.is_identically_zero() {
            continue;
        }
        let pat = isolate_sign_changes(&f, &horizon, budget).map_err(|e| format!("stable system {}: {}", done, e))?;
        ensure!(pat.crossings.len() < n.max(1), "{} crossings for n = {}", pat.crossings.len(), n);
        most = most.max(pat.crossings.len());
        done += 1;
    }
    let radius = 3.0;
    let window = DyInterval::from_i64(3, 128);
    let mut mixed = 0;
    let mut worst = (0usize, 0usize);
    while mixed < 50 {
        let n = rng.gen_range(2..=4);
        let mut rows = vec![vec![Rational::new(); n]; n];
        let mut i = 0;
        let mut complex = false;
        while i < n {
            if i + 1 < n && (!complex || rng.gen_bool(0.5)) {
                let re = rand_q(&mut rng, -2, 1, 2);
                let im = rand_q(&mut rng, 1, 3, 1);
                rows[i][i] = re.clone();
                rows[i + 1][i + 1] = re;
                rows[i][i + 1] = Rational::from(-&im);
                rows[i + 1][i] = im;
                complex = true;
                i += 2;
            } else {
                rows[i][i] = rand_q(&mut rng, -2, 2, 2);
                i += 1;
            }
        }
        if !complex {
            continue;
        }
        // conjugate by a unimodular shear to mix the coordinates
        let mut shear = vec![vec![Rational::new(); n]; n];
        for (i, row) in shear.iter_mut().enumerate() {
            row[i] = Rational::from(1);
            for x in row.iter_mut().skip(i + 1) {
                *x = rand_q(&mut rng, -1, 1, 1);
            }
        }
        let s = from_q(shear);
        let a = s.mul(&from_q(rows)).mul(&s.inverse().ok_or("singular shear")?);
        let (b, c) = (rand_vec(&mut rng, n), rand_vec(&mut rng, n));
        let f = form_fc(&a, &b, &c).map_err(|e| e.to_string())?;
        if f.is_identically_zero() {
            continue;
        }
        let pat = isolate_sign_changes(&f, &window, budget).map_err(|e| format!("mixed system {}: {}", mixed, e))?;
        let bound = (3.0 * (f.n0 as f64 - 1.0) + 4.0 * radius * f.delta).ceil() as usize;
        let reported = zero_count_bound(&f, radius).map_err(|e| e.to_string())?;
        ensure!(pat.crossings.len() <= bound && pat.crossings.len() <= reported, "{} crossings above bound {}", pat.crossings.len(), bound.min(reported));
        if pat.crossings.len() > worst.0 {
            worst = (pat.crossings.len(), bound);
        }
        mixed += 1;
    }
    Ok(format!("200 stable (max {} crossings), 50 mixed (max {} vs bound {})", most, worst.0, worst.1))
}

fn criterion8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let dirs: Vec<Vec<f64>> = (0..16).map(|k| {
        let th = std::f64::consts::PI * k as f64 / 8.0;
        vec![th.cos(), th.sin()]
    }).collect();
    let mut systems = 0;
    let mut checked = 0usize;
    let mut margin = f64::INFINITY;
    while systems < 50 {
        let e: Vec<i64> = (0..4).map(|_| rng.gen_range(-3..=3)).collect();
        let (tr, det) = (e[0] + e[3], e[0] * e[3] - e[1] * e[2]);
        if tr >= 0 || det <= 0 {
            continue;
        }
        let a = amat(&[&[(e[0], 1), (e[1], 1)], &[(e[2], 1), (e[3], 1)]]);
        let b = rand_vec(&mut rng, 2);
        let oracle = match SupportOracle::new(&a, &b, &Horizon::Infinite) {
            Ok(o) => o,
            Err(lti_reach::ReachError::NotControllable) => continue,
            Err(err) => return Err(err.to_string()),
        };
        let p = ReachProblem::new(a, Mat::from_cols(&[b]));
        let cloud = sample_reachable_cloud(&p, 1000, &Rational::from(12), 120, systems as u64).map_err(|e| e.to_string())?;
        ensure!(cloud.len() == 1000, "cloud has {} points", cloud.len());
        for d in &dirs {
            let c: Vec<AlgReal> = d.iter().map(|x| alg(&rational_of(*x))).collect();
            let cf: Vec<f64> = c.iter().map(|x| x.to_f64()).collect();
            let h = oracle.support(&c, 1e-9).map_err(|e| e.to_string())?.value();
            let l1: f64 = cf.iter().map(|x| x.abs()).sum();
            for pt in &cloud {
                let v: f64 = pt.x.iter().zip(&cf).map(|(x, c)| x * c).sum();
                let slack = h.hi.to_f64() + 1e-6 + pt.err * l1 + h.width_f64() - v;
                ensure!(slack >= 0.0, "system {} direction {:?}: {} above {}", systems, d, v, h.hi.to_f64());
                margin = margin.min(slack);
                checked += 1;
            }
        }
        systems += 1;
    }
    Ok(format!("{} comparisons, smallest slack {:.2e}", checked, margin))
}

fn criterion9() -> Check {
    let cos = |flavor| SkolemInstance::new(vec![r(1, 1), r(0, 1)], qmat(&[&[(-1, 1), (2, 1)], &[(-2, 1), (-1, 1)]]), vec![r(1, 1), r(0, 1)], flavor);
    let plain = reduce_plain(&cos(Flavor::Plain).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    // singleton input: the set is an orbit, certified by an exact orbit point
    let t = plain_orbit_witness(&plain, &Rational::from(4), 40).ok_or("plain reduction: no certified orbit point in the target")?;
    let nt = reduce_nontangential(&cos(Flavor::Nontangential).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let rep = set_target_semidecide(&nt.problem, nt.problem.target.as_ref().ok_or("no target")?, 16).map_err(|e| e.to_string())?;
    ensure!(matches!(rep.verdict, MembershipVerdict::Reachable) && rep.witness.is_some(), "nontangential cos: {}", rep.verdict.name());
    let claims = verify_claims(&nt, 1e-6).map_err(|e| e.to_string())?;
    for id in ['b', 'c', 'e', 'f'] {
        ensure!(claims.passed(id), "cos claim ({}) failed:\n{}", id, claims);
    }

    let definite = SkolemInstance::new(vec![r(1, 1), r(1, 1)], qmat(&[&[(-1, 1), (1, 1)], &[(0, 1), (-1, 1)]]), vec![r(0, 1), r(1, 1)], Flavor::Nontangential)
        .map_err(|e| e.to_string())?;
    let red = reduce_nontangential(&definite).map_err(|e| e.to_string())?;
    let rep = set_target_semidecide(&red.problem, red.problem.target.as_ref().ok_or("no target")?, 16).map_err(|e| e.to_string())?;
    ensure!(!matches!(rep.verdict, MembershipVerdict::Reachable), "sign-definite instance reported reachable");
    let claims = verify_claims(&red, 1e-6).map_err(|e| e.to_string())?;
    for id in ['b', 'c', 'e', 'f'] {
        ensure!(claims.passed(id), "sign-definite claim ({}) failed:\n{}", id, claims);
    }
    ensure!(claims.crossings == 0, "sign-definite instance has {} crossings", claims.crossings);
    Ok(format!("plain orbit point at t = {}, nontangential witness certified, sign-definite verdict {}", t, rep.verdict.name()))
}

fn criterion10() -> Check {
    let f = export_fo_formula(&diag(), Theory::R0).map_err(|e| e.to_string())?;
    let blocks = phi_blocks(&f).ok_or("no disjunction of blocks")?;
    ensure!(blocks.len() == 2, "{} blocks", blocks.len());
    let text = f.to_string();
    ensure!(text.contains("forall") && text.contains("exists"), "missing quantifier structure");
    ensure!(FOFormula::parse(&text).map_err(|e| e.to_string())? == f, "R0 export does not round trip");
    ensure!(f.check(&avec(&[(2, 1), (3, 1)])) == Some(true) && f.check(&avec(&[(21, 10), (31, 10)])) == Some(false), "R0 export disagrees with the decision");

    let spiral = ReachProblem::new(amat(&[&[(-1, 1), (-2, 1)], &[(2, 1), (-1, 1)]]), amat(&[&[(1, 1)], &[(0, 1)]]));
    let g = export_fo_formula(&spiral, Theory::RexpSin).map_err(|e| e.to_string())?;
    let gt = g.to_string();
    ensure!(gt.contains("pi") && gt.contains("sin") && gt.contains("cos"), "planar-complex export lacks the pi axiom");
    ensure!(FOFormula::parse(&gt).map_err(|e| e.to_string())? == g, "planar-complex export does not round trip");
    let h = export_fo_formula(&diag().with_horizon(Horizon::Bounded(AlgReal::from(10))), Theory::Rexp).map_err(|e| e.to_string())?;
    ensure!(FOFormula::parse(&h.to_string()).map_err(|e| e.to_string())? == h, "bounded export does not round trip");
    Ok(format!("R0 {} chars, planar-complex {} chars", text.len(), gt.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("support points of the diagonal example", criterion1),
        ("boundary sweep inside the p = 8 sandwich", criterion2),
        ("Minkowski sum of both columns", criterion3),
        ("sqrt 2 spectrum sandwich and decisions", criterion4),
        ("exact decision triple", criterion5),
        ("bounded horizon semantics", criterion6),
        ("zero-count bounds", criterion7),
        ("oracle support dominance", criterion8),
        ("Skolem reductions", criterion9),
        ("formula export", criterion10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        match res {
            Ok(info) => println!("criterion {:>2} PASS  {} [{:.2?}] {}", i + 1, name, t.elapsed(), info),
            Err(info) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {} [{:.2?}] {}", i + 1, name, t.elapsed(), info);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
