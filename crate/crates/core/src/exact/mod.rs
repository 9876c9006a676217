//! Exact decisions for the subclasses where the algebraic points of the
//! boundary can be enumerated, and first-order formula export for the rest.
//!
//! The boundary test works on the reduced system when it is at most planar.
//! Every input column contributes a support set that depends only on the
//! sign pattern of `f_c(t) = c^T E e^{Ct} b`; the critical rays where some
//! pattern changes cut the circle of directions into finitely many classes.
//! In a class without sign change the support set is an exact polytope face.
//! In a class where one column changes sign once, the crossing time is
//! recovered from the target itself, and the transcendence theorems rule
//! out every configuration except rational exponent ratios, where the
//! remaining condition `z_1^{p_2} = z_2^{p_1}` is checked exactly.

pub mod export;
pub mod formula;

use crate::algnum::{eigen_structure, AMat, AlgReal, Mat};
use crate::approx::{membership_semidecide, reduced_map, BoundaryWitness, MembershipReport, MembershipVerdict};
use crate::decomp::{build_plan, reduce, ReducedSystem};
use crate::model::{classify, Horizon, InputSet, ReachProblem, SubclassTag, Target};
use crate::{ReachError, Result};
use rug::{Integer, Rational};
use serde::Serialize;

pub use export::export_fo_formula;
pub use formula::{FOFormula, Theory};

/// Hard cap on the sandwich precision used after a negative boundary test.
pub const DECIDE_MAX_P: u32 = 44;

// ---------------------------------------------------------------------------
// Small exact vector helpers

fn dotv(a: &[AlgReal], b: &[AlgReal]) -> AlgReal {
    a.iter().zip(b).fold(AlgReal::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

fn addv(a: &[AlgReal], b: &[AlgReal]) -> Vec<AlgReal> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

fn subv(a: &[AlgReal], b: &[AlgReal]) -> Vec<AlgReal> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

fn scalev(a: &[AlgReal], s: &AlgReal) -> Vec<AlgReal> {
    a.iter().map(|x| x.mul(s)).collect()
}

fn cross2(a: &[AlgReal], b: &[AlgReal]) -> AlgReal {
    a[0].mul(&b[1]).sub(&a[1].mul(&b[0]))
}

fn eqv(a: &[AlgReal], b: &[AlgReal]) -> bool {
    a.iter().zip(b).all(|(x, y)| x == y)
}

fn sign_alg(s: i32) -> AlgReal {
    AlgReal::from(s as i64)
}

fn shifted(c: &AMat, lambda: &AlgReal) -> AMat {
    let mut m = c.clone();
    for i in 0..m.rows {
        let v = m.get(i, i).sub(lambda);
        m.set(i, i, v);
    }
    m
}

// ---------------------------------------------------------------------------
// Part analysis

#[derive(Clone, Debug)]
enum Shape {
    /// One-dimensional part: `f_c = (c^T l0) e^{λt}`.
    Line,
    /// Two distinct real modes `μ_1 > μ_2` in eigen coordinates `W`.
    Diag { winv: AMat, mu: [AlgReal; 2], bt: [AlgReal; 2], powers: Option<(u32, u32)> },
    /// One eigenvalue with a 2x2 Jordan block: `f_c = e^{λt}(c^T l0 + t c^T ls)`.
    Jordan,
}

#[derive(Clone, Debug)]
struct Part {
    shape: Shape,
    /// `f_c(0) = c^T l0`.
    l0: Vec<AlgReal>,
    /// Coefficient of the dominant term as `t -> ∞`.
    ls: Vec<AlgReal>,
    /// Support point for a positive constant sign, `E (-C^{-1} b)`.
    limit: Vec<AlgReal>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Point(i32),
    Face,
    Cross(i32),
}

impl Part {
    fn state(&self, c: &[AlgReal]) -> State {
        let g0 = dotv(&self.l0, c).signum();
        if let Shape::Line = self.shape {
            return if g0 == 0 { State::Face } else { State::Point(g0) };
        }
        let gs = dotv(&self.ls, c).signum();
        if g0 != 0 && gs != 0 && g0 != gs {
            State::Cross(g0)
        } else if g0 != 0 {
            State::Point(g0)
        } else {
            State::Point(gs)
        }
    }
}

fn rational_powers(mu1: &AlgReal, mu2: &AlgReal) -> Option<(u32, u32)> {
    let r = mu2.div(mu1);
    let q = r.as_rational()?;
    let p2 = q.numer().to_u32()?;
    let p1 = q.denom().to_u32()?;
    Some((p1, p2))
}

fn analyze(r: &ReducedSystem) -> std::result::Result<Vec<Part>, String> {
    if r.d > 2 {
        return Err(format!("reduced dimension {} above 2", r.d));
    }
    let mut out = Vec::new();
    for (c, b, e) in &r.parts {
        let k = c.rows;
        let l0 = e.mul_vec(b);
        match k {
            1 => {
                let lambda = c.get(0, 0).clone();
                if lambda.signum() >= 0 {
                    return Err("part is not stable".into());
                }
                let limit = scalev(&l0, &lambda.recip().neg());
                out.push(Part { shape: Shape::Line, ls: l0.clone(), l0, limit });
            }
            2 => {
                let ci = c.inverse().ok_or("singular part")?;
                let limit = e.mul_vec(&ci.mul_vec(b)).iter().map(|x| x.neg()).collect();
                let sp = eigen_structure(c).map_err(|e| e.to_string())?;
                if !sp.real_spectrum {
                    return Err("part has complex eigenvalues".into());
                }
                if !sp.is_stable() {
                    return Err("part is not stable".into());
                }
                let mut mus: Vec<AlgReal> = sp.eigenvalues.iter().map(|ev| ev.re.clone()).collect();
                mus.sort_by(|a, b| b.cmp(a));
                if mus.len() == 2 {
                    let mut cols = Vec::new();
                    for mu in &mus {
                        let ker = shifted(c, mu).kernel();
                        cols.push(ker.into_iter().next().ok_or("missing eigenvector")?);
                    }
                    let m = Mat::from_cols(&cols);
                    let mi = m.inverse().ok_or("eigenvectors are dependent")?;
                    let bt = mi.mul_vec(b);
                    let w = e.mul(&m);
                    let winv = w.inverse().ok_or("part does not span the plane")?;
                    let ls = scalev(&w.col(0), &bt[0]);
                    let powers = rational_powers(&mus[0], &mus[1]);
                    let shape = Shape::Diag {
                        winv,
                        mu: [mus[0].clone(), mus[1].clone()],
                        bt: [bt[0].clone(), bt[1].clone()],
                        powers,
                    };
                    out.push(Part { shape, l0, ls, limit });
                } else {
                    let nb = shifted(c, &mus[0]).mul_vec(b);
                    if nb.iter().all(|x| x.is_zero()) {
                        return Err("scalar part is not controllable".into());
                    }
                    let ls = e.mul_vec(&nb);
                    out.push(Part { shape: Shape::Jordan, l0, ls, limit });
                }
            }
            _ => return Err(format!("part of dimension {}", k)),
        }
    }
    Ok(out)
}

/// Representatives of every direction class: the critical rays and one
/// direction strictly inside each sector between consecutive rays.
fn class_representatives(parts: &[Part], d: usize) -> Vec<Vec<AlgReal>> {
    if d == 1 {
        return vec![vec![AlgReal::one()], vec![AlgReal::from(-1)]];
    }
    let mut rays: Vec<Vec<AlgReal>> = vec![
        vec![AlgReal::one(), AlgReal::zero()],
        vec![AlgReal::zero(), AlgReal::one()],
        vec![AlgReal::from(-1), AlgReal::zero()],
        vec![AlgReal::zero(), AlgReal::from(-1)],
    ];
    for p in parts {
        for l in [&p.l0, &p.ls] {
            if l.iter().all(|x| x.is_zero()) {
                continue;
            }
            let perp = vec![l[1].neg(), l[0].clone()];
            rays.push(perp.iter().map(|x| x.neg()).collect());
            rays.push(perp);
        }
    }
    let angle = |v: &Vec<AlgReal>| v[1].to_f64().atan2(v[0].to_f64());
    rays.sort_by(|a, b| angle(a).partial_cmp(&angle(b)).unwrap_or(std::cmp::Ordering::Equal));
    let mut uniq: Vec<Vec<AlgReal>> = Vec::new();
    for r in rays {
        let dup = uniq.iter().any(|u| cross2(u, &r).is_zero() && dotv(u, &r).signum() > 0);
        if !dup {
            uniq.push(r);
        }
    }
    let k = uniq.len();
    let mut reps = uniq.clone();
    for i in 0..k {
        reps.push(addv(&uniq[i], &uniq[(i + 1) % k]));
    }
    reps
}

/// Outcome of the exact boundary test.
#[derive(Clone, Debug)]
pub enum BoundaryTest {
    OnBoundary(BoundaryWitness),
    NotOnBoundary,
    /// The configuration is outside what the test settles.
    OutOfScope(String),
}

fn in_face_set(v: &[AlgReal], faces: &[&Part]) -> bool {
    if faces.is_empty() {
        return v.iter().all(|x| x.is_zero());
    }
    let r = &faces[0].limit;
    if v.len() == 2 && !cross2(v, r).is_zero() {
        return false;
    }
    let rr = dotv(r, r);
    let s = dotv(v, r).div(&rr).abs();
    let bound = faces.iter().fold(AlgReal::zero(), |acc, f| acc.add(&dotv(&f.limit, r).abs().div(&rr)));
    s <= bound
}

/// Solve the single-crossing class of `part` for the target `w`.
fn crossing_direction(part: &Part, w: &[AlgReal], s0: i32) -> Option<Vec<AlgReal>> {
    let Shape::Diag { winv, mu, bt, powers, .. } = &part.shape else {
        // one algebraic crossing time would make e^{λt} algebraic
        return None;
    };
    // an irrational exponent ratio makes z_2 = z_1^{μ_2/μ_1} transcendental
    let (p1, p2) = (*powers)?;
    let wt = winv.mul_vec(w);
    let s = sign_alg(s0);
    let half = AlgReal::frac(1, 2);
    let mut z = Vec::with_capacity(2);
    for i in 0..2 {
        let zi = AlgReal::one().add(&s.mul(&mu[i]).mul(&wt[i]).div(&bt[i])).mul(&half);
        if zi.signum() <= 0 || zi >= AlgReal::one() {
            return None;
        }
        z.push(zi);
    }
    if z[0].powi(p2 as i32) != z[1].powi(p1 as i32) {
        return None;
    }
    let ct = vec![s.neg().mul(&z[1]).div(&bt[0]), s.mul(&z[0]).div(&bt[1])];
    Some(winv.transpose().mul_vec(&ct))
}

fn state_direction(r: &ReducedSystem, c: &[AlgReal]) -> Option<Vec<AlgReal>> {
    reduced_map(r).map(|m| m.transpose().mul_vec(c))
}

fn planar_test(r: &ReducedSystem, parts: &[Part], z: &[AlgReal], y: &[AlgReal]) -> BoundaryTest {
    let mut scope_note: Option<String> = None;
    for c in class_representatives(parts, r.d) {
        let states: Vec<State> = parts.iter().map(|p| p.state(&c)).collect();
        let crossing: Vec<usize> = (0..parts.len()).filter(|&j| matches!(states[j], State::Cross(_))).collect();
        let faces: Vec<&Part> = (0..parts.len()).filter(|&j| states[j] == State::Face).map(|j| &parts[j]).collect();
        let mut base = vec![AlgReal::zero(); r.d];
        for (j, st) in states.iter().enumerate() {
            if let State::Point(s) = st {
                base = addv(&base, &scalev(&parts[j].limit, &sign_alg(*s)));
            }
        }
        match crossing.len() {
            0 => {
                if in_face_set(&subv(z, &base), &faces) {
                    let note = if faces.is_empty() { "constant-sign support point" } else { "constant-sign support face" };
                    return BoundaryTest::OnBoundary(BoundaryWitness {
                        point: y.to_vec(),
                        direction: state_direction(r, &c),
                        bounded: false,
                        note: note.into(),
                    });
                }
            }
            1 => {
                if !faces.is_empty() {
                    scope_note = Some("a sign change meets a support face".into());
                    continue;
                }
                let j0 = crossing[0];
                let State::Cross(s0) = states[j0] else { unreachable!() };
                let w = subv(z, &base);
                let Some(cstar) = crossing_direction(&parts[j0], &w, s0) else { continue };
                let ok = parts.iter().enumerate().all(|(j, p)| {
                    let st = p.state(&cstar);
                    if j == j0 {
                        st == State::Cross(s0)
                    } else {
                        st == states[j]
                    }
                });
                if ok {
                    return BoundaryTest::OnBoundary(BoundaryWitness {
                        point: y.to_vec(),
                        direction: state_direction(r, &cstar),
                        bounded: false,
                        note: "single sign change with rational exponent ratio".into(),
                    });
                }
            }
            _ => scope_note = Some("several input columns change sign for the same directions".into()),
        }
    }
    match scope_note {
        Some(n) => BoundaryTest::OutOfScope(n),
        None => BoundaryTest::NotOnBoundary,
    }
}

/// Bounded horizon: a single nilpotent part, whose extreme points
/// `±∫_0^τ e^{Ct} b dt` are polynomial in `τ`.
fn bounded_test(r: &ReducedSystem, z: &[AlgReal], y: &[AlgReal], tau: &AlgReal) -> BoundaryTest {
    if r.parts.len() != 1 {
        return BoundaryTest::OutOfScope("bounded horizon with several parts".into());
    }
    let (c, b, e) = &r.parts[0];
    let k = c.rows;
    if e.rows != k || !c.pow(k).is_zero_matrix() {
        return BoundaryTest::OutOfScope("bounded horizon with a non-nilpotent part".into());
    }
    let mut krylov = vec![b.clone()];
    for i in 1..k {
        let next = c.mul_vec(&krylov[i - 1]);
        krylov.push(next);
    }
    let mut f = vec![AlgReal::zero(); k];
    let mut coef = tau.clone();
    for (i, v) in krylov.iter().enumerate() {
        f = addv(&f, &scalev(v, &coef));
        coef = coef.mul(tau).div(&AlgReal::from(i as i64 + 2));
    }
    let ef = e.mul_vec(&f);
    for s in [1i32, -1] {
        if eqv(z, &scalev(&ef, &sign_alg(s))) {
            // c^T C^i b = s δ_{i0} makes f_c constant
            let kt = Mat::from_cols(&krylov).transpose();
            let mut rhs = vec![AlgReal::zero(); k];
            rhs[0] = sign_alg(s);
            let direction = kt.solve(&rhs).and_then(|ct| e.transpose().solve(&ct)).and_then(|cr| state_direction(r, &cr));
            return BoundaryTest::OnBoundary(BoundaryWitness { point: y.to_vec(), direction, bounded: true, note: "constant-input endpoint".into() });
        }
    }
    BoundaryTest::OutOfScope("bounded horizon away from the constant-input endpoints".into())
}

/// Exact test of whether `y` lies on the boundary of the reachable set.
pub fn boundary_test(p: &ReachProblem, y: &[AlgReal]) -> Result<BoundaryTest> {
    p.validate()?;
    if y.len() != p.n() {
        return Err(ReachError::DimensionMismatch(format!("target has {} entries, system has {}", y.len(), p.n())));
    }
    if p.input_set != InputSet::Hypercube {
        return Ok(BoundaryTest::OutOfScope("input set is not the hypercube".into()));
    }
    let plan = build_plan(p)?;
    let r = reduce(&plan);
    if r.whole_space() || r.d == 0 {
        return Ok(BoundaryTest::NotOnBoundary);
    }
    let Some(z) = r.coords(y) else {
        return Ok(BoundaryTest::NotOnBoundary);
    };
    if let Horizon::Bounded(tau) = &p.horizon {
        return Ok(bounded_test(&r, &z, y, tau));
    }
    let parts = match analyze(&r) {
        Ok(parts) => parts,
        Err(msg) => return Ok(BoundaryTest::OutOfScope(msg)),
    };
    Ok(planar_test(&r, &parts, &z, y))
}

/// The boundary witness for `y`, when the exact test finds one.
pub fn boundary_witness(p: &ReachProblem, y: &[AlgReal]) -> Result<Option<BoundaryWitness>> {
    if p.input_set != InputSet::Hypercube {
        return Ok(None);
    }
    Ok(match boundary_test(p, y)? {
        BoundaryTest::OnBoundary(w) => Some(w),
        _ => None,
    })
}

/// Total decision for point targets in the exactly decidable subclasses.
pub fn decide_exact(p: &ReachProblem) -> Result<MembershipReport> {
    decide_exact_with(p, DECIDE_MAX_P)
}

pub fn decide_exact_with(p: &ReachProblem, max_p: u32) -> Result<MembershipReport> {
    let Some(Target::Point(y)) = &p.target else {
        return Err(ReachError::Unsupported("exact decision needs a point target".into()));
    };
    if p.input_set != InputSet::Hypercube {
        return membership_semidecide(p, y, max_p);
    }
    let cl = classify(p)?;
    let tagged = cl.has(SubclassTag::RationalMultipleSpectrum)
        || cl.has(SubclassTag::TwoNonzeroEntries)
        || cl.has(SubclassTag::SingleRealEigenvalue)
        || (cl.has(SubclassTag::Planar) && cl.has(SubclassTag::RealSpectrum));
    if !tagged {
        return Err(ReachError::TagMismatch("no exactly decidable subclass applies".into()));
    }
    match boundary_test(p, y)? {
        BoundaryTest::OnBoundary(w) => Ok(MembershipReport::quick(MembershipVerdict::BoundaryHit(w), "exact boundary test")),
        BoundaryTest::OutOfScope(msg) => Err(ReachError::TagMismatch(msg)),
        BoundaryTest::NotOnBoundary => {
            let mut rep = membership_semidecide(p, y, max_p)?;
            rep.diagnostics.push("exact test: target is not on the boundary".into());
            Ok(rep)
        }
    }
}

/// Exact decision where a subclass applies, the sandwich semi-decision
/// otherwise.
pub fn decide(p: &ReachProblem, max_p: u32) -> Result<MembershipReport> {
    match decide_exact_with(p, max_p) {
        Err(ReachError::TagMismatch(msg)) => {
            let Some(Target::Point(y)) = &p.target else { unreachable!("checked by decide_exact_with") };
            let mut rep = membership_semidecide(p, y, max_p)?;
            rep.diagnostics.insert(0, format!("no exact path: {}", msg));
            Ok(rep)
        }
        other => other,
    }
}

// ---------------------------------------------------------------------------
// Descriptions of the algebraic boundary points

/// `f_c(t) = Q(c, e^{αt})` for a diagonalizable real spectrum `μ_i = p_i α`.
#[derive(Clone, Debug, Serialize)]
pub struct RationalPowerForm {
    /// Negative base exponent.
    pub alpha: AlgReal,
    pub powers: Vec<u32>,
    pub mu: Vec<AlgReal>,
    /// Eigenvector columns: `x = M x̃`.
    pub basis: AMat,
    /// Input column in eigen coordinates.
    pub b: Vec<AlgReal>,
    /// Degree of `Q(c, ·)`.
    pub degree: u32,
    /// Maximal number of sign changes of `f_c`.
    pub zero_cap: usize,
}

impl RationalPowerForm {
    /// Terms `(p_i, c̃_i b̃_i)` of `Q(c, z)`, for `c` in state coordinates.
    pub fn q_terms(&self, c: &[AlgReal]) -> Vec<(u32, AlgReal)> {
        let ct = self.basis.transpose().mul_vec(c);
        self.powers.iter().zip(ct.iter().zip(&self.b)).map(|(&p, (ci, bi))| (p, ci.mul(bi))).collect()
    }

    pub fn q_eval(&self, c: &[AlgReal], z: &AlgReal) -> AlgReal {
        self.q_terms(c).iter().fold(AlgReal::zero(), |acc, (p, k)| acc.add(&k.mul(&z.powi(*p as i32))))
    }

    /// `R_{k,j}` in eigen coordinates for crossings `0 < z_1 < ... < z_k < 1`
    /// and initial sign `s0`.
    pub fn eigen_point(&self, s0: i32, z: &[AlgReal]) -> Vec<AlgReal> {
        (0..self.mu.len())
            .map(|j| {
                let mut acc = AlgReal::zero();
                for (i, zi) in z.iter().rev().enumerate() {
                    let w = zi.powi(self.powers[j] as i32);
                    acc = if i % 2 == 0 { acc.add(&w) } else { acc.sub(&w) };
                }
                let inner = acc.mul(&AlgReal::from(2)).sub(&AlgReal::one());
                sign_alg(s0).mul(&self.b[j]).div(&self.mu[j]).mul(&inner)
            })
            .collect()
    }

    /// `R_k(z)` in state coordinates.
    pub fn point(&self, s0: i32, z: &[AlgReal]) -> Vec<AlgReal> {
        self.basis.mul_vec(&self.eigen_point(s0, z))
    }
}

/// Single real eigenvalue `λ`: `e^{At} b = e^{λt} Σ_k t^k/k! N^k b`.
#[derive(Clone, Debug, Serialize)]
pub struct LindemannFamily {
    pub eigenvalue: AlgReal,
    /// `N^k b / k!` for `N = A - λI`.
    pub chain: Vec<Vec<AlgReal>>,
    pub limit: Vec<AlgReal>,
    pub a_inv: AMat,
}

impl LindemannFamily {
    /// Vector multiplying `e^{λ t_i}` in the support point, up to the
    /// factor `2 s0 (-1)^{i-1}`: the side condition is that it vanishes.
    pub fn side_term(&self, t: &AlgReal) -> Vec<AlgReal> {
        let mut acc = vec![AlgReal::zero(); self.limit.len()];
        let mut tk = AlgReal::one();
        for v in &self.chain {
            acc = addv(&acc, &scalev(v, &tk));
            tk = tk.mul(t);
        }
        self.a_inv.mul_vec(&acc)
    }

    /// Algebraic points left once every side condition fails: with a
    /// controllable column the chain is independent, so no crossing survives.
    pub fn candidates(&self) -> Vec<Vec<AlgReal>> {
        vec![self.limit.clone(), self.limit.iter().map(|x| x.neg()).collect()]
    }
}

#[derive(Clone, Debug, Serialize)]
pub enum BoundaryDescription {
    FinitePointSet { candidates: Vec<Vec<AlgReal>>, reason: String },
    PolynomialSystemFamily(RationalPowerForm),
    LindemannFamily(LindemannFamily),
}

fn limit_point(a: &AMat, b: &[AlgReal]) -> Result<Vec<AlgReal>> {
    let ai = a.inverse().ok_or(ReachError::NotStable)?;
    Ok(ai.mul_vec(b).iter().map(|x| x.neg()).collect())
}

/// Rational-power form of a stable diagonalizable real spectrum whose
/// eigenvalues are rational multiples of each other.
pub fn rational_power_form(a: &AMat, b: &[AlgReal]) -> Result<RationalPowerForm> {
    let sp = eigen_structure(a)?;
    if !sp.real_spectrum || !sp.is_diagonalizable() {
        return Err(ReachError::TagMismatch("spectrum is not real and diagonalizable".into()));
    }
    if !sp.is_stable() {
        return Err(ReachError::NotStable);
    }
    let mut evs: Vec<AlgReal> = sp.eigenvalues.iter().map(|e| e.re.clone()).collect();
    evs.sort_by(|x, y| y.cmp(x));
    let mut mu = Vec::new();
    let mut cols = Vec::new();
    for ev in &evs {
        for v in shifted(a, ev).kernel() {
            mu.push(ev.clone());
            cols.push(v);
        }
    }
    let reference = evs[0].clone();
    let mut ratios = Vec::new();
    for m in &mu {
        let r = m.div(&reference);
        match r.as_rational() {
            Some(q) => ratios.push(q.clone()),
            None => return Err(ReachError::TagMismatch("eigenvalues are not rational multiples of each other".into())),
        }
    }
    let mut lcm = Integer::from(1);
    for q in &ratios {
        lcm.lcm_mut(q.denom());
    }
    let mut powers_i: Vec<Integer> = ratios.iter().map(|q| Integer::from(q.numer() * &lcm) / q.denom()).collect();
    let mut g = Integer::new();
    for p in &powers_i {
        g.gcd_mut(p);
    }
    for p in &mut powers_i {
        *p /= &g;
    }
    let scale = Rational::from((g, lcm));
    let alpha = reference.mul(&AlgReal::from(scale));
    let powers: Vec<u32> = powers_i.iter().map(|p| p.to_u32().unwrap_or(u32::MAX)).collect();
    let basis = Mat::from_cols(&cols);
    let bi = basis.inverse().ok_or_else(|| ReachError::TagMismatch("eigenvectors do not form a basis".into()))?;
    let bt = bi.mul_vec(b);
    let degree = powers.iter().copied().max().unwrap_or(0);
    let zero_cap = a.rows.saturating_sub(1);
    Ok(RationalPowerForm { alpha, powers, mu, basis, b: bt, degree, zero_cap })
}

/// Exact description of the algebraic points on the boundary of the
/// reachable set of `(a, b)` with infinite horizon.
pub fn boundary_algebraic_points(a: &AMat, b: &[AlgReal]) -> Result<BoundaryDescription> {
    let p = ReachProblem::new(a.clone(), Mat::from_cols(&[b.to_vec()]));
    let cl = classify(&p)?;
    if !cl.spectral.is_stable() {
        return Err(ReachError::NotStable);
    }
    if b.iter().all(|x| x.is_zero()) {
        return Err(ReachError::ZeroColumn);
    }
    let limit = limit_point(a, b)?;
    let pm = vec![limit.clone(), limit.iter().map(|x| x.neg()).collect()];
    if cl.has(SubclassTag::TwoNonzeroEntries) {
        let idx: Vec<usize> = (0..b.len()).filter(|&i| !b[i].is_zero()).collect();
        if idx.len() == 1 {
            return Ok(BoundaryDescription::FinitePointSet { candidates: pm, reason: "f_c has constant sign".into() });
        }
        let (m1, m2) = (a.get(idx[0], idx[0]), a.get(idx[1], idx[1]));
        if m1 == m2 {
            return Ok(BoundaryDescription::FinitePointSet { candidates: pm, reason: "f_c has constant sign".into() });
        }
        if !m2.div(m1).is_rational() {
            return Ok(BoundaryDescription::FinitePointSet {
                candidates: pm,
                reason: "exponent ratio is irrational: a crossing would give an algebraic number to an irrational algebraic power".into(),
            });
        }
    }
    if cl.has(SubclassTag::RationalMultipleSpectrum) {
        return Ok(BoundaryDescription::PolynomialSystemFamily(rational_power_form(a, b)?));
    }
    if cl.has(SubclassTag::SingleRealEigenvalue) {
        let lambda = cl.spectral.eigenvalues[0].re.clone();
        let nmat = shifted(a, &lambda);
        let mut chain = vec![b.to_vec()];
        for k in 1..a.rows {
            let next = nmat.mul_vec(&chain[k - 1]);
            if next.iter().all(|x| x.is_zero()) {
                break;
            }
            chain.push(next);
        }
        // rescale N^k b by 1/k!
        let mut f = AlgReal::one();
        for (k, v) in chain.iter_mut().enumerate() {
            if k > 0 {
                f = f.mul(&AlgReal::from(k as i64));
                *v = scalev(v, &f.recip());
            }
        }
        let a_inv = a.inverse().ok_or(ReachError::NotStable)?;
        return Ok(BoundaryDescription::LindemannFamily(LindemannFamily { eigenvalue: lambda, chain, limit, a_inv }));
    }
    Err(ReachError::TagMismatch("none of the finite-description cases applies".into()))
}
