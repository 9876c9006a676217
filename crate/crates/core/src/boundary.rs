//! Certified support points of single-input reachable sets.
//!
//! For a direction `c`, the maximizer of `c^T x` over the closure of the
//! reachable set is `∫ exp(At) b sgn(c^T exp(At) b) dt`. With `G(t)` the
//! antiderivative `∫_0^t exp(As) b ds` and sign changes `t_1 < ... < t_k`
//! on `[0, T]`, the integral equals
//! `s0 [(-1)^k G(T) + 2 Σ (-1)^{i-1} G(t_i)]`.
//! `G` is itself an exponential polynomial: the first `n` components of
//! `exp(Â t) e_{n+1}` for `Â = [[A, b], [0, 0]]`, which is valid for
//! singular `A` and Jordan blocks alike. For stable `A`, `G(∞) = -A^{-1} b`.

use crate::algnum::{eigen_structure, start_prec, AMat, AlgReal, CInterval, DyInterval, Mat, MAX_PREC};
use crate::decomp::controllability_matrix;
use crate::exppoly::{isolate_sign_changes, refine_crossing, zero_count_bound, ExpBasis, SignPattern};
use crate::model::Horizon;
use crate::ReachError;
use rug::float::Round;
use rug::Float;

/// `‖exp(At) b‖ ≤ D e^{αt}` for `t ≥ 0`, with per-component constants.
#[derive(Clone, Debug)]
pub struct TailBound {
    pub d: Float,
    pub alpha: Float,
    pub d_comp: Vec<Float>,
}

impl TailBound {
    /// Upper bound on `∫_T^∞ |(exp(At) b)_i| dt` for each component.
    pub fn tail(&self, t: &Float) -> Vec<Float> {
        let p = self.alpha.prec();
        let mut e = Float::with_val(p, &self.alpha * t);
        e.exp_round(Round::Up);
        let inv = Float::with_val_round(p, 1 / Float::with_val(p, -&self.alpha), Round::Up).0;
        self.d_comp
            .iter()
            .map(|d| {
                let x = Float::with_val_round(p, d * &e, Round::Up).0;
                Float::with_val_round(p, x * &inv, Round::Up).0
            })
            .collect()
    }

    /// Horizon making every component tail at most `tol / 4`, so the
    /// symmetric tail box has width at most `tol / 2`.
    pub fn truncation(&self, tol: f64) -> Float {
        let p = self.alpha.prec();
        let dmax = self.d_comp.iter().fold(Float::with_val(p, 0), |m, x| if *x > m { x.clone() } else { m });
        let a = -self.alpha.to_f64();
        let t = ((4.0 * dmax.to_f64() / (a * tol)).ln() / a).max(0.0);
        // a small cushion absorbs the rounding of the logarithm
        Float::with_val(p, t * (1.0 + 1e-9) + 1e-9)
    }
}

fn tail_from_basis(basis: &ExpBasis) -> Result<TailBound, ReachError> {
    let p = basis.prec;
    let mut sigma: Option<Float> = None;
    for (re, _, _, _) in basis.term_data() {
        let h = re.enclosure(p).hi;
        sigma = Some(match sigma {
            Some(s) if s >= h => s,
            _ => h,
        });
    }
    let sigma = sigma.unwrap_or_else(|| Float::with_val(p, -1));
    if sigma >= 0 {
        return Err(ReachError::NotStable);
    }
    let needs_margin = basis.term_data().any(|(re, _, _, c)| c.len() > 1 && re.enclosure(p).hi >= sigma);
    let alpha = if needs_margin { Float::with_val(p, &sigma / 2) } else { sigma };
    let n = basis.n;
    let mut d_comp = vec![Float::with_val(p, 0); n];
    let e1 = DyInterval::one(p).exp();
    for (re, _, doubled, coeffs) in basis.term_data() {
        let delta = &DyInterval::point(alpha.clone()) - &re.enclosure(p);
        for (l, v) in coeffs.iter().enumerate() {
            let factor = if l == 0 {
                Float::with_val(p, 1)
            } else {
                // sup_t t^l e^{-δt} = (l / (e δ))^l
                let q = &DyInterval::from_i64(l as i64, p) / &(&e1 * &delta);
                q.powi(l as u32).hi
            };
            for (comp, d) in d_comp.iter_mut().enumerate() {
                let mut m = Float::with_val_round(p, v[comp].mag() * &factor, Round::Up).0;
                if doubled {
                    m <<= 1;
                }
                d.add_assign_round(&m, Round::Up);
            }
        }
    }
    let mut s = Float::with_val(p, 0);
    for d in &d_comp {
        s.add_assign_round(&Float::with_val_round(p, d.square_ref(), Round::Up).0, Round::Up);
    }
    let d = Float::with_val_round(p, s.sqrt_ref(), Round::Up).0;
    Ok(TailBound { d, alpha, d_comp })
}

use rug::ops::AddAssignRound;

/// Certified `D`, `α < 0` with `‖exp(At) b‖ ≤ D e^{αt}`.
pub fn tail_bound(a: &AMat, b: &[AlgReal]) -> Result<TailBound, ReachError> {
    tail_from_basis(&ExpBasis::new(a, b, start_prec())?)
}

#[derive(Clone, Debug)]
pub struct SupportPoint {
    pub direction: Vec<AlgReal>,
    pub enclosure: Vec<DyInterval>,
    /// Exact value, when the sign pattern is constant and complete.
    pub exact: Option<Vec<AlgReal>>,
    pub pattern: SignPattern,
    pub horizon: Option<AlgReal>,
    /// Truncation horizon and tail bound used (infinite horizon only).
    pub truncation: Option<f64>,
    pub tail: f64,
}

impl SupportPoint {
    pub fn width(&self) -> f64 {
        self.enclosure.iter().map(|x| x.width_f64()).fold(0.0, f64::max)
    }

    /// Enclosure of `c^T β_c`.
    pub fn value(&self) -> DyInterval {
        crate::exppoly::dot_enclosure(&self.direction, &self.enclosure)
    }
}

/// Precomputed data for repeated support-point queries on one `(A, b)`.
#[derive(Clone, Debug)]
pub struct SupportOracle {
    pub a: AMat,
    pub b: Vec<AlgReal>,
    pub n: usize,
    pub tau: Option<AlgReal>,
    pub prec: u32,
    basis: ExpBasis,
    anti: ExpBasis,
    /// `-A^{-1} b` for stable `A`.
    pub limit: Option<Vec<AlgReal>>,
    pub tail: Option<TailBound>,
    real_cap: Option<usize>,
}

impl SupportOracle {
    pub fn new(a: &AMat, b: &[AlgReal], horizon: &Horizon) -> Result<SupportOracle, ReachError> {
        SupportOracle::with_prec(a, b, horizon, start_prec())
    }

    pub fn with_prec(a: &AMat, b: &[AlgReal], horizon: &Horizon, prec: u32) -> Result<SupportOracle, ReachError> {
        let n = a.rows;
        if controllability_matrix(a, b).1 != n {
            return Err(ReachError::NotControllable);
        }
        let basis = ExpBasis::new(a, b, prec)?;
        let mut aug = Mat::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, a.get(i, j).clone());
            }
            aug.set(i, n, b[i].clone());
        }
        let mut e = vec![AlgReal::zero(); n + 1];
        e[n] = AlgReal::one();
        let anti = ExpBasis::new(&aug, &e, prec)?;
        let tau = horizon.tau().cloned();
        let (limit, tail) = if tau.is_none() {
            let spec = eigen_structure(a)?;
            if !spec.is_stable() {
                return Err(ReachError::NotStable);
            }
            let nb: Vec<AlgReal> = b.iter().map(|x| x.neg()).collect();
            (a.solve(&nb), Some(tail_from_basis(&basis)?))
        } else {
            (None, None)
        };
        let real_cap = basis.real_spectrum.then(|| n.saturating_sub(1));
        Ok(SupportOracle { a: a.clone(), b: b.to_vec(), n, tau, prec, basis, anti, limit, tail, real_cap })
    }

    fn horizon(&self) -> Horizon {
        match &self.tau {
            Some(t) => Horizon::Bounded(t.clone()),
            None => Horizon::Infinite,
        }
    }

    /// `G(t) = ∫_0^t exp(As) b ds` for all `t` in the interval.
    pub fn antiderivative(&self, t: &DyInterval) -> Vec<DyInterval> {
        let mut v = self.anti.eval(t);
        v.truncate(self.n);
        v
    }

    /// `exp(At) b`.
    pub fn flow(&self, t: &DyInterval) -> Vec<DyInterval> {
        self.basis.eval(t)
    }

    pub fn exp_basis(&self) -> &ExpBasis {
        &self.basis
    }

    /// Enclosure of the support point in direction `c` with width at most `tol`.
    pub fn support(&self, c: &[AlgReal], tol: f64) -> Result<SupportPoint, ReachError> {
        let mut cur = self.clone();
        loop {
            let sp = cur.support_once(c, tol)?;
            if sp.width() <= tol || sp.exact.is_some() {
                return Ok(sp);
            }
            let prec = cur.prec * 2;
            if prec > MAX_PREC {
                return Err(ReachError::PrecisionExhausted(format!("support point width {:e} above {:e}", sp.width(), tol)));
            }
            cur = SupportOracle::with_prec(&self.a, &self.b, &self.horizon(), prec)?;
        }
    }

    fn support_once(&self, c: &[AlgReal], tol: f64) -> Result<SupportPoint, ReachError> {
        if c.len() != self.n {
            return Err(ReachError::DimensionMismatch(format!("direction has {} entries, system has {}", c.len(), self.n)));
        }
        if c.iter().all(|x| x.is_zero()) {
            return Err(ReachError::Unsupported("zero direction".into()));
        }
        let p = self.prec;
        let n = self.n;
        if let Some(t) = &self.tau {
            if t.is_zero() {
                let z = vec![DyInterval::zero(p); n];
                let pattern = SignPattern { crossings: vec![], initial_sign: 1, horizon: DyInterval::zero(p) };
                return Ok(SupportPoint {
                    direction: c.to_vec(),
                    enclosure: z,
                    exact: Some(vec![AlgReal::zero(); n]),
                    pattern,
                    horizon: Some(t.clone()),
                    truncation: None,
                    tail: 0.0,
                });
            }
        }
        let f = self.basis.dot(c);
        let (end, t_end) = match (&self.tau, &self.tail) {
            (Some(t), _) => {
                let e = t.enclosure(p);
                (e.clone(), e)
            }
            (None, Some(tb)) => {
                let t = tb.truncation(tol);
                (DyInterval::point(t.clone()), DyInterval::point(t))
            }
            _ => unreachable!(),
        };
        let pattern = isolate_sign_changes(&f, &t_end, crate::exppoly::depth_budget())?;
        let k = pattern.crossings.len();
        let (k0, _) = f.leading_moment().expect("controllable pair with nonzero direction");
        let complete = self.tau.is_none()
            && match self.real_cap {
                Some(cap) => {
                    let bound = zero_count_bound(&f, t_end.hi.to_f64()).unwrap_or(cap).min(cap);
                    k + k0 >= bound
                }
                None => false,
            };
        let s0 = pattern.initial_sign;
        if complete && k == 0 {
            let lim = self.limit.clone().expect("stable");
            let exact: Vec<AlgReal> = lim.iter().map(|x| if s0 > 0 { x.clone() } else { x.neg() }).collect();
            let enclosure = exact.iter().map(|x| x.enclosure(p)).collect();
            return Ok(SupportPoint {
                direction: c.to_vec(),
                enclosure,
                exact: Some(exact),
                pattern,
                horizon: None,
                truncation: None,
                tail: 0.0,
            });
        }
        // crossing terms, refined until each contributes at most tol / (4(k+1))
        let target = tol / (4.0 * (k as f64 + 1.0));
        let mut crossings = Vec::with_capacity(k);
        let mut acc = vec![DyInterval::zero(p); n];
        for (i, iv) in pattern.crossings.iter().enumerate() {
            let mut iv = iv.clone();
            let mut g = self.antiderivative(&iv);
            let mut tries = 0;
            while g.iter().any(|x| x.width_f64() > target) && tries < 8 {
                let w = Float::with_val(p, iv.width_f64() / 1024.0);
                let next = refine_crossing(&f, &iv, &w);
                if next.width_f64() >= iv.width_f64() {
                    break;
                }
                iv = next;
                g = self.antiderivative(&iv);
                tries += 1;
            }
            let sgn: i64 = if i % 2 == 0 { 2 } else { -2 };
            let factor = DyInterval::from_i64(sgn, p);
            for (a, x) in acc.iter_mut().zip(&g) {
                *a = &*a + &(&factor * x);
            }
            crossings.push(iv);
        }
        let sign_end = DyInterval::from_i64(if k % 2 == 0 { 1 } else { -1 }, p);
        let mut tail_w = 0.0;
        let end_val: Vec<DyInterval> = if complete {
            self.limit.as_ref().expect("stable").iter().map(|x| x.enclosure(p)).collect()
        } else {
            let mut g = self.antiderivative(&end);
            if let Some(tb) = &self.tail {
                let tails = tb.tail(&end.hi);
                for (x, r) in g.iter_mut().zip(&tails) {
                    *x = x.inflate(r);
                    tail_w = f64::max(tail_w, r.to_f64());
                }
            }
            g
        };
        let s = DyInterval::from_i64(s0 as i64, p);
        let enclosure = acc.iter().zip(&end_val).map(|(a, e)| &s * &(a + &(&sign_end * e))).collect();
        Ok(SupportPoint {
            direction: c.to_vec(),
            enclosure,
            exact: None,
            pattern: SignPattern { crossings, ..pattern },
            horizon: self.tau.clone(),
            truncation: (self.tau.is_none() && !complete).then(|| end.hi.to_f64()),
            tail: tail_w,
        })
    }
}

/// Support point of `ℛ(A, b, [-1, 1])` for stable `A`, infinite horizon.
pub fn support_point(a: &AMat, b: &[AlgReal], c: &[AlgReal], tol: f64) -> Result<SupportPoint, ReachError> {
    SupportOracle::new(a, b, &Horizon::Infinite)?.support(c, tol)
}

/// Support point of the time-`τ` reachable set; any spectrum.
pub fn support_point_bounded(a: &AMat, b: &[AlgReal], c: &[AlgReal], tau: &AlgReal, tol: f64) -> Result<SupportPoint, ReachError> {
    SupportOracle::new(a, b, &Horizon::Bounded(tau.clone()))?.support(c, tol)
}

/// Planar focus `A ≅ λ + iθ` acting on `b = (cos β, sin β)`, observed in
/// the direction with `c^T x = Re(e^{iφ} x)`, so that
/// `f(t) = e^{λt} cos(θt + β + φ)`.
#[derive(Clone, Debug)]
pub struct PlanarSpiralForm {
    pub lambda: AlgReal,
    pub theta: AlgReal,
    pub beta: DyInterval,
    pub phi: DyInterval,
    /// First zero of `cos(θt + β + φ)` at `t ≥ 0`.
    pub t_phi: DyInterval,
    /// Sign attached to the closed form, see [`PlanarSpiralForm::new`].
    pub eps: i32,
}

impl PlanarSpiralForm {
    /// Build the form from angles. `ε` is the sign of `f` on `(0, t_φ)`
    /// when `t_φ > 0`; when `t_φ = 0` it is minus the sign of `f` just
    /// after `0`, which keeps the closed form valid in both cases.
    pub fn new(lambda: AlgReal, theta: AlgReal, beta: DyInterval, phi: DyInterval) -> Result<PlanarSpiralForm, ReachError> {
        if theta.is_zero() {
            return Err(ReachError::ZeroRotation);
        }
        let p = beta.prec().max(phi.prec()).max(start_prec());
        let pi = DyInterval::pi(p);
        let half_pi = pi.mul_rational(&rug::Rational::from((1, 2)));
        let th = theta.enclosure(p);
        let ph = &beta + &phi;
        // θ > 0: t = ((π/2 - β - φ) mod π) / θ;  θ < 0: t = ((β + φ - π/2) mod π) / |θ|
        let r = if theta.signum() > 0 { &half_pi - &ph } else { &ph - &half_pi };
        let q = &r / &pi;
        let fl_lo = q.lo.clone().floor();
        let fl_hi = q.hi.clone().floor();
        if fl_lo != fl_hi {
            return Err(ReachError::PrecisionExhausted("first zero of the cosine too close to t = 0".into()));
        }
        let k = DyInterval::point(fl_lo);
        let t_phi = &(&r - &(&k * &pi)) / &th.abs();
        let cos0 = ph.cos();
        let eps = cos0.sign().filter(|&s| s != 0).ok_or_else(|| ReachError::PrecisionExhausted("sign of cos(β + φ)".into()))?;
        Ok(PlanarSpiralForm { lambda, theta, beta, phi, t_phi, eps })
    }

    /// Exact construction from `A = [[λ, -θ], [θ, λ]]`, `b`, `c`; the unit
    /// normalization of `b` is left to the closed form's caller.
    pub fn from_system(a: &AMat, b: &[AlgReal], c: &[AlgReal]) -> Result<PlanarSpiralForm, ReachError> {
        if a.rows != 2 || b.len() != 2 || c.len() != 2 {
            return Err(ReachError::DimensionMismatch("planar spiral form needs n = 2".into()));
        }
        let (l, m01, m10, l2) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
        if l != l2 || *m01 != m10.neg() {
            return Err(ReachError::Unsupported("matrix is not of the form [[λ, -θ], [θ, λ]]".into()));
        }
        let theta = m10.clone();
        if theta.is_zero() {
            return Err(ReachError::ZeroRotation);
        }
        let p = start_prec();
        let beta = atan2(&b[1].enclosure(p), &b[0].enclosure(p));
        // c^T x = Re(e^{iφ} x) requires c = (cos φ, -sin φ) up to scale
        let phi = atan2(&c[1].neg().enclosure(p), &c[0].enclosure(p));
        let f0 = crate::algnum::dot(c, b);
        if f0.is_zero() {
            let f1 = crate::algnum::dot(c, &a.mul_vec(b));
            return Ok(PlanarSpiralForm {
                lambda: l.clone(),
                theta,
                beta,
                phi,
                t_phi: DyInterval::zero(p),
                eps: -f1.signum(),
            });
        }
        PlanarSpiralForm::new(l.clone(), theta, beta, phi)
    }
}

/// `atan2(y, x)` by bisection on the angle; adequate for the moderate
/// precision used here.
fn atan2(y: &DyInterval, x: &DyInterval) -> DyInterval {
    let p = y.prec().max(x.prec());
    let yf = y.mid_f64();
    let xf = x.mid_f64();
    let a = yf.atan2(xf);
    // bracket the angle where sin(θ) x - cos(θ) y changes sign, then bisect
    let mut lo = DyInterval::from_f64(a - 1e-12, p);
    let mut hi = DyInterval::from_f64(a + 1e-12, p);
    let dir = |th: &DyInterval| -> Option<i32> { (&(&th.sin() * x) - &(&th.cos() * y)).sign() };
    let slo = dir(&lo);
    let shi = dir(&hi);
    if slo == Some(-1) && shi == Some(1) {
        for _ in 0..(p as usize) {
            let m = DyInterval::point(DyInterval::new(lo.lo.clone(), hi.hi.clone()).mid());
            match dir(&m) {
                Some(-1) => lo = m,
                Some(1) => hi = m,
                _ => break,
            }
        }
        DyInterval::new(lo.lo, hi.hi)
    } else {
        DyInterval::from_f64(a, p).inflate(&Float::with_val(p, 1e-9))
    }
}

/// Closed-form support point of the planar focus:
/// `β_φ = ε e^{iβ} / (λ + iθ) · (-1 + 2 e^{(λ + iθ) t_φ} / (1 - e^{λπ/|θ|}))`.
pub fn planar_spiral_support(form: &PlanarSpiralForm, tol: f64) -> Result<SupportPoint, ReachError> {
    if form.theta.is_zero() {
        return Err(ReachError::ZeroRotation);
    }
    if form.lambda.signum() >= 0 {
        return Err(ReachError::NotStable);
    }
    let mut p = start_prec();
    loop {
        let lam = form.lambda.enclosure(p);
        let th = form.theta.enclosure(p);
        let z = CInterval::new(lam.clone(), th.clone());
        let pi = DyInterval::pi(p);
        let q = (&(&lam * &pi) / &th.abs()).exp();
        let denom = &DyInterval::one(p) - &q;
        let tphi = form.t_phi.with_prec(p);
        let ez = z.scale(&tphi).exp();
        let two = DyInterval::from_i64(2, p);
        let inner = ez.scale(&(&two / &denom)).sub(&CInterval::one(p));
        let rot = CInterval::new(form.beta.with_prec(p).cos(), form.beta.with_prec(p).sin());
        let v = rot.mul(&inner).div(&z).scale(&DyInterval::from_i64(form.eps as i64, p));
        let enc = vec![v.re, v.im];
        let w = enc.iter().map(|x| x.width_f64()).fold(0.0, f64::max);
        if w <= tol || p * 2 > MAX_PREC {
            let dir = vec![AlgReal::one(), AlgReal::zero()];
            return Ok(SupportPoint {
                direction: dir,
                enclosure: enc,
                exact: None,
                pattern: SignPattern { crossings: vec![], initial_sign: form.eps, horizon: DyInterval::zero(p) },
                horizon: None,
                truncation: None,
                tail: 0.0,
            });
        }
        p *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{amat, avec};

    fn diag() -> AMat {
        amat(&[&[(-1, 2), (0, 1)], &[(0, 1), (-1, 3)]])
    }

    #[test]
    fn diag_support_points() {
        let b = avec(&[(1, 1), (1, 1)]);
        let sp = support_point(&diag(), &b, &avec(&[(1, 1), (1, 1)]), 1e-9).unwrap();
        assert_eq!(sp.exact, Some(avec(&[(2, 1), (3, 1)])));
        let sp = support_point(&diag(), &b, &avec(&[(-2, 1), (1, 1)]), 1e-9).unwrap();
        assert!(sp.width() <= 1e-9);
        assert!(sp.enclosure[0].contains_rational(&rug::Rational::from((-3, 2))));
        assert!(sp.enclosure[1].contains_rational(&rug::Rational::from((-3, 2))));
        let sm = support_point(&diag(), &b, &avec(&[(2, 1), (-1, 1)]), 1e-9).unwrap();
        assert!(sm.enclosure[0].contains_rational(&rug::Rational::from((3, 2))));
    }

    #[test]
    fn scalar_tail() {
        let tb = tail_bound(&amat(&[&[(-1, 1)]]), &avec(&[(1, 1)])).unwrap();
        assert_eq!(tb.alpha, -1);
        assert_eq!(tb.d, 1);
    }

    #[test]
    fn bounded_zero_and_constant_sign() {
        let b = avec(&[(1, 1), (1, 1)]);
        let z = support_point_bounded(&diag(), &b, &avec(&[(1, 1), (1, 1)]), &AlgReal::zero(), 1e-9).unwrap();
        assert_eq!(z.exact, Some(avec(&[(0, 1), (0, 1)])));
        let s = support_point_bounded(&diag(), &b, &avec(&[(1, 1), (1, 1)]), &AlgReal::from(1), 1e-12).unwrap();
        let x = 2.0 * (1.0 - (-0.5f64).exp());
        let y = 3.0 * (1.0 - (-1.0f64 / 3.0).exp());
        assert!((s.enclosure[0].mid_f64() - x).abs() < 1e-12);
        assert!((s.enclosure[1].mid_f64() - y).abs() < 1e-12);
    }

    #[test]
    fn spiral_closed_form_matches_generic() {
        // A = [[-1, -1], [1, -1]] is multiplication by -1 + i
        let a = amat(&[&[(-1, 1), (-1, 1)], &[(1, 1), (-1, 1)]]);
        let b = avec(&[(1, 1), (0, 1)]);
        for c in [avec(&[(1, 1), (0, 1)]), avec(&[(1, 1), (2, 1)]), avec(&[(0, 1), (1, 1)]), avec(&[(-3, 1), (1, 1)])] {
            let form = PlanarSpiralForm::from_system(&a, &b, &c).unwrap();
            let cf = planar_spiral_support(&form, 1e-10).unwrap();
            let gen = support_point(&a, &b, &c, 1e-10).unwrap();
            for i in 0..2 {
                assert!((cf.enclosure[i].mid_f64() - gen.enclosure[i].mid_f64()).abs() < 1e-8, "{:?} {:?}", cf.enclosure, gen.enclosure);
            }
        }
        let form = PlanarSpiralForm::from_system(&a, &b, &avec(&[(1, 1), (0, 1)])).unwrap();
        assert!((form.t_phi.mid_f64() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert_eq!(form.eps, 1);
    }
}
