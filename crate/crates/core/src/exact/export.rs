//! Border formulas `Φ(y) = ∃c. c ≠ 0 ∧ ⋁_k Φ_k(y, c)` for single-input
//! systems, in the weakest theory that can state them.
//!
//! `Φ_k` guesses the `k` sign changes of `f_c`, checks they are simple
//! zeros (`Ψ_k`), that no other simple zero exists (`Ψ'_k`), and matches
//! the target with the support point they determine. Directions are
//! restricted to the open box `(-2, 2)^n`, which loses nothing since every
//! condition is invariant under positive scaling of `c`.

use super::formula::{Binder, FOFormula, Formula, Term, Theory};
use super::rational_power_form;
use crate::algnum::{eigen_structure, AMat, AlgReal, Mat};
use crate::model::{classify, Horizon, InputSet, ReachProblem, SubclassTag};
use crate::{ReachError, Result};
use rug::Rational;

fn c_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("c{}", i)).collect()
}

fn y_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("y{}", i)).collect()
}

/// `Σ k_i t_i`, skipping zero coefficients.
fn lin(ks: &[AlgReal], ts: &[Term]) -> Term {
    Term::add(ks.iter().zip(ts).filter(|(k, _)| !k.is_zero()).map(|(k, t)| Term::mul(vec![Term::alg(k), t.clone()])).collect())
}

fn scale(k: &AlgReal, t: Term) -> Term {
    Term::mul(vec![Term::alg(k), t])
}

/// `M v` for a constant matrix and a vector of terms.
fn mat_terms(m: &AMat, v: &[Term]) -> Vec<Term> {
    (0..m.rows).map(|i| lin(&m.row(i), v)).collect()
}

fn c_terms(n: usize) -> Vec<Term> {
    c_vars(n).iter().map(|v| Term::var(v)).collect()
}

fn direction_box(n: usize) -> Vec<Binder> {
    c_vars(n).iter().map(|v| Binder::between(v, Term::int(-2), Term::int(2))).collect()
}

fn nonzero(n: usize) -> Formula {
    Formula::or(c_terms(n).into_iter().map(|c| Formula::ne(c, Term::int(0))).collect())
}

fn match_target(n: usize, point: Vec<Term>) -> Vec<Formula> {
    y_vars(n).iter().zip(point).map(|(y, p)| Formula::eq(Term::var(y), p)).collect()
}

/// Ingredients of the border formula for one parametrization of time.
struct Border<'a> {
    n: usize,
    /// Prefix of the zero variables.
    var: &'a str,
    lo: Term,
    hi: Option<Term>,
    cap: usize,
    f: &'a dyn Fn(&Term) -> Term,
    fp: &'a dyn Fn(&Term) -> Term,
    /// Support point for the zeros in increasing order and initial sign.
    point: &'a dyn Fn(&[Term], i32) -> Vec<Term>,
    f0: Term,
}

impl Border<'_> {
    fn binder(&self, name: &str) -> Binder {
        Binder { var: name.to_string(), lo: Some(self.lo.clone()), hi: self.hi.clone() }
    }

    fn block(&self, k: usize) -> Formula {
        let names: Vec<String> = (1..=k).map(|i| format!("{}{}_{}", self.var, k, i)).collect();
        let ts: Vec<Term> = names.iter().map(|v| Term::var(v)).collect();
        let mut psi = Vec::new();
        for t in &ts {
            psi.push(Formula::eq((self.f)(t), Term::int(0)));
            psi.push(Formula::ne((self.fp)(t), Term::int(0)));
        }
        if let Some(first) = ts.first() {
            psi.push(Formula::lt(self.lo.clone(), first.clone()));
        }
        for w in ts.windows(2) {
            psi.push(Formula::lt(w[0].clone(), w[1].clone()));
        }
        let u = format!("u{}", k);
        let ut = Term::var(&u);
        let only = Formula::forall(
            vec![self.binder(&u)],
            Formula::implies(
                Formula::And(vec![Formula::eq((self.f)(&ut), Term::int(0)), Formula::ne((self.fp)(&ut), Term::int(0))]),
                Formula::or(ts.iter().map(|t| Formula::eq(ut.clone(), t.clone())).collect()),
            ),
        );
        let sign = Formula::Or(vec![
            Formula::And([vec![Formula::le(Term::int(0), self.f0.clone())], match_target(self.n, (self.point)(&ts, 1))].concat()),
            Formula::And([vec![Formula::le(self.f0.clone(), Term::int(0))], match_target(self.n, (self.point)(&ts, -1))].concat()),
        ]);
        let body = Formula::And(vec![Formula::and(psi), only, sign]);
        Formula::exists(names.iter().map(|v| self.binder(v)).collect(), body)
    }

    fn formula(&self) -> Formula {
        let blocks = (0..=self.cap).map(|k| self.block(k)).collect();
        Formula::Exists(direction_box(self.n), Box::new(Formula::And(vec![nonzero(self.n), Formula::Or(blocks)])))
    }
}

/// The `Φ_k` blocks of a formula built by `export_fo_formula` for a real
/// spectrum.
pub fn phi_blocks(f: &FOFormula) -> Option<&[Formula]> {
    let Formula::Exists(_, body) = &f.body else { return None };
    let Formula::And(parts) = &**body else { return None };
    match parts.get(1) {
        Some(Formula::Or(blocks)) => Some(blocks),
        _ => None,
    }
}

fn r0_formula(a: &AMat, b: &[AlgReal]) -> Result<Formula> {
    let n = a.rows;
    let rpf = rational_power_form(a, b)?;
    let ct = mat_terms(&rpf.basis.transpose(), &c_terms(n));
    let kb: Vec<Term> = ct.iter().zip(&rpf.b).map(|(c, bi)| scale(bi, c.clone())).collect();
    let q = |z: &Term| Term::add(kb.iter().zip(&rpf.powers).map(|(k, &p)| Term::mul(vec![k.clone(), Term::pow(z.clone(), p)])).collect());
    let qp = |z: &Term| {
        Term::add(
            kb.iter()
                .zip(&rpf.powers)
                .filter(|(_, &p)| p > 0)
                .map(|(k, &p)| Term::mul(vec![Term::int(p as i64), k.clone(), Term::pow(z.clone(), p - 1)]))
                .collect(),
        )
    };
    let point = |zs: &[Term], s0: i32| {
        let eig: Vec<Term> = (0..rpf.mu.len())
            .map(|j| {
                let mut acc = Vec::new();
                for (i, z) in zs.iter().rev().enumerate() {
                    let w = Term::pow(z.clone(), rpf.powers[j]);
                    acc.push(if i % 2 == 0 { w } else { Term::neg(w) });
                }
                let inner = Term::sub(Term::mul(vec![Term::int(2), Term::add(acc)]), Term::int(1));
                let k = AlgReal::from(s0 as i64).mul(&rpf.b[j]).div(&rpf.mu[j]);
                scale(&k, inner)
            })
            .collect();
        mat_terms(&rpf.basis, &eig)
    };
    let f0 = q(&Term::int(1));
    let border = Border { n, var: "z", lo: Term::int(0), hi: Some(Term::int(1)), cap: rpf.zero_cap, f: &q, fp: &qp, point: &point, f0 };
    Ok(border.formula())
}

/// `e^{At} b = Σ_λ e^{λt} Σ_j t^j w_{λ,j}` over a real spectrum.
struct RealFlow {
    /// `(λ, [w_{λ,0}, w_{λ,1}, ...])`
    modes: Vec<(AlgReal, Vec<Vec<AlgReal>>)>,
    n: usize,
}

impl RealFlow {
    fn new(a: &AMat, b: &[AlgReal]) -> Result<RealFlow> {
        let n = a.rows;
        let sp = eigen_structure(a)?;
        let mut blocks = Vec::new();
        let mut cols = Vec::new();
        for ev in &sp.eigenvalues {
            let mut nmat = a.clone();
            for i in 0..n {
                let v = nmat.get(i, i).sub(&ev.re);
                nmat.set(i, i, v);
            }
            let ker = nmat.pow(ev.alg_mult).kernel();
            blocks.push((ev.re.clone(), nmat, cols.len(), ker.len()));
            cols.extend(ker);
        }
        let v = Mat::from_cols(&cols);
        let x = v.solve(b).ok_or_else(|| ReachError::Unsupported("generalized eigenvectors do not span".into()))?;
        let mut modes = Vec::new();
        for (lambda, nmat, start, len) in blocks {
            let mut comp = vec![AlgReal::zero(); n];
            for k in start..start + len {
                comp = comp.iter().zip(&cols[k]).map(|(s, c)| s.add(&c.mul(&x[k]))).collect();
            }
            let mut ws = Vec::new();
            let mut fact = AlgReal::one();
            let mut cur = comp;
            let mut j = 0;
            while cur.iter().any(|x| !x.is_zero()) {
                ws.push(cur.iter().map(|x| x.div(&fact)).collect());
                cur = nmat.mul_vec(&cur);
                j += 1;
                fact = fact.mul(&AlgReal::from(j as i64));
            }
            if !ws.is_empty() {
                modes.push((lambda, ws));
            }
        }
        Ok(RealFlow { modes, n })
    }

    fn exp_of(lambda: &AlgReal, t: &Term) -> Term {
        if lambda.is_zero() {
            Term::int(1)
        } else {
            Term::exp(scale(lambda, t.clone()))
        }
    }

    /// `e^{At} b`
    fn at(&self, t: &Term) -> Vec<Term> {
        (0..self.n)
            .map(|r| {
                let mut acc = Vec::new();
                for (lambda, ws) in &self.modes {
                    for (j, w) in ws.iter().enumerate() {
                        if !w[r].is_zero() {
                            acc.push(Term::mul(vec![Term::alg(&w[r]), Term::pow(t.clone(), j as u32), Self::exp_of(lambda, t)]));
                        }
                    }
                }
                Term::add(acc)
            })
            .collect()
    }

    /// `∫_0^t s^j e^{λs} ds`
    fn moment(lambda: &AlgReal, j: usize, t: &Term) -> Term {
        if lambda.is_zero() {
            return scale(&AlgReal::frac(1, j as i64 + 1), Term::pow(t.clone(), j as u32 + 1));
        }
        let inv = lambda.recip();
        let e = Self::exp_of(lambda, t);
        let mut acc = scale(&inv, Term::sub(e.clone(), Term::int(1)));
        for k in 1..=j {
            let lead = Term::mul(vec![Term::pow(t.clone(), k as u32), e.clone()]);
            acc = scale(&inv, Term::sub(lead, scale(&AlgReal::from(k as i64), acc)));
        }
        acc
    }

    /// `∫_0^t e^{As} b ds`
    fn primitive(&self, t: &Term) -> Vec<Term> {
        (0..self.n)
            .map(|r| {
                let mut acc = Vec::new();
                for (lambda, ws) in &self.modes {
                    for (j, w) in ws.iter().enumerate() {
                        if !w[r].is_zero() {
                            acc.push(scale(&w[r], Self::moment(lambda, j, t)));
                        }
                    }
                }
                Term::add(acc)
            })
            .collect()
    }
}

/// `β = s0 (2 Σ_i (-1)^{i-1} F(t_i) + (-1)^k F(T))` for zeros `t_1 < ... < t_k`.
fn switched_point(prim: &dyn Fn(&Term) -> Vec<Term>, terminal: &[Term], ts: &[Term], s0: i32) -> Vec<Term> {
    let n = terminal.len();
    let k = ts.len();
    let mut out = Vec::with_capacity(n);
    let prims: Vec<Vec<Term>> = ts.iter().map(prim).collect();
    for r in 0..n {
        let mut acc = Vec::new();
        for (i, p) in prims.iter().enumerate() {
            let sgn = if i % 2 == 0 { 2 } else { -2 };
            acc.push(Term::mul(vec![Term::int(sgn), p[r].clone()]));
        }
        let tail = if k.is_multiple_of(2) { terminal[r].clone() } else { Term::neg(terminal[r].clone()) };
        acc.push(tail);
        out.push(Term::mul(vec![Term::int(s0 as i64), Term::add(acc)]));
    }
    out
}

fn rexp_formula(a: &AMat, b: &[AlgReal], tau: Option<&AlgReal>) -> Result<Formula> {
    let n = a.rows;
    let flow = RealFlow::new(a, b)?;
    let cs = c_terms(n);
    let f = |t: &Term| lin_terms(&cs, &flow.at(t));
    let fp = |t: &Term| lin_terms(&cs, &mat_terms(a, &flow.at(t)));
    let terminal: Vec<Term> = match tau {
        Some(tau) => flow.primitive(&Term::alg(tau)),
        None => {
            let ai = a.inverse().ok_or(ReachError::NotStable)?;
            ai.mul_vec(b).iter().map(|x| Term::alg(&x.neg())).collect()
        }
    };
    let prim = |t: &Term| flow.primitive(t);
    let point = |ts: &[Term], s0: i32| switched_point(&prim, &terminal, ts, s0);
    let f0 = lin(b, &cs);
    let hi = tau.map(Term::alg);
    let border = Border { n, var: "t", lo: Term::int(0), hi, cap: n - 1, f: &f, fp: &fp, point: &point, f0 };
    Ok(border.formula())
}

fn lin_terms(cs: &[Term], vs: &[Term]) -> Term {
    Term::add(cs.iter().zip(vs).map(|(c, v)| Term::mul(vec![c.clone(), v.clone()])).collect())
}

/// Real Jordan data of a 2x2 matrix with eigenvalues `λ ± iθ`, `θ > 0`:
/// `A M = M J` with `J = [[λ, -θ], [θ, λ]]`.
struct Spiral {
    lambda: AlgReal,
    theta: AlgReal,
    m: AMat,
    bh: [AlgReal; 2],
}

impl Spiral {
    fn new(a: &AMat, b: &[AlgReal]) -> Result<Spiral> {
        let (p, q, r, s) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
        let lambda = p.add(s).div(&AlgReal::from(2));
        let det = p.mul(s).sub(&q.mul(r));
        let th2 = det.sub(&lambda.mul(&lambda));
        if th2.signum() <= 0 || r.is_zero() {
            return Err(ReachError::ZeroRotation);
        }
        let theta = th2.sqrt();
        let m = Mat::from_rows(vec![vec![theta.clone(), p.sub(&lambda)], vec![AlgReal::zero(), r.clone()]]);
        let bh = m.inverse().ok_or(ReachError::ZeroRotation)?.mul_vec(b);
        Ok(Spiral { lambda, theta, m, bh: [bh[0].clone(), bh[1].clone()] })
    }

    /// Rotation terms `(e^{λt} cos θt, e^{λt} sin θt)` with trig bound `bound`.
    fn rot(&self, t: &Term, bound: &Rational) -> (Term, Term) {
        let arg = scale(&self.theta, t.clone());
        let e = Term::exp(scale(&self.lambda, t.clone()));
        (Term::mul(vec![e.clone(), Term::cos(arg.clone(), bound.clone())]), Term::mul(vec![e, Term::sin(arg, bound.clone())]))
    }

    /// `e^{At} b`
    fn at(&self, t: &Term, bound: &Rational) -> Vec<Term> {
        let (co, si) = self.rot(t, bound);
        let v = vec![
            Term::sub(scale(&self.bh[0], co.clone()), scale(&self.bh[1], si.clone())),
            Term::add(vec![scale(&self.bh[0], si), scale(&self.bh[1], co)]),
        ];
        mat_terms(&self.m, &v)
    }

    /// `w = b̂ / z` with `z = λ + iθ`.
    fn w(&self) -> (AlgReal, AlgReal) {
        let n2 = self.lambda.mul(&self.lambda).add(&self.theta.mul(&self.theta));
        let (br, bi) = (&self.bh[0], &self.bh[1]);
        let re = br.mul(&self.lambda).add(&bi.mul(&self.theta)).div(&n2);
        let im = bi.mul(&self.lambda).sub(&br.mul(&self.theta)).div(&n2);
        (re, im)
    }

    /// `M (w · (x + iy))` in state coordinates.
    fn times_w(&self, x: Term, y: Term) -> Vec<Term> {
        let (wr, wi) = self.w();
        let v = vec![
            Term::sub(scale(&wr, x.clone()), scale(&wi, y.clone())),
            Term::add(vec![scale(&wr, y), scale(&wi, x)]),
        ];
        mat_terms(&self.m, &v)
    }

    /// `∫_0^t e^{As} b ds = M w (e^{zt} - 1)`
    fn primitive(&self, t: &Term, bound: &Rational) -> Vec<Term> {
        let (co, si) = self.rot(t, bound);
        self.times_w(Term::sub(co, Term::int(1)), si)
    }
}

fn ceil_rational(x: f64) -> Rational {
    Rational::from(x.ceil().max(1.0) as i64)
}

/// Infinite horizon, complex pair: the zeros of `f_c` are `t_0 + jπ/θ` and
/// `β = s0 M w (2 e^{z t_0} / (1 - q) - 1)` with `q = e^{λπ/θ}`.
fn spiral_infinite(a: &AMat, b: &[AlgReal]) -> Result<Formula> {
    let sp = Spiral::new(a, b)?;
    let cs = c_terms(2);
    let pi = Term::var("pi");
    // θ t0 < π < 4 on the first half period
    let bound = Rational::from(4);
    let inv_theta = sp.theta.recip();
    let half_period = scale(&inv_theta, pi.clone());
    let q = Term::exp(Term::mul(vec![Term::alg(&sp.lambda.mul(&inv_theta)), pi.clone()]));
    let one_minus_q = Term::sub(Term::int(1), q.clone());
    let f = |t: &Term| lin_terms(&cs, &sp.at(t, &bound));
    let fp0 = lin(&a.mul_vec(b), &cs);
    let f0 = lin(b, &cs);
    let scaled_point = |t0: &Term, s0: i32| -> Vec<Term> {
        let (co, si) = sp.rot(t0, &bound);
        let x = Term::sub(Term::mul(vec![Term::int(2), co]), one_minus_q.clone());
        let y = Term::mul(vec![Term::int(2), si]);
        sp.times_w(x, y).into_iter().map(|v| Term::mul(vec![Term::int(s0 as i64), v])).collect()
    };
    let target = |t0: &Term, s0: i32| -> Vec<Formula> {
        y_vars(2)
            .iter()
            .zip(scaled_point(t0, s0))
            .map(|(y, p)| Formula::eq(Term::mul(vec![one_minus_q.clone(), Term::var(y)]), p))
            .collect()
    };
    let t0 = Term::var("t0");
    let u = Term::var("u0");
    let first_zero = Formula::exists(
        vec![Binder::between("t0", Term::int(0), half_period.clone())],
        Formula::And(vec![
            Formula::eq(f(&t0), Term::int(0)),
            Formula::forall(vec![Binder::between("u0", Term::int(0), t0.clone())], Formula::ne(f(&u), Term::int(0))),
            Formula::Or(vec![
                Formula::And([vec![Formula::lt(Term::int(0), f0.clone())], target(&t0, 1)].concat()),
                Formula::And([vec![Formula::lt(f0.clone(), Term::int(0))], target(&t0, -1)].concat()),
            ]),
        ]),
    );
    let zero_at_start = Formula::And(vec![
        Formula::eq(f0.clone(), Term::int(0)),
        Formula::Or(vec![
            Formula::And([vec![Formula::lt(Term::int(0), fp0.clone())], target(&Term::int(0), 1)].concat()),
            Formula::And([vec![Formula::lt(fp0, Term::int(0))], target(&Term::int(0), -1)].concat()),
        ]),
    ]);
    let border = Formula::Exists(direction_box(2), Box::new(Formula::And(vec![nonzero(2), Formula::Or(vec![first_zero, zero_at_start])])));
    Ok(Formula::exists(
        vec![Binder::between("pi", Term::int(3), Term::int(4))],
        Formula::And(vec![Formula::pi_axiom("pi", bound), border]),
    ))
}

fn spiral_bounded(a: &AMat, b: &[AlgReal], tau: &AlgReal) -> Result<Formula> {
    let sp = Spiral::new(a, b)?;
    let cs = c_terms(2);
    let turns = sp.theta.to_f64() * tau.to_f64();
    let bound = ceil_rational(turns + 1.0);
    let cap = (turns / std::f64::consts::PI).ceil() as usize + 1;
    let f = |t: &Term| lin_terms(&cs, &sp.at(t, &bound));
    let fp = |t: &Term| lin_terms(&cs, &mat_terms(a, &sp.at(t, &bound)));
    let terminal = sp.primitive(&Term::alg(tau), &bound);
    let prim = |t: &Term| sp.primitive(t, &bound);
    let point = |ts: &[Term], s0: i32| switched_point(&prim, &terminal, ts, s0);
    let border = Border { n: 2, var: "t", lo: Term::int(0), hi: Some(Term::alg(tau)), cap, f: &f, fp: &fp, point: &point, f0: lin(b, &cs) };
    Ok(border.formula())
}

/// Border formula for `p` in `theory`.
pub fn export_fo_formula(p: &ReachProblem, theory: Theory) -> Result<FOFormula> {
    p.validate()?;
    if p.input_set != InputSet::Hypercube {
        return Err(ReachError::Unsupported("formula export needs the hypercube input set".into()));
    }
    let cols: Vec<usize> = (0..p.m()).filter(|&j| p.column(j).iter().any(|x| !x.is_zero())).collect();
    if cols.len() != 1 {
        return Err(ReachError::Unsupported("formula export handles a single nonzero input column".into()));
    }
    let b = p.column(cols[0]);
    let single = ReachProblem::new(p.a.clone(), Mat::from_cols(std::slice::from_ref(&b))).with_horizon(p.horizon.clone());
    let cl = classify(&single)?;
    if cl.rank != p.n() {
        return Err(ReachError::NotControllable);
    }
    let inadequate = || ReachError::InadequateTheory(theory.name().into());
    let real = cl.has(SubclassTag::RealSpectrum);
    let planar_complex = cl.has(SubclassTag::PlanarComplex);
    let body = match (&p.horizon, theory) {
        (Horizon::Infinite, _) if !cl.spectral.is_stable() => {
            return Err(ReachError::Unsupported("infinite-horizon export needs a stable matrix".into()))
        }
        (Horizon::Infinite, Theory::R0) if cl.has(SubclassTag::RationalMultipleSpectrum) => r0_formula(&p.a, &b)?,
        (Horizon::Infinite, Theory::Rexp | Theory::RexpSin) if real => rexp_formula(&p.a, &b, None)?,
        (Horizon::Infinite, Theory::RexpSin) if planar_complex => spiral_infinite(&p.a, &b)?,
        (Horizon::Bounded(tau), Theory::Rexp | Theory::RexpSin) if real => rexp_formula(&p.a, &b, Some(tau))?,
        (Horizon::Bounded(tau), Theory::RexpSin) if planar_complex => spiral_bounded(&p.a, &b, tau)?,
        _ => return Err(inadequate()),
    };
    let f = FOFormula { theory, free: y_vars(p.n()), body };
    f.validate()?;
    Ok(f)
}
