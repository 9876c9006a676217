//! Exponential polynomials `f(t) = c^T exp(At) b` in partial-fraction form,
//! with certified evaluation, zero-count bounds and sign-change isolation.

use crate::algnum::{eigen_structure, start_prec, AMat, AlgReal, CInterval, DyInterval};
use crate::ReachError;
use rug::Float;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

static DEPTH_BUDGET: AtomicU32 = AtomicU32::new(60);

/// Bisection depth allowed when isolating sign changes for support points.
pub fn depth_budget() -> u32 {
    DEPTH_BUDGET.load(AtomicOrdering::Relaxed)
}

pub fn set_depth_budget(depth: u32) {
    DEPTH_BUDGET.store(depth.max(1), AtomicOrdering::Relaxed);
}

/// Terms `P(t) e^{θt}` for one eigenvalue `θ`. A term with `doubled` set
/// stands for itself plus its complex conjugate.
#[derive(Clone, Debug)]
pub struct ExpTerm {
    pub re: AlgReal,
    pub im: AlgReal,
    pub lam: CInterval,
    /// Coefficients of `P`, lowest degree first.
    pub coeffs: Vec<CInterval>,
    pub doubled: bool,
}

#[derive(Clone, Debug)]
pub struct ExpPoly {
    pub terms: Vec<ExpTerm>,
    /// State dimension of the generating system.
    pub n: usize,
    /// Sum of the polynomial orders over all terms, conjugates included.
    pub n0: usize,
    /// Upper bound on `max |θ_j|`.
    pub delta: f64,
    pub real_spectrum: bool,
    /// Exact moments `f^{(k)}(0) = c^T A^k b`, `k < 2n` (fewer after differentiation).
    pub moments: Vec<AlgReal>,
}

/// Vector-valued `exp(At) b` in partial-fraction form; `c^T` of it is an
/// [`ExpPoly`] for any `c`.
#[derive(Clone, Debug)]
pub struct ExpBasis {
    pub n: usize,
    pub prec: u32,
    pub real_spectrum: bool,
    /// Per eigenvalue: `(re, im, enclosure, coefficient vectors per power of t, doubled)`.
    terms: Vec<(AlgReal, AlgReal, CInterval, Vec<Vec<CInterval>>, bool)>,
    krylov: Vec<Vec<AlgReal>>,
}

fn binom(n: usize, k: usize) -> u64 {
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

fn cmul_real(z: &CInterval, x: f64, prec: u32) -> CInterval {
    z.scale(&DyInterval::from_f64(x, prec))
}

/// Truncated product of power series.
fn series_mul(a: &[CInterval], b: &[CInterval], len: usize, prec: u32) -> Vec<CInterval> {
    let mut out = vec![CInterval::zero(prec); len];
    for (i, x) in a.iter().enumerate().take(len) {
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

impl ExpBasis {
    pub fn new(a: &AMat, b: &[AlgReal], prec: u32) -> Result<ExpBasis, ReachError> {
        let n = a.rows;
        if a.cols != n || b.len() != n {
            return Err(ReachError::DimensionMismatch(format!("A is {}x{}, b has {} entries", a.rows, a.cols, b.len())));
        }
        let spec = eigen_structure(a)?;
        // adj(sI - A) b = sum_k (M_k b) s^{n-k}
        let (_, ms) = match a.to_rational() {
            Some(q) => {
                let (c, ms) = q.faddeev();
                (c.iter().map(|x| AlgReal::from(x.clone())).collect::<Vec<_>>(), ms.iter().map(|m| m.to_alg()).collect::<Vec<_>>())
            }
            None => a.faddeev(),
        };
        // numerator coefficients per component, low degree first
        let mut num = vec![vec![DyInterval::zero(prec); n]; n];
        for (k, m) in ms.iter().enumerate() {
            let v = m.mul_vec(b);
            for comp in 0..n {
                num[comp][n - 1 - k] = v[comp].enclosure(prec);
            }
        }
        let eig: Vec<CInterval> = spec.eigenvalues.iter().map(|e| e.enclosure(prec)).collect();
        let mut terms = Vec::new();
        for (j, e) in spec.eigenvalues.iter().enumerate() {
            if e.im.signum() < 0 {
                continue;
            }
            let m = e.alg_mult;
            let lam = &eig[j];
            // jet of prod_{i != j} (lam - lam_i + eps)^{-m_i}
            let mut jet = vec![CInterval::zero(prec); m];
            jet[0] = CInterval::one(prec);
            for (i, f) in spec.eigenvalues.iter().enumerate() {
                if i == j {
                    continue;
                }
                let d = lam.sub(&eig[i]);
                let dinv = d.recip();
                let mut s = Vec::with_capacity(m);
                let mut pw = CInterval::one(prec);
                for _ in 0..f.alg_mult {
                    pw = pw.mul(&dinv);
                }
                for k in 0..m {
                    let c = binom(f.alg_mult + k - 1, k) as f64 * if k % 2 == 1 { -1.0 } else { 1.0 };
                    s.push(cmul_real(&pw, c, prec));
                    pw = pw.mul(&dinv);
                }
                jet = series_mul(&jet, &s, m, prec);
            }
            // powers of lam for the numerator jet
            let mut lpow = vec![CInterval::one(prec)];
            for _ in 1..n {
                let next = lpow.last().unwrap().mul(lam);
                lpow.push(next);
            }
            let blocks = e.max_block.max(1);
            let mut coeffs = vec![vec![CInterval::zero(prec); n]; blocks];
            for comp in 0..n {
                let mut nj = vec![CInterval::zero(prec); m];
                for (k, slot) in nj.iter_mut().enumerate() {
                    let mut acc = CInterval::zero(prec);
                    for (i, ni) in num[comp].iter().enumerate() {
                        if i >= k {
                            let c = binom(i, k) as f64;
                            acc = acc.add(&cmul_real(&lpow[i - k].scale(ni), c, prec));
                        }
                    }
                    *slot = acc;
                }
                let h = series_mul(&nj, &jet, m, prec);
                // a_r = h_{m-r}; coefficient of t^{r-1} is a_r/(r-1)!
                let mut fact = 1.0f64;
                for r in 1..=blocks.min(m) {
                    if r > 1 {
                        fact *= (r - 1) as f64;
                    }
                    let mut c = h[m - r].scale(&DyInterval::from_rational(&rug::Rational::from((1, fact as u64)), prec));
                    if e.is_real() {
                        c.im = DyInterval::zero(prec);
                    }
                    coeffs[r - 1][comp] = c;
                }
            }
            terms.push((e.re.clone(), e.im.clone(), lam.clone(), coeffs, !e.is_real()));
        }
        let mut krylov = vec![b.to_vec()];
        for _ in 1..2 * n {
            let next = a.mul_vec(krylov.last().unwrap());
            krylov.push(next);
        }
        Ok(ExpBasis { n, prec, real_spectrum: spec.real_spectrum, terms, krylov })
    }

    /// The scalar exponential polynomial `c^T exp(At) b`.
    pub fn dot(&self, c: &[AlgReal]) -> ExpPoly {
        assert_eq!(c.len(), self.n);
        let ce: Vec<DyInterval> = c.iter().map(|x| x.enclosure(self.prec)).collect();
        let mut terms = Vec::new();
        let mut n0 = 0;
        let mut delta = 0.0f64;
        for (re, im, lam, coeffs, doubled) in &self.terms {
            let mut pc = Vec::with_capacity(coeffs.len());
            for v in coeffs {
                let mut acc = CInterval::zero(self.prec);
                for (x, w) in v.iter().zip(&ce) {
                    acc = acc.add(&x.scale(w));
                }
                pc.push(acc);
            }
            n0 += pc.len() * if *doubled { 2 } else { 1 };
            delta = delta.max(lam.mag().to_f64() * (1.0 + 1e-12));
            terms.push(ExpTerm { re: re.clone(), im: im.clone(), lam: lam.clone(), coeffs: pc, doubled: *doubled });
        }
        let moments = self.krylov.iter().map(|k| crate::algnum::dot(c, k)).collect();
        ExpPoly { terms, n: self.n, n0, delta, real_spectrum: self.real_spectrum, moments }
    }

    /// Enclosure of `exp(At) b` for every `t` in the interval.
    pub fn eval(&self, t: &DyInterval) -> Vec<DyInterval> {
        let mut out = vec![DyInterval::zero(self.prec); self.n];
        for (_, _, lam, coeffs, doubled) in &self.terms {
            let e = lam.scale(t).exp();
            for (comp, slot) in out.iter_mut().enumerate() {
                let mut p = CInterval::zero(self.prec);
                for v in coeffs.iter().rev() {
                    p = p.scale(t).add(&v[comp]);
                }
                let z = p.mul(&e);
                let r = if *doubled { z.re.mul_rational(&2.into()) } else { z.re };
                *slot = &*slot + &r;
            }
        }
        out
    }

    /// Coefficient data as `(Re θ, Im θ, doubled, per-power coefficient vectors)`.
    pub fn term_data(&self) -> impl Iterator<Item = (&AlgReal, &AlgReal, bool, &Vec<Vec<CInterval>>)> {
        self.terms.iter().map(|(re, im, _, c, d)| (re, im, *d, c))
    }
}

/// `f_c(t) = c^T exp(At) b`.
pub fn form_fc(a: &AMat, b: &[AlgReal], c: &[AlgReal]) -> Result<ExpPoly, ReachError> {
    if c.len() != a.rows {
        return Err(ReachError::DimensionMismatch(format!("c has {} entries, A is {}x{}", c.len(), a.rows, a.cols)));
    }
    Ok(ExpBasis::new(a, b, start_prec())?.dot(c))
}

impl ExpPoly {
    pub fn prec(&self) -> u32 {
        self.terms.first().map(|t| t.lam.prec()).unwrap_or_else(start_prec)
    }

    /// Exact test: `f ≡ 0` iff every moment `c^T A^k b`, `k < n`, vanishes.
    pub fn is_identically_zero(&self) -> bool {
        self.moments.iter().take(self.n).all(|m| m.is_zero())
    }

    /// Index and sign of the first nonzero moment.
    pub fn leading_moment(&self) -> Option<(usize, i32)> {
        self.moments.iter().enumerate().find(|(_, m)| !m.is_zero()).map(|(k, m)| (k, m.signum()))
    }

    pub fn eval(&self, t: &DyInterval) -> DyInterval {
        let prec = self.prec();
        let mut acc = DyInterval::zero(prec);
        for term in &self.terms {
            let mut p = CInterval::zero(prec);
            for c in term.coeffs.iter().rev() {
                p = p.scale(t).add(c);
            }
            let z = p.mul(&term.lam.scale(t).exp());
            let r = if term.doubled { z.re.mul_rational(&2.into()) } else { z.re };
            acc = &acc + &r;
        }
        acc
    }

    pub fn derivative(&self) -> ExpPoly {
        let prec = self.prec();
        let terms = self
            .terms
            .iter()
            .map(|term| {
                let k = term.coeffs.len();
                let coeffs = (0..k)
                    .map(|i| {
                        let mut c = term.lam.mul(&term.coeffs[i]);
                        if i + 1 < k {
                            c = c.add(&cmul_real(&term.coeffs[i + 1], (i + 1) as f64, prec));
                        }
                        c
                    })
                    .collect();
                ExpTerm { coeffs, ..term.clone() }
            })
            .collect();
        let moments = self.moments.iter().skip(1).cloned().collect();
        ExpPoly { terms, moments, ..self.clone() }
    }

    /// Mean-value enclosure `f(m) + f'(I)(I - m)` intersected with the direct one.
    pub fn eval_mv(&self, t: &DyInterval, d: &ExpPoly) -> DyInterval {
        let direct = self.eval(t);
        if t.lo == t.hi {
            return direct;
        }
        let m = DyInterval::point(t.mid());
        let mv = &self.eval(&m) + &(&d.eval(t) * &(t - &m));
        direct.intersect(&mv).unwrap_or(direct)
    }
}

/// Upper bound on the number of zeros of `f` in a disc of radius `r`;
/// for real spectra also capped by `n - 1` and by the coefficient sign
/// changes of a pure exponential sum.
pub fn zero_count_bound(f: &ExpPoly, r: f64) -> Result<usize, ReachError> {
    if f.is_identically_zero() {
        return Err(ReachError::IdenticallyZero);
    }
    let tij = (3.0 * (f.n0 as f64 - 1.0) + 4.0 * r * f.delta).ceil().max(0.0);
    let mut bound = if tij.is_finite() { tij as usize } else { usize::MAX };
    if f.real_spectrum {
        bound = bound.min(f.n.saturating_sub(1));
        if let Some(d) = descartes(f) {
            bound = bound.min(d);
        }
    }
    Ok(bound)
}

/// Sign changes of the coefficient sequence of `sum a_j e^{λ_j t}` ordered by
/// exponent, when every coefficient has a certified sign.
fn descartes(f: &ExpPoly) -> Option<usize> {
    let mut ts: Vec<(&AlgReal, i32)> = Vec::new();
    for t in &f.terms {
        if t.coeffs.len() != 1 || t.doubled {
            return None;
        }
        match t.coeffs[0].re.sign() {
            Some(0) | None => {
                if !(t.coeffs[0].re.mag() == 0) {
                    return None;
                }
            }
            Some(s) => ts.push((&t.re, s)),
        }
    }
    ts.sort_by(|a, b| a.0.cmp(b.0));
    Some(ts.windows(2).filter(|w| w[0].1 != w[1].1).count())
}

#[derive(Clone, Debug)]
pub struct SignPattern {
    /// Disjoint sorted enclosures, each containing exactly one sign change.
    pub crossings: Vec<DyInterval>,
    /// Sign of `f` just after `t = 0`.
    pub initial_sign: i32,
    pub horizon: DyInterval,
}

impl SignPattern {
    /// Sign of `f` after the `i`-th crossing (`i = 0` is the initial sign).
    pub fn sign_after(&self, i: usize) -> i32 {
        if i.is_multiple_of(2) {
            self.initial_sign
        } else {
            -self.initial_sign
        }
    }
}

const SPLIT: f64 = 0.5 - 1.0 / 64.0 + 1.0 / 8192.0;

fn split(l: &Float, u: &Float) -> Float {
    let p = l.prec().max(u.prec());
    let w = Float::with_val(p, u - l);
    Float::with_val(p, l + w * SPLIT)
}

enum Piece {
    Const(i32),
    Cross,
}

/// Isolate every sign change of `f` on `[0, T]`, `T` the upper end of
/// `horizon`. Tangential zeros are not reported; when a subinterval cannot be
/// certified within `depth_budget` bisections the result is
/// `NeedsMoreBudget`.
pub fn isolate_sign_changes(f: &ExpPoly, horizon: &DyInterval, depth_budget: u32) -> Result<SignPattern, ReachError> {
    let Some((k0, s0)) = f.leading_moment() else {
        return Err(ReachError::IdenticallyZero);
    };
    let prec = f.prec();
    let t_end = horizon.hi.clone();
    let zero = Float::with_val(prec, 0);
    let d = f.derivative();
    let mut pieces: Vec<(Float, Float, Piece)> = Vec::new();
    let mut start = zero.clone();
    if k0 > 0 && t_end > 0 {
        // f vanishes at 0 to order k0; its k0-th derivative fixes the sign nearby
        let mut g = f.clone();
        for _ in 0..k0 {
            g = g.derivative();
        }
        let mut delta = t_end.clone();
        let mut depth = 0;
        loop {
            let iv = DyInterval::new(zero.clone(), delta.clone());
            if g.eval(&iv).sign() == Some(s0) {
                break;
            }
            delta >>= 1;
            depth += 1;
            if depth > depth_budget {
                return Err(ReachError::NeedsMoreBudget("sign of f near t = 0 not certified".into()));
            }
        }
        pieces.push((zero.clone(), delta.clone(), Piece::Const(s0)));
        start = delta;
    }
    let mut stack: Vec<(Float, Float, u32)> = Vec::new();
    if start < t_end {
        stack.push((start, t_end.clone(), 0));
    }
    let mut steps = 0usize;
    while let Some((l, u, depth)) = stack.pop() {
        steps += 1;
        if steps > 4_000_000 {
            return Err(ReachError::NeedsMoreBudget("subdivision limit reached".into()));
        }
        let iv = DyInterval::new(l.clone(), u.clone());
        if let Some(s) = f.eval_mv(&iv, &d).sign().filter(|&s| s != 0) {
            pieces.push((l, u, Piece::Const(s)));
            continue;
        }
        if d.eval(&iv).sign().filter(|&s| s != 0).is_some() {
            let sl = f.eval(&DyInterval::point(l.clone())).sign().filter(|&s| s != 0);
            let su = f.eval(&DyInterval::point(u.clone())).sign().filter(|&s| s != 0);
            if let (Some(a), Some(b)) = (sl, su) {
                pieces.push((l, u, if a == b { Piece::Const(a) } else { Piece::Cross }));
                continue;
            }
        }
        if depth >= depth_budget {
            return Err(ReachError::NeedsMoreBudget(format!(
                "sign of f not certified on [{:.6e}, {:.6e}] (possible tangential zero)",
                l.to_f64(),
                u.to_f64()
            )));
        }
        let m = split(&l, &u);
        stack.push((m.clone(), u, depth + 1));
        stack.push((l, m, depth + 1));
    }
    let mut crossings = Vec::new();
    let mut initial = 0;
    for (l, u, p) in pieces {
        match p {
            Piece::Const(s) => {
                if initial == 0 {
                    initial = s;
                }
            }
            Piece::Cross => {
                if initial == 0 {
                    let s = f.eval(&DyInterval::point(l.clone())).sign().unwrap_or(s0);
                    initial = s;
                }
                let iv = DyInterval::new(l, u);
                let w = Float::with_val(prec, &t_end * 1e-12).max(&Float::with_val(prec, 1e-30));
                crossings.push(refine_crossing(f, &iv, &w));
            }
        }
    }
    if initial == 0 {
        initial = s0;
    }
    if let Some(last) = crossings.last() {
        if last.hi > horizon.lo {
            return Err(ReachError::NeedsMoreBudget("sign change at the horizon".into()));
        }
    }
    Ok(SignPattern { crossings, initial_sign: initial, horizon: DyInterval::new(Float::with_val(prec, 0), t_end) })
}

/// Shrink a crossing enclosure by bisection until its width is at most `w`
/// or the endpoint signs can no longer be resolved.
pub fn refine_crossing(f: &ExpPoly, iv: &DyInterval, w: &Float) -> DyInterval {
    let mut l = iv.lo.clone();
    let mut u = iv.hi.clone();
    let sl = f.eval(&DyInterval::point(l.clone())).sign();
    while Float::with_val(l.prec(), &u - &l) > *w {
        let m = split(&l, &u);
        match f.eval(&DyInterval::point(m.clone())).sign() {
            Some(s) if s != 0 && Some(s) == sl => l = m,
            Some(s) if s != 0 => u = m,
            _ => break,
        }
    }
    DyInterval::new(l, u)
}

/// Enclosure of `c^T v` for exact `c` and interval `v`.
pub fn dot_enclosure(c: &[AlgReal], v: &[DyInterval]) -> DyInterval {
    let prec = v.first().map(|x| x.prec()).unwrap_or_else(start_prec);
    let mut acc = DyInterval::zero(prec);
    for (x, y) in c.iter().zip(v) {
        if !x.is_zero() {
            acc = &acc + &(&x.enclosure(prec) * y);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{amat, avec};

    fn diag() -> AMat {
        amat(&[&[(-1, 2), (0, 1)], &[(0, 1), (-1, 3)]])
    }

    #[test]
    fn diag_crossing_at_six_ln_two() {
        let f = form_fc(&diag(), &avec(&[(1, 1), (1, 1)]), &avec(&[(-2, 1), (1, 1)])).unwrap();
        let x = f.eval(&DyInterval::from_f64(1.0, 128)).mid_f64();
        assert!((x - (-2.0 * (-0.5f64).exp() + (-1.0f64 / 3.0).exp())).abs() < 1e-12);
        let sp = isolate_sign_changes(&f, &DyInterval::from_i64(10, 128), 60).unwrap();
        assert_eq!(sp.crossings.len(), 1);
        assert!((sp.crossings[0].mid_f64() - 4.158883083359672).abs() < 1e-9);
        assert_eq!(sp.initial_sign, -1);
        assert_eq!(zero_count_bound(&f, 10.0).unwrap(), 1);
    }

    #[test]
    fn rotation() {
        let a = amat(&[&[(-1, 1), (2, 1)], &[(-2, 1), (-1, 1)]]);
        let f = form_fc(&a, &avec(&[(1, 1), (0, 1)]), &avec(&[(1, 1), (0, 1)])).unwrap();
        for &t in &[0.3, 1.0, 2.5] {
            let v = f.eval(&DyInterval::from_f64(t, 128)).mid_f64();
            assert!((v - (-t).exp() * (2.0 * t).cos()).abs() < 1e-12);
        }
        let pi = DyInterval::pi(128);
        let sp = isolate_sign_changes(&f, &pi, 60).unwrap();
        assert_eq!(sp.crossings.len(), 2);
        assert!((sp.crossings[0].mid_f64() - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
        assert!((sp.crossings[1].mid_f64() - 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-9);
    }

    #[test]
    fn jordan_block() {
        // exp(At) b with A = [[-1, 1], [0, -1]], b = e2 gives (t e^-t, e^-t)
        let a = amat(&[&[(-1, 1), (1, 1)], &[(0, 1), (-1, 1)]]);
        let f = form_fc(&a, &avec(&[(0, 1), (1, 1)]), &avec(&[(1, 1), (-1, 1)])).unwrap();
        let v = f.eval(&DyInterval::from_f64(0.7, 128)).mid_f64();
        assert!((v - (0.7 - 1.0) * (-0.7f64).exp()).abs() < 1e-12);
        let sp = isolate_sign_changes(&f, &DyInterval::from_i64(8, 128), 60).unwrap();
        assert_eq!(sp.crossings.len(), 1);
        assert!((sp.crossings[0].mid_f64() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_at_origin() {
        let f = form_fc(&diag(), &avec(&[(1, 1), (1, 1)]), &avec(&[(1, 1), (-1, 1)])).unwrap();
        // e^{-t/2} - e^{-t/3} < 0 for t > 0
        let sp = isolate_sign_changes(&f, &DyInterval::from_i64(20, 128), 60).unwrap();
        assert!(sp.crossings.is_empty());
        assert_eq!(sp.initial_sign, -1);
    }

    #[test]
    fn identically_zero() {
        let f = form_fc(&diag(), &avec(&[(1, 1), (0, 1)]), &avec(&[(0, 1), (1, 1)])).unwrap();
        assert!(f.is_identically_zero());
        assert!(zero_count_bound(&f, 1.0).is_err());
    }
}
