//! Certified matrix exponentials by scaling and squaring of a Taylor
//! polynomial with a rigorous remainder term.

use super::interval::{start_prec, DyInterval, MAX_PREC};
use super::matrix::{AMat, IMat};
use crate::ReachError;
use rug::float::Round;
use rug::Float;

/// Enclosure of `exp(M)` valid for every point matrix inside `m`.
pub fn expm_interval(m: &IMat) -> IMat {
    let n = m.rows;
    let prec = m.prec();
    let norm = m.norm_inf();
    if norm == 0 {
        return IMat::identity(n, prec);
    }
    // scale so the norm is at most 1/2
    let mut s = 0u32;
    let mut sc = norm.clone();
    while sc > 0.5 {
        sc >>= 1;
        s += 1;
    }
    let mut x = m.clone();
    for a in x.data.iter_mut() {
        a.lo >>= s;
        a.hi >>= s;
    }
    // number of Taylor terms so that the tail is below 2^-prec
    let mut k = 1u32;
    let mut term = sc.clone();
    let target = Float::with_val(prec, Float::i_exp(1, -(prec as i32) - 4));
    loop {
        k += 1;
        term = Float::with_val_round(prec, &term * &sc, Round::Up).0;
        term = Float::with_val_round(prec, &term / k, Round::Up).0;
        if term < target || k > 4 * prec {
            break;
        }
    }
    // tail bound: ||X||^k / k! * 1 / (1 - ||X|| / (k + 1))
    let denom = Float::with_val_round(prec, 1 - Float::with_val_round(prec, &sc / (k + 1), Round::Up).0, Round::Down).0;
    let rem = Float::with_val_round(prec, &term / &denom, Round::Up).0;
    let id = IMat::identity(n, prec);
    let mut e = id.clone();
    for j in (1..k).rev() {
        let xe = x.mul(&e);
        let inv = DyInterval::from_rational(&rug::Rational::from((1, j)), prec);
        e = id.add(&xe.scale(&inv));
    }
    for a in e.data.iter_mut() {
        *a = a.inflate(&rem);
    }
    for _ in 0..s {
        e = e.mul(&e);
    }
    e
}

/// Finite exponential series when `a` is nilpotent.
fn nilpotent_exp(a: &AMat, t: &DyInterval, prec: u32) -> Option<IMat> {
    let n = a.rows;
    let mut p = a.clone();
    let mut k = 1;
    while !p.is_zero_matrix() {
        if k >= n {
            return None;
        }
        p = p.mul(a);
        k += 1;
    }
    let ai = a.enclose(prec);
    let mut e = IMat::identity(n, prec);
    let mut term = IMat::identity(n, prec);
    for j in 1..k {
        let f = t / &DyInterval::from_i64(j as i64, prec);
        term = ai.mul(&term).scale(&f);
        e = e.add(&term);
    }
    Some(e)
}

/// Enclosure of `exp(A t)` for every `t` in the interval.
pub fn expm_at(a: &AMat, t: &DyInterval, prec: u32) -> IMat {
    if let Some(e) = nilpotent_exp(a, &t.with_prec(prec), prec) {
        return e;
    }
    let m = a.enclose(prec).scale(&t.with_prec(prec));
    expm_interval(&m)
}

/// `exp(A t) v` for all `t` in the interval, with width at most `tol` when `t`
/// is a point. Precision is doubled until the tolerance is met.
pub fn mat_exp_action(a: &AMat, t: &DyInterval, v: &[DyInterval], tol: f64) -> Result<Vec<DyInterval>, ReachError> {
    assert!(tol > 0.0);
    assert_eq!(a.cols, v.len());
    let point = t.lo == t.hi;
    let mut prec = start_prec().max(t.prec()).max(v.iter().map(|x| x.prec()).max().unwrap_or(0));
    loop {
        let e = expm_at(a, t, prec);
        let vv: Vec<DyInterval> = v.iter().map(|x| x.with_prec(prec)).collect();
        let r = e.mul_vec(&vv);
        let w = r.iter().map(|x| x.width_f64()).fold(0.0, f64::max);
        if !point || w <= tol {
            return Ok(r);
        }
        prec *= 2;
        if prec > MAX_PREC {
            return Err(ReachError::PrecisionExhausted(format!(
                "matrix exponential width {:e} above tolerance {:e}",
                w, tol
            )));
        }
    }
}

/// Enclosures of `exp(A h)` and `(integral_0^h exp(A s) ds) B` for all `h` in
/// the interval, via the exponential of the block matrix `[[A, B], [0, 0]]`.
/// Valid for singular `A`.
pub fn exp_and_integral(a: &IMat, b: &IMat, h: &DyInterval) -> (IMat, IMat) {
    let n = a.rows;
    let m = b.cols;
    let prec = a.prec().max(b.prec()).max(h.prec());
    let mut big = IMat::zeros(n + m, n + m, prec);
    for i in 0..n {
        for j in 0..n {
            big.set(i, j, a.get(i, j) * h);
        }
        for j in 0..m {
            big.set(i, n + j, b.get(i, j) * h);
        }
    }
    let e = expm_interval(&big);
    let mut ea = IMat::zeros(n, n, prec);
    let mut g = IMat::zeros(n, m, prec);
    for i in 0..n {
        for j in 0..n {
            ea.set(i, j, e.get(i, j).clone());
        }
        for j in 0..m {
            g.set(i, j, e.get(i, n + j).clone());
        }
    }
    (ea, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algnum::alg::AlgReal;
    use crate::algnum::matrix::Mat;
    use rug::Rational;

    fn amat(rows: Vec<Vec<i64>>) -> AMat {
        Mat::from_rows(rows.into_iter().map(|r| r.into_iter().map(AlgReal::from).collect()).collect())
    }

    #[test]
    fn identity_flow_exact() {
        let a = amat(vec![vec![0, 0], vec![0, 0]]);
        let v = vec![DyInterval::from_i64(3, 64), DyInterval::from_i64(4, 64)];
        let r = mat_exp_action(&a, &DyInterval::from_i64(1, 64), &v, 1e-9).unwrap();
        assert!(r[0].lo == 3 && r[0].hi == 3);
        assert!(r[1].lo == 4 && r[1].hi == 4);
    }

    #[test]
    fn nilpotent_exact() {
        let a = amat(vec![vec![0, 1], vec![0, 0]]);
        let v = vec![DyInterval::from_i64(0, 64), DyInterval::from_i64(1, 64)];
        let r = mat_exp_action(&a, &DyInterval::from_i64(2, 64), &v, 1e-9).unwrap();
        assert!(r[0].lo == 2 && r[0].hi == 2);
        assert!(r[1].lo == 1 && r[1].hi == 1);
    }

    #[test]
    fn scalar_e() {
        let a = amat(vec![vec![1]]);
        let r = mat_exp_action(&a, &DyInterval::from_i64(1, 64), &[DyInterval::from_i64(1, 64)], 1e-9).unwrap();
        assert!(r[0].width_f64() <= 1e-9);
        assert!(r[0].contains_rational(&Rational::from_f64(std::f64::consts::E).unwrap()) || (r[0].mid_f64() - std::f64::consts::E).abs() < 1e-12);
    }
}
