//! Complex root approximation and factorization over the integers.
//!
//! Factors are found by recombining numerically approximated roots and are
//! accepted only after exact polynomial division, so every reported factor is
//! exact. Root approximations are refined until the inclusion radii of all roots
//! are tiny, which makes the rounding step of the recombination reliable.

use super::interval::{CInterval, DyInterval};
use super::poly::Poly;
use rug::float::Round;
use rug::{Float, Integer, Rational};

#[derive(Clone, Debug)]
struct Cf {
    re: Float,
    im: Float,
}

impl Cf {
    fn new(prec: u32, re: f64, im: f64) -> Cf {
        Cf { re: Float::with_val(prec, re), im: Float::with_val(prec, im) }
    }
    fn add(&self, o: &Cf) -> Cf {
        Cf { re: Float::with_val(self.re.prec(), &self.re + &o.re), im: Float::with_val(self.re.prec(), &self.im + &o.im) }
    }
    fn sub(&self, o: &Cf) -> Cf {
        Cf { re: Float::with_val(self.re.prec(), &self.re - &o.re), im: Float::with_val(self.re.prec(), &self.im - &o.im) }
    }
    fn mul(&self, o: &Cf) -> Cf {
        let p = self.re.prec();
        let a = Float::with_val(p, &self.re * &o.re);
        let b = Float::with_val(p, &self.im * &o.im);
        let c = Float::with_val(p, &self.re * &o.im);
        let d = Float::with_val(p, &self.im * &o.re);
        Cf { re: a - b, im: c + d }
    }
    fn norm2(&self) -> Float {
        let p = self.re.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }
    fn div(&self, o: &Cf) -> Cf {
        let d = o.norm2();
        let conj = Cf { re: o.re.clone(), im: -o.im.clone() };
        let n = self.mul(&conj);
        Cf { re: n.re / &d, im: n.im / &d }
    }
    fn abs(&self) -> Float {
        self.norm2().sqrt()
    }
}

fn eval_cf(p: &[Float], z: &Cf) -> Cf {
    let prec = z.re.prec();
    let mut acc = Cf::new(prec, 0.0, 0.0);
    for a in p.iter().rev() {
        acc = acc.mul(z);
        acc.re += a;
    }
    acc
}

fn float_coeffs(p: &Poly, prec: u32) -> Vec<Float> {
    p.coeffs().iter().map(|a| Float::with_val(prec, a)).collect()
}

fn approx_roots_at(p: &Poly, prec: u32) -> Vec<Cf> {
    let n = p.deg() as usize;
    let coef = float_coeffs(p, prec);
    let lc = coef[n].clone();
    let bound = p.root_bound().to_f64().min(1e12);
    let mut z: Vec<Cf> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Cf::new(prec, bound * 0.9 * ang.cos(), bound * 0.9 * ang.sin())
        })
        .collect();
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 16));
    for _ in 0..(2000 + 40 * n) {
        let mut maxc = Float::with_val(prec, 0);
        for k in 0..n {
            let num = eval_cf(&coef, &z[k]);
            let mut den = Cf { re: lc.clone(), im: Float::with_val(prec, 0) };
            for j in 0..n {
                if j != k {
                    den = den.mul(&z[k].sub(&z[j]));
                }
            }
            if den.norm2() == 0 {
                z[k].re += 1e-3;
                continue;
            }
            let corr = num.div(&den);
            let m = corr.abs();
            let zm = z[k].abs();
            let rel = if zm > 1 { Float::with_val(prec, &m / &zm) } else { m };
            if rel > maxc {
                maxc = rel;
            }
            z[k] = z[k].sub(&corr);
        }
        if maxc < tol {
            break;
        }
    }
    z
}

/// Upper bound for the inclusion radius `deg * |p(z)| / |p'(z)|`.
fn inclusion_radius(p: &Poly, dp: &Poly, z: &Cf, prec: u32) -> Float {
    let zi = CInterval::new(DyInterval::point(z.re.clone()), DyInterval::point(z.im.clone()));
    let v = eval_ci(p, &zi, prec);
    let d = eval_ci(dp, &zi, prec);
    let num = v.mag();
    let den_sq = d.norm_sqr();
    if !den_sq.is_pos() {
        return Float::with_val(prec, f64::INFINITY);
    }
    let den = den_sq.sqrt().lo;
    let r = Float::with_val_round(prec, &num / &den, Round::Up).0;
    Float::with_val_round(prec, r * (p.deg() as u32), Round::Up).0
}

/// Evaluate a rational polynomial on a complex interval.
pub fn eval_ci(p: &Poly, z: &CInterval, prec: u32) -> CInterval {
    let mut acc = CInterval::zero(prec);
    for a in p.coeffs().iter().rev() {
        acc = acc.mul(z);
        acc.re = &acc.re + &DyInterval::from_rational(a, prec);
    }
    acc
}

/// Certified enclosures of all complex roots of a square-free polynomial.
/// Each returned rectangle contains exactly one root, and the rectangles are
/// pairwise disjoint. Precision is raised until the roots separate.
pub fn certified_roots(p: &Poly, min_prec: u32) -> Vec<CInterval> {
    assert!(p.deg() >= 1);
    let sf = p.squarefree_part();
    let dp = sf.derivative();
    let mut prec = min_prec.max(64);
    loop {
        let z = approx_roots_at(&sf, prec);
        let mut out = Vec::with_capacity(z.len());
        let mut ok = true;
        for zk in &z {
            let r = inclusion_radius(&sf, &dp, zk, prec);
            if !r.is_finite() {
                ok = false;
                break;
            }
            let c = CInterval::new(DyInterval::point(zk.re.clone()), DyInterval::point(zk.im.clone()));
            out.push(c.inflate(&r));
        }
        if ok {
            'chk: for i in 0..out.len() {
                for j in (i + 1)..out.len() {
                    if out[i].re.overlaps(&out[j].re) && out[i].im.overlaps(&out[j].im) {
                        ok = false;
                        break 'chk;
                    }
                }
            }
        }
        if ok {
            return out;
        }
        prec *= 2;
        assert!(prec <= 1 << 16, "root separation failed");
    }
}

fn bitlen(p: &Poly) -> u32 {
    let c = p.int_coeffs();
    let mut s = Integer::new();
    for a in &c {
        s += Integer::from(a * a);
    }
    s.significant_bits() / 2 + 1
}

fn round_to_int(x: &Float) -> Option<Integer> {
    let r = x.clone().round();
    let diff = Float::with_val(x.prec(), x - &r).abs();
    if diff > 0.25 {
        return None;
    }
    r.to_integer()
}

/// Try to find a proper factor of the square-free primitive polynomial `p` of
/// degree `n`, given its approximate roots.
fn split_once(p: &Poly, roots: &[Cf], prec: u32) -> Option<(Poly, Vec<usize>)> {
    let n = roots.len();
    let lc = Float::with_val(prec, p.lc());
    let eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 3));
    // units: single real roots or conjugate pairs
    let mut used = vec![false; n];
    let mut units: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        if roots[i].im.clone().abs() < eps {
            units.push(vec![i]);
            continue;
        }
        let mut best: Option<(usize, Float)> = None;
        for j in 0..n {
            if used[j] {
                continue;
            }
            let d = Cf { re: Float::with_val(prec, &roots[i].re - &roots[j].re), im: Float::with_val(prec, &roots[i].im + &roots[j].im) }.abs();
            if best.as_ref().is_none_or(|(_, b)| d < *b) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, _)) => {
                used[j] = true;
                units.push(vec![i, j]);
            }
            None => units.push(vec![i]),
        }
    }
    let u = units.len();
    if u <= 1 {
        return None;
    }
    let full = (1u64 << u) - 1;
    let mut masks: Vec<u64> = (1..full).collect();
    masks.sort_by_key(|m| {
        let d: usize = (0..u).filter(|i| m >> i & 1 == 1).map(|i| units[i].len()).sum();
        (d, *m)
    });
    for m in masks {
        let idx: Vec<usize> = (0..u).filter(|i| m >> i & 1 == 1).flat_map(|i| units[i].clone()).collect();
        if idx.len() * 2 > n {
            continue;
        }
        // a * prod (x - r)
        let mut c: Vec<Cf> = vec![Cf { re: lc.clone(), im: Float::with_val(prec, 0) }];
        for &k in &idx {
            let mut nc = vec![Cf::new(prec, 0.0, 0.0); c.len() + 1];
            for (j, cj) in c.iter().enumerate() {
                nc[j + 1] = nc[j + 1].add(cj);
                nc[j] = nc[j].sub(&cj.mul(&roots[k]));
            }
            c = nc;
        }
        let mut ints = Vec::with_capacity(c.len());
        let mut good = true;
        for cj in &c {
            if cj.im.clone().abs() > 0.25 {
                good = false;
                break;
            }
            match round_to_int(&cj.re) {
                Some(v) => ints.push(v),
                None => {
                    good = false;
                    break;
                }
            }
        }
        if !good {
            continue;
        }
        let g = Poly::from_integers(&ints).primitive();
        if g.deg() < 1 || g.deg() >= p.deg() {
            continue;
        }
        if p.exact_div(&g).is_some() {
            return Some((g, idx));
        }
    }
    None
}

/// Irreducible factors of a square-free primitive polynomial.
fn factor_squarefree(p: &Poly) -> Vec<Poly> {
    let p = p.primitive();
    if p.deg() <= 1 {
        return vec![p];
    }
    // quick rational-root sweep is subsumed by recombination of single roots
    let n = p.deg() as u32;
    let prec = 2 * (bitlen(&p) + n + 2 * p.lc().numer().significant_bits()) + 128;
    let dp = p.derivative();
    let mut prec = prec;
    let roots = loop {
        let r = approx_roots_at(&p, prec);
        let tiny = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2));
        if r.iter().all(|z| inclusion_radius(&p, &dp, z, prec) < tiny) {
            break r;
        }
        prec *= 2;
        assert!(prec <= 1 << 16, "root approximation did not converge");
    };
    let mut out = Vec::new();
    let mut cur = p.clone();
    let mut cur_roots = roots;
    loop {
        match split_once(&cur, &cur_roots, prec) {
            Some((g, idx)) => {
                out.push(g.clone());
                cur = cur.exact_div(&g).unwrap().primitive();
                cur_roots = cur_roots
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !idx.contains(i))
                    .map(|(_, z)| z)
                    .collect();
                if cur.deg() <= 1 {
                    if cur.deg() == 1 {
                        out.push(cur);
                    }
                    break;
                }
            }
            None => {
                out.push(cur);
                break;
            }
        }
    }
    out
}

/// Factor a polynomial over the rationals into irreducible primitive integer
/// factors with multiplicities. Constant content is dropped.
pub fn factor(p: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    for (s, m) in p.squarefree_decomposition() {
        for f in factor_squarefree(&s) {
            out.push((f, m));
        }
    }
    out.sort_by(|a, b| a.0.deg().cmp(&b.0.deg()).then_with(|| format!("{}", a.0).cmp(&format!("{}", b.0))));
    out
}

/// Whether a polynomial is irreducible over the rationals.
pub fn is_irreducible(p: &Poly) -> bool {
    let f = factor(p);
    f.len() == 1 && f[0].1 == 1
}

/// Rational roots of a polynomial (exact).
pub fn rational_roots(p: &Poly) -> Vec<Rational> {
    factor(p)
        .into_iter()
        .filter(|(f, _)| f.deg() == 1)
        .map(|(f, _)| (-f.coeff(0)) / f.coeff(1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_product() {
        let a = Poly::from_ints(&[-2, 0, 1]);
        let b = Poly::from_ints(&[1, 1, 1]);
        let c = Poly::from_ints(&[3, -2]);
        let p = &(&a * &b) * &c;
        let f = factor(&p);
        assert_eq!(f.len(), 3);
        for (g, m) in &f {
            assert_eq!(*m, 1);
            assert!(p.exact_div(g).is_some());
        }
    }

    #[test]
    fn irreducible_quartic() {
        // x^4 - 10x^2 + 1 is the minimal polynomial of sqrt2 + sqrt3
        let p = Poly::from_ints(&[1, 0, -10, 0, 1]);
        assert!(is_irreducible(&p));
        let q = Poly::from_ints(&[4, 0, -5, 0, 1]);
        assert_eq!(factor(&q).len(), 4);
    }

    #[test]
    fn certified_complex_roots() {
        let p = Poly::from_ints(&[5, 2, 1]);
        let r = certified_roots(&p, 64);
        assert_eq!(r.len(), 2);
        for z in &r {
            assert!(z.re.contains_rational(&Rational::from(-1)));
        }
    }
}
