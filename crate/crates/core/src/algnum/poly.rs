//! Dense univariate polynomials with rational coefficients.

use rug::{Integer, Rational};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Polynomial stored low degree first; trailing zeros are always trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    c: Vec<Rational>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate().rev() {
            if *a == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", a)?,
                1 => write!(f, "({})x", a)?,
                _ => write!(f, "({})x^{}", a, i)?,
            }
        }
        Ok(())
    }
}

/// Real root of a square-free polynomial, either located exactly or by an
/// open isolating interval whose endpoints are not roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootLoc {
    Exact(Rational),
    Between(Rational, Rational),
}

impl Poly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|a| *a == 0) {
            c.pop();
        }
        Poly { c }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&a| Rational::from(a)).collect())
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn constant(a: Rational) -> Self {
        Poly::new(vec![a])
    }

    pub fn one() -> Self {
        Poly::constant(Rational::from(1))
    }

    pub fn x() -> Self {
        Poly::from_ints(&[0, 1])
    }

    /// `x - r`
    pub fn linear_root(r: &Rational) -> Self {
        Poly::new(vec![Rational::from(-r), Rational::from(1)])
    }

    pub fn monomial(a: Rational, k: usize) -> Self {
        let mut c = vec![Rational::new(); k + 1];
        c[k] = a;
        Poly::new(c)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.c.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with the zero polynomial reported as -1.
    pub fn deg(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn lc(&self) -> Rational {
        self.c.last().cloned().unwrap_or_default()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn scale(&self, a: &Rational) -> Poly {
        Poly::new(self.c.iter().map(|x| Rational::from(x * a)).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let l = Rational::from(1) / self.lc();
        self.scale(&l)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for a in self.c.iter().rev() {
            acc *= x;
            acc += a;
        }
        acc
    }

    pub fn sign_at(&self, x: &Rational) -> i32 {
        let v = self.eval(x);
        v.cmp0() as i32
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| Rational::from(a * i as u32))
                .collect(),
        )
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut r = Poly::one();
        for _ in 0..k {
            r = &r * self;
        }
        r
    }

    /// Quotient and remainder of Euclidean division.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.c.clone();
        let dd = d.c.len() - 1;
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let inv = Rational::from(1) / d.lc();
        let mut q = vec![Rational::new(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let f = Rational::from(&r[k + dd] * &inv);
            if f != 0 {
                for (j, b) in d.c.iter().enumerate() {
                    r[k + j] -= Rational::from(&f * b);
                }
            }
            q[k] = f;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.divrem(d).1
    }

    /// Division that must be exact; returns `None` when a remainder is left.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.divrem(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.primitive();
        }
        a.monic()
    }

    /// Integer-coefficient primitive associate with positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut den = Integer::from(1);
        for a in &self.c {
            den.lcm_mut(a.denom());
        }
        let ints: Vec<Integer> = self
            .c
            .iter()
            .map(|a| a.numer() * Integer::from(&den / a.denom()))
            .collect();
        let mut g = Integer::new();
        for a in &ints {
            g.gcd_mut(a);
        }
        if self.lc() < 0 {
            g = -g;
        }
        Poly::new(ints.into_iter().map(|a| Rational::from(a / &g)).collect())
    }

    /// Integer coefficient vector of the primitive associate.
    pub fn int_coeffs(&self) -> Vec<Integer> {
        self.primitive().c.iter().map(|a| a.numer().clone()).collect()
    }

    pub fn from_integers(c: &[Integer]) -> Poly {
        Poly::new(c.iter().map(|a| Rational::from(a.clone())).collect())
    }

    pub fn squarefree_part(&self) -> Poly {
        if self.deg() <= 0 {
            return self.primitive();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides").primitive()
    }

    /// Yun's algorithm: pairs (square-free factor, multiplicity).
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        if self.deg() <= 0 {
            return out;
        }
        let f = self.primitive();
        let fp = f.derivative();
        let mut a = f.gcd(&fp);
        let mut b = f.exact_div(&a).unwrap();
        let mut c = fp.exact_div(&a).unwrap();
        let mut d = &c - &b.derivative();
        let mut i = 1;
        loop {
            a = b.gcd(&d);
            if a.deg() > 0 {
                out.push((a.primitive(), i));
            }
            b = b.exact_div(&a).unwrap();
            if b.deg() <= 0 {
                break;
            }
            c = d.exact_div(&a).unwrap();
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// `p(x + r)`
    pub fn shift(&self, r: &Rational) -> Poly {
        let mut out = Poly::zero();
        let lin = Poly::new(vec![r.clone(), Rational::from(1)]);
        for a in self.c.iter().rev() {
            out = &(&out * &lin) + &Poly::constant(a.clone());
        }
        out
    }

    /// `p(s x)`
    pub fn scale_var(&self, s: &Rational) -> Poly {
        let mut pw = Rational::from(1);
        let mut c = Vec::with_capacity(self.c.len());
        for a in &self.c {
            c.push(Rational::from(a * &pw));
            pw *= s;
        }
        Poly::new(c)
    }

    /// `p(-x)`
    pub fn reflect(&self) -> Poly {
        self.scale_var(&Rational::from(-1))
    }

    /// `x^deg p(1/x)`
    pub fn reverse(&self) -> Poly {
        let mut c = self.c.clone();
        c.reverse();
        Poly::new(c)
    }

    /// `p(q(x))`
    pub fn compose(&self, q: &Poly) -> Poly {
        let mut out = Poly::zero();
        for a in self.c.iter().rev() {
            out = &(&out * q) + &Poly::constant(a.clone());
        }
        out
    }

    /// Resultant over the rationals via the Euclidean remainder sequence.
    pub fn resultant(&self, other: &Poly) -> Rational {
        if self.is_zero() || other.is_zero() {
            return Rational::new();
        }
        let mut a = self.clone();
        let mut b = other.clone();
        let mut res = Rational::from(1);
        loop {
            let da = a.deg();
            let db = b.deg();
            if db == 0 {
                let mut p = Rational::from(1);
                for _ in 0..da {
                    p *= b.lc();
                }
                return res * p;
            }
            let r = a.rem(&b);
            if r.is_zero() {
                return Rational::new();
            }
            let dr = r.deg();
            // res(a, b) = (-1)^{da db} lc(b)^{da - dr} res(b, r)
            if (da * db) % 2 == 1 {
                res = -res;
            }
            let mut p = Rational::from(1);
            for _ in 0..(da - dr) {
                p *= b.lc();
            }
            res *= p;
            a = b;
            b = r;
        }
    }

    /// Cauchy bound: every complex root has modulus strictly below it.
    pub fn root_bound(&self) -> Rational {
        let lc = self.lc().abs();
        let mut m = Rational::new();
        for a in &self.c[..self.c.len() - 1] {
            let q = Rational::from(a.abs_ref()) / &lc;
            if q > m {
                m = q;
            }
        }
        m + 1
    }

    /// Sturm sequence of a (square-free) polynomial.
    pub fn sturm(&self) -> Vec<Poly> {
        let mut s = vec![self.clone(), self.derivative()];
        while !s.last().unwrap().is_zero() && s.last().unwrap().deg() > 0 {
            let n = s.len();
            let r = s[n - 2].rem(&s[n - 1]);
            if r.is_zero() {
                break;
            }
            // keep the sign, only clear denominators
            let mut pr = r.primitive();
            if r.lc() > 0 {
                pr = -pr;
            }
            s.push(pr);
        }
        s
    }

    fn variations(seq: &[Poly], x: &Rational) -> usize {
        let mut last = 0;
        let mut v = 0;
        for p in seq {
            let s = p.sign_at(x);
            if s != 0 {
                if last != 0 && s != last {
                    v += 1;
                }
                last = s;
            }
        }
        v
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_roots(&self, a: &Rational, b: &Rational) -> usize {
        let sf = self.squarefree_part();
        let seq = sf.sturm();
        Self::count_with(&seq, a, b)
    }

    pub fn count_with(seq: &[Poly], a: &Rational, b: &Rational) -> usize {
        let va = Self::variations(seq, a);
        let vb = Self::variations(seq, b);
        va.saturating_sub(vb)
    }

    /// Isolate all real roots of the square-free part, sorted increasingly.
    pub fn real_roots(&self) -> Vec<RootLoc> {
        let sf = self.squarefree_part();
        if sf.deg() <= 0 {
            return Vec::new();
        }
        if sf.deg() == 1 {
            let r = (-sf.coeff(0)) / sf.coeff(1);
            return vec![RootLoc::Exact(r)];
        }
        let seq = sf.sturm();
        let bnd = sf.root_bound();
        let mut out = Vec::new();
        let mut stack = vec![(Rational::from(-&bnd), bnd)];
        while let Some((a, b)) = stack.pop() {
            let n = Self::count_with(&seq, &a, &b);
            if n == 0 {
                continue;
            }
            if sf.sign_at(&b) == 0 {
                // b itself is a root; split it off exactly
                out.push(RootLoc::Exact(b.clone()));
                if n > 1 {
                    let w = Rational::from(&b - &a);
                    let b2 = &b - (w / 1024);
                    stack.push((a, b2));
                }
                continue;
            }
            if n == 1 && sf.sign_at(&a) != 0 {
                out.push(RootLoc::Between(a, b));
                continue;
            }
            let m: Rational = Rational::from(&a + &b) / 2;
            stack.push((a, m.clone()));
            stack.push((m, b));
        }
        out.sort_by(|x, y| {
            let lx = match x {
                RootLoc::Exact(r) | RootLoc::Between(r, _) => r,
            };
            let ly = match y {
                RootLoc::Exact(r) | RootLoc::Between(r, _) => r,
            };
            lx.cmp(ly)
        });
        out
    }

    /// Evaluate polynomial with coefficients mapped through `f` (generic Horner).
    pub fn map_eval<T: Clone, F, A, M>(&self, x: &T, zero: T, conv: F, add: A, mul: M) -> T
    where
        F: Fn(&Rational) -> T,
        A: Fn(&T, &T) -> T,
        M: Fn(&T, &T) -> T,
    {
        let mut acc = zero;
        for a in self.c.iter().rev() {
            acc = add(&mul(&acc, x), &conv(a));
        }
        acc
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(self.coeff(i) + o.coeff(i));
        }
        Poly::new(c)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(self.coeff(i) - o.coeff(i));
        }
        Poly::new(c)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Rational::new(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += Rational::from(a * b);
            }
        }
        Poly::new(c)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.c.into_iter().map(|a| -a).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -self.clone()
    }
}

/// Interpolate the polynomial taking values `ys` at the nodes `xs` (Newton form).
pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> Poly {
    let n = xs.len();
    let mut dd: Vec<Rational> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = Rational::from(&dd[i] - &dd[i - 1]);
            let den = Rational::from(&xs[i] - &xs[i - j]);
            dd[i] = num / den;
        }
    }
    let mut p = Poly::constant(dd[n - 1].clone());
    for i in (0..n - 1).rev() {
        p = &(&p * &Poly::linear_root(&xs[i])) + &Poly::constant(dd[i].clone());
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64) -> Rational {
        Rational::from(a)
    }

    #[test]
    fn division_roundtrip() {
        let a = Poly::from_ints(&[1, 2, 3, 4]);
        let b = Poly::from_ints(&[-1, 1]);
        let (qq, r) = a.divrem(&b);
        assert_eq!(&(&qq * &b) + &r, a);
        assert_eq!(r, Poly::constant(q(10)));
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = &Poly::from_ints(&[-1, 1]).pow(2) * &Poly::from_ints(&[2, 1]);
        let d = a.squarefree_decomposition();
        assert_eq!(d.len(), 2);
        assert_eq!(a.squarefree_part(), &Poly::from_ints(&[-1, 1]) * &Poly::from_ints(&[2, 1]));
    }

    #[test]
    fn resultant_matches_root_product() {
        // res(x^2 - 2, x - 3) = (3^2 - 2) up to sign convention res(f, x - a) = (-1)^deg f f(a)
        let f = Poly::from_ints(&[-2, 0, 1]);
        let g = Poly::from_ints(&[-3, 1]);
        assert_eq!(f.resultant(&g), q(7));
        assert_eq!(g.resultant(&f), q(7));
    }

    #[test]
    fn sturm_isolation() {
        let f = Poly::from_ints(&[-2, 0, 1]);
        let r = f.real_roots();
        assert_eq!(r.len(), 2);
        let f3 = Poly::from_ints(&[0, -1, 0, 1]);
        assert_eq!(f3.real_roots().len(), 3);
        assert_eq!(f3.count_roots(&q(-2), &q(2)), 3);
    }

    #[test]
    fn interpolation_recovers() {
        let f = Poly::from_ints(&[3, -1, 0, 2]);
        let xs: Vec<Rational> = (0..4).map(q).collect();
        let ys: Vec<Rational> = xs.iter().map(|x| f.eval(x)).collect();
        assert_eq!(interpolate(&xs, &ys), f);
    }
}
