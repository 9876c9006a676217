//! Outward-rounded interval arithmetic over MPFR dyadic endpoints.

use rug::float::{Constant, Round};
use rug::ops::{AddAssignRound, MulAssignRound};
use rug::{Float, Rational};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 128;

/// Largest precision any adaptive loop may request.
pub const MAX_PREC: u32 = 8192;

static START_PREC: AtomicU32 = AtomicU32::new(DEFAULT_PREC);

/// Starting precision for adaptive computations.
pub fn start_prec() -> u32 {
    START_PREC.load(AtomicOrdering::Relaxed)
}

/// Set the starting precision (clamped to `[32, MAX_PREC]`).
pub fn set_start_prec(bits: u32) {
    START_PREC.store(bits.clamp(32, MAX_PREC), AtomicOrdering::Relaxed);
}

/// Closed interval `[lo, hi]` with dyadic endpoints. Endpoints may be infinite.
#[derive(Clone, PartialEq)]
pub struct DyInterval {
    pub lo: Float,
    pub hi: Float,
}

macro_rules! rnd {
    ($prec:expr, $e:expr, $r:expr) => {
        Float::with_val_round($prec, $e, $r).0
    };
}

impl fmt::Debug for DyInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

impl fmt::Display for DyInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.mid_f64();
        let r = self.rad_f64();
        write!(f, "{} ± {:.3e}", fmt_num(m), r)
    }
}

fn fmt_num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{:.12}", x)
    }
}

impl DyInterval {
    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn new(lo: Float, hi: Float) -> Self {
        debug_assert!(!(lo > hi), "inverted interval");
        DyInterval { lo, hi }
    }

    pub fn point(x: Float) -> Self {
        DyInterval { lo: x.clone(), hi: x }
    }

    pub fn from_i64(a: i64, prec: u32) -> Self {
        let lo = rnd!(prec, a, Round::Down);
        let hi = rnd!(prec, a, Round::Up);
        DyInterval { lo, hi }
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_i64(0, prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        DyInterval {
            lo: rnd!(prec, q, Round::Down),
            hi: rnd!(prec, q, Round::Up),
        }
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        Self::point(Float::with_val(prec.max(53), x))
    }

    /// Interval spanning two rationals.
    pub fn from_bounds(a: &Rational, b: &Rational, prec: u32) -> Self {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        DyInterval {
            lo: rnd!(prec, a, Round::Down),
            hi: rnd!(prec, b, Round::Up),
        }
    }

    pub fn entire(prec: u32) -> Self {
        DyInterval {
            lo: Float::with_val(prec, f64::NEG_INFINITY),
            hi: Float::with_val(prec, f64::INFINITY),
        }
    }

    pub fn symmetric(r: &Float) -> Self {
        let r = r.clone().abs();
        DyInterval { lo: -r.clone(), hi: r }
    }

    pub fn pi(prec: u32) -> Self {
        DyInterval {
            lo: rnd!(prec, Constant::Pi, Round::Down),
            hi: rnd!(prec, Constant::Pi, Round::Up),
        }
    }

    pub fn ln2(prec: u32) -> Self {
        DyInterval {
            lo: rnd!(prec, Constant::Log2, Round::Down),
            hi: rnd!(prec, Constant::Log2, Round::Up),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains_zero(&self) -> bool {
        !(self.lo > 0) && !(self.hi < 0)
    }

    pub fn is_pos(&self) -> bool {
        self.lo > 0
    }

    pub fn is_neg(&self) -> bool {
        self.hi < 0
    }

    /// Certified sign: `Some(±1)` when the interval excludes 0.
    pub fn sign(&self) -> Option<i32> {
        if self.is_pos() {
            Some(1)
        } else if self.is_neg() {
            Some(-1)
        } else {
            None
        }
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        !(self.lo > *q) && !(self.hi < *q)
    }

    pub fn contains(&self, o: &DyInterval) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn overlaps(&self, o: &DyInterval) -> bool {
        !(self.hi < o.lo) && !(o.hi < self.lo)
    }

    pub fn width(&self) -> Float {
        rnd!(self.prec(), &self.hi - &self.lo, Round::Up)
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64_round(Round::Up)
    }

    pub fn mid(&self) -> Float {
        let mut m = rnd!(self.prec() + 1, &self.lo + &self.hi, Round::Nearest);
        m /= 2;
        m
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    /// Radius bounding the distance from `mid()` to both endpoints.
    pub fn rad(&self) -> Float {
        let m = self.mid();
        let a = rnd!(self.prec(), &m - &self.lo, Round::Up);
        let b = rnd!(self.prec(), &self.hi - &m, Round::Up);
        if a > b {
            a
        } else {
            b
        }
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad().to_f64_round(Round::Up)
    }

    /// Upper bound on `max |x|`.
    pub fn mag(&self) -> Float {
        let a = self.lo.clone().abs();
        let b = self.hi.clone().abs();
        if a > b {
            a
        } else {
            b
        }
    }

    /// Lower bound on `min |x|`.
    pub fn mig(&self) -> Float {
        if self.contains_zero() {
            Float::with_val(self.prec(), 0)
        } else {
            let a = self.lo.clone().abs();
            let b = self.hi.clone().abs();
            if a < b {
                a
            } else {
                b
            }
        }
    }

    pub fn hull(&self, o: &DyInterval) -> DyInterval {
        let lo = if self.lo < o.lo { self.lo.clone() } else { o.lo.clone() };
        let hi = if self.hi > o.hi { self.hi.clone() } else { o.hi.clone() };
        DyInterval { lo, hi }
    }

    pub fn intersect(&self, o: &DyInterval) -> Option<DyInterval> {
        let lo = if self.lo > o.lo { self.lo.clone() } else { o.lo.clone() };
        let hi = if self.hi < o.hi { self.hi.clone() } else { o.hi.clone() };
        if lo > hi {
            None
        } else {
            Some(DyInterval { lo, hi })
        }
    }

    pub fn with_prec(&self, prec: u32) -> DyInterval {
        DyInterval {
            lo: rnd!(prec, &self.lo, Round::Down),
            hi: rnd!(prec, &self.hi, Round::Up),
        }
    }

    /// Widen by an absolute amount in each direction.
    pub fn inflate(&self, r: &Float) -> DyInterval {
        let p = self.prec();
        DyInterval {
            lo: rnd!(p, &self.lo - r, Round::Down),
            hi: rnd!(p, &self.hi + r, Round::Up),
        }
    }

    pub fn abs(&self) -> DyInterval {
        if self.lo >= 0 {
            self.clone()
        } else if self.hi <= 0 {
            -self.clone()
        } else {
            DyInterval {
                lo: Float::with_val(self.prec(), 0),
                hi: self.mag(),
            }
        }
    }

    pub fn sqr(&self) -> DyInterval {
        let a = self.abs();
        let p = self.prec();
        DyInterval {
            lo: rnd!(p, a.lo.square_ref(), Round::Down),
            hi: rnd!(p, a.hi.square_ref(), Round::Up),
        }
    }

    pub fn powi(&self, k: u32) -> DyInterval {
        let mut r = DyInterval::one(self.prec());
        for _ in 0..k {
            r = &r * self;
        }
        if k.is_multiple_of(2) && k > 0 && r.lo < 0 {
            r.lo = Float::with_val(r.prec(), 0);
        }
        r
    }

    pub fn sqrt(&self) -> DyInterval {
        let p = self.prec();
        let lo = if self.lo > 0 {
            rnd!(p, self.lo.sqrt_ref(), Round::Down)
        } else {
            Float::with_val(p, 0)
        };
        let hi = if self.hi > 0 {
            rnd!(p, self.hi.sqrt_ref(), Round::Up)
        } else {
            Float::with_val(p, 0)
        };
        DyInterval { lo, hi }
    }

    pub fn exp(&self) -> DyInterval {
        let p = self.prec();
        DyInterval {
            lo: rnd!(p, self.lo.exp_ref(), Round::Down),
            hi: rnd!(p, self.hi.exp_ref(), Round::Up),
        }
    }

    /// Natural logarithm; the interval must be strictly positive.
    pub fn ln(&self) -> DyInterval {
        assert!(self.is_pos(), "logarithm of non-positive interval");
        let p = self.prec();
        DyInterval {
            lo: rnd!(p, self.lo.ln_ref(), Round::Down),
            hi: rnd!(p, self.hi.ln_ref(), Round::Up),
        }
    }

    fn trig(&self, is_sin: bool) -> DyInterval {
        let p = self.prec();
        if !self.is_finite() || self.width() > 6 {
            return DyInterval::from_bounds(&Rational::from(-1), &Rational::from(1), p);
        }
        let m = self.mid();
        let r = self.rad();
        let (lo, hi) = if is_sin {
            (rnd!(p, m.sin_ref(), Round::Down), rnd!(p, m.sin_ref(), Round::Up))
        } else {
            (rnd!(p, m.cos_ref(), Round::Down), rnd!(p, m.cos_ref(), Round::Up))
        };
        let mut lo = rnd!(p, &lo - &r, Round::Down);
        let mut hi = rnd!(p, &hi + &r, Round::Up);
        if lo < -1 {
            lo = Float::with_val(p, -1);
        }
        if hi > 1 {
            hi = Float::with_val(p, 1);
        }
        DyInterval { lo, hi }
    }

    pub fn sin(&self) -> DyInterval {
        self.trig(true)
    }

    pub fn cos(&self) -> DyInterval {
        self.trig(false)
    }

    pub fn recip(&self) -> DyInterval {
        if self.contains_zero() {
            return DyInterval::entire(self.prec());
        }
        let p = self.prec();
        DyInterval {
            lo: rnd!(p, 1 / &self.hi, Round::Down),
            hi: rnd!(p, 1 / &self.lo, Round::Up),
        }
    }

    pub fn mul_rational(&self, q: &Rational) -> DyInterval {
        self * &DyInterval::from_rational(q, self.prec())
    }

    /// Split at the midpoint.
    pub fn bisect(&self) -> (DyInterval, DyInterval) {
        let m = self.mid();
        (
            DyInterval { lo: self.lo.clone(), hi: m.clone() },
            DyInterval { lo: m, hi: self.hi.clone() },
        )
    }

    /// Exact rational value of the lower endpoint (finite only).
    pub fn lo_rational(&self) -> Rational {
        self.lo.to_rational().expect("finite endpoint")
    }

    pub fn hi_rational(&self) -> Rational {
        self.hi.to_rational().expect("finite endpoint")
    }

    pub fn max(&self, o: &DyInterval) -> DyInterval {
        DyInterval {
            lo: if self.lo > o.lo { self.lo.clone() } else { o.lo.clone() },
            hi: if self.hi > o.hi { self.hi.clone() } else { o.hi.clone() },
        }
    }

    pub fn min(&self, o: &DyInterval) -> DyInterval {
        DyInterval {
            lo: if self.lo < o.lo { self.lo.clone() } else { o.lo.clone() },
            hi: if self.hi < o.hi { self.hi.clone() } else { o.hi.clone() },
        }
    }
}

impl Neg for DyInterval {
    type Output = DyInterval;
    fn neg(self) -> DyInterval {
        DyInterval { lo: -self.hi, hi: -self.lo }
    }
}

impl Neg for &DyInterval {
    type Output = DyInterval;
    fn neg(self) -> DyInterval {
        -self.clone()
    }
}

impl Add for &DyInterval {
    type Output = DyInterval;
    fn add(self, o: &DyInterval) -> DyInterval {
        let p = self.prec().max(o.prec());
        DyInterval {
            lo: rnd!(p, &self.lo + &o.lo, Round::Down),
            hi: rnd!(p, &self.hi + &o.hi, Round::Up),
        }
    }
}

impl Sub for &DyInterval {
    type Output = DyInterval;
    fn sub(self, o: &DyInterval) -> DyInterval {
        let p = self.prec().max(o.prec());
        DyInterval {
            lo: rnd!(p, &self.lo - &o.hi, Round::Down),
            hi: rnd!(p, &self.hi - &o.lo, Round::Up),
        }
    }
}

fn mul_bound(p: u32, a: &Float, b: &Float, r: Round) -> Float {
    if a.is_zero() || b.is_zero() {
        return Float::with_val(p, 0);
    }
    rnd!(p, a * b, r)
}

impl Mul for &DyInterval {
    type Output = DyInterval;
    fn mul(self, o: &DyInterval) -> DyInterval {
        let p = self.prec().max(o.prec());
        let (a, b, c, d) = (&self.lo, &self.hi, &o.lo, &o.hi);
        if *a >= 0 && *c >= 0 {
            return DyInterval { lo: mul_bound(p, a, c, Round::Down), hi: mul_bound(p, b, d, Round::Up) };
        }
        if *b <= 0 && *d <= 0 {
            return DyInterval { lo: mul_bound(p, b, d, Round::Down), hi: mul_bound(p, a, c, Round::Up) };
        }
        let cands = [(a, c), (a, d), (b, c), (b, d)];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (x, y) in cands.iter() {
            let l = mul_bound(p, x, y, Round::Down);
            let h = mul_bound(p, x, y, Round::Up);
            if lo.as_ref().is_none_or(|v| l < *v) {
                lo = Some(l);
            }
            if hi.as_ref().is_none_or(|v| h > *v) {
                hi = Some(h);
            }
        }
        DyInterval { lo: lo.unwrap(), hi: hi.unwrap() }
    }
}

impl Div for &DyInterval {
    type Output = DyInterval;
    fn div(self, o: &DyInterval) -> DyInterval {
        self * &o.recip()
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for DyInterval {
            type Output = DyInterval;
            fn $m(self, o: DyInterval) -> DyInterval {
                (&self).$m(&o)
            }
        }
        impl $tr<&DyInterval> for DyInterval {
            type Output = DyInterval;
            fn $m(self, o: &DyInterval) -> DyInterval {
                (&self).$m(o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);

/// Complex interval as a rectangle; used internally for spectral data.
#[derive(Clone, Debug, PartialEq)]
pub struct CInterval {
    pub re: DyInterval,
    pub im: DyInterval,
}

impl CInterval {
    pub fn new(re: DyInterval, im: DyInterval) -> Self {
        CInterval { re, im }
    }

    pub fn real(re: DyInterval) -> Self {
        let p = re.prec();
        CInterval { re, im: DyInterval::zero(p) }
    }

    pub fn zero(prec: u32) -> Self {
        CInterval::real(DyInterval::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        CInterval::real(DyInterval::one(prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn conj(&self) -> CInterval {
        CInterval { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn add(&self, o: &CInterval) -> CInterval {
        CInterval { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &CInterval) -> CInterval {
        CInterval { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn neg(&self) -> CInterval {
        CInterval { re: -&self.re, im: -&self.im }
    }

    pub fn mul(&self, o: &CInterval) -> CInterval {
        CInterval {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    pub fn scale(&self, s: &DyInterval) -> CInterval {
        CInterval { re: &self.re * s, im: &self.im * s }
    }

    pub fn norm_sqr(&self) -> DyInterval {
        &self.re.sqr() + &self.im.sqr()
    }

    /// Upper bound on the modulus.
    pub fn mag(&self) -> Float {
        let a = self.re.mag();
        let b = self.im.mag();
        let p = self.prec();
        let s = rnd!(p, a.square_ref(), Round::Up);
        let mut t = rnd!(p, b.square_ref(), Round::Up);
        t.add_assign_round(&s, Round::Up);
        rnd!(p, t.sqrt_ref(), Round::Up)
    }

    pub fn recip(&self) -> CInterval {
        let d = self.norm_sqr().recip();
        CInterval { re: &self.re * &d, im: -(&self.im * &d) }
    }

    pub fn div(&self, o: &CInterval) -> CInterval {
        self.mul(&o.recip())
    }

    /// `exp(self)`
    pub fn exp(&self) -> CInterval {
        let m = self.re.exp();
        CInterval { re: &m * &self.im.cos(), im: &m * &self.im.sin() }
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn hull(&self, o: &CInterval) -> CInterval {
        CInterval { re: self.re.hull(&o.re), im: self.im.hull(&o.im) }
    }

    pub fn inflate(&self, r: &Float) -> CInterval {
        CInterval { re: self.re.inflate(r), im: self.im.inflate(r) }
    }
}

/// Multiply a float by a power of two in place, exactly.
pub fn mul_pow2(x: &mut Float, k: i32) {
    if k >= 0 {
        *x <<= k as u32;
    } else {
        *x >>= (-k) as u32;
    }
}

/// `a * b` rounded upward (nonnegative magnitudes).
pub fn mul_up(a: &Float, b: &Float) -> Float {
    let mut r = a.clone();
    let p = a.prec().max(b.prec());
    r.set_prec(p);
    r.mul_assign_round(b, Round::Up);
    r
}

/// `a + b` rounded upward.
pub fn add_up(a: &Float, b: &Float) -> Float {
    let p = a.prec().max(b.prec());
    rnd!(p, a + b, Round::Up)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_encloses_e() {
        let one = DyInterval::one(200);
        let e = one.exp();
        let lo = Rational::from_f64(2.718281828459045).unwrap();
        assert!(e.width() < 1e-55);
        assert!((e.mid_f64() - lo.to_f64()).abs() < 1e-15);
    }

    #[test]
    fn third_contains_exact() {
        let q = Rational::from((1, 3));
        let t = DyInterval::from_rational(&q, 64);
        assert!(t.contains_rational(&q));
        let s = &t + &t;
        assert!(s.contains_rational(&Rational::from((2, 3))));
        let p = &t * &DyInterval::from_i64(-3, 64);
        assert!(p.contains_rational(&Rational::from(-1)));
    }

    #[test]
    fn trig_bounds() {
        let pi = DyInterval::pi(128);
        let half = &pi * &DyInterval::from_rational(&Rational::from((1, 2)), 128);
        let c = half.cos();
        assert!(c.contains_zero());
        assert!(c.width() < 1e-30);
        let s = half.sin();
        assert!(s.contains_rational(&Rational::from(1)));
    }
}
