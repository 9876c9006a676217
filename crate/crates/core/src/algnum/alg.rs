//! Real algebraic numbers as (irreducible polynomial, isolating interval).

use super::factor::factor;
use super::interval::DyInterval;
use super::poly::{interpolate, Poly};
use rug::{Integer, Rational};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex};

#[derive(Debug)]
struct Root {
    poly: Poly,
    iv: Mutex<(Rational, Rational)>,
}

#[derive(Clone, Debug)]
enum Repr {
    Rat(Rational),
    Root(Arc<Root>),
}

/// A real algebraic number. Rational values are kept in a fast path; others
/// carry a primitive irreducible integer polynomial of degree at least 2 and
/// an open rational interval containing exactly one of its roots. Interval
/// refinement is shared between clones.
#[derive(Clone, Debug)]
pub struct AlgReal(Repr);

impl Root {
    fn interval(&self) -> (Rational, Rational) {
        self.iv.lock().unwrap().clone()
    }

    fn refine(&self) {
        let mut g = self.iv.lock().unwrap();
        let (lo, hi) = g.clone();
        let m = Rational::from(&lo + &hi) / 2;
        let sl = self.poly.sign_at(&lo);
        let sm = self.poly.sign_at(&m);
        debug_assert!(sm != 0);
        if sl == sm {
            *g = (m, hi);
        } else {
            *g = (lo, m);
        }
    }

    /// Shrink the interval until neither endpoint is zero.
    fn exclude_zero(&self) {
        let mut g = self.iv.lock().unwrap();
        let (mut lo, mut hi) = g.clone();
        while lo == 0 || hi == 0 {
            let far = if lo == 0 { hi.clone() } else { lo.clone() };
            let half = Rational::from(&far / 2u32);
            if self.poly.sign_at(&half) != self.poly.sign_at(&far) {
                if lo == 0 { lo = half } else { hi = half }
            } else if lo == 0 {
                hi = half;
            } else {
                lo = half;
            }
        }
        *g = (lo, hi);
    }

    fn width(&self) -> Rational {
        let (lo, hi) = self.interval();
        hi - lo
    }
}

impl From<Rational> for AlgReal {
    fn from(q: Rational) -> Self {
        AlgReal(Repr::Rat(q))
    }
}

impl From<i64> for AlgReal {
    fn from(a: i64) -> Self {
        AlgReal(Repr::Rat(Rational::from(a)))
    }
}

impl AlgReal {
    pub fn zero() -> Self {
        AlgReal::from(0)
    }

    pub fn one() -> Self {
        AlgReal::from(1)
    }

    pub fn frac(n: i64, d: i64) -> Self {
        AlgReal::from(Rational::from((n, d)))
    }

    /// The unique root of `p` in the closed interval `[lo, hi]`. The square-free
    /// part of `p` must have exactly one root there.
    pub fn from_root(p: &Poly, lo: &Rational, hi: &Rational) -> Self {
        assert!(lo <= hi);
        for (f, _) in factor(p) {
            if f.deg() == 1 {
                let r = (-f.coeff(0)) / f.coeff(1);
                if &r >= lo && &r <= hi {
                    return AlgReal(Repr::Rat(r));
                }
                continue;
            }
            let n = f.count_roots(lo, hi) + usize::from(f.sign_at(lo) == 0);
            if n == 1 {
                return AlgReal(Repr::Root(Arc::new(Root {
                    poly: f,
                    iv: Mutex::new((lo.clone(), hi.clone())),
                })));
            }
        }
        panic!("no root of {} in [{}, {}]", p, lo, hi);
    }

    /// Positive square root of a nonnegative rational.
    pub fn sqrt_rational(q: &Rational) -> Self {
        assert!(*q >= 0);
        let hi = Rational::from(q + 1);
        let p = Poly::new(vec![Rational::from(-q), Rational::new(), Rational::from(1)]);
        AlgReal::from_root(&p, &Rational::new(), &hi)
    }

    /// All real roots of `p`, increasing.
    pub fn roots_of(p: &Poly) -> Vec<AlgReal> {
        use super::poly::RootLoc;
        let mut out = Vec::new();
        for (f, _) in factor(p) {
            for r in f.real_roots() {
                out.push(match r {
                    RootLoc::Exact(q) => AlgReal::from(q),
                    RootLoc::Between(a, b) => AlgReal::from_root(&f, &a, &b),
                });
            }
        }
        out.sort_by(|a, b| a.cmp(b));
        out
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.0, Repr::Rat(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match &self.0 {
            Repr::Rat(q) => Some(q),
            _ => None,
        }
    }

    /// Minimal polynomial as a primitive integer polynomial.
    pub fn minpoly(&self) -> Poly {
        match &self.0 {
            Repr::Rat(q) => Poly::linear_root(q).primitive(),
            Repr::Root(r) => r.poly.clone(),
        }
    }

    pub fn degree(&self) -> usize {
        self.minpoly().deg() as usize
    }

    /// Current isolating interval (closed; degenerate for rationals).
    pub fn interval(&self) -> (Rational, Rational) {
        match &self.0 {
            Repr::Rat(q) => (q.clone(), q.clone()),
            Repr::Root(r) => r.interval(),
        }
    }

    /// Refine until the isolating interval is no wider than `w`.
    pub fn refine_to(&self, w: &Rational) {
        if let Repr::Root(r) = &self.0 {
            while r.width() > *w {
                r.refine();
            }
        }
    }

    /// Outward enclosure at `prec` bits with width about `2^-prec`.
    pub fn enclosure(&self, prec: u32) -> DyInterval {
        match &self.0 {
            Repr::Rat(q) => DyInterval::from_rational(q, prec),
            Repr::Root(r) => {
                let w = Rational::from((1, Integer::from(1) << (prec.saturating_sub(4))));
                self.refine_to(&w);
                let (lo, hi) = r.interval();
                DyInterval::from_bounds(&lo, &hi, prec)
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.enclosure(64).mid_f64()
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Rat(q) => q.cmp0() as i32,
            Repr::Root(r) => loop {
                let (lo, hi) = r.interval();
                if lo >= 0 {
                    return 1;
                }
                if hi <= 0 {
                    return -1;
                }
                r.refine();
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Rat(q) if *q == 0)
    }

    pub fn neg(&self) -> AlgReal {
        match &self.0 {
            Repr::Rat(q) => AlgReal::from(Rational::from(-q)),
            Repr::Root(r) => {
                let (lo, hi) = r.interval();
                AlgReal(Repr::Root(Arc::new(Root {
                    poly: r.poly.reflect().primitive(),
                    iv: Mutex::new((-hi, -lo)),
                })))
            }
        }
    }

    fn add_rational(&self, q: &Rational) -> AlgReal {
        match &self.0 {
            Repr::Rat(a) => AlgReal::from(Rational::from(a + q)),
            Repr::Root(r) => {
                let (lo, hi) = r.interval();
                AlgReal(Repr::Root(Arc::new(Root {
                    poly: r.poly.shift(&Rational::from(-q)).primitive(),
                    iv: Mutex::new((lo + q, hi + q)),
                })))
            }
        }
    }

    fn mul_rational(&self, q: &Rational) -> AlgReal {
        if *q == 0 {
            return AlgReal::zero();
        }
        match &self.0 {
            Repr::Rat(a) => AlgReal::from(Rational::from(a * q)),
            Repr::Root(r) => {
                let (lo, hi) = r.interval();
                let inv = Rational::from(q.recip_ref());
                let (a, b) = (lo * q, hi * q);
                let iv = if a <= b { (a, b) } else { (b, a) };
                AlgReal(Repr::Root(Arc::new(Root {
                    poly: r.poly.scale_var(&inv).primitive(),
                    iv: Mutex::new(iv),
                })))
            }
        }
    }

    pub fn add(&self, o: &AlgReal) -> AlgReal {
        match (&self.0, &o.0) {
            (_, Repr::Rat(q)) => self.add_rational(q),
            (Repr::Rat(q), _) => o.add_rational(q),
            (Repr::Root(a), Repr::Root(b)) => {
                let p = &a.poly;
                let q = &b.poly;
                let dq = q.deg() as usize;
                // R(z) = res_y(p(y), q(z - y))
                let res = bivariate_resultant(p, p.deg() as usize * dq, |z| {
                    q.compose(&Poly::new(vec![z.clone(), Rational::from(-1)]))
                });
                locate(&res, || {
                    let (al, ah) = a.interval();
                    let (bl, bh) = b.interval();
                    (al + bl, ah + bh)
                }, || {
                    a.refine();
                    b.refine();
                })
            }
        }
    }

    pub fn sub(&self, o: &AlgReal) -> AlgReal {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &AlgReal) -> AlgReal {
        match (&self.0, &o.0) {
            (_, Repr::Rat(q)) => self.mul_rational(q),
            (Repr::Rat(q), _) => o.mul_rational(q),
            (Repr::Root(a), Repr::Root(b)) => {
                let p = &a.poly;
                let q = &b.poly;
                let dq = q.deg() as usize;
                // R(z) = res_y(p(y), y^dq q(z / y))
                let res = bivariate_resultant(p, p.deg() as usize * dq, |z| {
                    let mut c = vec![Rational::new(); dq + 1];
                    let mut zp = Rational::from(1);
                    for k in 0..=dq {
                        c[dq - k] = Rational::from(&q.coeff(k) * &zp);
                        zp *= z;
                    }
                    Poly::new(c)
                });
                locate(&res, || {
                    let (al, ah) = a.interval();
                    let (bl, bh) = b.interval();
                    let c = [
                        Rational::from(&al * &bl),
                        Rational::from(&al * &bh),
                        Rational::from(&ah * &bl),
                        Rational::from(&ah * &bh),
                    ];
                    let lo = c.iter().min().unwrap().clone();
                    let hi = c.iter().max().unwrap().clone();
                    (lo, hi)
                }, || {
                    a.refine();
                    b.refine();
                })
            }
        }
    }

    pub fn recip(&self) -> AlgReal {
        match &self.0 {
            Repr::Rat(q) => {
                assert!(*q != 0, "reciprocal of zero");
                AlgReal::from(Rational::from(q.recip_ref()))
            }
            Repr::Root(r) => {
                self.signum();
                r.exclude_zero();
                let (lo, hi) = r.interval();
                let iv = (Rational::from(hi.recip_ref()), Rational::from(lo.recip_ref()));
                AlgReal(Repr::Root(Arc::new(Root {
                    poly: r.poly.reverse().primitive(),
                    iv: Mutex::new(iv),
                })))
            }
        }
    }

    pub fn div(&self, o: &AlgReal) -> AlgReal {
        self.mul(&o.recip())
    }

    pub fn powi(&self, k: i32) -> AlgReal {
        let base = if k < 0 { self.recip() } else { self.clone() };
        let mut r = AlgReal::one();
        let mut b = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    /// Positive square root of a nonnegative algebraic number.
    pub fn sqrt(&self) -> AlgReal {
        assert!(self.signum() >= 0);
        if self.is_zero() {
            return AlgReal::zero();
        }
        let p = self.minpoly().compose(&Poly::from_ints(&[0, 0, 1]));
        let (_, hi) = self.interval();
        let top = Rational::from(&hi + 1);
        // isolate the positive root near sqrt(self)
        let r = self.clone();
        let mut w = Rational::from((1, 4));
        loop {
            r.refine_to(&w);
            let (lo, hi) = r.interval();
            let lo = if lo < 0 { Rational::new() } else { lo };
            let a = rat_sqrt_floor(&lo, &w);
            let b = rat_sqrt_ceil(&hi, &w);
            let b = if b > top { top.clone() } else { b };
            let sf = p.squarefree_part();
            let cnt = sf.count_roots(&a, &b) + usize::from(sf.sign_at(&a) == 0);
            if cnt == 1 && a > 0 {
                return AlgReal::from_root(&p, &a, &b);
            }
            w /= 4;
        }
    }

    pub fn cmp(&self, o: &AlgReal) -> Ordering {
        match (&self.0, &o.0) {
            (Repr::Rat(a), Repr::Rat(b)) => a.cmp(b),
            (Repr::Root(_), Repr::Rat(q)) => cmp_root_rat(self, q),
            (Repr::Rat(q), Repr::Root(_)) => cmp_root_rat(o, q).reverse(),
            (Repr::Root(a), Repr::Root(b)) => {
                if Arc::ptr_eq(a, b) {
                    return Ordering::Equal;
                }
                if a.poly == b.poly {
                    let (al, ah) = a.interval();
                    let (bl, bh) = b.interval();
                    let lo = if al > bl { al } else { bl };
                    let hi = if ah < bh { ah } else { bh };
                    if lo <= hi && a.poly.count_roots(&lo, &hi) == 1 {
                        return Ordering::Equal;
                    }
                }
                loop {
                    let (al, ah) = a.interval();
                    let (bl, bh) = b.interval();
                    if ah < bl {
                        return Ordering::Less;
                    }
                    if bh < al {
                        return Ordering::Greater;
                    }
                    a.refine();
                    b.refine();
                }
            }
        }
    }

    pub fn abs(&self) -> AlgReal {
        if self.signum() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }
}

fn cmp_root_rat(x: &AlgReal, q: &Rational) -> Ordering {
    if let Repr::Root(r) = &x.0 {
        loop {
            let (lo, hi) = r.interval();
            if lo >= *q {
                return Ordering::Greater;
            }
            if hi <= *q {
                return Ordering::Less;
            }
            r.refine();
        }
    }
    unreachable!()
}

fn rat_sqrt_floor(x: &Rational, w: &Rational) -> Rational {
    // a rational a with a^2 <= x, a >= sqrt(x) - w (coarse bisection)
    let mut lo = Rational::new();
    let mut hi = Rational::from(x + 1);
    while Rational::from(&hi - &lo) > Rational::from(w / 8u32) {
        let m = Rational::from(&lo + &hi) / 2;
        if Rational::from(&m * &m) <= *x {
            lo = m;
        } else {
            hi = m;
        }
    }
    lo
}

fn rat_sqrt_ceil(x: &Rational, w: &Rational) -> Rational {
    let mut lo = Rational::new();
    let mut hi = Rational::from(x + 1);
    while Rational::from(&hi - &lo) > Rational::from(w / 8u32) {
        let m = Rational::from(&lo + &hi) / 2;
        if Rational::from(&m * &m) >= *x {
            hi = m;
        } else {
            lo = m;
        }
    }
    hi
}

/// `res_y(p(y), g_z(y))` as a polynomial in `z`, by evaluation and
/// interpolation; `deg` bounds its degree.
pub(crate) fn bivariate_resultant<F: Fn(&Rational) -> Poly>(p: &Poly, deg: usize, g: F) -> Poly {
    let xs: Vec<Rational> = (0..=deg as i64).map(Rational::from).collect();
    let ys: Vec<Rational> = xs.iter().map(|z| p.resultant(&g(z))).collect();
    interpolate(&xs, &ys)
}

/// Select the root of `res` that is the value of an operation whose
/// enclosure is produced by `iv`; `refine` tightens the operands.
fn locate<I, R>(res: &Poly, iv: I, refine: R) -> AlgReal
where
    I: Fn() -> (Rational, Rational),
    R: Fn(),
{
    let sf = res.squarefree_part();
    loop {
        let (lo, hi) = iv();
        let cnt = sf.count_roots(&lo, &hi) + usize::from(sf.sign_at(&lo) == 0);
        if cnt == 1 {
            return AlgReal::from_root(&sf, &lo, &hi);
        }
        refine();
    }
}

impl PartialEq for AlgReal {
    fn eq(&self, o: &AlgReal) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for AlgReal {}

impl PartialOrd for AlgReal {
    fn partial_cmp(&self, o: &AlgReal) -> Option<Ordering> {
        Some(AlgReal::cmp(self, o))
    }
}

impl Ord for AlgReal {
    fn cmp(&self, o: &AlgReal) -> Ordering {
        AlgReal::cmp(self, o)
    }
}

impl fmt::Display for AlgReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rat(q) => write!(f, "{}", q),
            Repr::Root(r) => {
                let (lo, hi) = r.interval();
                write!(f, "root({}; {}, {}) ~ {:.12}", r.poly, lo, hi, self.to_f64())
            }
        }
    }
}

/// Compare two algebraic numbers: `<`, `=` or `>`.
pub fn alg_compare(x: &AlgReal, y: &AlgReal) -> Ordering {
    x.cmp(y)
}

/// Parse a rational in `p/q` or integer form. Decimal points and exponents are rejected.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty number".into());
    }
    if t.contains(['.', 'e', 'E']) {
        return Err(format!("floating-point literal '{}' not allowed; use p/q", t));
    }
    let (n, d) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n: Integer = n.parse().map_err(|_| format!("bad numerator in '{}'", t))?;
    let d: Integer = d.parse().map_err(|_| format!("bad denominator in '{}'", t))?;
    if d == 0 {
        return Err(format!("zero denominator in '{}'", t));
    }
    Ok(Rational::from((n, d)))
}

pub fn format_rational(q: &Rational) -> String {
    if *q.denom() == 1 {
        format!("{}", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AlgDoc {
    Rat(String),
    Int(i64),
    Root { minpoly: Vec<String>, interval: [String; 2] },
}

impl Serialize for AlgReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.0 {
            Repr::Rat(q) => AlgDoc::Rat(format_rational(q)).serialize(s),
            Repr::Root(r) => {
                let (lo, hi) = r.interval();
                AlgDoc::Root {
                    minpoly: r.poly.coeffs().iter().map(format_rational).collect(),
                    interval: [format_rational(&lo), format_rational(&hi)],
                }
                .serialize(s)
            }
        }
    }
}

impl<'de> Deserialize<'de> for AlgReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = AlgDoc::deserialize(d).map_err(|_| {
            D::Error::custom("expected a rational string \"p/q\" or {minpoly, interval}")
        })?;
        match doc {
            AlgDoc::Rat(s) => parse_rational(&s).map(AlgReal::from).map_err(D::Error::custom),
            AlgDoc::Int(_) => Err(D::Error::custom("numbers must be strings \"p/q\"")),
            AlgDoc::Root { minpoly, interval } => {
                let c: Result<Vec<Rational>, String> = minpoly.iter().map(|s| parse_rational(s)).collect();
                let p = Poly::new(c.map_err(D::Error::custom)?);
                if p.deg() < 1 {
                    return Err(D::Error::custom("minpoly must have positive degree"));
                }
                let lo = parse_rational(&interval[0]).map_err(D::Error::custom)?;
                let hi = parse_rational(&interval[1]).map_err(D::Error::custom)?;
                if lo > hi {
                    return Err(D::Error::custom("empty isolating interval"));
                }
                let sf = p.squarefree_part();
                let n = sf.count_roots(&lo, &hi) + usize::from(sf.sign_at(&lo) == 0);
                if n != 1 {
                    return Err(D::Error::custom(format!(
                        "interval [{}, {}] contains {} roots of the polynomial",
                        lo, hi, n
                    )));
                }
                Ok(AlgReal::from_root(&p, &lo, &hi))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> AlgReal {
        AlgReal::sqrt_rational(&Rational::from(2))
    }

    #[test]
    fn compare_examples() {
        assert_eq!(alg_compare(&sqrt2(), &AlgReal::frac(3, 2)), Ordering::Less);
        let other = AlgReal::from_root(&Poly::from_ints(&[-2, 0, 1]), &Rational::from(1), &Rational::from(3));
        assert_eq!(alg_compare(&sqrt2(), &other), Ordering::Equal);
        let cbrt2 = AlgReal::from_root(&Poly::from_ints(&[-2, 0, 0, 1]), &Rational::from(1), &Rational::from(2));
        assert_eq!(alg_compare(&cbrt2, &AlgReal::frac(5, 4)), Ordering::Greater);
    }

    #[test]
    fn field_operations() {
        let s = sqrt2();
        assert_eq!(s.mul(&s), AlgReal::from(2));
        assert_eq!(s.sub(&s), AlgReal::zero());
        let s3 = AlgReal::sqrt_rational(&Rational::from(3));
        let t = s.add(&s3);
        assert_eq!(t.minpoly(), Poly::from_ints(&[1, 0, -10, 0, 1]));
        assert!((t.to_f64() - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-12);
        assert_eq!(s.recip().mul(&s), AlgReal::one());
        assert_eq!(s.powi(4), AlgReal::from(4));
        assert_eq!(AlgReal::from(2).sqrt(), s);
    }

    #[test]
    fn serde_roundtrip() {
        let s = sqrt2();
        let j = serde_json::to_string(&s).unwrap();
        let back: AlgReal = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        let q: AlgReal = serde_json::from_str("\"-3/6\"").unwrap();
        assert_eq!(q, AlgReal::frac(-1, 2));
        assert!(serde_json::from_str::<AlgReal>("\"0.5\"").is_err());
    }
}
