//! Dense matrices over exact fields and over intervals.

use super::alg::AlgReal;
use super::interval::DyInterval;
use super::poly::Poly;
use rug::float::Round;
use rug::{Float, Rational};
use std::fmt::Debug;

/// Exact field operations needed by the linear algebra routines.
pub trait Field: Clone + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn enclose(&self, prec: u32) -> DyInterval;
    fn equals(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Rational::new()
    }
    fn one() -> Self {
        Rational::from(1)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&self, o: &Self) -> Self {
        Rational::from(self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Rational::from(self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Rational::from(self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Rational::from(self / o)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn enclose(&self, prec: u32) -> DyInterval {
        DyInterval::from_rational(self, prec)
    }
}

impl Field for AlgReal {
    fn zero() -> Self {
        AlgReal::zero()
    }
    fn one() -> Self {
        AlgReal::one()
    }
    fn is_zero(&self) -> bool {
        AlgReal::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        AlgReal::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        AlgReal::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        AlgReal::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        AlgReal::div(self, o)
    }
    fn neg(&self) -> Self {
        AlgReal::neg(self)
    }
    fn from_rational(q: &Rational) -> Self {
        AlgReal::from(q.clone())
    }
    fn enclose(&self, prec: u32) -> DyInterval {
        self.enclosure(prec)
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

pub type QMat = Mat<Rational>;
pub type AMat = Mat<AlgReal>;

impl<T: Field> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn column(v: &[T]) -> Self {
        Mat { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = m.get(i, j).add(&a.mul(o.get(k, j)));
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = T::zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        s = s.add(&a.mul(&v[j]));
                    }
                }
                s
            })
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, s: &T) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.mul(s)).collect() }
    }

    pub fn neg(&self) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.neg()).collect() }
    }

    pub fn trace(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.rows.min(self.cols) {
            s = s.add(self.get(i, i));
        }
        s
    }

    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows);
        let mut m = Self::zeros(self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..o.cols {
                m.set(i, self.cols + j, o.get(i, j).clone());
            }
        }
        m
    }

    pub fn from_cols(cols: &[Vec<T>]) -> Self {
        let n = cols.first().map_or(0, |c| c.len());
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = T::one().div(m.get(r, c));
            for j in 0..m.cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j).sub(&f.mul(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let (r, piv) = self.rref();
        let mut out = Vec::new();
        for free in 0..self.cols {
            if piv.contains(&free) {
                continue;
            }
            let mut v = vec![T::zero(); self.cols];
            v[free] = T::one();
            for (row, &pc) in piv.iter().enumerate() {
                v[pc] = r.get(row, free).neg();
            }
            out.push(v);
        }
        out
    }

    /// Some solution of `self x = b`, if one exists.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        let aug = self.hstack(&Mat::column(b));
        let (r, piv) = aug.rref();
        if piv.contains(&self.cols) {
            return None;
        }
        let mut x = vec![T::zero(); self.cols];
        for (row, &pc) in piv.iter().enumerate() {
            x[pc] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let aug = self.hstack(&Self::identity(n));
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// Characteristic polynomial coefficients (low degree first, monic) and
    /// the adjugate coefficient matrices `M_1..M_n` with
    /// `adj(sI - A) = sum_k M_k s^(n-k)`.
    pub fn faddeev(&self) -> (Vec<T>, Vec<Self>) {
        assert!(self.is_square());
        let n = self.rows;
        let mut c = vec![T::zero(); n + 1];
        c[n] = T::one();
        let mut ms = Vec::with_capacity(n);
        let mut m = Self::zeros(n, n);
        for k in 1..=n {
            let mut next = self.mul(&m);
            for i in 0..n {
                let v = next.get(i, i).add(&c[n - k + 1]);
                next.set(i, i, v);
            }
            let am = self.mul(&next);
            let kq = T::from_rational(&Rational::from(k as i64));
            c[n - k] = am.trace().neg().div(&kq);
            ms.push(next.clone());
            m = next;
        }
        (c, ms)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut r = Self::identity(self.rows);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn enclose(&self, prec: u32) -> IMat {
        IMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.enclose(prec)).collect() }
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Evaluate a rational polynomial at this matrix.
    pub fn poly_eval(&self, p: &Poly) -> Self {
        let n = self.rows;
        let mut acc = Self::zeros(n, n);
        for a in p.coeffs().iter().rev() {
            acc = acc.mul(self);
            let a = T::from_rational(a);
            for i in 0..n {
                let v = acc.get(i, i).add(&a);
                acc.set(i, i, v);
            }
        }
        acc
    }
}

impl QMat {
    pub fn charpoly(&self) -> Poly {
        Poly::new(self.faddeev().0)
    }

    pub fn to_alg(&self) -> AMat {
        self.map(|q| AlgReal::from(q.clone()))
    }
}

impl AMat {
    /// Rational copy when every entry is rational.
    pub fn to_rational(&self) -> Option<QMat> {
        let mut d = Vec::with_capacity(self.data.len());
        for a in &self.data {
            d.push(a.as_rational()?.clone());
        }
        Some(Mat { rows: self.rows, cols: self.cols, data: d })
    }
}

/// Exact dot product.
pub fn dot<T: Field>(a: &[T], b: &[T]) -> T {
    let mut s = T::zero();
    for (x, y) in a.iter().zip(b) {
        s = s.add(&x.mul(y));
    }
    s
}

/// Interval matrix.
#[derive(Clone, Debug)]
pub struct IMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<DyInterval>,
}

impl IMat {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        IMat { rows, cols, data: vec![DyInterval::zero(prec); rows * cols] }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = Self::zeros(n, n, prec);
        for i in 0..n {
            m.data[i * n + i] = DyInterval::one(prec);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &DyInterval {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: DyInterval) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, o: &IMat) -> IMat {
        assert_eq!(self.cols, o.rows);
        let prec = self.prec().max(o.prec());
        let mut m = IMat::zeros(self.rows, o.cols, prec);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut s = DyInterval::zero(prec);
                for k in 0..self.cols {
                    s = &s + &(self.get(i, k) * o.get(k, j));
                }
                m.set(i, j, s);
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[DyInterval]) -> Vec<DyInterval> {
        assert_eq!(self.cols, v.len());
        let prec = self.prec();
        (0..self.rows)
            .map(|i| {
                let mut s = DyInterval::zero(prec);
                for k in 0..self.cols {
                    s = &s + &(self.get(i, k) * &v[k]);
                }
                s
            })
            .collect()
    }

    pub fn add(&self, o: &IMat) -> IMat {
        IMat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, s: &DyInterval) -> IMat {
        IMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn prec(&self) -> u32 {
        self.data.iter().map(|a| a.prec()).max().unwrap_or(64)
    }

    /// Upper bound on the infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> Float {
        let prec = self.prec();
        let mut best = Float::with_val(prec, 0);
        for i in 0..self.rows {
            let mut s = Float::with_val(prec, 0);
            for j in 0..self.cols {
                s = Float::with_val_round(prec, &s + &self.get(i, j).mag(), Round::Up).0;
            }
            if s > best {
                best = s;
            }
        }
        best
    }

    pub fn transpose(&self) -> IMat {
        let prec = self.prec();
        let mut m = IMat::zeros(self.cols, self.rows, prec);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn max_width(&self) -> f64 {
        self.data.iter().map(|a| a.width_f64()).fold(0.0, f64::max)
    }
}

/// Interval dot product.
pub fn idot(a: &[DyInterval], b: &[DyInterval]) -> DyInterval {
    let prec = a.iter().chain(b).map(|x| x.prec()).max().unwrap_or(64);
    let mut s = DyInterval::zero(prec);
    for (x, y) in a.iter().zip(b) {
        s = &s + &(x * y);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn charpoly_and_adjugate() {
        let a = QMat::from_rows(vec![vec![q(0, 1), q(1, 1)], vec![q(2, 1), q(0, 1)]]);
        assert_eq!(a.charpoly(), Poly::from_ints(&[-2, 0, 1]));
        let (_, ms) = a.faddeev();
        assert_eq!(ms[0], QMat::identity(2));
        assert_eq!(ms[1], a);
    }

    #[test]
    fn rank_kernel_inverse() {
        let a = QMat::from_rows(vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]]);
        assert_eq!(a.rank(), 1);
        let k = a.kernel();
        assert_eq!(k.len(), 1);
        assert!(a.mul_vec(&k[0]).iter().all(|x| *x == 0));
        let b = QMat::from_rows(vec![vec![q(-1, 2), q(0, 1)], vec![q(0, 1), q(-1, 3)]]);
        let bi = b.inverse().unwrap();
        assert_eq!(bi.mul(&b), QMat::identity(2));
    }
}
