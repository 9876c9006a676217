//! Exact spectral and Jordan structure of matrices.

use super::alg::{bivariate_resultant, AlgReal};
use super::factor::{certified_roots, factor};
use super::interval::{CInterval, DyInterval};
use super::matrix::{AMat, Mat, QMat};
use super::poly::{Poly, RootLoc};
use crate::ReachError;
use rug::Rational;
use serde::Serialize;

/// One eigenvalue with its multiplicity data. Conjugate pairs are listed as
/// two entries with opposite imaginary parts.
#[derive(Clone, Debug, Serialize)]
pub struct Eigenvalue {
    pub re: AlgReal,
    pub im: AlgReal,
    pub alg_mult: usize,
    pub max_block: usize,
    /// Index into `SpectralStructure::factors` (rational matrices only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor: Option<usize>,
}

impl Eigenvalue {
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn enclosure(&self, prec: u32) -> CInterval {
        CInterval::new(self.re.enclosure(prec), self.im.enclosure(prec))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StabilityClass {
    Stable,
    WeaklyAntistable,
    Mixed,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralStructure {
    pub n: usize,
    /// Characteristic polynomial when the matrix is rational.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub charpoly: Option<Poly>,
    /// Irreducible factorization of the characteristic polynomial over the rationals.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<(Poly, u32)>,
    pub eigenvalues: Vec<Eigenvalue>,
    pub class: StabilityClass,
    pub real_spectrum: bool,
}

impl Serialize for Poly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl SpectralStructure {
    pub fn is_stable(&self) -> bool {
        self.class == StabilityClass::Stable
    }

    pub fn is_weakly_antistable(&self) -> bool {
        self.class == StabilityClass::WeaklyAntistable
    }

    /// Distinct eigenvalues (conjugates listed separately).
    pub fn distinct(&self) -> &[Eigenvalue] {
        &self.eigenvalues
    }

    /// Exact spectral abscissa (largest real part).
    pub fn abscissa(&self) -> AlgReal {
        self.eigenvalues.iter().map(|e| e.re.clone()).max().unwrap_or_else(AlgReal::zero)
    }

    pub fn is_diagonalizable(&self) -> bool {
        self.eigenvalues.iter().all(|e| e.max_block == 1)
    }
}

fn classify(eigs: &[Eigenvalue]) -> StabilityClass {
    let stable = eigs.iter().all(|e| e.re.signum() < 0);
    let anti = eigs.iter().all(|e| e.re.signum() >= 0);
    if stable {
        StabilityClass::Stable
    } else if anti {
        StabilityClass::WeaklyAntistable
    } else {
        StabilityClass::Mixed
    }
}

/// Largest Jordan block for the roots of `g`, from ranks of `g(A)^k`.
fn max_block_rational(a: &QMat, g: &Poly, mult: usize) -> usize {
    let n = a.rows;
    let target = n - mult * g.deg() as usize;
    let ga = a.poly_eval(g);
    let mut p = ga.clone();
    let mut k = 1;
    while p.rank() > target {
        p = p.mul(&ga);
        k += 1;
    }
    k
}

fn max_block_alg(a: &AMat, lambda: &AlgReal, mult: usize) -> usize {
    let n = a.rows;
    let target = n - mult;
    let mut shifted = a.clone();
    for i in 0..n {
        let v = shifted.get(i, i).sub(lambda);
        shifted.set(i, i, v);
    }
    let mut p = shifted.clone();
    let mut k = 1;
    while p.rank() > target {
        p = p.mul(&shifted);
        k += 1;
    }
    k
}

/// Rational hull of an interval.
fn rat_bounds(iv: &DyInterval) -> (Rational, Rational) {
    (iv.lo_rational(), iv.hi_rational())
}

fn isolate_in(poly: &Poly, lo: &Rational, hi: &Rational) -> Option<AlgReal> {
    let sf = poly.squarefree_part();
    let cnt = sf.count_roots(lo, hi) + usize::from(sf.sign_at(lo) == 0);
    if cnt == 1 {
        Some(AlgReal::from_root(&sf, lo, hi))
    } else {
        None
    }
}

/// Real and imaginary parts (imaginary part positive) of the non-real roots
/// of an irreducible polynomial `g`, one entry per conjugate pair.
pub fn complex_root_parts(g: &Poly) -> Vec<(AlgReal, AlgReal)> {
    let d = g.deg() as usize;
    // real parts are roots of res_y(g(y), g(2x - y))
    let hre = bivariate_resultant(g, d * d, |x| {
        g.compose(&Poly::new(vec![Rational::from(x * 2u32), Rational::from(-1)]))
    });
    // differences (z_i - z_j)/2 are roots of res_y(g(y), g(y + 2x))
    let hdiff = bivariate_resultant(g, d * d, |x| g.compose(&Poly::new(vec![Rational::from(x * 2u32), Rational::from(1)])));
    // w with hdiff(i w) = 0: common real roots of the real and imaginary parts
    let mut kr = vec![Rational::new(); hdiff.coeffs().len()];
    let mut ki = vec![Rational::new(); hdiff.coeffs().len()];
    for (j, c) in hdiff.coeffs().iter().enumerate() {
        let s = if (j / 2) % 2 == 0 { 1 } else { -1 };
        if j % 2 == 0 {
            kr[j] = Rational::from(c * s);
        } else {
            ki[j] = Rational::from(c * s);
        }
    }
    let him = Poly::new(kr).gcd(&Poly::new(ki));
    let mut prec = 64;
    loop {
        let roots = certified_roots(g, prec);
        let mut out = Vec::new();
        let mut ok = true;
        for z in roots.iter().filter(|z| z.im.is_pos()) {
            let (rl, rh) = rat_bounds(&z.re);
            let (il, ih) = rat_bounds(&z.im);
            match (isolate_in(&hre, &rl, &rh), isolate_in(&him, &il, &ih)) {
                (Some(r), Some(i)) => out.push((r, i)),
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return out;
        }
        prec *= 2;
        assert!(prec <= 1 << 14, "could not isolate complex root parts");
    }
}

/// Exact spectral data of a rational matrix.
pub fn eigen_structure_rational(a: &QMat) -> SpectralStructure {
    assert!(a.is_square());
    let n = a.rows;
    let chi = a.charpoly();
    let factors = if n == 0 { Vec::new() } else { factor(&chi) };
    let mut eigs = Vec::new();
    for (fi, (g, m)) in factors.iter().enumerate() {
        let mult = *m as usize;
        let blk = max_block_rational(a, g, mult);
        for r in g.real_roots() {
            let re = match r {
                RootLoc::Exact(q) => AlgReal::from(q),
                RootLoc::Between(lo, hi) => AlgReal::from_root(g, &lo, &hi),
            };
            eigs.push(Eigenvalue { re, im: AlgReal::zero(), alg_mult: mult, max_block: blk, factor: Some(fi) });
        }
        if (g.real_roots().len() as isize) < g.deg() {
            for (re, im) in complex_root_parts(g) {
                eigs.push(Eigenvalue { re: re.clone(), im: im.clone(), alg_mult: mult, max_block: blk, factor: Some(fi) });
                eigs.push(Eigenvalue { re, im: im.neg(), alg_mult: mult, max_block: blk, factor: Some(fi) });
            }
        }
    }
    let class = classify(&eigs);
    let real_spectrum = eigs.iter().all(|e| e.is_real());
    SpectralStructure { n, charpoly: Some(chi), factors, eigenvalues: eigs, class, real_spectrum }
}

fn is_triangular(a: &AMat) -> bool {
    let n = a.rows;
    let upper = (0..n).all(|i| (0..i).all(|j| a.get(i, j).is_zero()));
    let lower = (0..n).all(|i| ((i + 1)..n).all(|j| a.get(i, j).is_zero()));
    upper || lower
}

/// Exact spectral data. Rational matrices are fully supported; matrices with
/// irrational algebraic entries must be triangular.
pub fn eigen_structure(a: &AMat) -> Result<SpectralStructure, ReachError> {
    if !a.is_square() {
        return Err(ReachError::DimensionMismatch("eigen_structure needs a square matrix".into()));
    }
    if let Some(q) = a.to_rational() {
        return Ok(eigen_structure_rational(&q));
    }
    if !is_triangular(a) {
        return Err(ReachError::Unsupported(
            "spectral analysis of non-triangular matrices with irrational entries".into(),
        ));
    }
    let n = a.rows;
    let mut distinct: Vec<(AlgReal, usize)> = Vec::new();
    for i in 0..n {
        let d = a.get(i, i).clone();
        if let Some(e) = distinct.iter_mut().find(|(v, _)| *v == d) {
            e.1 += 1;
        } else {
            distinct.push((d, 1));
        }
    }
    let mut eigs = Vec::new();
    for (v, m) in distinct {
        let blk = max_block_alg(a, &v, m);
        eigs.push(Eigenvalue { re: v, im: AlgReal::zero(), alg_mult: m, max_block: blk, factor: None });
    }
    let class = classify(&eigs);
    Ok(SpectralStructure { n, charpoly: None, factors: Vec::new(), eigenvalues: eigs, class, real_spectrum: true })
}

/// Characteristic polynomial coefficients (low degree first) over the entries' field.
pub fn charpoly_coeffs(a: &AMat) -> Vec<AlgReal> {
    if let Some(q) = a.to_rational() {
        return q.charpoly().coeffs().iter().map(|c| AlgReal::from(c.clone())).collect::<Vec<_>>().pad(a.rows + 1);
    }
    a.faddeev().0
}

trait Pad {
    fn pad(self, n: usize) -> Self;
}

impl Pad for Vec<AlgReal> {
    fn pad(mut self, n: usize) -> Self {
        while self.len() < n {
            self.push(AlgReal::zero());
        }
        self
    }
}

/// Convenience constructor from integer pairs `(num, den)`.
pub fn qmat(rows: &[&[(i64, i64)]]) -> QMat {
    Mat::from_rows(rows.iter().map(|r| r.iter().map(|&(n, d)| Rational::from((n, d))).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_stable() {
        let a = qmat(&[&[(-1, 2), (0, 1)], &[(0, 1), (-1, 3)]]);
        let s = eigen_structure_rational(&a);
        assert_eq!(s.eigenvalues.len(), 2);
        assert!(s.is_stable());
        assert!(s.real_spectrum);
        assert!(s.is_diagonalizable());
    }

    #[test]
    fn nilpotent_block() {
        let a = qmat(&[&[(0, 1), (1, 1)], &[(0, 1), (0, 1)]]);
        let s = eigen_structure_rational(&a);
        assert_eq!(s.eigenvalues.len(), 1);
        assert_eq!(s.eigenvalues[0].alg_mult, 2);
        assert_eq!(s.eigenvalues[0].max_block, 2);
        assert_eq!(s.class, StabilityClass::WeaklyAntistable);
    }

    #[test]
    fn sqrt2_mixed() {
        let a = qmat(&[&[(0, 1), (1, 1)], &[(2, 1), (0, 1)]]);
        let s = eigen_structure_rational(&a);
        assert_eq!(s.class, StabilityClass::Mixed);
        assert_eq!(s.factors.len(), 1);
        assert_eq!(s.factors[0].0, Poly::from_ints(&[-2, 0, 1]));
    }

    #[test]
    fn complex_pair() {
        let a = qmat(&[&[(-1, 1), (2, 1)], &[(-2, 1), (-1, 1)]]);
        let s = eigen_structure_rational(&a);
        assert_eq!(s.eigenvalues.len(), 2);
        assert!(!s.real_spectrum);
        assert_eq!(s.eigenvalues[0].re, AlgReal::from(-1));
        assert_eq!(s.eigenvalues[0].im.abs(), AlgReal::from(2));
        assert!(s.is_stable());
    }
}
