//! Reduction of a multi-input problem to a Minkowski sum of controllable
//! single-input parts plus a free subspace.
//!
//! Each column of `B` is handled separately: restrict `A` to the Krylov
//! space of the column, then split the restriction into its stable and
//! weakly antistable invariant subspaces. The antistable piece of a
//! controllable pair reaches its whole subspace, so it only contributes
//! free directions.

use crate::algnum::{eigen_structure, AMat, AlgReal, Mat};
use crate::model::{Horizon, ReachProblem};
use crate::ReachError;
use serde::Serialize;

/// Krylov matrix `[b, Ab, ..., A^{n-1} b]` and its exact rank.
pub fn controllability_matrix(a: &AMat, b: &[AlgReal]) -> (AMat, usize) {
    controllability_matrix_multi(a, &Mat::column(b))
}

/// `[B, AB, ..., A^{n-1} B]` and its exact rank.
pub fn controllability_matrix_multi(a: &AMat, b: &AMat) -> (AMat, usize) {
    assert_eq!(a.rows, b.rows, "dimension mismatch");
    let n = a.rows;
    let mut blocks = b.clone();
    let mut cur = b.clone();
    for _ in 1..n {
        cur = a.mul(&cur);
        blocks = blocks.hstack(&cur);
    }
    let r = blocks.rank();
    (blocks, r)
}

#[derive(Clone, Debug)]
pub struct Restriction {
    pub a: AMat,
    pub b: Vec<AlgReal>,
    /// `n x k` matrix whose columns span the Krylov space of `(A, b)`.
    pub embed: AMat,
}

/// Solve `E X = M` for `X` when the columns of `M` lie in the range of `E`.
fn solve_cols(e: &AMat, m: &AMat) -> AMat {
    let cols: Vec<Vec<AlgReal>> = (0..m.cols)
        .map(|j| e.solve(&m.col(j)).expect("column outside invariant subspace"))
        .collect();
    Mat::from_cols(&cols)
}

/// Restriction of `A` to `V = span(b, Ab, ...)` in the Krylov basis.
pub fn controllable_restriction(a: &AMat, b: &[AlgReal]) -> Result<Restriction, ReachError> {
    if b.iter().all(|x| x.is_zero()) {
        return Err(ReachError::ZeroColumn);
    }
    let n = a.rows;
    let (_, k) = controllability_matrix(a, b);
    if k == n {
        return Ok(Restriction { a: a.clone(), b: b.to_vec(), embed: Mat::identity(n) });
    }
    let mut basis = vec![b.to_vec()];
    for _ in 1..k {
        let next = a.mul_vec(basis.last().unwrap());
        basis.push(next);
    }
    let e = Mat::from_cols(&basis);
    let av = solve_cols(&e, &a.mul(&e));
    let mut bv = vec![AlgReal::zero(); k];
    bv[0] = AlgReal::one();
    Ok(Restriction { a: av, b: bv, embed: e })
}

#[derive(Clone, Debug)]
pub struct StabilitySplit {
    /// Change of basis `T`; `T^{-1} A T = diag(A1, A2)`.
    pub t: AMat,
    pub n1: usize,
    pub n2: usize,
    pub a1: AMat,
    pub a2: AMat,
    /// Leading `n1` rows of `T^{-1} B`.
    pub b1: AMat,
    pub b2: AMat,
    /// `A` is weakly antistable and `(A, B)` controllable, so everything is reachable.
    pub whole_space: bool,
}

fn sub_block(m: &AMat, r0: usize, r1: usize, c0: usize, c1: usize) -> AMat {
    let rows = (r0..r1).map(|i| (c0..c1).map(|j| m.get(i, j).clone()).collect()).collect();
    Mat::from_rows(rows)
}

/// Kernel bases of the stable and weakly antistable spectral projector polynomials.
fn invariant_bases(a: &AMat) -> Result<(Vec<Vec<AlgReal>>, Vec<Vec<AlgReal>>), ReachError> {
    let n = a.rows;
    let spec = eigen_structure(a)?;
    let mut stab = Mat::identity(n);
    let mut anti = Mat::identity(n);
    let is_stable = |e: &crate::algnum::Eigenvalue| e.re.signum() < 0;
    // rational factors whose roots all sit on one side are applied over Q
    let mut used = vec![false; spec.eigenvalues.len()];
    if !spec.factors.is_empty() {
        for (fi, (g, mult)) in spec.factors.iter().enumerate() {
            let idx: Vec<usize> = (0..spec.eigenvalues.len()).filter(|&i| spec.eigenvalues[i].factor == Some(fi)).collect();
            if idx.is_empty() {
                continue;
            }
            let st: Vec<bool> = idx.iter().map(|&i| is_stable(&spec.eigenvalues[i])).collect();
            if st.iter().all(|&s| s == st[0]) {
                let gm = a.poly_eval(&g.pow(*mult));
                if st[0] {
                    stab = stab.mul(&gm);
                } else {
                    anti = anti.mul(&gm);
                }
                for i in idx {
                    used[i] = true;
                }
            }
        }
    }
    let id = Mat::<AlgReal>::identity(n);
    for (i, e) in spec.eigenvalues.iter().enumerate() {
        if used[i] || e.im.signum() < 0 {
            continue;
        }
        let lin = if e.is_real() {
            a.sub(&id.scale(&e.re))
        } else {
            // A^2 - 2 Re A + |λ|^2
            let m2 = e.re.mul(&e.re).add(&e.im.mul(&e.im));
            a.mul(a).sub(&a.scale(&e.re.add(&e.re))).add(&id.scale(&m2))
        };
        let f = lin.pow(e.alg_mult);
        if is_stable(e) {
            stab = stab.mul(&f);
        } else {
            anti = anti.mul(&f);
        }
    }
    Ok((stab.kernel(), anti.kernel()))
}

/// Split `A` into stable and weakly antistable invariant blocks.
pub fn stability_split(a: &AMat, b: &AMat) -> Result<StabilitySplit, ReachError> {
    let n = a.rows;
    let (ks, ku) = invariant_bases(a)?;
    let n1 = ks.len();
    let n2 = ku.len();
    debug_assert_eq!(n1 + n2, n);
    let mut cols = ks;
    cols.extend(ku);
    let t = Mat::from_cols(&cols);
    let ti = t.inverse().expect("invariant subspaces are complementary");
    let at = ti.mul(&a.mul(&t));
    let bt = ti.mul(b);
    let whole_space = n1 == 0 && controllability_matrix_multi(a, b).1 == n;
    Ok(StabilitySplit {
        a1: sub_block(&at, 0, n1, 0, n1),
        a2: sub_block(&at, n1, n, n1, n),
        b1: sub_block(&bt, 0, n1, 0, bt.cols),
        b2: sub_block(&bt, n1, n, 0, bt.cols),
        t,
        n1,
        n2,
        whole_space,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PlanPart {
    pub column: usize,
    /// Reduced system matrix `C_i` (stable for infinite horizon).
    pub c: AMat,
    pub b: Vec<AlgReal>,
    /// `n x k` embedding `P_i`.
    pub embed: AMat,
    pub provenance: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionPlan {
    pub n: usize,
    pub bounded: bool,
    pub parts: Vec<PlanPart>,
    /// Basis of the free subspace absorbed from weakly antistable blocks.
    pub free_dims: Vec<Vec<AlgReal>>,
}

impl Serialize for Mat<AlgReal> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

/// Keep a maximal independent subset of `vs`.
fn independent(vs: Vec<Vec<AlgReal>>, n: usize) -> Vec<Vec<AlgReal>> {
    let mut out: Vec<Vec<AlgReal>> = Vec::new();
    for v in vs {
        let mut trial = out.clone();
        trial.push(v);
        if Mat::from_cols(&trial).rank() == trial.len() {
            out = trial;
        }
        if out.len() == n {
            break;
        }
    }
    out
}

pub fn build_plan(p: &ReachProblem) -> Result<DecompositionPlan, ReachError> {
    p.validate()?;
    let n = p.n();
    let bounded = matches!(p.horizon, Horizon::Bounded(_));
    let mut parts = Vec::new();
    let mut free = Vec::new();
    for j in 0..p.m() {
        let col = p.column(j);
        let r = match controllable_restriction(&p.a, &col) {
            Ok(r) => r,
            Err(ReachError::ZeroColumn) => continue,
            Err(e) => return Err(e),
        };
        let k = r.a.rows;
        let mut prov = vec![format!("column {}", j)];
        if k < n {
            prov.push(format!("controllable restriction to dimension {}", k));
        }
        if bounded {
            parts.push(PlanPart { column: j, c: r.a, b: r.b, embed: r.embed, provenance: prov });
            continue;
        }
        let sp = stability_split(&r.a, &Mat::column(&r.b))?;
        if sp.n2 > 0 {
            prov.push(format!("stable/antistable split {}+{}", sp.n1, sp.n2));
            let te = r.embed.mul(&sp.t);
            for i in sp.n1..k {
                free.push(te.col(i));
            }
        }
        if sp.n1 == 0 {
            continue;
        }
        let (c, b, embed) = if sp.n2 == 0 {
            (r.a, r.b, r.embed)
        } else {
            let te = r.embed.mul(&sp.t);
            (sp.a1, sp.b1.col(0), sub_block(&te, 0, n, 0, sp.n1))
        };
        parts.push(PlanPart { column: j, c, b, embed, provenance: prov });
    }
    Ok(DecompositionPlan { n, bounded, parts, free_dims: independent(free, n) })
}

/// The plan expressed in coordinates of the quotient by the free subspace,
/// restricted to the span of the parts, where the reachable set is
/// full-dimensional and contains the origin in its interior.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub n: usize,
    pub d: usize,
    /// Parts `(C_i, b_i, E_i)` with `E_i` of size `d x k_i`.
    pub parts: Vec<(AMat, Vec<AlgReal>, AMat)>,
    /// Quotient map `Q` (rows annihilate the free subspace).
    pub q: AMat,
    /// Columns: basis of the span of the parts inside the quotient.
    pub g: AMat,
    pub bounded: bool,
}

impl ReducedSystem {
    /// Reduced coordinates of `y`, or `None` when `y` lies outside the
    /// affine hull of the reachable set.
    pub fn coords(&self, y: &[AlgReal]) -> Option<Vec<AlgReal>> {
        let qy = if self.q.rows == 0 { vec![] } else { self.q.mul_vec(y) };
        if self.d == 0 {
            return qy.iter().all(|x| x.is_zero()).then(Vec::new);
        }
        self.g.solve(&qy)
    }

    /// Whether the reachable set is the whole space.
    pub fn whole_space(&self) -> bool {
        self.q.rows == 0
    }

    /// Map a reduced point back to state space (no free subspace only).
    pub fn lift(&self, z: &[AlgReal]) -> Option<Vec<AlgReal>> {
        if self.q.rows != self.n {
            return None;
        }
        let x = self.g.mul_vec(z);
        let qi = self.q.inverse()?;
        Some(qi.mul_vec(&x))
    }
}

pub fn reduce(plan: &DecompositionPlan) -> ReducedSystem {
    let n = plan.n;
    let q: AMat = if plan.free_dims.is_empty() {
        Mat::identity(n)
    } else {
        let f = Mat::from_cols(&plan.free_dims);
        let rows = f.transpose().kernel();
        if rows.is_empty() {
            Mat::zeros(0, n)
        } else {
            Mat::from_rows(rows)
        }
    };
    let mut span = Vec::new();
    let images: Vec<AMat> = plan.parts.iter().map(|pp| if q.rows == 0 { Mat::zeros(0, pp.embed.cols) } else { q.mul(&pp.embed) }).collect();
    for im in &images {
        for j in 0..im.cols {
            span.push(im.col(j));
        }
    }
    let basis = if q.rows == 0 { vec![] } else { independent(span, q.rows) };
    let d = basis.len();
    let g: AMat = if d == 0 { Mat::zeros(q.rows, 0) } else { Mat::from_cols(&basis) };
    let parts = plan
        .parts
        .iter()
        .zip(&images)
        .filter(|_| d > 0)
        .map(|(pp, im)| (pp.c.clone(), pp.b.clone(), solve_cols(&g, im)))
        .collect();
    ReducedSystem { n, d, parts, q, g, bounded: plan.bounded }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{amat, avec};

    #[test]
    fn ranks() {
        let a = amat(&[&[(-1, 2), (0, 1)], &[(0, 1), (-1, 3)]]);
        assert_eq!(controllability_matrix(&a, &avec(&[(1, 1), (1, 1)])).1, 2);
        let d = amat(&[&[(-1, 1), (0, 1)], &[(0, 1), (-2, 1)]]);
        assert_eq!(controllability_matrix(&d, &avec(&[(1, 1), (0, 1)])).1, 1);
        assert_eq!(controllability_matrix(&d, &avec(&[(0, 1), (0, 1)])).1, 0);
    }

    #[test]
    fn restriction_first_axis() {
        let d = amat(&[&[(-1, 1), (0, 1)], &[(0, 1), (-2, 1)]]);
        let r = controllable_restriction(&d, &avec(&[(1, 1), (0, 1)])).unwrap();
        assert_eq!(r.a.rows, 1);
        assert_eq!(*r.a.get(0, 0), AlgReal::from(-1));
        assert_eq!(r.b, avec(&[(1, 1)]));
        assert_eq!(r.embed.col(0), avec(&[(1, 1), (0, 1)]));
    }

    #[test]
    fn split_diag() {
        let a = amat(&[&[(-1, 1), (0, 1)], &[(0, 1), (2, 1)]]);
        let s = stability_split(&a, &Mat::identity(2)).unwrap();
        assert_eq!((s.n1, s.n2), (1, 1));
        assert_eq!(*s.a1.get(0, 0), AlgReal::from(-1));
        let car = amat(&[&[(0, 1), (1, 1)], &[(0, 1), (0, 1)]]);
        let s = stability_split(&car, &Mat::from_cols(&[avec(&[(0, 1), (1, 1)])])).unwrap();
        assert_eq!(s.n2, 2);
        assert!(s.whole_space);
    }

    #[test]
    fn mixed_irreducible_factor() {
        // x^2 - 2 has roots of both signs
        let a = amat(&[&[(0, 1), (1, 1)], &[(2, 1), (0, 1)]]);
        let s = stability_split(&a, &Mat::identity(2)).unwrap();
        assert_eq!((s.n1, s.n2), (1, 1));
        assert_eq!(*s.a1.get(0, 0), AlgReal::sqrt_rational(&2.into()).neg());
    }
}
