//! Inner and outer polytopes around a reachable set with a certified
//! Hausdorff gap, and the membership semi-decision built on them.
//!
//! Directions live on a simplicial mesh of the sphere. For a cell with
//! directions `c_1..c_d` every unit direction `u` in its cone satisfies
//! `h_outer(u) <= u^T v` where `v` is the apex `c_k^T v = offset_k`, while
//! `h_inner(u) >= u^T s` for any `s` in the hull of the cell's inner points.
//! The distance from the apex to that hull therefore bounds the gap.

use crate::algnum::{start_prec, AMat, AlgReal, DyInterval, IMat, Mat, QMat};
use crate::boundary::SupportOracle;
use crate::decomp::{build_plan, reduce, ReducedSystem};
use crate::model::{Horizon, InputSet, ReachProblem, Target};
use crate::{ReachError, Result};
use rayon::prelude::*;
use rug::Rational;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt::Write as _;

/// `normal^T x <= offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl Halfspace {
    /// Enclosure of `normal^T y - offset`.
    pub fn excess(&self, y: &[DyInterval]) -> DyInterval {
        let prec = y.first().map(|v| v.prec()).unwrap_or_else(start_prec);
        let mut acc = DyInterval::from_rational(&Rational::from(-&self.offset), prec);
        for (c, v) in self.normal.iter().zip(y) {
            if *c != 0 {
                acc = &acc + &v.mul_rational(c);
            }
        }
        acc
    }

    fn violation_score(&self, y: &[DyInterval]) -> f64 {
        let n = self.normal.iter().map(|c| c.to_f64().powi(2)).sum::<f64>().sqrt();
        self.excess(y).lo.to_f64() / n
    }
}

#[derive(Clone, Debug)]
pub struct SupportSample {
    pub direction: Vec<Rational>,
    /// Box containing a maximizer of `c^T x` over the closure.
    pub enclosure: Vec<DyInterval>,
    pub exact: Option<Vec<AlgReal>>,
    /// Dyadic point certified inside the closed set.
    pub inner: Vec<Rational>,
    pub offset: Rational,
    tol: f64,
}

impl SupportSample {
    fn negated(&self) -> SupportSample {
        SupportSample {
            direction: self.direction.iter().map(|x| Rational::from(-x)).collect(),
            enclosure: self.enclosure.iter().map(|x| -x).collect(),
            exact: self.exact.as_ref().map(|v| v.iter().map(|x| x.neg()).collect()),
            inner: self.inner.iter().map(|x| Rational::from(-x)).collect(),
            offset: self.offset.clone(),
            tol: self.tol,
        }
    }
}

/// Support function of `Σ E_j R(C_j, b_j)`.
pub struct SupportSum {
    pub d: usize,
    parts: Vec<(SupportOracle, AMat, IMat, f64)>,
    pub bounded: bool,
}

impl SupportSum {
    pub fn single(c: &AMat, b: &[AlgReal], horizon: &Horizon) -> Result<SupportSum> {
        let k = c.rows;
        Self::from_parts(k, &[(c.clone(), b.to_vec(), Mat::identity(k))], horizon)
    }

    pub fn from_reduced(r: &ReducedSystem, horizon: &Horizon) -> Result<SupportSum> {
        Self::from_parts(r.d, &r.parts, horizon)
    }

    pub fn from_parts(d: usize, parts: &[(AMat, Vec<AlgReal>, AMat)], horizon: &Horizon) -> Result<SupportSum> {
        let prec = start_prec();
        let parts = parts
            .iter()
            .map(|(c, b, e)| {
                if e.rows != d || e.cols != c.rows {
                    return Err(ReachError::DimensionMismatch("embedding does not match part".into()));
                }
                let enc = e.enclose(prec);
                let scale = enc.norm_inf().to_f64().max(1.0);
                Ok((SupportOracle::new(c, b, horizon)?, e.clone(), enc, scale))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SupportSum { d, parts, bounded: horizon.tau().is_some() })
    }

    /// Support point of the sum in direction `dir`, each coordinate of width
    /// at most about `tol`.
    pub fn sample(&self, dir: &[Rational], tol: f64) -> Result<(Vec<DyInterval>, Option<Vec<AlgReal>>)> {
        let prec = start_prec();
        let c: Vec<AlgReal> = dir.iter().map(|q| AlgReal::from(q.clone())).collect();
        let mut enc = vec![DyInterval::zero(prec); self.d];
        let mut exact = Some(vec![AlgReal::zero(); self.d]);
        let share = tol / self.parts.len().max(1) as f64;
        for (oracle, e, e_enc, scale) in &self.parts {
            let cj = e.transpose().mul_vec(&c);
            if cj.iter().all(|x| x.is_zero()) {
                continue;
            }
            let sp = oracle.support(&cj, share / scale).map_err(|err| match err {
                ReachError::NeedsMoreBudget(m) => ReachError::NeedsMoreBudget(format!("direction {}: {}", fmt_dir(dir), m)),
                other => other,
            })?;
            let emb = e_enc.mul_vec(&sp.enclosure);
            enc = enc.iter().zip(&emb).map(|(a, b)| a + b).collect();
            exact = match (exact, sp.exact) {
                (Some(acc), Some(x)) => Some(acc.iter().zip(e.mul_vec(&x)).map(|(a, b)| a.add(&b)).collect()),
                _ => None,
            };
        }
        Ok((enc, exact))
    }
}

fn fmt_dir(dir: &[Rational]) -> String {
    let parts: Vec<String> = dir.iter().map(|q| format!("{}", q.to_f64())).collect();
    format!("({})", parts.join(", "))
}

fn rat(x: f64) -> Rational {
    Rational::from_f64(x).expect("finite")
}

/// Upper bound on the Euclidean norm of an exact vector.
fn norm_up(v: &[Rational]) -> f64 {
    let mut s = Rational::new();
    for x in v {
        s += Rational::from(x * x);
    }
    s.to_f64().sqrt() * (1.0 + 1e-12) + 1e-300
}

fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| Rational::from(x - y)).collect()
}

fn rdot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut s = Rational::new();
    for (x, y) in a.iter().zip(b) {
        s += Rational::from(x * y);
    }
    s
}

/// Lower bound `r0` with `B(0, r0)` inside the closure of the set: the
/// symmetric hull of support points `±β_i` is the image of the
/// cross-polytope under `P = [β_1 .. β_d]`, which contains a ball of radius
/// `σ_min(P)/√d`.
fn inner_radius(boxes: &[Vec<DyInterval>]) -> Option<Rational> {
    let d = boxes.len();
    let mid: QMat = Mat::from_cols(&boxes.iter().map(|b| b.iter().map(|x| x.mid().to_rational().expect("finite")).collect()).collect::<Vec<_>>());
    let inv = mid.inverse()?;
    let mut fro = Rational::new();
    for i in 0..d {
        for j in 0..d {
            fro += Rational::from(inv.get(i, j) * inv.get(i, j));
        }
    }
    let inv_norm = fro.to_f64().sqrt() * (1.0 + 1e-12);
    let mut pert = 0.0f64;
    for b in boxes {
        for x in b {
            pert += x.rad_f64().powi(2);
        }
    }
    let sigma = 1.0 / inv_norm - pert.sqrt() * (1.0 + 1e-12);
    let r0 = sigma / (d as f64).sqrt() * (1.0 - 1e-9);
    (r0 > 0.0 && r0.is_finite()).then(|| rat(r0))
}

/// Shrink the box midpoint towards the origin so that it stays inside the
/// closure whatever the true support point in the box is.
fn shrink(enc: &[DyInterval], r0: &Rational) -> Vec<Rational> {
    let m: Vec<Rational> = enc.iter().map(|x| x.mid().to_rational().expect("finite")).collect();
    let w = enc.iter().map(|x| x.rad_f64().powi(2)).sum::<f64>().sqrt() * (1.0 + 1e-12);
    if w == 0.0 {
        return m;
    }
    let lam = r0.to_f64() / (r0.to_f64() + w) * (1.0 - 1e-12);
    let lam = Rational::from(((lam * 2f64.powi(48)).floor() as i64, 1i64 << 48));
    m.iter().map(|x| Rational::from(x * &lam)).collect()
}

/// Axes rotated by `theta` in each coordinate plane `(i, i+1)`.
fn rotated_frame(d: usize, theta: f64) -> Vec<Vec<Rational>> {
    let mut m = vec![vec![0.0f64; d]; d];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for i in 0..d.saturating_sub(1) {
        let (c, s) = (theta.cos(), theta.sin());
        for row in m.iter_mut() {
            let (a, b) = (row[i], row[i + 1]);
            row[i] = c * a - s * b;
            row[i + 1] = s * a + c * b;
        }
    }
    if d == 1 {
        m[0][0] = 1.0;
    }
    m.into_iter().map(|r| r.into_iter().map(rat).collect()).collect()
}

/// Incrementally refined direction mesh.
struct Mesh<'a> {
    src: &'a SupportSum,
    dirs: Vec<Vec<Rational>>,
    cells: Vec<Vec<usize>>,
    memo: HashMap<Vec<Rational>, SupportSample>,
    mids: HashMap<(usize, usize), usize>,
    r0: Option<Rational>,
    max_dirs: usize,
}

impl<'a> Mesh<'a> {
    fn new(src: &'a SupportSum) -> Mesh<'a> {
        let d = src.d;
        let mut dirs = Vec::new();
        for i in 0..d {
            for s in [1i32, -1] {
                let mut v = vec![Rational::new(); d];
                v[i] = Rational::from(s);
                dirs.push(v);
            }
        }
        if d == 2 {
            // start from the eight compass directions
            let ring = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
            let dirs: Vec<Vec<Rational>> = ring.iter().map(|&(a, b)| vec![Rational::from(a), Rational::from(b)]).collect();
            let cells = (0..8).map(|k| vec![k, (k + 1) % 8]).collect();
            return Mesh { src, dirs, cells, memo: HashMap::new(), mids: HashMap::new(), r0: None, max_dirs: 1 << 14 };
        }
        let mut cells = Vec::new();
        for mask in 0..(1usize << d) {
            cells.push((0..d).map(|i| 2 * i + ((mask >> i) & 1)).collect());
        }
        Mesh { src, dirs, cells, memo: HashMap::new(), mids: HashMap::new(), r0: None, max_dirs: 1 << 14 }
    }

    fn canonical(dir: &[Rational]) -> (Vec<Rational>, bool) {
        let neg = dir.iter().find(|x| **x != 0).map(|x| *x < 0).unwrap_or(false);
        if neg {
            (dir.iter().map(|x| Rational::from(-x)).collect(), true)
        } else {
            (dir.to_vec(), false)
        }
    }

    fn sample_at(&self, idx: usize) -> SupportSample {
        let (c, neg) = Self::canonical(&self.dirs[idx]);
        let s = &self.memo[&c];
        if neg {
            s.negated()
        } else {
            s.clone()
        }
    }

    /// Fill in support samples for all directions at tolerance `tol`.
    fn fill(&mut self, tol: f64) -> Result<()> {
        let mut todo: Vec<Vec<Rational>> = Vec::new();
        for d in &self.dirs {
            let (c, _) = Self::canonical(d);
            let fresh = self.memo.get(&c).map(|s| s.tol <= tol * 4.0).unwrap_or(false);
            if !fresh && !todo.contains(&c) {
                todo.push(c);
            }
        }
        let src = self.src;
        let got: Vec<Result<(Vec<Rational>, Vec<DyInterval>, Option<Vec<AlgReal>>)>> = todo
            .into_par_iter()
            .map(|c| src.sample(&c, tol).map(|(e, x)| (c, e, x)))
            .collect();
        let mut raw = Vec::new();
        for g in got {
            raw.push(g?);
        }
        if self.r0.is_none() {
            let d = self.src.d;
            let axes: Vec<Vec<DyInterval>> = (0..d)
                .map(|i| {
                    let mut e = vec![Rational::new(); d];
                    e[i] = Rational::from(1);
                    raw.iter()
                        .find(|(c, _, _)| *c == e)
                        .map(|(_, b, _)| b.clone())
                        .or_else(|| self.memo.get(&e).map(|s| s.enclosure.clone()))
                        .expect("axis directions sampled first")
                })
                .collect();
            let mut r0 = inner_radius(&axes);
            // axes may share a corner point; retry with rotated frames
            for k in 1..16 {
                if r0.is_some() {
                    break;
                }
                let frame = rotated_frame(d, 0.37 * k as f64);
                let mut boxes = Vec::new();
                for c in &frame {
                    boxes.push(self.src.sample(c, tol)?.0);
                }
                r0 = inner_radius(&boxes);
            }
            self.r0 = Some(r0.ok_or_else(|| {
                ReachError::PrecisionExhausted("could not certify a ball around the origin inside the set".into())
            })?);
        }
        let r0 = self.r0.clone().expect("set above");
        for (c, enc, exact) in raw {
            let inner = match exact.as_ref().and_then(|v| v.iter().map(|x| x.as_rational().cloned()).collect::<Option<Vec<_>>>()) {
                Some(q) => q,
                None => shrink(&enc, &r0),
            };
            let value = crate::exppoly::dot_enclosure(&c.iter().map(|q| AlgReal::from(q.clone())).collect::<Vec<_>>(), &enc);
            let offset = match &exact {
                Some(v) if v.iter().all(|x| x.is_rational()) => {
                    rdot(&c, &v.iter().map(|x| x.as_rational().cloned().expect("rational")).collect::<Vec<_>>())
                }
                _ => value.hi_rational(),
            };
            self.memo.insert(c.clone(), SupportSample { direction: c, enclosure: enc, exact, inner, offset, tol });
        }
        Ok(())
    }

    fn cell_gap(&self, cell: &[usize]) -> f64 {
        let d = self.src.d;
        let samples: Vec<SupportSample> = cell.iter().map(|&i| self.sample_at(i)).collect();
        if d == 1 {
            let s = &samples[0];
            let v = Rational::from(&s.offset / &s.direction[0]);
            return norm_up(&[Rational::from(&v - &s.inner[0])]);
        }
        let cm: QMat = Mat::from_rows(samples.iter().map(|s| s.direction.clone()).collect());
        let rhs: Vec<Rational> = samples.iter().map(|s| s.offset.clone()).collect();
        let v = match cm.solve(&rhs) {
            Some(v) => v,
            None => return f64::INFINITY,
        };
        if d == 2 {
            let (p, q) = (&samples[0].inner, &samples[1].inner);
            let e = sub(q, p);
            let ee = rdot(&e, &e);
            let t = if ee == 0 {
                Rational::new()
            } else {
                let t = (rdot(&sub(&v, p), &e).to_f64() / ee.to_f64()).clamp(0.0, 1.0);
                rat(t)
            };
            let s: Vec<Rational> = p.iter().zip(&e).map(|(a, b)| a + Rational::from(b * &t)).collect();
            return norm_up(&sub(&v, &s));
        }
        samples.iter().map(|s| norm_up(&sub(&v, &s.inner))).fold(f64::INFINITY, f64::min)
    }

    fn unit(v: &[Rational]) -> Vec<f64> {
        let f: Vec<f64> = v.iter().map(|x| x.to_f64()).collect();
        let n = f.iter().map(|x| x * x).sum::<f64>().sqrt();
        f.iter().map(|x| x / n).collect()
    }

    fn midpoint(&mut self, i: usize, j: usize) -> usize {
        let key = (i.min(j), i.max(j));
        if let Some(&m) = self.mids.get(&key) {
            return m;
        }
        let (a, b) = (Self::unit(&self.dirs[key.0]), Self::unit(&self.dirs[key.1]));
        let s: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let mx = s.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let dir: Vec<Rational> = s.iter().map(|x| rat(x / mx)).collect();
        self.dirs.push(dir);
        let m = self.dirs.len() - 1;
        self.mids.insert(key, m);
        m
    }

    fn angle(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (Self::unit(&self.dirs[i]), Self::unit(&self.dirs[j]));
        a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>().clamp(-1.0, 1.0).acos()
    }

    /// Refine until every cell gap is at most `target`; returns the gap.
    fn refine(&mut self, target: f64) -> Result<(f64, bool)> {
        let tol = (target / 16.0).min(1e-2);
        loop {
            self.fill(tol)?;
            let gaps: Vec<f64> = self.cells.par_iter().map(|c| self.cell_gap(c)).collect();
            let worst = gaps.iter().cloned().fold(0.0, f64::max);
            if worst <= target {
                return Ok((worst, true));
            }
            if self.dirs.len() >= self.max_dirs || self.src.d == 1 {
                return Ok((worst, false));
            }
            let mut next = Vec::with_capacity(self.cells.len() * 2);
            let cells = std::mem::take(&mut self.cells);
            for (cell, g) in cells.into_iter().zip(gaps) {
                if g <= target {
                    next.push(cell);
                    continue;
                }
                let mut best = (0, 1, -1.0);
                for x in 0..cell.len() {
                    for y in (x + 1)..cell.len() {
                        let a = self.angle(cell[x], cell[y]);
                        if a > best.2 {
                            best = (x, y, a);
                        }
                    }
                }
                let m = self.midpoint(cell[best.0], cell[best.1]);
                let mut c1 = cell.clone();
                c1[best.0] = m;
                let mut c2 = cell;
                c2[best.1] = m;
                next.push(c1);
                next.push(c2);
            }
            self.cells = next;
        }
    }

    fn to_pair(&self, gap: f64, precision: u32, achieved: bool) -> PolytopePair {
        let d = self.src.d;
        let mut samples: Vec<SupportSample> = (0..self.dirs.len()).map(|i| self.sample_at(i)).collect();
        let points: Vec<Vec<Rational>> = samples.iter().map(|s| s.inner.clone()).collect();
        let outer: Vec<Halfspace> = samples.iter().map(|s| Halfspace { normal: s.direction.clone(), offset: s.offset.clone() }).collect();
        let (inner, outer_vertices) = if d == 2 {
            let mut order: Vec<usize> = (0..self.dirs.len()).collect();
            let ang = |i: usize| {
                let u = &self.dirs[i];
                u[1].to_f64().atan2(u[0].to_f64())
            };
            order.sort_by(|a, b| ang(*a).total_cmp(&ang(*b)));
            let mut verts = Vec::new();
            for k in 0..order.len() {
                let (i, j) = (order[k], order[(k + 1) % order.len()]);
                let cm: QMat = Mat::from_rows(vec![self.dirs[i].clone(), self.dirs[j].clone()]);
                if let Some(v) = cm.solve(&[outer[i].offset.clone(), outer[j].offset.clone()]) {
                    verts.push(v);
                }
            }
            (convex_hull_2d(&points), verts)
        } else {
            (points.clone(), Vec::new())
        };
        samples.sort_by(|a, b| a.direction.cmp(&b.direction));
        PolytopePair {
            dim: d,
            inner,
            outer,
            outer_vertices,
            lineality: Vec::new(),
            gap,
            precision,
            achieved,
            samples,
            points,
            cells: self.cells.clone(),
            bounded: self.src.bounded,
        }
    }
}

/// Counter-clockwise hull of exact planar points, without collinear points.
pub fn convex_hull_2d(pts: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut p: Vec<Vec<Rational>> = pts.to_vec();
    p.sort();
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: &Vec<Rational>, a: &Vec<Rational>, b: &Vec<Rational>| {
        Rational::from(&a[0] - &o[0]) * Rational::from(&b[1] - &o[1]) - Rational::from(&a[1] - &o[1]) * Rational::from(&b[0] - &o[0])
    };
    let mut lower: Vec<Vec<Rational>> = Vec::new();
    for q in &p {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], q) <= 0 {
            lower.pop();
        }
        lower.push(q.clone());
    }
    let mut upper: Vec<Vec<Rational>> = Vec::new();
    for q in p.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], q) <= 0 {
            upper.pop();
        }
        upper.push(q.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[derive(Clone, Debug)]
pub struct PolytopePair {
    pub dim: usize,
    /// Inner vertices: the hull in the plane, all certified points otherwise.
    pub inner: Vec<Vec<Rational>>,
    pub outer: Vec<Halfspace>,
    /// Vertices of a polygon containing the outer polytope (planar only).
    pub outer_vertices: Vec<Vec<Rational>>,
    /// Directions along which the set is unbounded.
    pub lineality: Vec<Vec<Rational>>,
    pub gap: f64,
    pub precision: u32,
    /// Whether `gap <= 2^-precision` was reached within budget.
    pub achieved: bool,
    pub samples: Vec<SupportSample>,
    points: Vec<Vec<Rational>>,
    cells: Vec<Vec<usize>>,
    pub bounded: bool,
}

/// Where a point sits relative to a pair.
#[derive(Clone, Debug, PartialEq)]
pub enum Location {
    /// Strictly inside the inner polytope.
    Inside,
    /// Strictly violates the outer halfspace with this index.
    Outside(usize),
    Undetermined,
}

impl PolytopePair {
    pub fn locate(&self, y: &[DyInterval]) -> Location {
        if !self.lineality.is_empty() {
            return self.locate_lineal(y);
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, h) in self.outer.iter().enumerate() {
            if h.excess(y).is_pos() {
                let s = h.violation_score(y);
                if best.map(|(_, b)| s > b).unwrap_or(true) {
                    best = Some((i, s));
                }
            }
        }
        if let Some((i, _)) = best {
            return Location::Outside(i);
        }
        let inside = if self.dim == 2 { strictly_in_polygon(&self.inner, y) } else { self.in_some_pyramid(y) };
        if inside {
            Location::Inside
        } else {
            Location::Undetermined
        }
    }

    fn in_some_pyramid(&self, y: &[DyInterval]) -> bool {
        let prec = y.first().map(|v| v.prec()).unwrap_or_else(start_prec);
        self.cells.iter().any(|cell| {
            let q: QMat = Mat::from_cols(&cell.iter().map(|&i| self.points[i].clone()).collect::<Vec<_>>());
            let inv = match q.inverse() {
                Some(m) => m,
                None => return false,
            };
            let lam: Vec<DyInterval> = (0..inv.rows)
                .map(|i| {
                    let mut acc = DyInterval::zero(prec);
                    for (j, yj) in y.iter().enumerate() {
                        acc = &acc + &yj.mul_rational(inv.get(i, j));
                    }
                    acc
                })
                .collect();
            let mut total = DyInterval::zero(prec);
            for l in &lam {
                total = &total + l;
            }
            lam.iter().all(|l| l.lo >= 0) && total.hi < 1
        })
    }

    /// Planar pair with one lineality direction: compare along its normal.
    fn locate_lineal(&self, y: &[DyInterval]) -> Location {
        if self.lineality.len() >= self.dim {
            return Location::Inside;
        }
        if self.dim != 2 {
            return Location::Undetermined;
        }
        let l = &self.lineality[0];
        let nu = vec![Rational::from(-&l[1]), l[0].clone()];
        let vals: Vec<Rational> = self.inner.iter().map(|q| rdot(&nu, q)).collect();
        let (lo, hi) = (vals.iter().min().cloned(), vals.iter().max().cloned());
        let h = Halfspace { normal: nu.clone(), offset: Rational::new() };
        let t = h.excess(y);
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if t.lo > lo && t.hi < hi {
                return Location::Inside;
            }
        }
        for (i, hs) in self.outer.iter().enumerate() {
            if hs.excess(y).is_pos() {
                return Location::Outside(i);
            }
        }
        Location::Undetermined
    }

    /// Upper bound on `h(c)` from the outer polygon (planar) or the listed
    /// halfspaces when `c` is one of their normals.
    pub fn support_upper(&self, c: &[Rational]) -> Option<Rational> {
        if self.dim == 2 && !self.outer_vertices.is_empty() {
            return self.outer_vertices.iter().map(|v| rdot(c, v)).max();
        }
        if self.dim == 1 {
            let k = &c[0];
            let h = self.outer.iter().map(|hs| &hs.offset / hs.normal[0].clone().abs()).max()?;
            return Some(k.clone().abs() * h);
        }
        self.outer.iter().find(|h| h.normal == c).map(|h| h.offset.clone())
    }

    /// Whether every inner vertex satisfies every outer halfspace.
    pub fn is_consistent(&self) -> bool {
        self.points.iter().chain(&self.inner).all(|q| self.outer.iter().all(|h| rdot(&h.normal, q) <= h.offset))
    }
}

fn strictly_in_polygon(hull: &[Vec<Rational>], y: &[DyInterval]) -> bool {
    if hull.len() < 3 {
        return false;
    }
    let prec = y[0].prec();
    (0..hull.len()).all(|i| {
        let a = &hull[i];
        let b = &hull[(i + 1) % hull.len()];
        let ex = Rational::from(&b[0] - &a[0]);
        let ey = Rational::from(&b[1] - &a[1]);
        let dx = &y[0] - &DyInterval::from_rational(&a[0], prec);
        let dy = &y[1] - &DyInterval::from_rational(&a[1], prec);
        let cr = &dy.mul_rational(&ex) - &dx.mul_rational(&ey);
        cr.is_pos()
    })
}

/// Sandwich for a single stable controllable part, infinite horizon.
pub fn build_polytope_pair(c: &AMat, b: &[AlgReal], p: u32) -> Result<PolytopePair> {
    build_pair_with(&SupportSum::single(c, b, &Horizon::Infinite)?, p)
}

pub fn build_pair_with(src: &SupportSum, p: u32) -> Result<PolytopePair> {
    if src.d == 0 {
        return Err(ReachError::Unsupported("zero-dimensional reachable set".into()));
    }
    let mut mesh = Mesh::new(src);
    let target = 2f64.powi(-(p as i32));
    let (gap, ok) = mesh.refine(target)?;
    Ok(mesh.to_pair(gap, p, ok))
}

/// Sandwich of the reduced reachable set of a problem.
pub fn build_problem_pair(p: &ReachProblem, prec: u32) -> Result<(ReducedSystem, PolytopePair)> {
    let r = reduce(&build_plan(p)?);
    let src = SupportSum::from_reduced(&r, &p.horizon)?;
    let pair = build_pair_with(&src, prec)?;
    Ok((r, pair))
}

/// Minkowski sum of embedded pairs `Σ P_i K_i` plus a free subspace.
/// Supported in ambient dimension at most 2.
pub fn minkowski_combine(pairs: &[(PolytopePair, QMat)], free_dims: &[Vec<Rational>]) -> Result<PolytopePair> {
    let dim = match pairs.first() {
        Some((_, e)) => e.rows,
        None => return Err(ReachError::DimensionMismatch("no pairs to combine".into())),
    };
    for (pp, e) in pairs {
        if e.rows != dim || e.cols != pp.dim {
            return Err(ReachError::DimensionMismatch("embedding does not match pair".into()));
        }
    }
    if free_dims.iter().any(|f| f.len() != dim) {
        return Err(ReachError::DimensionMismatch("free direction has wrong length".into()));
    }
    if dim > 2 {
        return Err(ReachError::Unsupported("Minkowski combination above dimension 2".into()));
    }
    if pairs.len() == 1 && free_dims.is_empty() && pairs[0].1 == Mat::identity(dim) {
        return Ok(pairs[0].0.clone());
    }
    // inner: sums of embedded hull vertices
    let mut inner: Vec<Vec<Rational>> = vec![vec![Rational::new(); dim]];
    for (pp, e) in pairs {
        let emb: Vec<Vec<Rational>> = pp.inner.iter().map(|v| e.mul_vec(v)).collect();
        let mut next = Vec::with_capacity(inner.len() * emb.len());
        for a in &inner {
            for b in &emb {
                next.push(a.iter().zip(b).map(|(x, y)| Rational::from(x + y)).collect::<Vec<_>>());
            }
        }
        inner = if dim == 2 { convex_hull_2d(&next) } else { extremes_1d(next) };
    }
    // directions: edge normals of every embedded outer polygon
    let mut dirs: Vec<Vec<Rational>> = Vec::new();
    if dim == 1 {
        dirs.push(vec![Rational::from(1)]);
        dirs.push(vec![Rational::from(-1)]);
    } else {
        for (pp, e) in pairs {
            let verts: Vec<Vec<Rational>> = if pp.dim == 2 {
                pp.outer_vertices.iter().map(|v| e.mul_vec(v)).collect()
            } else {
                let h = pp.support_upper(&[Rational::from(1)]).unwrap_or_default();
                vec![e.mul_vec(std::slice::from_ref(&h)), e.mul_vec(&[(-h)])]
            };
            for k in 0..verts.len() {
                let ed = sub(&verts[(k + 1) % verts.len()], &verts[k]);
                if ed.iter().all(|x| *x == 0) {
                    continue;
                }
                dirs.push(vec![ed[1].clone(), Rational::from(-&ed[0])]);
                dirs.push(vec![Rational::from(-&ed[1]), ed[0].clone()]);
            }
        }
        dirs.sort();
        dirs.dedup();
    }
    let mut outer = Vec::new();
    for c in dirs {
        if free_dims.iter().any(|f| rdot(f, &c) != 0) {
            continue;
        }
        let mut total = Rational::new();
        for (pp, e) in pairs {
            let ce = e.transpose().mul_vec(&c);
            if ce.iter().all(|x| *x == 0) {
                continue;
            }
            total += pp.support_upper(&ce).ok_or_else(|| ReachError::Unsupported("support upper bound unavailable".into()))?;
        }
        outer.push(Halfspace { normal: c, offset: total });
    }
    let outer_vertices = if dim == 2 && free_dims.is_empty() { polygon_vertices(&outer) } else { Vec::new() };
    let gap = pairs
        .iter()
        .map(|(pp, e)| {
            let mut f = Rational::new();
            for i in 0..e.rows {
                for j in 0..e.cols {
                    f += Rational::from(e.get(i, j) * e.get(i, j));
                }
            }
            pp.gap * f.to_f64().sqrt() * (1.0 + 1e-12)
        })
        .sum::<f64>();
    Ok(PolytopePair {
        dim,
        points: inner.clone(),
        inner,
        outer,
        outer_vertices,
        lineality: free_dims.to_vec(),
        gap,
        precision: pairs.iter().map(|(p, _)| p.precision).min().unwrap_or(0),
        achieved: pairs.iter().all(|(p, _)| p.achieved),
        samples: Vec::new(),
        cells: Vec::new(),
        bounded: pairs.iter().all(|(p, _)| p.bounded),
    })
}

fn extremes_1d(v: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let lo = v.iter().min().cloned();
    let hi = v.iter().max().cloned();
    lo.into_iter().chain(hi).collect()
}

/// Apexes of consecutive halfspaces in angular order.
fn polygon_vertices(hs: &[Halfspace]) -> Vec<Vec<Rational>> {
    let mut order: Vec<&Halfspace> = hs.iter().collect();
    order.sort_by(|a, b| {
        let fa = a.normal[1].to_f64().atan2(a.normal[0].to_f64());
        let fb = b.normal[1].to_f64().atan2(b.normal[0].to_f64());
        fa.total_cmp(&fb)
    });
    let mut out = Vec::new();
    for k in 0..order.len() {
        let (a, b) = (order[k], order[(k + 1) % order.len()]);
        let m: QMat = Mat::from_rows(vec![a.normal.clone(), b.normal.clone()]);
        if let Some(v) = m.solve(&[a.offset.clone(), b.offset.clone()]) {
            out.push(v);
        }
    }
    out
}

/// Exact evidence that the target lies on the boundary of the reachable set.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryWitness {
    pub point: Vec<AlgReal>,
    /// A direction whose support point is the target.
    pub direction: Option<Vec<AlgReal>>,
    pub bounded: bool,
    pub note: String,
}

#[derive(Clone, Debug)]
pub enum MembershipVerdict {
    Reachable,
    NotReachable,
    BoundaryHit(BoundaryWitness),
    Unknown { gap: f64 },
}

impl MembershipVerdict {
    /// Reachability, resolving boundary hits by the horizon: the set is
    /// closed for bounded horizons and open for the infinite one.
    pub fn reachable(&self) -> Option<bool> {
        match self {
            MembershipVerdict::Reachable => Some(true),
            MembershipVerdict::NotReachable => Some(false),
            MembershipVerdict::BoundaryHit(w) => Some(w.bounded),
            MembershipVerdict::Unknown { .. } => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MembershipVerdict::Reachable => "Reachable",
            MembershipVerdict::NotReachable => "NotReachable",
            MembershipVerdict::BoundaryHit(_) => "BoundaryHit",
            MembershipVerdict::Unknown { .. } => "Unknown",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            MembershipVerdict::Reachable => 0,
            MembershipVerdict::NotReachable => 1,
            MembershipVerdict::BoundaryHit(_) => 2,
            MembershipVerdict::Unknown { .. } => 3,
        }
    }
}

/// Halfspace `normal^T x <= offset` containing the reachable set, in state
/// coordinates, with the enclosure of `normal^T y`.
#[derive(Clone, Debug)]
pub struct Separation {
    pub normal: Vec<AlgReal>,
    pub offset: Rational,
    pub value: DyInterval,
}

#[derive(Clone, Debug)]
pub struct MembershipReport {
    pub verdict: MembershipVerdict,
    pub precision: u32,
    pub gap: f64,
    pub separation: Option<Separation>,
    pub directions: usize,
    pub diagnostics: Vec<String>,
}

impl MembershipReport {
    pub(crate) fn quick(verdict: MembershipVerdict, note: &str) -> MembershipReport {
        MembershipReport { verdict, precision: 0, gap: 0.0, separation: None, directions: 0, diagnostics: vec![note.to_string()] }
    }
}

/// Map from state space to reduced coordinates: `z = M x` on the set.
pub(crate) fn reduced_map(r: &ReducedSystem) -> Option<AMat> {
    let gt = r.g.transpose();
    let gram = gt.mul(&r.g).inverse()?;
    Some(gram.mul(&gt).mul(&r.q))
}

fn point_enclosure(z: &[AlgReal]) -> Vec<DyInterval> {
    let prec = start_prec();
    z.iter().map(|x| x.enclosure(prec)).collect()
}

/// Decide `y ∈ R` by deepening the sandwich precision up to `max_p`.
pub fn membership_semidecide(p: &ReachProblem, y: &[AlgReal], max_p: u32) -> Result<MembershipReport> {
    p.validate()?;
    if y.len() != p.n() {
        return Err(ReachError::DimensionMismatch(format!("target has {} entries, system has {}", y.len(), p.n())));
    }
    match &p.input_set {
        InputSet::Hypercube => {}
        InputSet::Zero => {
            let v = if y.iter().all(|x| x.is_zero()) { MembershipVerdict::Reachable } else { MembershipVerdict::NotReachable };
            return Ok(MembershipReport::quick(v, "zero input: only the origin is reachable"));
        }
        InputSet::Singleton(_) => return Err(ReachError::Unsupported("membership for singleton inputs".into())),
    }
    let plan = build_plan(p)?;
    let r = reduce(&plan);
    if r.whole_space() {
        return Ok(MembershipReport::quick(MembershipVerdict::Reachable, "reachable set is the whole space"));
    }
    let z = match r.coords(y) {
        Some(z) => z,
        None => return Ok(MembershipReport::quick(MembershipVerdict::NotReachable, "target outside the span of the reachable set")),
    };
    if r.d == 0 {
        return Ok(MembershipReport::quick(MembershipVerdict::Reachable, "target in the free subspace"));
    }
    if let Some(w) = crate::exact::boundary_witness(p, y)? {
        let mut rep = MembershipReport::quick(MembershipVerdict::BoundaryHit(w), "exact boundary test");
        rep.precision = 0;
        return Ok(rep);
    }
    let src = SupportSum::from_reduced(&r, &p.horizon)?;
    let ze = point_enclosure(&z);
    let mut mesh = Mesh::new(&src);
    let mut diagnostics = Vec::new();
    let mut last_gap = f64::INFINITY;
    for prec in 0..=max_p {
        let target = 2f64.powi(-(prec as i32));
        let (gap, ok) = match mesh.refine(target) {
            Ok(g) => g,
            Err(ReachError::NeedsMoreBudget(m)) => {
                diagnostics.push(m);
                break;
            }
            Err(e) => return Err(e),
        };
        last_gap = gap;
        let pair = mesh.to_pair(gap, prec, ok);
        match pair.locate(&ze) {
            Location::Inside => {
                return Ok(MembershipReport { verdict: MembershipVerdict::Reachable, precision: prec, gap, separation: None, directions: mesh.dirs.len(), diagnostics });
            }
            Location::Outside(i) => {
                let h = &pair.outer[i];
                let sep = reduced_map(&r).map(|m| {
                    let nz: Vec<AlgReal> = h.normal.iter().map(|q| AlgReal::from(q.clone())).collect();
                    let normal = m.transpose().mul_vec(&nz);
                    let value = crate::exppoly::dot_enclosure(&normal, &point_enclosure(y));
                    Separation { normal, offset: h.offset.clone(), value }
                });
                return Ok(MembershipReport { verdict: MembershipVerdict::NotReachable, precision: prec, gap, separation: sep, directions: mesh.dirs.len(), diagnostics });
            }
            Location::Undetermined => {}
        }
        if !ok {
            diagnostics.push(format!("direction budget exhausted at precision {}", prec));
            break;
        }
    }
    Ok(MembershipReport { verdict: MembershipVerdict::Unknown { gap: last_gap }, precision: max_p, gap: last_gap, separation: None, directions: mesh.dirs.len(), diagnostics })
}

/// Result of testing a set target (hyperplane or halfspace).
#[derive(Clone, Debug)]
pub struct SetTargetReport {
    pub verdict: MembershipVerdict,
    /// Enclosure of `h(c)`, the supremum of `c^T x` over the set.
    pub support: Option<DyInterval>,
    /// Reduced coordinates of an inner point on the target, when certified.
    pub witness: Option<Vec<Rational>>,
    pub diagnostics: Vec<String>,
}

/// Decide whether a hyperplane or halfspace target meets the reachable set.
/// The set is symmetric, so `c^T x` ranges over `(-h(c), h(c))` (closed for
/// bounded horizons) and only the support value in direction `c` matters.
pub fn set_target_semidecide(p: &ReachProblem, target: &Target, max_p: u32) -> Result<SetTargetReport> {
    p.validate()?;
    let (c, d, halfspace, m) = match target {
        Target::Hyperplane { c, d } => (c, d, false, None),
        Target::Halfspace { c, d } => (c, d, true, None),
        Target::BoxedHyperplane { c, d, m } => (c, d, false, Some(m)),
        Target::Point(_) => return Err(ReachError::Unsupported("point targets go through membership_semidecide".into())),
    };
    if p.input_set != InputSet::Hypercube {
        return Err(ReachError::Unsupported("set targets need the hypercube input set".into()));
    }
    let plan = build_plan(p)?;
    let r = reduce(&plan);
    let done = |v: MembershipVerdict, note: &str| SetTargetReport { verdict: v, support: None, witness: None, diagnostics: vec![note.to_string()] };
    if r.whole_space() {
        return Ok(done(MembershipVerdict::Reachable, "reachable set is the whole space"));
    }
    let row = match r.q.transpose().solve(c) {
        Some(row) => row,
        None => return Ok(done(MembershipVerdict::Reachable, "normal has a component along a free direction")),
    };
    let w = r.g.transpose().mul_vec(&row);
    let sgn = d.signum();
    if w.iter().all(|x| x.is_zero()) {
        let hit = if halfspace { sgn >= 0 } else { sgn == 0 };
        let v = if hit { MembershipVerdict::Reachable } else { MembershipVerdict::NotReachable };
        return Ok(done(v, "normal annihilates the reachable set"));
    }
    let src = SupportSum::from_reduced(&r, &p.horizon)?;
    let bounded = src.bounded;
    let mut diagnostics = Vec::new();
    if let Some(m) = m {
        // the box only matters when it cuts the set
        let Some(bound) = box_bound(&r, &src)? else {
            return Ok(done(MembershipVerdict::Unknown { gap: f64::INFINITY }, "box cuts a free or irrational direction"));
        };
        if m.cmp(&AlgReal::from(bound.clone())) == std::cmp::Ordering::Less {
            diagnostics.push(format!("box half-width below the set bound {}", bound.to_f64()));
            return Ok(SetTargetReport { verdict: MembershipVerdict::Unknown { gap: f64::INFINITY }, support: None, witness: None, diagnostics });
        }
    }
    if !w.iter().all(|x| x.is_rational()) {
        return Err(ReachError::Unsupported("irrational target normal".into()));
    }
    let dir: Vec<Rational> = w.iter().map(|x| x.as_rational().cloned().expect("rational")).collect();
    let de = d.enclosure(start_prec());
    // |d| for hyperplanes, -d for halfspaces c^T x <= d
    let level = if halfspace { -&de } else { de.abs() };
    let level_exact = if halfspace { d.neg() } else { d.abs() };
    let mut enc_at_end = None;
    for prec in 0..=max_p {
        let tol = 2f64.powi(-(prec as i32) - 4);
        let (enc, exact) = match src.sample(&dir, tol) {
            Ok(s) => s,
            Err(ReachError::NeedsMoreBudget(msg)) => {
                diagnostics.push(msg);
                break;
            }
            Err(e) => return Err(e),
        };
        let value = crate::exppoly::dot_enclosure(&w, &enc);
        enc_at_end = Some(value.clone());
        if let Some(x) = &exact {
            let h = crate::algnum::dot(&w, x);
            let ord = level_exact.cmp(&h);
            let verdict = match ord {
                std::cmp::Ordering::Less => MembershipVerdict::Reachable,
                std::cmp::Ordering::Greater => MembershipVerdict::NotReachable,
                std::cmp::Ordering::Equal => MembershipVerdict::BoundaryHit(BoundaryWitness {
                    point: x.clone(),
                    direction: Some(w.clone()),
                    bounded,
                    note: "target touches the closure only at a support point".into(),
                }),
            };
            if matches!(verdict, MembershipVerdict::Reachable) {
                let witness = inner_witness(&src, &enc, &w, &level, &de, halfspace);
                return Ok(SetTargetReport { verdict, support: Some(value), witness, diagnostics });
            }
            return Ok(SetTargetReport { verdict, support: Some(value), witness: None, diagnostics });
        }
        if level.hi < value.lo {
            if let Some(wit) = inner_witness(&src, &enc, &w, &level, &de, halfspace) {
                return Ok(SetTargetReport { verdict: MembershipVerdict::Reachable, support: Some(value), witness: Some(wit), diagnostics });
            }
        }
        if level.lo > value.hi {
            return Ok(SetTargetReport { verdict: MembershipVerdict::NotReachable, support: Some(value), witness: None, diagnostics });
        }
    }
    let gap = enc_at_end.as_ref().map(|v| v.width_f64()).unwrap_or(f64::INFINITY);
    Ok(SetTargetReport { verdict: MembershipVerdict::Unknown { gap }, support: enc_at_end, witness: None, diagnostics })
}

/// A rational `M` with the reachable set inside `[-M, M]^n`, from the
/// support values in the coordinate directions. `None` when a coordinate
/// direction is free or irrational in reduced coordinates.
fn box_bound(r: &ReducedSystem, src: &SupportSum) -> Result<Option<Rational>> {
    let mut bound = Rational::new();
    for i in 0..r.n {
        let mut e = vec![AlgReal::zero(); r.n];
        e[i] = AlgReal::one();
        let Some(row) = r.q.transpose().solve(&e) else { return Ok(None) };
        let we = r.g.transpose().mul_vec(&row);
        if we.iter().all(|x| x.is_zero()) {
            continue;
        }
        let Some(dir) = we.iter().map(|x| x.as_rational().cloned()).collect::<Option<Vec<_>>>() else { return Ok(None) };
        for sgn in [1, -1] {
            let d: Vec<Rational> = dir.iter().map(|x| Rational::from(x * sgn)).collect();
            let wd: Vec<AlgReal> = d.iter().map(|x| AlgReal::from(x.clone())).collect();
            let (enc, _) = src.sample(&d, 1e-9)?;
            bound = bound.max(crate::exppoly::dot_enclosure(&wd, &enc).hi_rational());
        }
    }
    Ok(Some(bound))
}

/// Box bound of the reachable set of `p` (see `box_bound`).
pub fn reach_box_bound(p: &ReachProblem) -> Result<Option<Rational>> {
    p.validate()?;
    let r = reduce(&build_plan(p)?);
    if r.whole_space() {
        return Ok(None);
    }
    let src = SupportSum::from_reduced(&r, &p.horizon)?;
    box_bound(&r, &src)
}

/// Inner point on the target: the shrunk support point `q` and `-q` are in
/// the set, so the segment between them meets every level strictly between
/// `-w^T q` and `w^T q`.
fn inner_witness(src: &SupportSum, enc: &[DyInterval], w: &[AlgReal], level: &DyInterval, signed: &DyInterval, halfspace: bool) -> Option<Vec<Rational>> {
    let d = src.d;
    let mut r0 = None;
    // axis support points may coincide at a corner; retry with rotated frames
    for k in 0..16 {
        let frame = if k == 0 {
            (0..d)
                .map(|i| {
                    let mut e = vec![Rational::new(); d];
                    e[i] = Rational::from(1);
                    e
                })
                .collect()
        } else {
            rotated_frame(d, 0.37 * k as f64)
        };
        let boxes = frame.iter().map(|c| src.sample(c, 1e-6).map(|s| s.0)).collect::<Result<Vec<_>>>().ok()?;
        r0 = inner_radius(&boxes);
        if r0.is_some() {
            break;
        }
    }
    let q = shrink(enc, &r0?);
    let wq: Vec<Rational> = w.iter().map(|x| x.as_rational().cloned()).collect::<Option<Vec<_>>>()?;
    let s = rdot(&wq, &q);
    if halfspace {
        // -q satisfies w^T x <= d when w^T q > -d
        return (level.hi < s).then(|| q.iter().map(|x| Rational::from(-x)).collect());
    }
    if level.hi >= s {
        return None;
    }
    // the point t q with w^T (t q) = d (taken at its midpoint when exact)
    let lv = signed.mid().to_rational()?;
    let t = Rational::from(&lv / &s);
    Some(q.iter().map(|x| Rational::from(x * &t)).collect())
}

/// CSV rows `direction..., support_lo, support_hi` for each sample.
pub fn pair_to_csv(pair: &PolytopePair) -> String {
    let mut out = String::new();
    let head: Vec<String> = (0..pair.dim).map(|i| format!("c{}", i)).collect();
    let _ = writeln!(out, "{},support_lo,support_hi,width", head.join(","));
    for s in &pair.samples {
        let c: Vec<AlgReal> = s.direction.iter().map(|q| AlgReal::from(q.clone())).collect();
        let v = crate::exppoly::dot_enclosure(&c, &s.enclosure);
        let dir: Vec<String> = s.direction.iter().map(|q| format!("{:.17e}", q.to_f64())).collect();
        let _ = writeln!(out, "{},{:.17e},{:.17e},{:.3e}", dir.join(","), v.lo.to_f64(), v.hi.to_f64(), v.width_f64());
    }
    out
}

/// Planar rendering: inner polygon filled, outer polygon outlined, oracle
/// cloud as dots and an optional target marker. `to_state` maps pair
/// coordinates to plotted coordinates.
pub fn pair_to_svg(pair: &PolytopePair, to_state: Option<&[Vec<f64>]>, cloud: &[Vec<f64>], target: Option<&[f64]>) -> Result<String> {
    if pair.dim != 2 {
        return Err(ReachError::Unsupported("SVG output is planar only; use CSV".into()));
    }
    let map = |v: &[f64]| -> (f64, f64) {
        match to_state {
            Some(m) => (m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]),
            None => (v[0], v[1]),
        }
    };
    let inner: Vec<(f64, f64)> = pair.inner.iter().map(|q| map(&[q[0].to_f64(), q[1].to_f64()])).collect();
    let outer: Vec<(f64, f64)> = pair.outer_vertices.iter().map(|q| map(&[q[0].to_f64(), q[1].to_f64()])).collect();
    let all: Vec<(f64, f64)> = inner.iter().chain(&outer).cloned().chain(cloud.iter().map(|p| (p[0], p[1]))).chain(target.map(|t| (t[0], t[1]))).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in &all {
        x0 = x0.min(*x);
        x1 = x1.max(*x);
        y0 = y0.min(*y);
        y1 = y1.max(*y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9) * 1.1;
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let size = 600.0;
    let px = |x: f64, y: f64| ((x - cx) / span * size + size / 2.0, size / 2.0 - (y - cy) / span * size);
    let path = |pts: &[(f64, f64)]| -> String {
        pts.iter()
            .map(|(x, y)| {
                let (a, b) = px(*x, *y);
                format!("{:.3},{:.3}", a, b)
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#, size);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r##"<polygon points="{}" fill="#9ecae1" stroke="none"/>"##, path(&inner));
    let _ = writeln!(s, r##"<polygon points="{}" fill="none" stroke="#08519c" stroke-width="1"/>"##, path(&outer));
    for p in cloud {
        let (a, b) = px(p[0], p[1]);
        let _ = writeln!(s, r##"<circle cx="{:.3}" cy="{:.3}" r="1" fill="#636363"/>"##, a, b);
    }
    if let Some(t) = target {
        let (a, b) = px(t[0], t[1]);
        let _ = writeln!(s, r##"<path d="M{:.3} {:.3} l8 8 m0 -8 l-8 8" stroke="#cb181d" stroke-width="2" transform="translate(-4 -4)"/>"##, a, b);
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{amat, avec};

    fn diag() -> (AMat, Vec<AlgReal>) {
        (amat(&[&[(-1, 2), (0, 1)], &[(0, 1), (-1, 3)]]), avec(&[(1, 1), (1, 1)]))
    }

    #[test]
    fn hull_drops_interior_and_collinear() {
        let pts: Vec<Vec<Rational>> = [(0, 0), (2, 0), (1, 0), (2, 2), (0, 2), (1, 1)]
            .iter()
            .map(|&(a, b)| vec![Rational::from(a), Rational::from(b)])
            .collect();
        assert_eq!(convex_hull_2d(&pts).len(), 4);
    }

    #[test]
    fn diag_pair_support_value() {
        let (a, b) = diag();
        let pair = build_polytope_pair(&a, &b, 6).unwrap();
        assert!(pair.achieved && pair.gap <= 1.0 / 64.0);
        assert!(pair.is_consistent());
        let up = pair.support_upper(&[Rational::from(1), Rational::from(1)]).unwrap();
        assert!((up.to_f64() - 5.0).abs() <= 1.0 / 64.0);
    }

    #[test]
    fn coarse_pair() {
        let (a, b) = diag();
        let pair = build_polytope_pair(&a, &b, 0).unwrap();
        assert!(pair.gap <= 1.0);
    }

    #[test]
    fn identity_combine_is_noop() {
        let (a, b) = diag();
        let pair = build_polytope_pair(&a, &b, 2).unwrap();
        let c = minkowski_combine(&[(pair.clone(), Mat::identity(2))], &[]).unwrap();
        assert_eq!(c.inner, pair.inner);
    }

    #[test]
    fn diag_membership() {
        let (a, b) = diag();
        let p = ReachProblem::new(a, Mat::from_cols(&[b]));
        let r = membership_semidecide(&p, &avec(&[(0, 1), (0, 1)]), 4).unwrap();
        assert!(matches!(r.verdict, MembershipVerdict::Reachable));
        let r = membership_semidecide(&p, &avec(&[(5, 1), (5, 1)]), 4).unwrap();
        assert!(matches!(r.verdict, MembershipVerdict::NotReachable));
        let sep = r.separation.unwrap();
        assert_eq!(sep.normal[0], sep.normal[1]);
    }

    #[test]
    fn diag_p8_timing() {
        let (a, b) = diag();
        let t = std::time::Instant::now();
        let pair = build_polytope_pair(&a, &b, 8).unwrap();
        eprintln!("p=8: {} dirs {:?} gap {}", pair.samples.len(), t.elapsed(), pair.gap);
        assert!(pair.achieved);
    }
}
