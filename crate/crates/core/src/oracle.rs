//! Brute-force under-approximation of reachable sets by simulating
//! piecewise-constant controls with the exact per-step map
//! `x_{k+1} = exp(AΔ) x_k + (∫_0^Δ exp(As) ds) B u_k`.

use crate::algnum::{exp_and_integral, start_prec, AMat, DyInterval, IMat, MAX_PREC};
use crate::model::{InputSet, ReachProblem};
use crate::ReachError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct ControlSchedule {
    pub step: Rational,
    pub values: Vec<Vec<Rational>>,
}

impl ControlSchedule {
    pub fn constant(step: Rational, u: Vec<Rational>, len: usize) -> Self {
        ControlSchedule { step, values: vec![u; len] }
    }

    pub fn total_time(&self) -> Rational {
        Rational::from(&self.step * self.values.len() as u32)
    }
}

fn step_maps(a: &AMat, b: &AMat, step: &Rational, prec: u32) -> (IMat, IMat) {
    let h = DyInterval::from_rational(step, prec);
    exp_and_integral(&a.enclose(prec), &b.enclose(prec), &h)
}

/// Enclosure of `x(T)` for the schedule, of width at most `tol`.
pub fn simulate_schedule(a: &AMat, b: &AMat, sched: &ControlSchedule, tol: f64) -> Result<Vec<DyInterval>, ReachError> {
    let n = a.rows;
    if b.rows != n || sched.values.iter().any(|u| u.len() != b.cols) {
        return Err(ReachError::DimensionMismatch("schedule values do not match B".into()));
    }
    if sched.step <= 0 && !sched.values.is_empty() {
        return Err(ReachError::Parse { field: "step".into(), msg: "must be positive".into() });
    }
    let mut prec = start_prec();
    loop {
        let mut x = vec![DyInterval::zero(prec); n];
        if !sched.values.is_empty() {
            let (phi, psi) = step_maps(a, b, &sched.step, prec);
            for u in &sched.values {
                let ue: Vec<DyInterval> = u.iter().map(|q| DyInterval::from_rational(q, prec)).collect();
                let px = phi.mul_vec(&x);
                let bu = psi.mul_vec(&ue);
                x = px.iter().zip(&bu).map(|(p, q)| p + q).collect();
            }
        }
        let w = x.iter().map(|v| v.width_f64()).fold(0.0, f64::max);
        if w <= tol {
            return Ok(x);
        }
        prec *= 2;
        if prec > MAX_PREC {
            return Err(ReachError::PrecisionExhausted(format!("simulation width {:e} above {:e}", w, tol)));
        }
    }
}

/// A certified reachable point: the true endpoint lies within `err` (max
/// norm) of `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct CloudPoint {
    pub x: Vec<f64>,
    pub err: f64,
}

/// Column contributions `W_k = exp(AΔ)^{N-1-k} Ψ` of each step to the final
/// state, as `f64` midpoints with a common error radius.
struct Contributions {
    w: Vec<Vec<Vec<f64>>>,
    err: f64,
}

fn contributions(a: &AMat, b: &AMat, step: &Rational, steps: usize) -> Contributions {
    let prec = start_prec();
    let (phi, psi) = step_maps(a, b, step, prec);
    let n = a.rows;
    let m = b.cols;
    let mut out = vec![vec![vec![0.0; m]; n]; steps];
    let mut cur = psi;
    let mut err = 0.0f64;
    for k in (0..steps).rev() {
        for i in 0..n {
            for j in 0..m {
                let v = cur.get(i, j);
                out[k][i][j] = v.mid_f64();
                err = err.max(v.rad_f64() + v.mid_f64().abs() * f64::EPSILON);
            }
        }
        cur = phi.mul(&cur);
    }
    Contributions { w: out, err }
}

impl Contributions {
    fn endpoint(&self, u: &[Vec<f64>]) -> CloudPoint {
        let n = self.w.first().map(|w| w.len()).unwrap_or(0);
        let mut x = vec![0.0; n];
        let mut mag = 0.0f64;
        for (wk, uk) in self.w.iter().zip(u) {
            for (i, row) in wk.iter().enumerate() {
                for (wij, uj) in row.iter().zip(uk) {
                    x[i] += wij * uj;
                    mag += (wij * uj).abs();
                }
            }
        }
        let steps = self.w.len() as f64;
        // interval radii plus accumulated f64 rounding
        let err = self.err * steps * u.first().map(|v| v.len()).unwrap_or(1) as f64 + 2.0 * steps * f64::EPSILON * mag;
        CloudPoint { x, err }
    }

    /// Discrete maximizer of `c^T x(T)` over bang-bang schedules.
    fn extremal(&self, c: &[f64]) -> Vec<Vec<f64>> {
        self.w
            .iter()
            .map(|wk| {
                let m = wk.first().map(|r| r.len()).unwrap_or(0);
                (0..m)
                    .map(|j| {
                        let s: f64 = wk.iter().zip(c).map(|(row, ci)| row[j] * ci).sum();
                        if s >= 0.0 {
                            1.0
                        } else {
                            -1.0
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// `count` certified reachable endpoints at time `horizon` from seeded random
/// and extremal bang-bang schedules with `steps` equal steps. For singleton
/// input sets the cloud is the orbit sampled at every step.
pub fn sample_reachable_cloud(
    p: &ReachProblem,
    count: usize,
    horizon: &Rational,
    steps: usize,
    seed: u64,
) -> Result<Vec<CloudPoint>, ReachError> {
    p.validate()?;
    let n = p.n();
    if count == 0 || steps == 0 {
        return Ok(Vec::new());
    }
    let step = Rational::from(horizon / steps as u32);
    match &p.input_set {
        InputSet::Zero => Ok(vec![CloudPoint { x: vec![0.0; n], err: 0.0 }]),
        InputSet::Singleton(u) => {
            let uf: Vec<f64> = u.iter().map(|q| q.to_f64()).collect();
            let mut out = Vec::new();
            for k in 1..=steps.min(count) {
                let contrib = contributions(&p.a, &p.b, &step, k);
                out.push(contrib.endpoint(&vec![uf.clone(); k]));
            }
            Ok(out)
        }
        InputSet::Hypercube => {
            let contrib = contributions(&p.a, &p.b, &step, steps);
            let m = p.m();
            let pts = (0..count)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(i as u64);
                    let u = if i % 2 == 0 {
                        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        contrib.extremal(&c)
                    } else {
                        (0..steps).map(|_| (0..m).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()).collect()
                    };
                    contrib.endpoint(&u)
                })
                .collect();
            Ok(pts)
        }
    }
}

/// Endpoint of the discrete schedule maximizing `c^T x(T)`.
pub fn extremal_endpoint(a: &AMat, b: &AMat, c: &[f64], horizon: &Rational, steps: usize) -> CloudPoint {
    let step = Rational::from(horizon / steps as u32);
    let contrib = contributions(a, b, &step, steps);
    contrib.endpoint(&contrib.extremal(c))
}

/// Seeded random directions on the unit circle or sphere.
pub fn random_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r > 1e-3 && r <= 1.0 {
                break v.iter().map(|x| x / r).collect();
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::amat;

    #[test]
    fn empty_schedule() {
        let a = amat(&[&[(-1, 2), (0, 1)], &[(0, 1), (-1, 3)]]);
        let b = amat(&[&[(1, 1)], &[(1, 1)]]);
        let s = ControlSchedule { step: Rational::from(1), values: vec![] };
        let x = simulate_schedule(&a, &b, &s, 1e-12).unwrap();
        assert!(x.iter().all(|v| v.contains_rational(&Rational::new())));
    }

    #[test]
    fn constant_input_diag() {
        let a = amat(&[&[(-1, 2), (0, 1)], &[(0, 1), (-1, 3)]]);
        let b = amat(&[&[(1, 1)], &[(1, 1)]]);
        let s = ControlSchedule::constant(Rational::from(1), vec![Rational::from(1)], 50);
        let x = simulate_schedule(&a, &b, &s, 1e-12).unwrap();
        let ex = [2.0 * (1.0 - (-25.0f64).exp()), 3.0 * (1.0 - (-50.0f64 / 3.0).exp())];
        for i in 0..2 {
            assert!((x[i].mid_f64() - ex[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn car_double_integrator() {
        let a = amat(&[&[(0, 1), (1, 1)], &[(0, 1), (0, 1)]]);
        let b = amat(&[&[(0, 1)], &[(1, 1)]]);
        let s = ControlSchedule::constant(Rational::from((1, 4)), vec![Rational::from(1)], 4);
        let x = simulate_schedule(&a, &b, &s, 1e-12).unwrap();
        assert!(x[0].contains_rational(&Rational::from((1, 2))));
        assert!(x[1].contains_rational(&Rational::from(1)));
    }
}
