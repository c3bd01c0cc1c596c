//! Orthant-wise limited-memory quasi-Newton minimisation of
//! `f(x) + c1 * |x|_1` for a smooth `f`. With `c1 = 0` this is plain
//! L-BFGS with a backtracking Armijo line search.

use std::collections::VecDeque;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OwlqnParams {
    pub c1: f64,
    pub max_iterations: usize,
    /// Stop when `|pg| / max(1, |x|)` falls below this.
    pub tolerance: f64,
    pub memory: usize,
    pub max_linesearch: usize,
    /// Armijo sufficient-decrease constant.
    pub ftol: f64,
}

impl Default for OwlqnParams {
    fn default() -> Self {
        Self {
            c1: 0.0,
            max_iterations: 100,
            tolerance: 1e-5,
            memory: 6,
            max_linesearch: 20,
            ftol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIterations,
    LineSearchFailed,
}

#[derive(Debug, Clone)]
pub struct OwlqnResult {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Full objective (smooth part plus L1) before the first step and
    /// after every accepted step.
    pub history: Vec<f64>,
    pub gradient_norm: f64,
    pub stop: StopReason,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// Minimum-norm subgradient of `f + c1 |x|_1`.
pub fn pseudo_gradient(x: &[f64], g: &[f64], c1: f64) -> Vec<f64> {
    if c1 == 0.0 {
        return g.to_vec();
    }
    x.iter()
        .zip(g)
        .map(|(&xi, &gi)| {
            if xi < 0.0 {
                gi - c1
            } else if xi > 0.0 {
                gi + c1
            } else if gi + c1 < 0.0 {
                gi + c1
            } else if gi - c1 > 0.0 {
                gi - c1
            } else {
                0.0
            }
        })
        .collect()
}

/// Minimises `eval(x, grad) + c1 |x|_1`, where `eval` returns the smooth
/// objective and writes its gradient.
pub fn minimize<F>(x0: Vec<f64>, params: &OwlqnParams, mut eval: F) -> Result<OwlqnResult>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<f64>,
{
    let n = x0.len();
    let c1 = params.c1;
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut fx = eval(&x, &mut g)? + c1 * l1(&x);
    let mut history = vec![fx];
    let mut pg = pseudo_gradient(&x, &g, c1);
    let mut mem: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut increases = 0;

    let converged = |pg: &[f64], x: &[f64]| norm(pg) / norm(x).max(1.0) < params.tolerance;
    if converged(&pg, &x) {
        return Ok(OwlqnResult {
            gradient_norm: norm(&pg),
            x,
            objective: fx,
            iterations: 0,
            history,
            stop: StopReason::Converged,
        });
    }

    let mut d: Vec<f64> = pg.iter().map(|v| -v).collect();
    let mut step = 1.0 / norm(&pg).max(f64::MIN_POSITIVE);
    let mut iterations = 0;
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let stop = loop {
        if c1 > 0.0 {
            for (di, pi) in d.iter_mut().zip(&pg) {
                if *di * pi >= 0.0 {
                    *di = 0.0;
                }
            }
        }
        let orthant: Vec<f64> = x
            .iter()
            .zip(&pg)
            .map(|(&xi, &pi)| if xi != 0.0 { xi.signum() } else if pi != 0.0 { -pi.signum() } else { 0.0 })
            .collect();

        let mut accepted = None;
        for _ in 0..params.max_linesearch {
            for i in 0..n {
                let v = x[i] + step * d[i];
                x_new[i] = if c1 > 0.0 && v * orthant[i] <= 0.0 { 0.0 } else { v };
            }
            let f_new = eval(&x_new, &mut g_new)? + c1 * l1(&x_new);
            if !f_new.is_finite() {
                step *= 0.5;
                continue;
            }
            let decrease: f64 = pg.iter().zip(x_new.iter().zip(&x)).map(|(p, (a, b))| p * (a - b)).sum();
            if f_new <= fx + params.ftol * decrease {
                accepted = Some(f_new);
                break;
            }
            step *= 0.5;
        }
        let Some(f_new) = accepted else {
            break StopReason::LineSearchFailed;
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-10 {
            if mem.len() == params.memory {
                mem.pop_front();
            }
            mem.push_back((s, y, sy));
        }
        if f_new > fx {
            increases += 1;
            if increases > 5 {
                return Err(Error::DivergenceDetected(iterations + 1));
            }
        }
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        fx = f_new;
        history.push(fx);
        iterations += 1;
        pg = pseudo_gradient(&x, &g, c1);

        if converged(&pg, &x) {
            break StopReason::Converged;
        }
        if iterations >= params.max_iterations {
            break StopReason::MaxIterations;
        }

        // Two-loop recursion.
        let mut q = pg.clone();
        let mut alphas = Vec::with_capacity(mem.len());
        for (s, y, sy) in mem.iter().rev() {
            let a = dot(s, &q) / sy;
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        if let Some((_, y, sy)) = mem.back() {
            let gamma = sy / dot(y, y);
            q.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, y, sy), a) in mem.iter().zip(alphas.iter().rev()) {
            let b = dot(y, &q) / sy;
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        d = q.into_iter().map(|v| -v).collect();
        step = 1.0;
    };
    Ok(OwlqnResult {
        gradient_norm: norm(&pg),
        x,
        objective: fx,
        iterations,
        history,
        stop,
    })
}
