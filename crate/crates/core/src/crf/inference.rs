//! Forward–backward and Viterbi over dense score tables.
//!
//! `emissions` is row-major `T × L`, `transitions` is `L × L` indexed
//! `[prev * L + cur]`. Forward–backward uses scaled probabilities: each
//! position's emissions and the transition table are shifted by their
//! maxima before exponentiation and the shifts are added back to log Z.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ForwardBackward {
    pub log_z: f64,
    /// Log partition function recomputed from the backward pass.
    pub log_z_backward: f64,
    /// `T × L` per-position label marginals.
    pub marginals: Vec<f64>,
    /// `(T-1) × L × L` pairwise marginals for positions `t, t+1`.
    pub pair_marginals: Vec<f64>,
}

fn overflow(what: &str) -> Error {
    Error::NumericalOverflow(what.to_string())
}

pub fn forward_backward(emissions: &[f64], transitions: &[f64], n_labels: usize) -> Result<ForwardBackward> {
    let l = n_labels;
    let t_len = emissions.len() / l;
    if t_len == 0 {
        return Ok(ForwardBackward {
            log_z: 0.0,
            log_z_backward: 0.0,
            marginals: Vec::new(),
            pair_marginals: Vec::new(),
        });
    }
    let tmax = transitions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !tmax.is_finite() {
        return Err(overflow("transition weights"));
    }
    let k: Vec<f64> = transitions.iter().map(|&w| (w - tmax).exp()).collect();

    let mut shift = 0.0;
    let mut e = vec![0.0; t_len * l];
    for t in 0..t_len {
        let row = &emissions[t * l..(t + 1) * l];
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !m.is_finite() {
            return Err(overflow("emission scores"));
        }
        shift += m;
        for y in 0..l {
            e[t * l + y] = (row[y] - m).exp();
        }
    }
    shift += tmax * (t_len - 1) as f64;

    let mut alpha = vec![0.0; t_len * l];
    let mut scale = vec![0.0; t_len];
    alpha[..l].copy_from_slice(&e[..l]);
    for t in 0..t_len {
        if t > 0 {
            for y in 0..l {
                let mut s = 0.0;
                for yp in 0..l {
                    s += alpha[(t - 1) * l + yp] * k[yp * l + y];
                }
                alpha[t * l + y] = s * e[t * l + y];
            }
        }
        let c: f64 = alpha[t * l..(t + 1) * l].iter().sum();
        if !(c > 0.0 && c.is_finite()) {
            return Err(overflow("forward pass"));
        }
        scale[t] = c;
        alpha[t * l..(t + 1) * l].iter_mut().for_each(|a| *a /= c);
    }
    let log_scale: f64 = scale.iter().map(|c| c.ln()).sum();
    let log_z = log_scale + shift;

    let mut beta = vec![0.0; t_len * l];
    beta[(t_len - 1) * l..].iter_mut().for_each(|b| *b = 1.0);
    for t in (0..t_len - 1).rev() {
        for y in 0..l {
            let mut s = 0.0;
            for yn in 0..l {
                s += k[y * l + yn] * e[(t + 1) * l + yn] * beta[(t + 1) * l + yn];
            }
            beta[t * l + y] = s / scale[t + 1];
        }
    }
    let z0: f64 = (0..l).map(|y| e[y] * beta[y]).sum();
    if !(z0 > 0.0 && z0.is_finite()) {
        return Err(overflow("backward pass"));
    }
    let log_z_backward = z0.ln() + log_scale - scale[0].ln() + shift;

    let marginals: Vec<f64> = alpha.iter().zip(&beta).map(|(a, b)| a * b).collect();
    let mut pair_marginals = vec![0.0; (t_len - 1) * l * l];
    for t in 1..t_len {
        let base = (t - 1) * l * l;
        for yp in 0..l {
            let a = alpha[(t - 1) * l + yp];
            for y in 0..l {
                pair_marginals[base + yp * l + y] = a * k[yp * l + y] * e[t * l + y] * beta[t * l + y] / scale[t];
            }
        }
    }
    Ok(ForwardBackward {
        log_z,
        log_z_backward,
        marginals,
        pair_marginals,
    })
}

/// Unnormalised log score of a label path.
pub fn sequence_score(emissions: &[f64], transitions: &[f64], n_labels: usize, path: &[usize]) -> f64 {
    let mut s = 0.0;
    for (t, &y) in path.iter().enumerate() {
        s += emissions[t * n_labels + y];
        if t > 0 {
            s += transitions[path[t - 1] * n_labels + y];
        }
    }
    s
}

/// Highest-scoring path. Ties go to the lowest label id.
pub fn viterbi(emissions: &[f64], transitions: &[f64], n_labels: usize) -> Vec<usize> {
    let l = n_labels;
    let t_len = emissions.len() / l;
    if t_len == 0 {
        return Vec::new();
    }
    let mut delta = emissions[..l].to_vec();
    let mut back = vec![0usize; t_len * l];
    for t in 1..t_len {
        let mut next = vec![0.0; l];
        for y in 0..l {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for yp in 0..l {
                let s = delta[yp] + transitions[yp * l + y];
                if s > best {
                    best = s;
                    arg = yp;
                }
            }
            next[y] = best + emissions[t * l + y];
            back[t * l + y] = arg;
        }
        delta = next;
    }
    let mut best = f64::NEG_INFINITY;
    let mut y = 0;
    for (cand, &s) in delta.iter().enumerate() {
        if s > best {
            best = s;
            y = cand;
        }
    }
    let mut path = vec![0; t_len];
    path[t_len - 1] = y;
    for t in (1..t_len).rev() {
        y = back[t * l + y];
        path[t - 1] = y;
    }
    path
}
