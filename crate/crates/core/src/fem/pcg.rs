//! Matrix-free preconditioned conjugate gradients with a Jacobi
//! (diagonal) preconditioner.
//!
//! The operator is supplied as a closure so callers can evaluate the
//! matrix-vector product element-by-element without ever assembling a
//! sparse matrix. All reductions are plain sequential loops, so results
//! are bit-reproducible across runs and thread counts.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct PcgOutcome {
    pub iterations: usize,
    /// Final residual norm relative to the right-hand side norm.
    pub relative_residual: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` for symmetric positive-definite `A`, starting from
/// the initial guess in `x`. Convergence criterion: `|b - A x| <= tol |b|`.
/// A zero right-hand side returns `x = 0` immediately.
pub fn solve(
    mut apply: impl FnMut(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<PcgOutcome> {
    let n = b.len();
    assert_eq!(x.len(), n);
    assert_eq!(diag.len(), n);

    let norm_b = norm(b);
    if norm_b == 0.0 {
        x.fill(0.0);
        return Ok(PcgOutcome {
            iterations: 0,
            relative_residual: 0.0,
        });
    }

    let precond = |r: &[f64], z: &mut [f64]| {
        for i in 0..n {
            let d = diag[i];
            z[i] = if d > 0.0 { r[i] / d } else { r[i] };
        }
    };

    let mut r = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ap = vec![0.0; n];

    apply(x, &mut ap);
    for i in 0..n {
        r[i] = b[i] - ap[i];
    }
    let mut rel = norm(&r) / norm_b;
    if rel <= tol {
        return Ok(PcgOutcome {
            iterations: 0,
            relative_residual: rel,
        });
    }

    precond(&r, &mut z);
    p.copy_from_slice(&z);
    let mut rz = dot(&r, &z);
    let mut history = Vec::new();

    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Singular(format!(
                "conjugate-gradient breakdown: p^T A p = {pap:.3e} at iteration {it}"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = norm(&r) / norm_b;
        history.push(rel);
        if rel <= tol {
            return Ok(PcgOutcome {
                iterations: it,
                relative_residual: rel,
            });
        }
        precond(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }

    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: rel,
        history,
    })
}
