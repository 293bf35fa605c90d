//! Lawson-Hanson active-set solver for `min ‖Ax − b‖₂ subject to x ≥ 0`.

use nalgebra::{DMatrix, DVector};

use crate::svd::svd_real;

#[derive(Debug, Clone)]
pub struct NnlsSolution {
    pub x: DVector<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn solve_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[usize]) -> DVector<f64> {
    let sub = DMatrix::from_fn(a.nrows(), passive.len(), |i, j| a[(i, passive[j])]);
    let z = svd_real(&sub).solve(b, 1e-13);
    let mut full = DVector::zeros(a.ncols());
    for (k, &j) in passive.iter().enumerate() {
        full[j] = z[k];
    }
    full
}

pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> NnlsSolution {
    let n = a.ncols();
    let mut x = DVector::<f64>::zeros(n);
    let mut passive: Vec<usize> = Vec::new();
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0)
        * b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let tol = 1e-13 * scale * (a.nrows().max(n) as f64);
    let max_outer = 3 * n + 10;
    let mut iterations = 0;

    if n == 0 {
        return NnlsSolution {
            x,
            residual: b.norm(),
            iterations,
        };
    }

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|j| !passive.contains(j))
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let t = match candidate {
            Some(t) if w[t] > tol => t,
            _ => break,
        };
        passive.push(t);

        loop {
            iterations += 1;
            let s = solve_passive(a, b, &passive);
            if passive.iter().all(|&j| s[j] > 0.0) {
                x = s;
                break;
            }
            // step back to the boundary of the feasible region
            let alpha = passive
                .iter()
                .filter(|&&j| s[j] <= 0.0)
                .map(|&j| x[j] / (x[j] - s[j]))
                .fold(f64::INFINITY, f64::min);
            for &j in &passive {
                x[j] += alpha * (s[j] - x[j]);
            }
            passive.retain(|&j| x[j] > tol);
            for j in 0..n {
                if !passive.contains(&j) {
                    x[j] = 0.0;
                }
            }
            if passive.is_empty() || iterations > 20 * max_outer {
                break;
            }
        }
    }

    let residual = (a * &x - b).norm();
    NnlsSolution {
        x,
        residual,
        iterations,
    }
}
