//! Dense symmetric positive-definite solves via Cholesky with a jitter
//! escalation policy for near-singular kernel matrices.

use crate::error::{CoreError, Result};

/// Dense symmetric matrix, row-major storage.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SpdMatrix {
    /// Build from row-major entries. Symmetry is enforced to 1e-10 relative
    /// tolerance; positive definiteness is only established at factorization.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(CoreError::InvalidArgument("SpdMatrix: bad dimensions"));
        }
        let scale = entries.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for i in 0..dim {
            for j in (i + 1)..dim {
                let a = entries[i * dim + j];
                let b = entries[j * dim + i];
                if (a - b).abs() > 1e-10 * scale {
                    return Err(CoreError::InvalidArgument("SpdMatrix: not symmetric"));
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(dim: usize, mut f: F) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                let v = f(i, j);
                entries[i * dim + j] = v;
                entries[j * dim + i] = v;
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Factor as L L^T, adding jitter to the diagonal if needed: starting at
    /// 1e-10 * mean(diag) and escalating tenfold up to 1e-4 * mean(diag).
    pub fn cholesky(&self) -> Result<Cholesky> {
        let n = self.dim;
        let mean_diag = (0..n).map(|i| self.get(i, i)).sum::<f64>() / n as f64;
        let base = mean_diag.abs().max(f64::MIN_POSITIVE);
        let mut rel = 0.0;
        loop {
            let jitter = base * rel;
            if let Some(l) = try_factor(&self.entries, n, jitter) {
                return Ok(Cholesky {
                    dim: n,
                    l,
                    jitter,
                });
            }
            rel = if rel == 0.0 { 1e-10 } else { rel * 10.0 };
            if rel > 1e-4 {
                return Err(CoreError::NotPositiveDefinite);
            }
        }
    }

    /// Solve m v = b through the jittered factorization.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.dim {
            return Err(CoreError::InvalidArgument("spd_solve: dimension mismatch"));
        }
        Ok(self.cholesky()?.solve(b))
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// Lower-triangular Cholesky factor of a (possibly jittered) SPD matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    dim: usize,
    l: Vec<f64>,
    jitter: f64,
}

impl Cholesky {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Jitter that was added to the diagonal to make the factorization
    /// succeed (0 when none was needed).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Solve (L L^T) x = b.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = self.solve_lower(b);
        self.solve_lower_transpose_in_place(&mut x);
        x
    }

    /// Forward substitution: solve L y = b.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for j in 0..i {
                s -= self.l[i * n + j] * y[j];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }

    /// Back substitution: solve L^T x = y in place.
    pub fn solve_lower_transpose_in_place(&self, y: &mut [f64]) {
        let n = self.dim;
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..n {
                s -= self.l[j * n + i] * y[j];
            }
            y[i] = s / self.l[i * n + i];
        }
    }

    /// log det of the factored matrix.
    pub fn log_det(&self) -> f64 {
        let n = self.dim;
        2.0 * (0..n).map(|i| self.l[i * n + i].ln()).sum::<f64>()
    }

    /// L v. With v standard normal this draws from N(0, L L^T).
    pub fn lower_times(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..=i).map(|j| self.l[i * n + j] * v[j]).sum())
            .collect()
    }
}

fn try_factor(entries: &[f64], n: usize, jitter: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = entries[i * n + j];
            if i == j {
                s += jitter;
            }
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) || !s.is_finite() {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Solve m v = b for a symmetric positive-definite m (after jitter).
pub fn spd_solve(m: &SpdMatrix, b: &[f64]) -> Result<Vec<f64>> {
    m.solve(b)
}
