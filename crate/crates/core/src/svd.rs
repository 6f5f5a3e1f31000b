//! Truncated SVD of sparse rating matrices.
//!
//! Large problems go through Golub–Kahan–Lanczos bidiagonalization with full
//! reorthogonalization; the small bidiagonal core and any problem whose
//! requested rank is close to `min(m, n)` are solved with one-sided
//! (Hestenes) Jacobi, which is exact up to rounding.

use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SvdError {
    #[error("rank {k} outside 1..={max}")]
    RankOutOfRange { k: usize, max: usize },
    #[error("jacobi SVD did not converge within {sweeps} sweeps")]
    JacobiNoConvergence { sweeps: usize },
    #[error("lanczos SVD did not converge with {steps} steps (residual {residual:e})")]
    LanczosNoConvergence { steps: usize, residual: f64 },
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row `(column, value)` lists; columns need not be sorted.
    pub fn from_rows(cols: usize, rows: &[Vec<(usize, f64)>]) -> Self {
        let mut indptr = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for row in rows {
            let mut row = row.clone();
            row.sort_unstable_by_key(|&(c, _)| c);
            for (c, v) in row {
                assert!(c < cols, "column {c} out of bounds");
                indices.push(c);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            rows: rows.len(),
            cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn from_dense(a: &Array2<f64>) -> Self {
        let rows: Vec<Vec<(usize, f64)>> = a
            .outer_iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(c, v)| (c, *v))
                    .collect()
            })
            .collect();
        Self::from_rows(a.ncols(), &rows)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.rows, self.cols));
        for r in 0..self.rows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                out[[r, self.indices[k]]] = self.values[k];
            }
        }
        out
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: ArrayView1<f64>) -> Array1<f64> {
        let mut y = Array1::zeros(self.rows);
        for r in 0..self.rows {
            let mut acc = 0.0;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            y[r] = acc;
        }
        y
    }

    /// `y = Aᵀ x`
    pub fn mul_t_vec(&self, x: ArrayView1<f64>) -> Array1<f64> {
        let mut y = Array1::zeros(self.cols);
        for r in 0..self.rows {
            let xr = x[r];
            if xr == 0.0 {
                continue;
            }
            for k in self.indptr[r]..self.indptr[r + 1] {
                y[self.indices[k]] += self.values[k] * xr;
            }
        }
        y
    }

    /// `A · B` for a dense `B`.
    pub fn mul_dense(&self, b: &Array2<f64>) -> Array2<f64> {
        let mut out = Array2::zeros((self.rows, b.ncols()));
        for r in 0..self.rows {
            let mut row = out.row_mut(r);
            for k in self.indptr[r]..self.indptr[r + 1] {
                row.scaled_add(self.values[k], &b.row(self.indices[k]));
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SvdOptions {
    /// Seed of the Lanczos start vector.
    pub seed: u64,
    /// Relative residual `‖Aᵀuᵢ − σᵢvᵢ‖ / σ₁` required for every kept triplet.
    pub tolerance: f64,
    pub max_jacobi_sweeps: usize,
}

impl Default for SvdOptions {
    fn default() -> Self {
        SvdOptions {
            seed: 0x5eed_cafe,
            tolerance: 1e-10,
            max_jacobi_sweeps: 60,
        }
    }
}

/// `A ≈ U · diag(S) · Vᵀ` with `U: m×k`, `V: n×k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd {
    pub u: Array2<f64>,
    pub s: Vec<f64>,
    pub v: Array2<f64>,
    /// Lanczos steps used; 0 when the dense solver ran.
    pub lanczos_steps: usize,
}

impl TruncatedSvd {
    pub fn reconstruct(&self) -> Array2<f64> {
        let mut us = self.u.clone();
        for (j, s) in self.s.iter().enumerate() {
            us.column_mut(j).mapv_inplace(|x| x * s);
        }
        us.dot(&self.v.t())
    }
}

pub fn truncated_svd(a: &CsrMatrix, k: usize, opts: &SvdOptions) -> Result<TruncatedSvd, SvdError> {
    let (m, n) = a.shape();
    let max = m.min(n);
    if k == 0 || k > max {
        return Err(SvdError::RankOutOfRange { k, max });
    }
    let mut steps = (3 * k).max(2 * k + 20);
    while steps < max {
        match lanczos(a, k, steps, opts) {
            Ok(svd) => return Ok(svd),
            Err(SvdError::LanczosNoConvergence { .. }) => steps *= 2,
            Err(other) => return Err(other),
        }
    }
    dense_truncated(&a.to_dense(), k, opts)
}

/// Full SVD via one-sided Jacobi, truncated to `k`.
pub fn dense_truncated(a: &Array2<f64>, k: usize, opts: &SvdOptions) -> Result<TruncatedSvd, SvdError> {
    let max = a.nrows().min(a.ncols());
    if k == 0 || k > max {
        return Err(SvdError::RankOutOfRange { k, max });
    }
    let (u, s, v) = jacobi_svd(a, opts.max_jacobi_sweeps)?;
    let mut out = TruncatedSvd {
        u: u.slice(ndarray::s![.., ..k]).to_owned(),
        s: s[..k].to_vec(),
        v: v.slice(ndarray::s![.., ..k]).to_owned(),
        lanczos_steps: 0,
    };
    canonical_signs(&mut out);
    Ok(out)
}

fn lanczos(a: &CsrMatrix, k: usize, steps: usize, opts: &SvdOptions) -> Result<TruncatedSvd, SvdError> {
    let (m, n) = a.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut us: Vec<Array1<f64>> = Vec::with_capacity(steps);
    let mut vs: Vec<Array1<f64>> = Vec::with_capacity(steps + 1);
    let mut alphas = Vec::with_capacity(steps);
    let mut betas = Vec::with_capacity(steps);

    // Start inside the row space so that the V basis never picks up null-space directions.
    let v0 = match row_space_vector(a, &vs, &mut rng, m) {
        Some(v) => v,
        None => {
            // Zero matrix: every singular value is zero.
            return zero_svd(m, n, k);
        }
    };
    vs.push(v0);
    let mut beta_prev = 0.0;
    let mut exhausted = false;

    for j in 0..steps {
        let mut u = a.mul_vec(vs[j].view());
        if j > 0 {
            u.scaled_add(-beta_prev, &us[j - 1]);
        }
        reorthogonalize(&mut u, &us);
        let mut alpha = norm(&u);
        if alpha <= 1e-13 * (1.0 + alpha) || !alpha.is_finite() {
            alpha = 0.0;
            u = random_orthonormal(m, &us, &mut rng);
        } else {
            u /= alpha;
        }
        us.push(u);
        alphas.push(alpha);

        let mut v = a.mul_t_vec(us[j].view());
        v.scaled_add(-alpha, &vs[j]);
        reorthogonalize(&mut v, &vs);
        let mut beta = norm(&v);
        if beta <= 1e-13 * (1.0 + alphas.iter().fold(0.0f64, |x, y| x.max(*y))) {
            beta = 0.0;
            match row_space_vector(a, &vs, &mut rng, m) {
                Some(nv) => v = nv,
                None => {
                    betas.push(0.0);
                    exhausted = true;
                    break;
                }
            }
        } else {
            v /= beta;
        }
        betas.push(beta);
        vs.push(v);
        beta_prev = beta;
    }

    let s_dim = alphas.len();
    let mut b = Array2::zeros((s_dim, s_dim));
    for i in 0..s_dim {
        b[[i, i]] = alphas[i];
        if i + 1 < s_dim {
            b[[i, i + 1]] = betas[i];
        }
    }
    let (p, sigma, q) = jacobi_svd(&b, opts.max_jacobi_sweeps)?;
    let beta_last = if exhausted { 0.0 } else { *betas.last().unwrap_or(&0.0) };
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let kept = k.min(s_dim);
    let worst = (0..kept)
        .map(|i| (beta_last * p[[s_dim - 1, i]]).abs())
        .fold(0.0f64, f64::max);
    if !exhausted && worst > opts.tolerance * sigma_max.max(f64::MIN_POSITIVE) {
        return Err(SvdError::LanczosNoConvergence {
            steps,
            residual: worst / sigma_max.max(f64::MIN_POSITIVE),
        });
    }
    if kept < k {
        // Rank deficiency exhausted the Krylov space before k triplets; the
        // remaining singular values are zero and need a completed basis.
        return dense_truncated(&a.to_dense(), k, opts);
    }

    let mut u_out = Array2::zeros((m, k));
    let mut v_out = Array2::zeros((n, k));
    for i in 0..k {
        let mut uc = Array1::zeros(m);
        for (j, uj) in us.iter().enumerate() {
            uc.scaled_add(p[[j, i]], uj);
        }
        let mut vc = Array1::zeros(n);
        for (j, vj) in vs.iter().take(s_dim).enumerate() {
            vc.scaled_add(q[[j, i]], vj);
        }
        u_out.column_mut(i).assign(&uc);
        v_out.column_mut(i).assign(&vc);
    }
    let mut out = TruncatedSvd {
        u: u_out,
        s: sigma[..k].to_vec(),
        v: v_out,
        lanczos_steps: s_dim,
    };
    canonical_signs(&mut out);
    Ok(out)
}

fn zero_svd(m: usize, n: usize, k: usize) -> Result<TruncatedSvd, SvdError> {
    Ok(TruncatedSvd {
        u: Array2::eye(m).slice(ndarray::s![.., ..k]).to_owned(),
        s: vec![0.0; k],
        v: Array2::eye(n).slice(ndarray::s![.., ..k]).to_owned(),
        lanczos_steps: 0,
    })
}

fn norm(x: &Array1<f64>) -> f64 {
    x.dot(x).sqrt()
}

/// Two passes of classical Gram–Schmidt against `basis`.
fn reorthogonalize(x: &mut Array1<f64>, basis: &[Array1<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = b.dot(x);
            x.scaled_add(-c, b);
        }
    }
}

fn random_orthonormal(dim: usize, basis: &[Array1<f64>], rng: &mut ChaCha8Rng) -> Array1<f64> {
    loop {
        let mut x = Array1::from_iter((0..dim).map(|_| rng.random::<f64>() - 0.5));
        reorthogonalize(&mut x, basis);
        let nx = norm(&x);
        if nx > 1e-8 {
            return x / nx;
        }
    }
}

/// A unit vector `Aᵀr` orthogonalized against `basis`, or `None` once the
/// row space is spanned.
fn row_space_vector(
    a: &CsrMatrix,
    basis: &[Array1<f64>],
    rng: &mut ChaCha8Rng,
    m: usize,
) -> Option<Array1<f64>> {
    for _ in 0..3 {
        let r = Array1::from_iter((0..m).map(|_| rng.random::<f64>() - 0.5));
        let mut v = a.mul_t_vec(r.view());
        let scale = norm(&v);
        if scale == 0.0 {
            return None;
        }
        reorthogonalize(&mut v, basis);
        let nv = norm(&v);
        if nv > 1e-10 * scale {
            return Some(v / nv);
        }
    }
    None
}

/// Flips each triplet so the largest-magnitude entry of its right vector is positive.
fn canonical_signs(svd: &mut TruncatedSvd) {
    for j in 0..svd.s.len() {
        let col = svd.v.column(j);
        let mut best = 0.0f64;
        let mut sign = 1.0;
        for &x in col.iter() {
            if x.abs() > best {
                best = x.abs();
                sign = x.signum();
            }
        }
        if sign < 0.0 {
            svd.v.column_mut(j).mapv_inplace(|x| -x);
            svd.u.column_mut(j).mapv_inplace(|x| -x);
        }
    }
}

/// `(U, S, V)` of a thin SVD.
pub type ThinSvd = (Array2<f64>, Vec<f64>, Array2<f64>);

/// Thin SVD `A = U diag(S) Vᵀ` via one-sided Jacobi. Returns `U: m×r`,
/// `S: r`, `V: n×r` with `r = min(m, n)`, singular values sorted descending.
pub fn jacobi_svd(a: &Array2<f64>, max_sweeps: usize) -> Result<ThinSvd, SvdError> {
    let (m, n) = a.dim();
    if n > m {
        let (u, s, v) = jacobi_svd(&a.t().to_owned(), max_sweeps)?;
        return Ok((v, s, u));
    }
    // Orthogonalize the columns of W = A·V; V accumulates the rotations.
    let mut w = a.clone();
    let mut v = Array2::<f64>::eye(n);
    let eps = f64::EPSILON;
    // Columns this small relative to the whole matrix are numerically zero.
    let floor = eps * eps * a.iter().map(|x| x * x).sum::<f64>();
    let mut converged = n < 2;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for i in 0..n.saturating_sub(1) {
            for j in (i + 1)..n {
                let (alpha, beta, gamma) = {
                    let ci = w.column(i);
                    let cj = w.column(j);
                    (ci.dot(&ci), cj.dot(&cj), ci.dot(&cj))
                };
                if gamma == 0.0 || alpha <= floor || beta <= floor || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, i, j, c, s);
                rotate_columns(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SvdError::JacobiNoConvergence { sweeps: max_sweeps });
    }

    let norms: Vec<f64> = w.axis_iter(Axis(1)).map(|c| c.dot(&c).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));

    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let smax = s.first().copied().unwrap_or(0.0);
    let mut u = Array2::zeros((m, n));
    let mut v_sorted = Array2::zeros((n, n));
    let mut basis: Vec<Array1<f64>> = Vec::with_capacity(n);
    let mut pending = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        v_sorted.column_mut(dst).assign(&v.column(src));
        if norms[src] > smax * 1e-14 && norms[src] > 0.0 {
            let col = w.column(src).to_owned() / norms[src];
            u.column_mut(dst).assign(&col);
            basis.push(col);
        } else {
            pending.push(dst);
        }
    }
    // Complete U with an orthonormal basis for zero singular values.
    let mut e = 0;
    for dst in pending {
        while e < m {
            let mut x = Array1::zeros(m);
            x[e] = 1.0;
            e += 1;
            reorthogonalize(&mut x, &basis);
            let nx = norm(&x);
            if nx > 1e-6 {
                let col = x / nx;
                u.column_mut(dst).assign(&col);
                basis.push(col);
                break;
            }
        }
    }
    Ok((u, s, v_sorted))
}

fn rotate_columns(x: &mut Array2<f64>, i: usize, j: usize, c: f64, s: f64) {
    for r in 0..x.nrows() {
        let xi = x[[r, i]];
        let xj = x[[r, j]];
        x[[r, i]] = c * xi - s * xj;
        x[[r, j]] = s * xi + c * xj;
    }
}
