//! Hermitian eigensolver and the spectral quantities built on it.
//!
//! The solver is a cyclic complex Jacobi method: every off-diagonal pair
//! `(p, q)` is annihilated by a 2x2 unitary similarity, sweeping until the
//! off-diagonal Frobenius mass drops below `tol * ||H||_F`. For Hermitian
//! input this is unconditionally accurate, and at the dimensions this crate
//! targets (n <= 64) its cost is irrelevant next to its simplicity.

use crate::error::{Error, Result};
use crate::matrix::{Complex, Matrix};

pub const DEFAULT_EIG_TOL: f64 = 1e-13;
pub const MAX_SWEEPS: usize = 60;

/// Relative asymmetry allowed on input to [`hermitian_eig`].
pub const HERMITIAN_THRESHOLD: f64 = 1e-12;

/// Full eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: Matrix,
    /// Off-diagonal Frobenius mass left when the sweep stopped. By Weyl's
    /// inequality every eigenvalue is accurate to within this amount.
    pub residual: f64,
}

impl HermitianEigen {
    pub fn max(&self) -> f64 {
        *self.values.last().expect("eigendecomposition is never empty")
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    /// `V diag(g(values)) V*`.
    pub fn map_values(&self, g: impl Fn(f64) -> f64) -> Matrix {
        let n = self.vectors.dim();
        let weights: Vec<f64> = self.values.iter().map(|&v| g(v)).collect();
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::new(0.0, 0.0);
                for (k, &w) in weights.iter().enumerate() {
                    if w != 0.0 {
                        acc += self.vectors.get(i, k) * self.vectors.get(j, k).conj() * w;
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

fn off_diagonal_mass(a: &[Complex], n: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[i * n + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Runs cyclic Jacobi sweeps on the Hermitian array `a` (row-major, n x n),
/// accumulating the rotations into `v`. Returns the final off-diagonal mass.
pub(crate) fn jacobi_in_place(
    a: &mut [Complex],
    v: &mut [Complex],
    n: usize,
    tol: f64,
    scale: f64,
) -> Result<f64> {
    let target = tol * scale;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_mass(a, n);
        if off <= target || off == 0.0 {
            return Ok(off);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(a, v, n, p, q);
            }
        }
    }
    let off = off_diagonal_mass(a, n);
    if off <= target {
        Ok(off)
    } else {
        Err(Error::NoConvergence {
            what: "Jacobi eigensolver",
            iterations: MAX_SWEEPS,
        })
    }
}

/// Annihilates `a[p][q]` with the unitary
/// `G = [[c, s e^{i phi}], [-s e^{-i phi}, c]]` acting on indices `(p, q)`,
/// where `a[p][q] = |b| e^{i phi}`.
fn rotate(a: &mut [Complex], v: &mut [Complex], n: usize, p: usize, q: usize) {
    let b = a[p * n + q];
    let mag = b.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[p * n + q] = Complex::new(0.0, 0.0);
        a[q * n + p] = Complex::new(0.0, 0.0);
        return;
    }
    let phase = b / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau.abs() > 1e150 {
        0.5 / tau
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let sp = phase * s; // s e^{i phi}
    let sm = phase.conj() * s; // s e^{-i phi}

    // A <- A G (columns p, q)
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * c - akq * sm;
        a[k * n + q] = akp * sp + akq * c;
    }
    // A <- G* A (rows p, q)
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = apk * c - aqk * sp;
        a[q * n + k] = apk * sm + aqk * c;
    }
    a[p * n + q] = Complex::new(0.0, 0.0);
    a[q * n + p] = Complex::new(0.0, 0.0);
    a[p * n + p] = Complex::new(app - t * mag, 0.0);
    a[q * n + q] = Complex::new(aqq + t * mag, 0.0);

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * c - vkq * sm;
        v[k * n + q] = vkp * sp + vkq * c;
    }
}

fn symmetrized(h: &Matrix) -> Result<Matrix> {
    let scale = h.frobenius_norm();
    let threshold = HERMITIAN_THRESHOLD * scale;
    let asymmetry = h.hermitian_defect();
    if asymmetry > threshold {
        return Err(Error::NotHermitian {
            asymmetry,
            threshold,
        });
    }
    Ok(h.hermitian_part())
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(h: &Matrix, tol: f64) -> Result<HermitianEigen> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let sym = symmetrized(h)?;
    let n = sym.dim();
    let scale = sym.frobenius_norm();
    let mut a = sym.entries().to_vec();
    let mut v = Matrix::identity(n).entries().to_vec();
    let residual = jacobi_in_place(&mut a, &mut v, n, tol, scale)?;
    Ok(sorted(n, &a, &v, residual))
}

fn sorted(n: usize, a: &[Complex], v: &[Complex], residual: f64) -> HermitianEigen {
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps solver order on ties
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let mut vectors = Matrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, dst, v[r * n + src]);
        }
    }
    HermitianEigen {
        values,
        vectors,
        residual,
    }
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max(h: &Matrix) -> Result<f64> {
    Ok(hermitian_eig(h, DEFAULT_EIG_TOL)?.max())
}

/// Operator (spectral) norm `sqrt(lambda_max(M*M))`.
pub fn operator_norm(m: &Matrix) -> Result<f64> {
    let gram = m.adjoint().mul(m);
    let top = lambda_max(&gram)?;
    Ok(top.max(0.0).sqrt())
}

/// `|M| = (M*M)^{1/2}`.
pub fn abs_op(m: &Matrix) -> Result<Matrix> {
    let gram = m.adjoint().mul(m);
    let eig = hermitian_eig(&gram, DEFAULT_EIG_TOL)?;
    Ok(eig.map_values(|v| v.max(0.0).sqrt()))
}
