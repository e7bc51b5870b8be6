//! Inner-product inequalities checked on concrete vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Complex, Matrix, Vector};
use crate::spectral::abs_op;

/// Allowed deviation of `||e||` from 1. Inputs are never renormalized.
pub const UNIT_TOL: f64 = 1e-12;

/// Largest imaginary residue tolerated in a quadratic form `<Hx, x>` of a
/// Hermitian `H`.
pub const FORM_IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IneqCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs <= rhs + tol`.
    pub holds: bool,
    /// `rhs - lhs`.
    pub slack: f64,
}

impl IneqCheck {
    pub fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = rhs - lhs;
        IneqCheck {
            lhs,
            rhs,
            holds: slack >= -tol,
            slack,
        }
    }
}

fn same_dim(a: &Vector, b: &Vector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

fn require_unit(e: &Vector) -> Result<()> {
    let norm = e.norm();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit { norm });
    }
    Ok(())
}

/// `|<x, y>| <= ||x|| ||y||`.
pub fn check_cauchy_schwarz(x: &Vector, y: &Vector, tol: f64) -> Result<IneqCheck> {
    let ip = x.inner(y)?;
    Ok(IneqCheck::new(ip.norm(), x.norm() * y.norm(), tol))
}

/// Buzano: `|<x, e><e, y>| <= (|<x, y>| + ||x|| ||y||) / 2` for unit `e`.
pub fn check_buzano(x: &Vector, y: &Vector, e: &Vector, tol: f64) -> Result<IneqCheck> {
    same_dim(x, y)?;
    same_dim(x, e)?;
    require_unit(e)?;
    let lhs = (x.inner_unchecked(e) * e.inner_unchecked(y)).norm();
    let rhs = (x.inner_unchecked(y).norm() + x.norm() * y.norm()) / 2.0;
    Ok(IneqCheck::new(lhs, rhs, tol))
}

/// Multi-vector Buzano:
/// `|prod_k <x_k, e>| <= (|<x_1, x_2> prod_{k>=3} <x_k, e>| + prod_k ||x_k||) / 2`.
///
/// For two vectors this uses `<x_1, e> conj(<x_2, e>) = <x_1, e><e, x_2>`,
/// evaluated exactly as in [`check_buzano`].
pub fn check_buzano_extension(xs: &[Vector], e: &Vector, tol: f64) -> Result<IneqCheck> {
    if xs.len() < 2 {
        return Err(Error::TooFewVectors(xs.len()));
    }
    for x in xs {
        same_dim(x, e)?;
    }
    require_unit(e)?;
    let head = xs[0].inner_unchecked(e) * e.inner_unchecked(&xs[1]);
    // the modulus of <e, x_2> equals that of <x_2, e>, so lhs is unchanged
    let tail: Complex = xs[2..]
        .iter()
        .map(|x| x.inner_unchecked(e))
        .fold(Complex::new(1.0, 0.0), |acc, z| acc * z);
    let lhs = (head * tail).norm();
    let cross = (xs[0].inner_unchecked(&xs[1]) * tail).norm();
    let norms: f64 = xs.iter().map(Vector::norm).product();
    let rhs = (cross + norms) / 2.0;
    Ok(IneqCheck::new(lhs, rhs, tol))
}

/// Real part of `<Hx, x>` for Hermitian `H`; the imaginary residue is checked.
fn quadratic_form(h: &Matrix, x: &Vector) -> Result<f64> {
    let z = h.apply_unchecked(x).inner_unchecked(x);
    let scale = h.frobenius_norm() * x.norm() * x.norm();
    if z.im.abs() > FORM_IMAG_TOL * scale.max(1.0) {
        return Err(Error::NotHermitian {
            asymmetry: z.im.abs(),
            threshold: FORM_IMAG_TOL * scale.max(1.0),
        });
    }
    Ok(z.re)
}

/// Mixed Schwarz: `|<Mx, y>|^2 <= <|M| x, x> <|M*| y, y>`.
pub fn check_mixed_schwarz(m: &Matrix, x: &Vector, y: &Vector, tol: f64) -> Result<IneqCheck> {
    same_dim(x, y)?;
    let mx = m.apply(x)?;
    let lhs = mx.inner_unchecked(y).norm_sqr();
    let left = quadratic_form(&abs_op(m)?, x)?;
    let right = quadratic_form(&abs_op(&m.adjoint())?, y)?;
    Ok(IneqCheck::new(lhs, left * right, tol))
}

/// Pointwise power inequality for unit `x`:
/// `|<Mx, x>|^n <= |<M^n x, x>| / 2^(n-1) + sum_{k=1}^{n-1} ||M^k x|| ||M* x||^(n-k) / 2^k`.
pub fn check_th7_pointwise(m: &Matrix, x: &Vector, n: usize, tol: f64) -> Result<IneqCheck> {
    if !(2..=64).contains(&n) {
        return Err(Error::InvalidOrder(n));
    }
    if m.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            left: m.dim(),
            right: x.dim(),
        });
    }
    require_unit(x)?;
    let order = n as i32;
    let mx = m.apply_unchecked(x);
    let lhs = mx.inner_unchecked(x).norm().powi(order);
    let adj_norm = m.adjoint().apply_unchecked(x).norm();
    // powers M^k x for k = 1..n
    let mut iterate = mx;
    let mut rhs = 0.0;
    for k in 1..n {
        rhs += 0.5f64.powi(k as i32) * iterate.norm() * adj_norm.powi(order - k as i32);
        iterate = m.apply_unchecked(&iterate);
    }
    rhs += 0.5f64.powi(order - 1) * iterate.inner_unchecked(x).norm();
    Ok(IneqCheck::new(lhs, rhs, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn cauchy_schwarz_examples() {
        let e1 = Vector::basis(3, 0);
        let r = check_cauchy_schwarz(&e1, &e1, 0.0).unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (1.0, 1.0, 0.0));
        assert!(r.holds);
        let r = check_cauchy_schwarz(&e1, &Vector::basis(3, 2), 0.0).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 1.0));
        let x = Vector::new(vec![c(1.0, 2.0), c(-0.3, 0.1), c(0.0, -1.0)]).unwrap();
        let y = Vector::new(vec![c(0.5, 0.5), c(2.0, 0.0), c(-1.0, 1.0)]).unwrap();
        assert!(check_cauchy_schwarz(&x, &y, 0.0).unwrap().holds);
        assert!(check_cauchy_schwarz(&x, &Vector::basis(2, 0), 0.0).is_err());
    }

    #[test]
    fn buzano_examples() {
        let e = Vector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let r = check_buzano(&e, &e, &e, 1e-15).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-15 && (r.rhs - 1.0).abs() < 1e-15);
        let perp = Vector::new(vec![c(0.8, 0.0), c(0.0, -0.6)]).unwrap();
        // <perp, e> = 0.48 - 0.48 = 0
        let r = check_buzano(&perp, &e, &e, 0.0).unwrap();
        assert!(r.lhs < 1e-15);
        let not_unit = Vector::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            check_buzano(&e, &e, &not_unit, 0.0),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn extension_reduces_to_buzano_for_two_vectors() {
        let x = Vector::new(vec![c(1.0, -2.0), c(0.5, 0.25), c(3.0, 0.0)]).unwrap();
        let y = Vector::new(vec![c(0.0, 1.0), c(-1.5, 0.5), c(0.2, 0.2)]).unwrap();
        let e = Vector::new(vec![c(0.0, 0.6), c(0.8, 0.0), c(0.0, 0.0)]).unwrap();
        let a = check_buzano(&x, &y, &e, 0.0).unwrap();
        let b = check_buzano_extension(&[x, y], &e, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn extension_equality_and_errors() {
        let e = Vector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        for n in 2..6 {
            let xs = vec![e.clone(); n];
            let r = check_buzano_extension(&xs, &e, 1e-14).unwrap();
            assert!((r.lhs - 1.0).abs() < 1e-14 && (r.rhs - 1.0).abs() < 1e-14);
        }
        assert_eq!(
            check_buzano_extension(std::slice::from_ref(&e), &e, 0.0).unwrap_err(),
            Error::TooFewVectors(1)
        );
        assert!(check_buzano_extension(&[e.clone(), Vector::basis(3, 0)], &e, 0.0).is_err());
    }

    #[test]
    fn mixed_schwarz_examples() {
        let x = Vector::new(vec![c(1.0, 2.0), c(-0.3, 0.1)]).unwrap();
        let y = Vector::new(vec![c(0.5, -0.5), c(2.0, 0.0)]).unwrap();
        let r = check_mixed_schwarz(&Matrix::identity(2), &x, &y, 1e-12).unwrap();
        let cs = check_cauchy_schwarz(&x, &y, 0.0).unwrap();
        assert!((r.lhs - cs.lhs * cs.lhs).abs() < 1e-12);
        assert!((r.rhs - cs.rhs * cs.rhs).abs() < 1e-12);

        let z = Matrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let r = check_mixed_schwarz(&z, &Vector::basis(2, 1), &Vector::basis(2, 0), 1e-12).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-15 && (r.rhs - 1.0).abs() < 1e-15);
    }

    #[test]
    fn th7_examples() {
        let z = Matrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let r = check_th7_pointwise(&z, &Vector::basis(2, 0), 2, 0.0).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        let x = Vector::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        for n in 2..7 {
            let r = check_th7_pointwise(&Matrix::identity(2), &x, n, 1e-14).unwrap();
            assert!((r.lhs - 1.0).abs() < 1e-14 && (r.rhs - 1.0).abs() < 1e-14);
        }
        assert_eq!(
            check_th7_pointwise(&z, &x, 1, 0.0).unwrap_err(),
            Error::InvalidOrder(1)
        );
        let long = Vector::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            check_th7_pointwise(&z, &long, 2, 0.0),
            Err(Error::NotUnit { .. })
        ));
    }
}
