//! Numerical radius with a certified error bound.
//!
//! `w(M) = max_theta f(theta)` where `f(theta)` is the largest eigenvalue of
//! `H(theta) = (e^{i theta} M + e^{-i theta} M*) / 2`, i.e. the support
//! function of the numerical range in direction `theta`. The sweep samples
//! `f` on a grid and refines it until an upper bound on `max f` over every
//! gap between samples is within `tol` of the best sample.
//!
//! Two bounds are available on a gap `[a, b]` with sampled values `p, q`:
//!
//! * Lipschitz: `f` is `||M||`-Lipschitz (Weyl), so `max f <= (p + q + ||M|| (b - a)) / 2`.
//! * Tangent wedge: the numerical range lies inside the two half-planes
//!   `Re(e^{ia} z) <= p` and `Re(e^{ib} z) <= q`, so on `[a, b]` the support
//!   function is dominated by that of the wedge apex.
//!
//! * Taylor: while the top eigenvalue stays simple, `f'' = -f + 2 sum_j
//!   |<H' v, v_j>|^2 / (f - lambda_j) <= 2 w^2 / gap - f`, so each end slope
//!   `f' = <H' v, v>` gives a parabola dominating `f` across the gap. This
//!   is the only one of the three that converges when `f` is flat, as for
//!   ranges that are disks.
//!
//! All hold for every gap, so the certificate is global no matter how many
//! local maxima `f` has.

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::gaussian_unit_vector;
use crate::matrix::{Complex, Matrix, Vector};
use crate::spectral::{jacobi_in_place, operator_norm, DEFAULT_EIG_TOL};

/// Initial number of equally spaced angles.
pub const DEFAULT_INITIAL_GRID: usize = 32;
/// Hard cap on eigen-solves per sweep.
pub const DEFAULT_MAX_EVALUATIONS: usize = 100_000;

/// Default sweep tolerance `1e-8 * max(1, ||M||)`.
pub fn default_tolerance(norm: f64) -> f64 {
    1e-8 * norm.max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Computed `w(M)`.
    pub value: f64,
    /// Maximizing angle in `[0, 2 pi)`.
    pub theta_star: f64,
    /// Guaranteed bound on `|value - w(M)|`.
    pub certified_error: f64,
    /// Number of Hermitian eigen-solves performed.
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub initial_grid: usize,
    pub max_evaluations: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            initial_grid: DEFAULT_INITIAL_GRID,
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
        }
    }
}

/// `w(M)` to within `tol`, with the default sweep options.
pub fn numerical_radius(m: &Matrix, tol: f64) -> Result<SweepResult> {
    numerical_radius_with(m, tol, &SweepOptions::default())
}

pub fn numerical_radius_with(m: &Matrix, tol: f64, opts: &SweepOptions) -> Result<SweepResult> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    if m.is_zero() {
        return Ok(SweepResult {
            value: 0.0,
            theta_star: 0.0,
            certified_error: 0.0,
            evaluations: 0,
        });
    }
    let norm = operator_norm(m)?;
    let pencil = RotatedPencil::new(m);
    if has_grading(m) {
        // D M D* = e^{-i a} M for D = diag(e^{i g_j a}): f is constant
        let s = pencil.evaluate(0.0, None)?;
        return Ok(SweepResult {
            value: s.value.max(0.0),
            theta_star: 0.0,
            certified_error: s.error,
            evaluations: 1,
        });
    }
    let grid = opts.initial_grid.max(4);

    let mut samples: Vec<Sample> = Vec::with_capacity(grid * 2);
    let mut warm: Option<Vec<Complex>> = None;
    for k in 0..grid {
        let theta = TAU * k as f64 / grid as f64;
        let s = pencil.evaluate(theta, warm.as_deref())?;
        warm = Some(s.vectors.clone());
        samples.push(s);
    }
    let mut evaluations = grid;

    // valid upper bound on w(M), tightened after every pass
    let mut w_upper = norm;
    loop {
        let (best, lower) = incumbent(&samples);
        let slack = samples.iter().map(|s| s.error).fold(0.0, f64::max);
        let count = samples.len();
        let mut upper = f64::NEG_INFINITY;
        let mut split = Vec::new();
        for i in 0..count {
            let left = &samples[i];
            let right = &samples[(i + 1) % count];
            let width = gap(left.theta, right.theta);
            let mut bound = gap_bound(left.value + slack, right.value + slack, width, norm);
            if let Some(t) = taylor_bound(left, right, width, w_upper, slack) {
                bound = bound.min(t);
            }
            upper = upper.max(bound);
            if bound > lower + tol - slack {
                split.push(i);
            }
        }
        w_upper = w_upper.min(upper.max(lower));
        let certified_error = (upper - lower).max(0.0) + slack;
        if certified_error <= tol {
            return Ok(SweepResult {
                value: lower.max(0.0),
                theta_star: samples[best].theta,
                certified_error,
                evaluations,
            });
        }
        if evaluations + split.len() > opts.max_evaluations || split.is_empty() {
            return Err(Error::NoConvergence {
                what: "numerical radius sweep",
                iterations: evaluations,
            });
        }

        let mut refined = Vec::with_capacity(count + split.len());
        let mut cursor = split.iter().peekable();
        for i in 0..count {
            refined.push(samples[i].clone());
            if cursor.peek() == Some(&&i) {
                cursor.next();
                let left = &samples[i];
                let right = &samples[(i + 1) % count];
                let width = gap(left.theta, right.theta);
                if width < 1e-13 {
                    return Err(Error::NoConvergence {
                        what: "numerical radius sweep",
                        iterations: evaluations,
                    });
                }
                let theta = left.theta + width / 2.0;
                let s = pencil.evaluate(theta, Some(&left.vectors))?;
                refined.push(s);
                evaluations += 1;
            }
        }
        samples = refined;
    }
}

/// Whether integers `g_j` exist with `g_k - g_j = 1` for every nonzero
/// `M[j][k]`. Then the numerical range is a disk centred at 0.
fn has_grading(m: &Matrix) -> bool {
    let n = m.dim();
    let mut level: Vec<Option<i64>> = vec![None; n];
    for root in 0..n {
        if level[root].is_some() {
            continue;
        }
        level[root] = Some(0);
        let mut stack = vec![root];
        while let Some(j) = stack.pop() {
            let g = level[j].expect("visited");
            for k in 0..n {
                let forward = m.get(j, k) != Complex::new(0.0, 0.0);
                let backward = m.get(k, j) != Complex::new(0.0, 0.0);
                for (linked, want) in [(forward, g + 1), (backward, g - 1)] {
                    if !linked {
                        continue;
                    }
                    match level[k] {
                        None => {
                            level[k] = Some(want);
                            stack.push(k);
                        }
                        Some(h) if h != want => return false,
                        Some(_) => {}
                    }
                }
            }
        }
    }
    true
}

/// Width of the gap from `a` to `b` going counter-clockwise; the last gap wraps.
fn gap(a: f64, b: f64) -> f64 {
    if b > a {
        b - a
    } else {
        b + TAU - a
    }
}

/// Index and value of the best sample; the smallest angle wins ties.
fn incumbent(samples: &[Sample]) -> (usize, f64) {
    let mut best = 0;
    for (i, s) in samples.iter().enumerate() {
        let b = &samples[best];
        if s.value > b.value || (s.value == b.value && s.theta < b.theta) {
            best = i;
        }
    }
    (best, samples[best].value)
}

/// Upper bound on the support function over a gap of `width` whose end
/// values are `p` and `q`.
pub(crate) fn gap_bound(p: f64, q: f64, width: f64, lipschitz: f64) -> f64 {
    let lip = 0.5 * (p + q + lipschitz * width);
    let half = 0.5 * width;
    if half >= std::f64::consts::FRAC_PI_2 {
        return lip;
    }
    // apex of the wedge in coordinates rotated to the gap midpoint
    let x = (p + q) / (2.0 * half.cos());
    let y = (p - q) / (2.0 * half.sin());
    let phi = (-y).atan2(x);
    let wedge = if phi.abs() <= half {
        x.hypot(y)
    } else {
        p.max(q)
    };
    wedge.min(lip)
}

/// Second-order bound on a gap, or `None` when the top eigenvalue may not
/// stay separated across it. `w` is an upper bound on `w(M)`, hence on
/// `||H'||`.
fn taylor_bound(left: &Sample, right: &Sample, d: f64, w: f64, slack: f64) -> Option<f64> {
    let forward = left.expansion(d, w, 1.0)?;
    let backward = right.expansion(d, w, -1.0)?;
    let c = forward.2.max(backward.2);
    let (p, da) = (forward.0 + slack, forward.1);
    let (q, db) = (backward.0 + slack, -backward.1);
    let up_left = |s: f64| p + da * s + 0.5 * c * s * s;
    let up_right = |s: f64| q - db * (d - s) + 0.5 * c * (d - s) * (d - s);
    let envelope = |s: f64| up_left(s).min(up_right(s));

    let mut candidates = vec![0.0, d];
    // up_left - up_right is affine in s
    let c0 = p - q + db * d - 0.5 * c * d * d;
    let c1 = da - db + c * d;
    if c1 != 0.0 {
        candidates.push(-c0 / c1);
    }
    if c != 0.0 {
        candidates.push(-da / c);
        candidates.push(d - db / c);
    }
    let best = candidates
        .into_iter()
        .filter(|s| s.is_finite())
        .map(|s| envelope(s.clamp(0.0, d)))
        .fold(f64::NEG_INFINITY, f64::max);
    best.is_finite().then_some(best)
}

impl Sample {
    /// Parabola `(value, slope, curvature)` dominating `f` on `[0, d]` in
    /// direction `dir` (the sample's slope is negated for `dir < 0`).
    ///
    /// In the eigenbasis at the sample, `H(theta + dir t)` is
    /// `cos(t) diag(lambda) + dir sin(t) K`. Comparing the complement block
    /// with `cos(t) lambda_j + sin(t) w` bounds the top eigenvalue by
    /// `h(t) = cos(t) f + sin(t) k + sin(t)^2 S` with
    /// `S = sum_j |K_1j|^2 / (cos(d) gap_j - sin(d) (w - k))`, and `h'' <= curvature`.
    fn expansion(&self, d: f64, w: f64, dir: f64) -> Option<(f64, f64, f64)> {
        if d >= std::f64::consts::FRAC_PI_2 {
            return None;
        }
        let k = dir * self.slope;
        let (sin_d, cos_d) = d.sin_cos();
        let mut sum = 0.0;
        for &(gap, weight) in &self.couplings {
            let denom = cos_d * (gap - 2.0 * self.error) - sin_d * (w - k);
            if !(denom > 0.0) {
                return None;
            }
            sum += weight / denom;
        }
        let f = self.value;
        let curvature = if f >= 0.0 { -f * cos_d } else { -f } + (-k).max(0.0) * sin_d + 2.0 * sum;
        Some((f, k, curvature))
    }
}

#[derive(Clone)]
struct Sample {
    theta: f64,
    value: f64,
    /// `f'(theta)`.
    slope: f64,
    /// `(f - lambda_j, |<H' v, v_j>|^2)` for every other eigenpair.
    couplings: Vec<(f64, f64)>,
    /// Bound on the eigenvalue error of `value`.
    error: f64,
    vectors: Vec<Complex>,
}

/// `H(theta) = cos(theta) A + sin(theta) B` with `A = (M + M*)/2`, `B = i(M - M*)/2`.
struct RotatedPencil {
    n: usize,
    re_part: Vec<Complex>,
    im_part: Vec<Complex>,
    rounding: f64,
}

impl RotatedPencil {
    fn new(m: &Matrix) -> Self {
        let n = m.dim();
        let mut re_part = vec![Complex::new(0.0, 0.0); n * n];
        let mut im_part = re_part.clone();
        let i = Complex::new(0.0, 1.0);
        for r in 0..n {
            for c in 0..n {
                let a = m.get(r, c);
                let b = m.get(c, r).conj();
                re_part[r * n + c] = (a + b) * 0.5;
                im_part[r * n + c] = i * (a - b) * 0.5;
            }
        }
        let rounding = 16.0 * (n as f64) * f64::EPSILON * m.frobenius_norm();
        RotatedPencil {
            n,
            re_part,
            im_part,
            rounding,
        }
    }

    fn evaluate(&self, theta: f64, warm: Option<&[Complex]>) -> Result<Sample> {
        let n = self.n;
        let (s, c) = theta.sin_cos();
        let mut h: Vec<Complex> = self
            .re_part
            .iter()
            .zip(&self.im_part)
            .map(|(a, b)| a * c + b * s)
            .collect();
        let scale = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut v = match warm {
            Some(v0) => {
                h = congruence(&h, v0, n);
                v0.to_vec()
            }
            None => Matrix::identity(n).entries().to_vec(),
        };
        let residual = jacobi_in_place(&mut h, &mut v, n, DEFAULT_EIG_TOL, scale)?;
        let mut top = 0;
        for k in 1..n {
            if h[k * n + k].re > h[top * n + top].re {
                top = k;
            }
        }
        let value = h[top * n + top].re;
        // u = H'(theta) v_top with H'(theta) = -sin(theta) A + cos(theta) B
        let mut u = vec![Complex::new(0.0, 0.0); n];
        for (i, ui) in u.iter_mut().enumerate() {
            for j in 0..n {
                let d = self.im_part[i * n + j] * c - self.re_part[i * n + j] * s;
                *ui += d * v[j * n + top];
            }
        }
        let project = |col: usize| -> Complex { (0..n).map(|i| v[i * n + col].conj() * u[i]).sum() };
        let couplings = (0..n)
            .filter(|&j| j != top)
            .map(|j| (value - h[j * n + j].re, project(j).norm_sqr()))
            .collect();
        Ok(Sample {
            theta,
            value,
            slope: project(top).re,
            couplings,
            error: residual + self.rounding,
            vectors: v,
        })
    }
}

/// `V* H V`, made exactly Hermitian.
fn congruence(h: &[Complex], v: &[Complex], n: usize) -> Vec<Complex> {
    let mut hv = vec![Complex::new(0.0, 0.0); n * n];
    for i in 0..n {
        for k in 0..n {
            let a = h[i * n + k];
            for j in 0..n {
                hv[i * n + j] += a * v[k * n + j];
            }
        }
    }
    let mut out = vec![Complex::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex::new(0.0, 0.0);
            for k in 0..n {
                acc += v[k * n + i].conj() * hv[k * n + j];
            }
            if i == j {
                out[i * n + i] = Complex::new(acc.re, 0.0);
            } else {
                out[i * n + j] = acc;
                out[j * n + i] = acc.conj();
            }
        }
    }
    out
}

/// Rayleigh quotient `<M x, x> / <x, x>`.
pub fn rayleigh(m: &Matrix, x: &Vector) -> Result<Complex> {
    let norm = x.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mx = m.apply(x)?;
    Ok(mx.inner_unchecked(x) / (norm * norm))
}

/// Monte-Carlo lower bound on `w(M)`: the best `|<Mx, x>|` over `trials`
/// random unit vectors. Deterministic in `seed`.
pub fn numerical_radius_lower_bound(m: &Matrix, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..trials.max(1) {
        let x = gaussian_unit_vector(m.dim(), &mut rng);
        let value = m.apply_unchecked(&x).inner_unchecked(&x).norm();
        best = best.max(value);
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GelfandEstimate {
    pub value: f64,
    pub converged: bool,
    pub squarings: usize,
}

/// Spectral radius from `||M^{2^k}||^{1/2^k}`, squaring with per-step
/// renormalization and accumulating the logarithm of the scale.
pub fn spectral_radius_gelfand(m: &Matrix, max_squarings: usize, tol: f64) -> Result<GelfandEstimate> {
    let max_squarings = max_squarings.max(1);
    let norm = operator_norm(m)?;
    if norm == 0.0 {
        return Ok(GelfandEstimate {
            value: 0.0,
            converged: true,
            squarings: 0,
        });
    }
    let mut current = m.scale_real(1.0 / norm);
    let mut log_norm = norm.ln();
    let mut power = 1.0f64;
    let mut estimate = norm;
    for k in 1..=max_squarings {
        let squared = current.mul(&current);
        let nu = operator_norm(&squared)?;
        if nu == 0.0 {
            return Ok(GelfandEstimate {
                value: 0.0,
                converged: true,
                squarings: k,
            });
        }
        log_norm = 2.0 * log_norm + nu.ln();
        power *= 2.0;
        current = squared.scale_real(1.0 / nu);
        let next = (log_norm / power).exp();
        let converged = (next - estimate).abs() <= tol * next.max(1.0);
        estimate = next;
        if converged {
            return Ok(GelfandEstimate {
                value: estimate,
                converged: true,
                squarings: k,
            });
        }
    }
    Ok(GelfandEstimate {
        value: estimate,
        converged: false,
        squarings: max_squarings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> Matrix {
        Matrix::from_real_rows(rows).unwrap()
    }

    #[test]
    fn known_radii() {
        let z = real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let r = numerical_radius(&z, 1e-10).unwrap();
        assert!((r.value - 0.5).abs() <= 1e-10);
        assert!(r.certified_error <= 1e-10);

        let r = numerical_radius(&Matrix::identity(3), 1e-10).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-10);
        assert_eq!(r.theta_star, 0.0);

        let t = real(&[&[0.0, 2.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let r = numerical_radius(&t, 1e-10).unwrap();
        assert!((r.value - 5f64.sqrt() / 2.0).abs() <= 1e-10);

        let t = real(&[&[0.0, 8.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let r = numerical_radius(&t, 1e-9).unwrap();
        assert!((r.value - 65f64.sqrt() / 2.0).abs() <= 1e-9);
    }

    #[test]
    fn zero_matrix_short_circuits() {
        let r = numerical_radius(&Matrix::zeros(3), 1e-8).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.certified_error, 0.0);
        assert_eq!(r.evaluations, 0);
    }

    #[test]
    fn rejects_bad_tolerance() {
        for tol in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                numerical_radius(&Matrix::identity(2), tol),
                Err(Error::InvalidTolerance(_))
            ));
        }
    }

    #[test]
    fn theta_star_is_reported_in_range() {
        // w of e^{i 0.3} I is attained at theta = 2 pi - 0.3
        let m = Matrix::identity(2).scale(Complex::from_polar(1.0, 0.3));
        let r = numerical_radius(&m, 1e-9).unwrap();
        assert!((0.0..TAU).contains(&r.theta_star));
        assert!((r.value - 1.0).abs() < 1e-9);
        assert!((r.theta_star - (TAU - 0.3)).abs() < 1e-3);
    }

    #[test]
    fn gap_bound_dominates_dense_samples() {
        // f(theta) = Re(e^{i theta} z) for a single point z is the support
        // function of {z}; the wedge bound must reproduce |z| when the
        // maximizer lies inside the gap.
        let z = Complex::from_polar(2.0, -0.05);
        let f = |t: f64| (Complex::from_polar(1.0, t) * z).re;
        let b = gap_bound(f(0.0), f(0.2), 0.2, 2.0);
        assert!((b - 2.0).abs() < 1e-12);
        let b = gap_bound(f(0.2), f(0.4), 0.2, 2.0);
        assert!((b - f(0.2)).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_examples() {
        let x = Vector::from_real(&[3.0, -1.0, 2.0]).unwrap();
        assert!((rayleigh(&Matrix::identity(3), &x).unwrap() - 1.0).norm() < 1e-15);
        let z = real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(rayleigh(&z, &Vector::basis(2, 0)).unwrap(), Complex::new(0.0, 0.0));
        let h = Vector::from_real(&[1.0, 1.0]).unwrap();
        assert!((rayleigh(&z, &h).unwrap() - 0.5).norm() < 1e-15);
        assert_eq!(
            rayleigh(&z, &Vector::from_real(&[0.0, 0.0]).unwrap()),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn monte_carlo_lower_bound() {
        assert_eq!(numerical_radius_lower_bound(&Matrix::zeros(3), 100, 1), 0.0);
        assert!((numerical_radius_lower_bound(&Matrix::identity(3), 10, 1) - 1.0).abs() < 1e-14);
        let z = real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let v = numerical_radius_lower_bound(&z, 100_000, 9);
        assert!(v > 0.49 && v <= 0.5);
        assert_eq!(v, numerical_radius_lower_bound(&z, 100_000, 9));
    }

    #[test]
    fn gelfand_examples() {
        let t = real(&[&[0.0, 1.0, 2.0], &[0.0, 0.0, 3.0], &[0.0, 0.0, 0.0]]);
        let g = spectral_radius_gelfand(&t, 10, 1e-12).unwrap();
        assert_eq!(g.value, 0.0);
        assert!(g.converged && g.squarings == 2);

        let g = spectral_radius_gelfand(&Matrix::identity(3), 10, 1e-12).unwrap();
        assert!((g.value - 1.0).abs() < 1e-14 && g.converged);

        let t = real(&[&[0.5, 3.0], &[0.0, 0.25]]);
        let g = spectral_radius_gelfand(&t, 64, 1e-6).unwrap();
        assert!(g.converged);
        assert!((g.value - 0.5).abs() <= 1e-6, "{}", g.value);
    }
}
