//! Seeded random ensembles and the randomized property suite.
//!
//! Every trial draws from its own ChaCha stream seeded by
//! [`trial_seed`]`(seed, dim, kind, trial)`, so any cell or single trial can
//! be replayed without running the ones before it. Gaussian variates come
//! from `rand_distr::StandardNormal`; a standard complex Gaussian is
//! `(a + ib)/sqrt(2)` with independent real parts.
//!
//! Slacks are reported normalized: `(rhs - lhs) / scale`, where `scale` is
//! the natural magnitude of the inequality (e.g. `max(1, ||T||^n)` for an
//! order-`n` power bound). A slack below `-tol` is a violation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::{report_with_context, BoundContext, ReportConfig};
use crate::error::{Error, Result};
use crate::matrix::{Complex, Matrix, Vector};
use crate::radius::{default_tolerance, numerical_radius};
use crate::spectral::operator_norm;
use crate::vecineq::{
    check_buzano, check_buzano_extension, check_cauchy_schwarz, check_mixed_schwarz,
    check_th7_pointwise, IneqCheck,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Ginibre,
    Hermitian,
    Normal,
    Unitary,
    Nilpotent,
}

impl MatrixKind {
    pub const ALL: [MatrixKind; 5] = [
        MatrixKind::Ginibre,
        MatrixKind::Hermitian,
        MatrixKind::Normal,
        MatrixKind::Unitary,
        MatrixKind::Nilpotent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MatrixKind::Ginibre => "ginibre",
            MatrixKind::Hermitian => "hermitian",
            MatrixKind::Normal => "normal",
            MatrixKind::Unitary => "unitary",
            MatrixKind::Nilpotent => "nilpotent",
        }
    }

    fn ordinal(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MatrixKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one trial: splitmix64 folded over `(seed, dim, kind, trial)`.
pub fn trial_seed(seed: u64, dim: usize, kind: MatrixKind, trial: usize) -> u64 {
    let mut h = splitmix64(seed);
    for word in [dim as u64, kind.ordinal(), trial as u64] {
        h = splitmix64(h ^ word);
    }
    h
}

pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_entries<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<Complex> {
    (0..len).map(|_| complex_gaussian(rng)).collect()
}

pub(crate) fn gaussian_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vector {
    loop {
        let data = gaussian_entries(dim, rng);
        let norm = data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-150 {
            return Vector::from_raw(data.into_iter().map(|z| z / norm).collect());
        }
    }
}

fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    Matrix::from_raw(dim, gaussian_entries(dim * dim, rng))
}

/// Orthonormalizes the columns of a Ginibre draw (modified Gram-Schmidt,
/// applied twice).
fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix {
    loop {
        let g = ginibre(dim, rng);
        let mut cols: Vec<Vec<Complex>> = (0..dim).map(|j| g.column(j).entries().to_vec()).collect();
        let mut degenerate = false;
        for j in 0..dim {
            for _ in 0..2 {
                for i in 0..j {
                    let proj: Complex = cols[j]
                        .iter()
                        .zip(&cols[i])
                        .map(|(a, b)| b.conj() * a)
                        .sum();
                    let (done, rest) = cols.split_at_mut(j);
                    for (a, b) in rest[0].iter_mut().zip(&done[i]) {
                        *a -= proj * b;
                    }
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                degenerate = true;
                break;
            }
            for z in cols[j].iter_mut() {
                *z /= norm;
            }
        }
        if degenerate {
            continue;
        }
        let mut u = Matrix::zeros(dim);
        for (j, col) in cols.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                u.set(i, j, z);
            }
        }
        return u;
    }
}

fn draw<R: Rng + ?Sized>(dim: usize, kind: MatrixKind, rng: &mut R) -> Matrix {
    match kind {
        MatrixKind::Ginibre => ginibre(dim, rng),
        MatrixKind::Hermitian => {
            let g = ginibre(dim, rng);
            let mut h = Matrix::zeros(dim);
            for i in 0..dim {
                for j in 0..dim {
                    h.set(i, j, (g.get(i, j) + g.get(j, i).conj()) * 0.5);
                }
            }
            h
        }
        MatrixKind::Normal => {
            let u = haar_unitary(dim, rng);
            let d = Matrix::diag(&gaussian_entries(dim, rng)).expect("finite draw");
            u.mul(&d).mul(&u.adjoint())
        }
        MatrixKind::Unitary => haar_unitary(dim, rng),
        MatrixKind::Nilpotent => {
            let mut m = Matrix::zeros(dim);
            for i in 0..dim {
                for j in (i + 1)..dim {
                    m.set(i, j, complex_gaussian(rng));
                }
            }
            m
        }
    }
}

/// Deterministic random matrix of the given kind.
pub fn random_matrix(dim: usize, kind: MatrixKind, seed: u64) -> Result<Matrix> {
    if dim == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(draw(dim, kind, &mut rng))
}

/// [`random_matrix`] with the kind given by name.
pub fn random_matrix_named(dim: usize, kind: &str, seed: u64) -> Result<Matrix> {
    random_matrix(dim, kind.parse()?, seed)
}

/// Deterministic Gaussian unit vector.
pub fn random_unit_vector(dim: usize, seed: u64) -> Vector {
    assert!(dim > 0, "vector dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gaussian_unit_vector(dim, &mut rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub dims: Vec<usize>,
    pub kinds: Vec<MatrixKind>,
    pub trials_per_cell: usize,
    pub seed: u64,
    /// Relative slack tolerance.
    pub tol: f64,
}

impl Default for EnsembleConfig {
    /// Dims 2 to 6, every kind, 500 trials, seed 42, tolerance 1e-7.
    fn default() -> Self {
        EnsembleConfig {
            dims: (2..=6).collect(),
            kinds: MatrixKind::ALL.to_vec(),
            trials_per_cell: 500,
            seed: 42,
            tol: 1e-7,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials_per_cell == 0 {
            return Err(Error::InvalidOrder(0));
        }
        if let Some(&d) = self.dims.iter().find(|&&d| d == 0) {
            return Err(Error::DimensionMismatch { left: 1, right: d });
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidTolerance(self.tol));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub dim: usize,
    pub kind: MatrixKind,
    pub id: String,
    pub count: usize,
    /// Smallest normalized slack.
    pub min_slack: f64,
    pub mean_slack: f64,
    /// Smallest unnormalized slack `rhs - lhs`.
    pub min_raw_slack: f64,
    /// Ratios `rhs / lhs` (for bounds: bound / w), over draws with `lhs > 0`.
    pub ratio_count: usize,
    pub min_ratio: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    /// Ratios `rhs / ||T||`, recorded for upper bounds on `w`.
    pub mean_norm_ratio: Option<f64>,
    pub max_norm_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationWitness {
    pub id: String,
    pub dim: usize,
    pub kind: MatrixKind,
    pub trial: usize,
    pub slack: f64,
    /// Rows of `[re, im]` pairs.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub config: EnsembleConfig,
    pub cells: Vec<CellStats>,
    pub violations: Vec<ViolationWitness>,
}

impl EnsembleStats {
    pub fn cells_for<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a CellStats> + 'a {
        self.cells.iter().filter(move |c| c.id == id)
    }

    pub fn cell(&self, dim: usize, kind: MatrixKind, id: &str) -> Option<&CellStats> {
        self.cells
            .iter()
            .find(|c| c.dim == dim && c.kind == kind && c.id == id)
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.cells.iter().map(|c| c.id.clone()).collect();
        ids.sort();
        ids.dedup();
        ids
    }
}

pub fn matrix_rows(m: &Matrix) -> Vec<Vec<[f64; 2]>> {
    m.rows()
        .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

/// One evaluated inequality on one draw.
struct Observation {
    id: String,
    lhs: f64,
    rhs: f64,
    scale: f64,
    /// `||T||` when `rhs` is an upper bound on `w(T)`.
    norm: Option<f64>,
}

impl Observation {
    fn new(id: impl Into<String>, lhs: f64, rhs: f64, scale: f64) -> Self {
        Observation {
            id: id.into(),
            lhs,
            rhs,
            scale: scale.max(1.0),
            norm: None,
        }
    }

    fn from_check(id: impl Into<String>, check: IneqCheck) -> Self {
        Observation::new(id, check.lhs, check.rhs, check.rhs.abs())
    }

    fn slack(&self) -> f64 {
        (self.rhs - self.lhs) / self.scale
    }
}

#[derive(Default)]
struct Accumulator {
    count: usize,
    min_slack: f64,
    sum_slack: f64,
    min_raw: f64,
    ratio_count: usize,
    min_ratio: f64,
    sum_ratio: f64,
    max_ratio: f64,
    norm_count: usize,
    sum_norm_ratio: f64,
    max_norm_ratio: f64,
}

impl Accumulator {
    fn push(&mut self, obs: &Observation) {
        let slack = obs.slack();
        let raw = obs.rhs - obs.lhs;
        if self.count == 0 {
            self.min_slack = slack;
            self.min_raw = raw;
        } else {
            self.min_slack = self.min_slack.min(slack);
            self.min_raw = self.min_raw.min(raw);
        }
        self.count += 1;
        self.sum_slack += slack;
        if obs.lhs > 0.0 {
            let ratio = obs.rhs / obs.lhs;
            if self.ratio_count == 0 {
                self.min_ratio = ratio;
                self.max_ratio = ratio;
            } else {
                self.min_ratio = self.min_ratio.min(ratio);
                self.max_ratio = self.max_ratio.max(ratio);
            }
            self.ratio_count += 1;
            self.sum_ratio += ratio;
        }
        if let Some(norm) = obs.norm.filter(|&n| n > 0.0) {
            let ratio = obs.rhs / norm;
            self.max_norm_ratio = if self.norm_count == 0 {
                ratio
            } else {
                self.max_norm_ratio.max(ratio)
            };
            self.norm_count += 1;
            self.sum_norm_ratio += ratio;
        }
    }

    fn finish(&self, dim: usize, kind: MatrixKind, id: String) -> CellStats {
        let mean = |sum: f64, n: usize| (n > 0).then(|| sum / n as f64);
        let some = |v: f64, n: usize| (n > 0).then_some(v);
        CellStats {
            dim,
            kind,
            id,
            count: self.count,
            min_slack: self.min_slack,
            mean_slack: self.sum_slack / self.count as f64,
            min_raw_slack: self.min_raw,
            ratio_count: self.ratio_count,
            min_ratio: some(self.min_ratio, self.ratio_count),
            mean_ratio: mean(self.sum_ratio, self.ratio_count),
            max_ratio: some(self.max_ratio, self.ratio_count),
            mean_norm_ratio: mean(self.sum_norm_ratio, self.norm_count),
            max_norm_ratio: some(self.max_norm_ratio, self.norm_count),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Scope {
    Everything,
    BoundsOnly,
}

const ORDERS: [usize; 4] = [2, 3, 4, 5];

/// Evaluates every inequality on one draw.
fn observe_trial(m: &Matrix, rng: &mut ChaCha8Rng, scope: Scope) -> Result<Vec<Observation>> {
    let dim = m.dim();
    let tol = default_tolerance(operator_norm(m)?);
    let mut ctx = BoundContext::new(m, tol)?;
    let norm = ctx.norm();
    let config = ReportConfig {
        tol,
        orders: ORDERS.to_vec(),
    };
    let report = report_with_context(&mut ctx, &config)?;
    let w = report.exact.value;
    let mut out = Vec::new();

    for est in &report.estimates {
        let mut obs = Observation::new(est.id.clone(), w, est.value, norm);
        obs.norm = Some(norm);
        out.push(obs);
    }
    if scope == Scope::BoundsOnly {
        return Ok(out);
    }

    out.push(Observation::new("eqv-lower", norm / 2.0, w, norm));
    out.push(Observation::new("eqv-upper", w, norm, norm));

    for &n in &ORDERS {
        let wn = ctx.power_radius(n as u32)?;
        let pow_scale = norm.powi(n as i32);
        out.push(Observation::new(format!("power[n={n}]"), wn, w.powi(n as i32), pow_scale));
        if let Some(est) = report.estimate(&format!("cor5[n={n}]")) {
            // chain to ||T||^n: bound^n <= ||T||^n
            out.push(Observation::new(
                format!("cor5-dominance[n={n}]"),
                est.value.powi(n as i32),
                pow_scale,
                pow_scale,
            ));
        }
    }

    if let (Some(tight), Some(relaxed)) = (
        report.estimate("nilpotent-tight"),
        report.estimate("nilpotent-relaxed"),
    ) {
        out.push(Observation::new("nilpotent-order", tight.value, relaxed.value, norm));
        if let Some(order) = relaxed.component("n") {
            let closed = norm * (1.0 - 2f64.powf(1.0 - order)).powf(1.0 / order);
            out.push(Observation::new("nilpotent-closed-form", relaxed.value, closed, norm));
        }
    }

    // weak unitary invariance
    let u = draw(dim, MatrixKind::Unitary, rng);
    let rotated = u.adjoint().mul(m).mul(&u);
    let r = numerical_radius(&rotated, tol)?;
    let diff = (r.value - w).abs();
    out.push(Observation::new(
        "unitary-invariance",
        diff,
        r.certified_error + report.exact.certified_error,
        norm,
    ));

    // reverse power inequality on the contraction T/||T||, by homogeneity
    if norm > 0.0 {
        for &n in &ORDERS {
            let coef = 0.5f64.powi(n as i32 - 1);
            let wn = ctx.power_radius(n as u32)? / norm.powi(n as i32);
            let lhs = (w / norm).powi(n as i32);
            out.push(Observation::new(format!("reverse-power[n={n}]"), lhs, coef * wn + 1.0 - coef, 1.0));
        }
    }

    // vector inequalities on sampled vectors
    let x = gaussian_unit_vector(dim, rng).scale(complex_gaussian(rng) * 2.0);
    let y = gaussian_unit_vector(dim, rng).scale(complex_gaussian(rng) * 2.0);
    let e = gaussian_unit_vector(dim, rng);
    out.push(Observation::from_check(
        "cauchy-schwarz",
        check_cauchy_schwarz(&x, &y, 0.0)?,
    ));
    out.push(Observation::from_check("buzano", check_buzano(&x, &y, &e, 0.0)?));
    let xs: Vec<Vector> = (0..5)
        .map(|_| gaussian_unit_vector(dim, rng).scale(complex_gaussian(rng) * 2.0))
        .collect();
    for n in 2..=5 {
        out.push(Observation::from_check(
            format!("buzano-extension[n={n}]"),
            check_buzano_extension(&xs[..n], &e, 0.0)?,
        ));
    }
    out.push(Observation::from_check(
        "mixed-schwarz",
        check_mixed_schwarz(m, &x, &y, 0.0)?,
    ));
    let unit = gaussian_unit_vector(dim, rng);
    for &n in &ORDERS {
        out.push(Observation::from_check(
            format!("th7-pointwise[n={n}]"),
            check_th7_pointwise(m, &unit, n, 0.0)?,
        ));
    }
    Ok(out)
}

fn run(config: &EnsembleConfig, scope: Scope) -> Result<EnsembleStats> {
    config.validate()?;
    let mut cells: BTreeMap<(usize, MatrixKind, String), Accumulator> = BTreeMap::new();
    let mut violations = Vec::new();
    for &dim in &config.dims {
        for &kind in &config.kinds {
            for trial in 0..config.trials_per_cell {
                let seed = trial_seed(config.seed, dim, kind, trial);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let m = draw(dim, kind, &mut rng);
                let observations =
                    observe_trial(&m, &mut rng, scope).map_err(|source| Error::Trial {
                        dim,
                        kind: kind.to_string(),
                        trial,
                        source: Box::new(source),
                    })?;
                for obs in observations {
                    let slack = obs.slack();
                    if !(slack >= -config.tol) {
                        violations.push(ViolationWitness {
                            id: obs.id.clone(),
                            dim,
                            kind,
                            trial,
                            slack,
                            matrix: matrix_rows(&m),
                        });
                    }
                    cells
                        .entry((dim, kind, obs.id.clone()))
                        .or_default()
                        .push(&obs);
                }
            }
        }
    }
    violations.sort_by(|a, b| {
        (&a.id, a.dim, a.kind, a.trial).cmp(&(&b.id, b.dim, b.kind, b.trial))
    });
    let cells = cells
        .into_iter()
        .map(|((dim, kind, id), acc)| acc.finish(dim, kind, id))
        .collect();
    Ok(EnsembleStats {
        config: config.clone(),
        cells,
        violations,
    })
}

/// Fuzzes every inequality over the configured ensemble.
pub fn run_property_suite(config: &EnsembleConfig) -> Result<EnsembleStats> {
    run(config, Scope::Everything)
}

/// Bound-versus-radius ratios for every estimator over the ensemble.
pub fn sharpness_study(config: &EnsembleConfig) -> Result<EnsembleStats> {
    run(config, Scope::BoundsOnly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nilpotent_draws_vanish_exactly() {
        for seed in 0..5 {
            let m = random_matrix(3, MatrixKind::Nilpotent, seed).unwrap();
            assert!(m.pow(3).is_zero());
        }
    }

    #[test]
    fn unitary_draws_are_isometries() {
        for seed in 0..5 {
            let u = random_matrix(4, MatrixKind::Unitary, seed).unwrap();
            assert!((operator_norm(&u).unwrap() - 1.0).abs() < 1e-10);
            let gram = u.adjoint().mul(&u);
            let err = gram.sub(&Matrix::identity(4)).unwrap().frobenius_norm();
            assert!(err < 1e-13);
        }
    }

    #[test]
    fn hermitian_and_normal_draws() {
        let h = random_matrix(2, MatrixKind::Hermitian, 3).unwrap();
        assert_eq!(h.adjoint(), h);
        let n = random_matrix(4, MatrixKind::Normal, 3).unwrap();
        assert!(n.self_commutator().frobenius_norm() < 1e-12 * n.frobenius_norm().powi(2));
    }

    #[test]
    fn draws_are_deterministic() {
        for kind in MatrixKind::ALL {
            assert_eq!(
                random_matrix(3, kind, 11).unwrap(),
                random_matrix(3, kind, 11).unwrap()
            );
        }
        assert_ne!(
            random_matrix(3, MatrixKind::Ginibre, 1).unwrap(),
            random_matrix(3, MatrixKind::Ginibre, 2).unwrap()
        );
    }

    #[test]
    fn unit_vectors() {
        for dim in 1..6 {
            let v = random_unit_vector(dim, 5);
            assert!((v.norm() - 1.0).abs() < 1e-14);
            assert_eq!(v, random_unit_vector(dim, 5));
        }
        let s = random_unit_vector(1, 9);
        assert!((s.entries()[0].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in MatrixKind::ALL {
            assert_eq!(kind.name().parse::<MatrixKind>().unwrap(), kind);
        }
        assert_eq!(
            "gue".parse::<MatrixKind>().unwrap_err(),
            Error::UnknownKind("gue".into())
        );
        assert!(random_matrix_named(2, "banded", 0).is_err());
    }

    #[test]
    fn trial_seeds_separate_cells() {
        let a = trial_seed(42, 3, MatrixKind::Normal, 0);
        assert_ne!(a, trial_seed(42, 3, MatrixKind::Normal, 1));
        assert_ne!(a, trial_seed(42, 4, MatrixKind::Normal, 0));
        assert_ne!(a, trial_seed(42, 3, MatrixKind::Unitary, 0));
        assert_ne!(a, trial_seed(43, 3, MatrixKind::Normal, 0));
    }

    #[test]
    fn small_suite_has_no_violations() {
        let config = EnsembleConfig {
            dims: vec![2, 3],
            trials_per_cell: 4,
            ..EnsembleConfig::default()
        };
        let stats = run_property_suite(&config).unwrap();
        assert!(stats.violations.is_empty(), "{:?}", stats.violations);
        assert!(stats.cell(3, MatrixKind::Ginibre, "th1").is_some());
        assert!(stats.cell(2, MatrixKind::Nilpotent, "haagerup").is_some());
        assert!(stats.cell(2, MatrixKind::Ginibre, "haagerup").is_none());
    }

    #[test]
    fn zero_trials_rejected() {
        let config = EnsembleConfig {
            trials_per_cell: 0,
            ..EnsembleConfig::default()
        };
        assert!(run_property_suite(&config).is_err());
    }
}
