//! Upper bounds on the numerical radius.
//!
//! Every estimator returns a [`BoundEstimate`] that records the intermediate
//! quantities it used, so a value can be audited by re-evaluating its formula
//! from `components`. Intermediate numerical radii are computed at one tenth
//! of the caller's tolerance.
//!
//! Identifiers are stable and appear in reports and in the property suite:
//! `eqv`, `th1`, `th2`, `eq5`, `eq6`, `cor2`, `th3`, `cor3`, `eq7`, `th4`,
//! `th5`, `cor5[n=k]`, `nilpotent-tight`, `nilpotent-relaxed`, `haagerup`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::radius::{numerical_radius, SweepResult};
use crate::spectral::{abs_op, operator_norm};

/// Relative threshold for deciding `M^n = 0`: `||M^n|| <= 1e-10 ||M||^n`.
pub const NILPOTENCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEstimate {
    pub id: String,
    /// Upper bound on `w(T)`.
    pub value: f64,
    /// Named inputs to the formula.
    pub components: BTreeMap<String, f64>,
    /// For min-type bounds, the component that attained the minimum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected: Option<String>,
    /// The inequality being evaluated, in plain notation.
    pub formula: String,
}

impl BoundEstimate {
    fn new(id: impl Into<String>, value: f64, formula: &str) -> Self {
        BoundEstimate {
            id: id.into(),
            value,
            components: BTreeMap::new(),
            selected: None,
            formula: formula.to_string(),
        }
    }

    fn with(mut self, name: &str, value: f64) -> Self {
        self.components.insert(name.to_string(), value);
        self
    }

    pub fn component(&self, name: &str) -> Option<f64> {
        self.components.get(name).copied()
    }
}

/// `max(x, 0)^(1/k)`: radicands are nonnegative in exact arithmetic.
fn root(x: f64, k: u32) -> f64 {
    let x = x.max(0.0);
    match k {
        1 => x,
        2 => x.sqrt(),
        3 => x.cbrt(),
        _ => x.powf(1.0 / k as f64),
    }
}

const F_EQV: &str = "w(T) <= ||T||";
const F_TH1: &str = "w(T)^3 <= w(T^3)/4 + (||T^2|| + ||T*T+TT*||) ||T||/4";
const F_TH2: &str = "w(T)^3 <= w(TT*T)/2 + ||T*T+TT*|| ||T||/4";
const F_EQ5: &str = "w(T)^3 <= w(T*T^2)/2 + ||T||^3/2";
const F_EQ6: &str = "w(T)^3 <= w(T^2T*)/2 + ||T||^3/2";
const F_COR2: &str = "w(T)^3 <= min(w(TT*T), w(T^2T*), w(T*T^2))/2 + ||T||^3/2";
const F_TH3: &str = "w(T)^3 <= w(|T|T|T*|)/4 + (||T^2|| + ||T*T+TT*||) ||T||/4";
const F_COR3: &str = "w(T)^3 <= min(w(T^3), w(|T|T|T*|))/4 + (||T^2|| + ||T*T+TT*||) ||T||/4";
const F_EQ7: &str = "w(T)^3 <= w(|T*|T|T|)/4 + 3 ||T*T+TT*|| ||T||/8";
const F_TH4: &str =
    "w(T)^4 <= (w(T|T|)/2 + ||T*T+TT*||/4) (w(T*|T*|)/2 + ||T*T+TT*||/4)";
const F_TH5: &str = "w(T)^4 <= (w(T|T*|)/2 + ||T||^2/2) (w(T*|T|)/2 + ||T||^2/2)";
const F_COR5: &str = "w(T)^n <= w(T^n)/2^(n-1) + sum_{k=1}^{n-1} ||T^k|| ||T||^(n-k) / 2^k";
const F_NIL_TIGHT: &str = "T^n = 0: w(T)^n <= sum_{k=1}^{n-1} ||T^k|| ||T||^(n-k) / 2^k";
const F_NIL_RELAXED: &str = "T^n = 0: w(T) <= (1 - 2^(1-n))^(1/n) ||T||";
const F_HAAGERUP: &str = "T^n = 0: w(T) <= cos(pi/(n+1)) ||T||";

/// Lazily computed quantities shared by all estimators for one matrix.
pub struct BoundContext<'a> {
    m: &'a Matrix,
    inner_tol: f64,
    zero: bool,
    norm: f64,
    adjoint: Matrix,
    abs: Option<Matrix>,
    abs_adjoint: Option<Matrix>,
    sum_norm: Option<f64>,
    powers: Vec<Matrix>,
    power_norms: BTreeMap<u32, f64>,
    radii: BTreeMap<&'static str, f64>,
}

impl<'a> BoundContext<'a> {
    /// `tol` is the outer tolerance; inner radii use `tol / 10`.
    pub fn new(m: &'a Matrix, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidTolerance(tol));
        }
        let zero = m.is_zero();
        let norm = if zero { 0.0 } else { operator_norm(m)? };
        Ok(BoundContext {
            m,
            inner_tol: tol / 10.0,
            zero,
            norm,
            adjoint: m.adjoint(),
            abs: None,
            abs_adjoint: None,
            sum_norm: None,
            powers: vec![Matrix::identity(m.dim()), m.clone()],
            power_norms: BTreeMap::new(),
            radii: BTreeMap::new(),
        })
    }

    pub fn matrix(&self) -> &Matrix {
        self.m
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn power(&mut self, k: u32) -> &Matrix {
        while self.powers.len() <= k as usize {
            let next = self.powers.last().unwrap().mul(self.m);
            self.powers.push(next);
        }
        &self.powers[k as usize]
    }

    pub fn power_norm(&mut self, k: u32) -> Result<f64> {
        if let Some(&v) = self.power_norms.get(&k) {
            return Ok(v);
        }
        let v = match k {
            0 => 1.0,
            1 => self.norm,
            _ => {
                let p = self.power(k).clone();
                if p.is_zero() {
                    0.0
                } else {
                    operator_norm(&p)?
                }
            }
        };
        self.power_norms.insert(k, v);
        Ok(v)
    }

    pub fn abs(&mut self) -> Result<&Matrix> {
        if self.abs.is_none() {
            self.abs = Some(abs_op(self.m)?);
        }
        Ok(self.abs.as_ref().unwrap())
    }

    pub fn abs_adjoint(&mut self) -> Result<&Matrix> {
        if self.abs_adjoint.is_none() {
            self.abs_adjoint = Some(abs_op(&self.adjoint)?);
        }
        Ok(self.abs_adjoint.as_ref().unwrap())
    }

    /// `||T*T + TT*||`.
    pub fn sum_norm(&mut self) -> Result<f64> {
        if let Some(v) = self.sum_norm {
            return Ok(v);
        }
        let a = self.adjoint.mul(self.m);
        let b = self.m.mul(&self.adjoint);
        let s = a.add(&b)?;
        let v = operator_norm(&s)?;
        self.sum_norm = Some(v);
        Ok(v)
    }

    fn radius_of(&mut self, key: &'static str, build: impl FnOnce(&mut Self) -> Result<Matrix>) -> Result<f64> {
        if let Some(&v) = self.radii.get(key) {
            return Ok(v);
        }
        let product = build(self)?;
        let v = numerical_radius(&product, self.inner_tol)?.value;
        self.radii.insert(key, v);
        Ok(v)
    }

    /// Numerical radius of one of the named products used by the estimators.
    pub fn radius(&mut self, key: &'static str) -> Result<f64> {
        match key {
            "w(T)" => self.radius_of(key, |c| Ok(c.m.clone())),
            "w(T^2)" => self.radius_of(key, |c| Ok(c.power(2).clone())),
            "w(T^3)" => self.radius_of(key, |c| Ok(c.power(3).clone())),
            "w(T^4)" => self.radius_of(key, |c| Ok(c.power(4).clone())),
            "w(T^5)" => self.radius_of(key, |c| Ok(c.power(5).clone())),
            "w(TT*T)" => self.radius_of(key, |c| Ok(c.m.mul(&c.adjoint).mul(c.m))),
            "w(T^2T*)" => self.radius_of(key, |c| {
                let sq = c.power(2).clone();
                Ok(sq.mul(&c.adjoint))
            }),
            "w(T*T^2)" => self.radius_of(key, |c| {
                let sq = c.power(2).clone();
                Ok(c.adjoint.mul(&sq))
            }),
            "w(|T|T|T*|)" => self.radius_of(key, |c| {
                let a = c.abs()?.clone();
                let b = c.abs_adjoint()?.clone();
                Ok(a.mul(c.m).mul(&b))
            }),
            "w(|T*|T|T|)" => self.radius_of(key, |c| {
                let a = c.abs()?.clone();
                let b = c.abs_adjoint()?.clone();
                Ok(b.mul(c.m).mul(&a))
            }),
            "w(T|T|)" => self.radius_of(key, |c| {
                let a = c.abs()?.clone();
                Ok(c.m.mul(&a))
            }),
            "w(T*|T*|)" => self.radius_of(key, |c| {
                let b = c.abs_adjoint()?.clone();
                Ok(c.adjoint.mul(&b))
            }),
            "w(T|T*|)" => self.radius_of(key, |c| {
                let b = c.abs_adjoint()?.clone();
                Ok(c.m.mul(&b))
            }),
            "w(T*|T|)" => self.radius_of(key, |c| {
                let a = c.abs()?.clone();
                Ok(c.adjoint.mul(&a))
            }),
            other => panic!("unknown radius key {other}"),
        }
    }

    /// `w(T^n)` for arbitrary `n >= 1`.
    pub fn power_radius(&mut self, n: u32) -> Result<f64> {
        match n {
            1 => self.radius("w(T)"),
            2 => self.radius("w(T^2)"),
            3 => self.radius("w(T^3)"),
            4 => self.radius("w(T^4)"),
            5 => self.radius("w(T^5)"),
            _ => {
                let p = self.power(n).clone();
                Ok(numerical_radius(&p, self.inner_tol)?.value)
            }
        }
    }

    fn zero_estimate(&self, id: impl Into<String>, formula: &str) -> BoundEstimate {
        BoundEstimate::new(id, 0.0, formula)
    }

    pub fn classical(&self) -> (f64, f64) {
        (self.norm / 2.0, self.norm)
    }

    pub fn eqv(&self) -> BoundEstimate {
        BoundEstimate::new("eqv", self.norm, F_EQV).with("||T||", self.norm)
    }

    pub fn th1(&mut self) -> Result<BoundEstimate> {
        if self.zero {
            return Ok(self.zero_estimate("th1", F_TH1));
        }
        let w3 = self.radius("w(T^3)")?;
        let n2 = self.power_norm(2)?;
        let s = self.sum_norm()?;
        let n = self.norm;
        let value = root(0.25 * w3 + 0.25 * (n2 + s) * n, 3);
        Ok(BoundEstimate::new("th1", value, F_TH1)
            .with("w(T^3)", w3)
            .with("||T^2||", n2)
            .with("||T*T+TT*||", s)
            .with("||T||", n))
    }

    pub fn th2(&mut self) -> Result<BoundEstimate> {
        if self.zero {
            return Ok(self.zero_estimate("th2", F_TH2));
        }
        let w = self.radius("w(TT*T)")?;
        let s = self.sum_norm()?;
        let n = self.norm;
        let value = root(0.5 * w + 0.25 * s * n, 3);
        Ok(BoundEstimate::new("th2", value, F_TH2)
            .with("w(TT*T)", w)
            .with("||T*T+TT*||", s)
            .with("||T||", n))
    }

    fn half_cube(&mut self, id: &'static str, key: &'static str, formula: &str) -> Result<BoundEstimate> {
        if self.zero {
            return Ok(self.zero_estimate(id, formula));
        }
        let w = self.radius(key)?;
        let n = self.norm;
        let value = root(0.5 * w + 0.5 * n * n * n, 3);
        Ok(BoundEstimate::new(id, value, formula).with(key, w).with("||T||", n))
    }

    pub fn eq5(&mut self) -> Result<BoundEstimate> {
        self.half_cube("eq5", "w(T*T^2)", F_EQ5)
    }

    pub fn eq6(&mut self) -> Result<BoundEstimate> {
        self.half_cube("eq6", "w(T^2T*)", F_EQ6)
    }

    pub fn cor2(&mut self) -> Result<BoundEstimate> {
        if self.zero {
            return Ok(self.zero_estimate("cor2", F_COR2));
        }
        let keys = ["w(TT*T)", "w(T^2T*)", "w(T*T^2)"];
        let mut values = [0.0; 3];
        for (v, key) in values.iter_mut().zip(keys) {
            *v = self.radius(key)?;
        }
        let (arg, min) = argmin(&values);
        let n = self.norm;
        let value = root(0.5 * min + 0.5 * n * n * n, 3);
        let mut est = BoundEstimate::new("cor2", value, F_COR2);
        for (key, v) in keys.iter().zip(values) {
            est = est.with(key, v);
        }
        est = est.with("||T||", n);
        est.selected = Some(keys[arg].to_string());
        Ok(est)
    }

    pub fn th3(&mut self) -> Result<BoundEstimate> {
        if self.zero {
            return Ok(self.zero_estimate("th3", F_TH3));
        }
        let w = self.radius("w(|T|T|T*|)")?;
        let n2 = self.power_norm(2)?;
        let s = self.sum_norm()?;
        let n = self.norm;
        let value = root(0.25 * w + 0.25 * (n2 + s) * n, 3);
        Ok(BoundEstimate::new("th3", value, F_TH3)
            .with("w(|T|T|T*|)", w)
            .with("||T^2||", n2)
            .with("||T*T+TT*||", s)
            .with("||T||", n))
    }

    pub fn cor3(&mut self) -> Result<BoundEstimate> {
        if self.zero {
            return Ok(self.zero_estimate("cor3", F_COR3));
        }
        let keys = ["w(T^3)", "w(|T|T|T*|)"];
        let values = [self.radius(keys[0])?, self.radius(keys[1])?];
        let (arg, min) = argmin(&values);
        let n2 = self.power_norm(2)?;
        let s = self.sum_norm()?;
        let n = self.norm;
        let value = root(0.25 * min + 0.25 * (n2 + s) * n, 3);
        let mut est = BoundEstimate::new("cor3", value, F_COR3)
            .with(keys[0], values[0])
            .with(keys[1], values[1])
            .with("||T^2||", n2)
            .with("||T*T+TT*||", s)
            .with("||T||", n);
        est.selected = Some(keys[arg].to_string());
        Ok(est)
    }

    pub fn eq7(&mut self) -> Result<BoundEstimate> {
        if self.zero {
            return Ok(self.zero_estimate("eq7", F_EQ7));
        }
        let w = self.radius("w(|T*|T|T|)")?;
        let s = self.sum_norm()?;
        let n = self.norm;
        let value = root(0.25 * w + 0.375 * s * n, 3);
        Ok(BoundEstimate::new("eq7", value, F_EQ7)
            .with("w(|T*|T|T|)", w)
            .with("||T*T+TT*||", s)
            .with("||T||", n))
    }

    pub fn th4(&mut self) -> Result<BoundEstimate> {
        if self.zero {
            return Ok(self.zero_estimate("th4", F_TH4));
        }
        let a = self.radius("w(T|T|)")?;
        let b = self.radius("w(T*|T*|)")?;
        let s = self.sum_norm()?;
        let value = root((0.5 * a + 0.25 * s) * (0.5 * b + 0.25 * s), 4);
        Ok(BoundEstimate::new("th4", value, F_TH4)
            .with("w(T|T|)", a)
            .with("w(T*|T*|)", b)
            .with("||T*T+TT*||", s))
    }

    pub fn th5(&mut self) -> Result<BoundEstimate> {
        if self.zero {
            return Ok(self.zero_estimate("th5", F_TH5));
        }
        let a = self.radius("w(T|T*|)")?;
        let b = self.radius("w(T*|T|)")?;
        let n = self.norm;
        let n2 = n * n;
        let value = root((0.5 * a + 0.5 * n2) * (0.5 * b + 0.5 * n2), 4);
        Ok(BoundEstimate::new("th5", value, F_TH5)
            .with("w(T|T*|)", a)
            .with("w(T*|T|)", b)
            .with("||T||", n))
    }

    /// Power bound of order `n >= 2`.
    pub fn cor5(&mut self, n: usize) -> Result<BoundEstimate> {
        if !(2..=64).contains(&n) {
            return Err(Error::InvalidOrder(n));
        }
        let id = format!("cor5[n={n}]");
        if self.zero {
            return Ok(self.zero_estimate(id, F_COR5));
        }
        let order = n as u32;
        let wn = self.power_radius(order)?;
        let norm = self.norm;
        let mut est = BoundEstimate::new(id, 0.0, F_COR5)
            .with(&format!("w(T^{n})"), wn)
            .with("||T||", norm);
        let mut radicand = wn * 0.5f64.powi(order as i32 - 1);
        for k in 1..order {
            let nk = self.power_norm(k)?;
            let term = 0.5f64.powi(k as i32) * nk * norm.powi((order - k) as i32);
            radicand += term;
            est = est.with(&format!("||T^{k}||"), nk);
        }
        est.value = root(radicand, order);
        Ok(est)
    }

    /// Least `n <= dim` with `||T^n|| <= tol ||T||^n`; the zero matrix has index 1.
    pub fn nilpotency_index(&mut self, tol: f64) -> Result<Option<usize>> {
        if self.zero {
            return Ok(Some(1));
        }
        let norm = self.norm;
        for k in 1..=self.m.dim() as u32 {
            if self.power_norm(k)? <= tol * norm.powi(k as i32) {
                return Ok(Some(k as usize));
            }
        }
        Ok(None)
    }

    fn nilpotent_order(&mut self) -> Result<usize> {
        match self.nilpotency_index(NILPOTENCY_TOL)? {
            Some(k) => Ok(k.max(2)),
            None => Err(Error::NotNilpotent),
        }
    }

    /// Sum form and closed form of the nilpotent bound.
    pub fn nilpotent(&mut self) -> Result<(BoundEstimate, BoundEstimate)> {
        let order = self.nilpotent_order()?;
        let norm = self.norm;
        let mut tight = BoundEstimate::new("nilpotent-tight", 0.0, F_NIL_TIGHT)
            .with("n", order as f64)
            .with("||T||", norm);
        let mut radicand = 0.0;
        for k in 1..order as u32 {
            let nk = self.power_norm(k)?;
            radicand += 0.5f64.powi(k as i32) * nk * norm.powi(order as i32 - k as i32);
            tight = tight.with(&format!("||T^{k}||"), nk);
        }
        tight.value = root(radicand, order as u32);
        let factor = root(1.0 - 0.5f64.powi(order as i32 - 1), order as u32);
        let relaxed = BoundEstimate::new("nilpotent-relaxed", factor * norm, F_NIL_RELAXED)
            .with("n", order as f64)
            .with("||T||", norm);
        Ok((tight, relaxed))
    }

    pub fn haagerup(&mut self) -> Result<BoundEstimate> {
        let order = self.nilpotent_order()?;
        let norm = self.norm;
        let value = (PI / (order as f64 + 1.0)).cos() * norm;
        Ok(BoundEstimate::new("haagerup", value, F_HAAGERUP)
            .with("n", order as f64)
            .with("||T||", norm))
    }
}

/// Index and value of the minimum; earlier candidates win ties.
fn argmin(values: &[f64]) -> (usize, f64) {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    (best, values[best])
}

macro_rules! single_bound {
    ($(#[$doc:meta])* $name:ident, $method:ident) => {
        $(#[$doc])*
        pub fn $name(m: &Matrix, tol: f64) -> Result<BoundEstimate> {
            BoundContext::new(m, tol)?.$method()
        }
    };
}

/// `(||M||/2, ||M||)`.
pub fn classical_bounds(m: &Matrix) -> Result<(f64, f64)> {
    let norm = operator_norm(m)?;
    Ok((norm / 2.0, norm))
}

single_bound!(bound_th1, th1);
single_bound!(bound_th2, th2);
single_bound!(bound_eq5, eq5);
single_bound!(bound_eq6, eq6);
single_bound!(
    /// Minimum over the three cubic products.
    bound_cor2,
    cor2
);
single_bound!(bound_th3, th3);
single_bound!(bound_cor3, cor3);
single_bound!(bound_eq7, eq7);
single_bound!(bound_th4, th4);
single_bound!(bound_th5, th5);
single_bound!(bound_haagerup, haagerup);

pub fn bound_cor5(m: &Matrix, n: usize, tol: f64) -> Result<BoundEstimate> {
    BoundContext::new(m, tol)?.cor5(n)
}

pub fn nilpotency_index(m: &Matrix, tol: f64) -> Result<Option<usize>> {
    BoundContext::new(m, 1e-8)?.nilpotency_index(tol)
}

/// `(tight, relaxed)` nilpotent bounds; `NotNilpotent` when no power vanishes.
pub fn bound_nilpotent(m: &Matrix, tol: f64) -> Result<(BoundEstimate, BoundEstimate)> {
    BoundContext::new(m, tol)?.nilpotent()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReversePowerCheck {
    pub order: usize,
    /// `w(T)^n`.
    pub lhs: f64,
    /// `w(T^n)/2^(n-1) + 1 - 2^(1-n)`.
    pub rhs: f64,
    pub holds: bool,
    /// `rhs - lhs`.
    pub gap: f64,
}

impl<'a> BoundContext<'a> {
    /// Reverse power inequality for contractions.
    pub fn reverse_power(&mut self, n: usize, tol: f64) -> Result<ReversePowerCheck> {
        if !(2..=64).contains(&n) {
            return Err(Error::InvalidOrder(n));
        }
        if self.norm > 1.0 + 1e-12 {
            return Err(Error::NormExceedsOne(self.norm));
        }
        let coef = 0.5f64.powi(n as i32 - 1);
        let (w, wn) = if self.zero {
            (0.0, 0.0)
        } else {
            (self.radius("w(T)")?, self.power_radius(n as u32)?)
        };
        let lhs = w.powi(n as i32);
        let rhs = coef * wn + 1.0 - coef;
        let gap = rhs - lhs;
        Ok(ReversePowerCheck {
            order: n,
            lhs,
            rhs,
            holds: gap >= -tol,
            gap,
        })
    }
}

pub fn check_reverse_power(m: &Matrix, n: usize, tol: f64) -> Result<ReversePowerCheck> {
    BoundContext::new(m, tol)?.reverse_power(n, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub tol: f64,
    pub orders: Vec<usize>,
}

impl ReportConfig {
    /// Default tolerance `1e-8 max(1, ||M||)` with orders 2 through 5.
    pub fn for_matrix(m: &Matrix) -> Result<Self> {
        Ok(ReportConfig {
            tol: crate::radius::default_tolerance(operator_norm(m)?),
            orders: vec![2, 3, 4, 5],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub id: String,
    /// `estimate - exact`; negative.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub exact: SweepResult,
    pub norm: f64,
    pub classical_lower: f64,
    pub classical_upper: f64,
    pub estimates: Vec<BoundEstimate>,
    pub nilpotency_index: Option<usize>,
    pub reverse_power: Vec<ReversePowerCheck>,
    pub violations: Vec<Violation>,
}

impl BoundReport {
    pub fn estimate(&self, id: &str) -> Option<&BoundEstimate> {
        self.estimates.iter().find(|e| e.id == id)
    }
}

/// Every applicable estimator in a fixed order, checked against the exact radius.
pub fn full_report(m: &Matrix, config: &ReportConfig) -> Result<BoundReport> {
    let mut ctx = BoundContext::new(m, config.tol)?;
    report_with_context(&mut ctx, config)
}

/// [`full_report`] on an existing context, leaving its caches populated for
/// further queries.
pub fn report_with_context(ctx: &mut BoundContext<'_>, config: &ReportConfig) -> Result<BoundReport> {
    let exact = numerical_radius(ctx.m, config.tol)?;
    ctx.radii.insert("w(T)", exact.value);
    report_from_context(ctx, exact, config)
}

fn report_from_context(
    ctx: &mut BoundContext<'_>,
    exact: SweepResult,
    config: &ReportConfig,
) -> Result<BoundReport> {
    let (classical_lower, classical_upper) = ctx.classical();
    let mut estimates = vec![
        ctx.eqv(),
        ctx.th1()?,
        ctx.th2()?,
        ctx.eq5()?,
        ctx.eq6()?,
        ctx.cor2()?,
        ctx.th3()?,
        ctx.cor3()?,
        ctx.eq7()?,
        ctx.th4()?,
        ctx.th5()?,
    ];
    for &n in &config.orders {
        estimates.push(ctx.cor5(n)?);
    }
    let nilpotency_index = ctx.nilpotency_index(NILPOTENCY_TOL)?;
    if nilpotency_index.is_some() {
        let (tight, relaxed) = ctx.nilpotent()?;
        estimates.push(tight);
        estimates.push(relaxed);
        estimates.push(ctx.haagerup()?);
    }
    let mut reverse_power = Vec::new();
    if ctx.norm() <= 1.0 + 1e-12 {
        for &n in &config.orders {
            reverse_power.push(ctx.reverse_power(n, config.tol)?);
        }
    }
    let violations = estimates
        .iter()
        .filter(|e| e.value < exact.value - config.tol)
        .map(|e| Violation {
            id: e.id.clone(),
            margin: e.value - exact.value,
        })
        .collect();
    Ok(BoundReport {
        exact,
        norm: ctx.norm(),
        classical_lower,
        classical_upper,
        estimates,
        nilpotency_index,
        reverse_power,
        violations,
    })
}
