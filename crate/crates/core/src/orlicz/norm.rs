use serde::{Deserialize, Serialize};

use super::YoungFunction;
use crate::error::{Error, Result};
use crate::function::SparseFunction;
use crate::hypergroup::{Element, HypergroupModel};

/// Relative bracket width guaranteed by every Luxemburg evaluation.
pub const NORM_RTOL: f64 = 1e-10;
/// Grid points for the coarse log-scale scan of the Amemiya objective.
const AMEMIYA_GRID: usize = 64;
/// Upper end of the Amemiya search, in units of `1/N_Φ(f)`.
const AMEMIYA_K_MAX: f64 = 1e12;
const MAX_EXPANSIONS: u32 = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub iterations: u32,
    /// For the Luxemburg norm, the final bisection bracket on `k`. For the
    /// Amemiya form, the smallest and largest objective values at the final
    /// golden-section points.
    pub bracket: (f64, f64),
}

impl NormResult {
    fn zero() -> Self {
        NormResult {
            value: 0.0,
            iterations: 0,
            bracket: (0.0, 0.0),
        }
    }
}

/// `(|f(x)|, m({x}))` over the support.
fn weighted_values(f: &SparseFunction, model: &HypergroupModel) -> Result<Vec<(f64, f64)>> {
    f.iter()
        .map(|(x, v)| {
            if !v.is_finite() {
                return Err(Error::NonFiniteIntegrand);
            }
            Ok((v.abs(), model.haar_weight(x)?))
        })
        .collect()
}

/// `Σ Φ(c·|f(x)|)·m({x})`.
fn modular(phi: &YoungFunction, vals: &[(f64, f64)], c: f64) -> f64 {
    vals.iter().map(|&(v, m)| phi.eval(c * v) * m).sum()
}

/// Luxemburg norm `N_Φ(f) = inf{k > 0 : Σ Φ(|f|/k)·m ≤ 1}`, bisected down
/// to adjacent floats. The absolute error then stays far below `1e-9` even
/// when Haar weights make the norm large.
pub fn luxemburg_norm(f: &SparseFunction, phi: &YoungFunction, model: &HypergroupModel) -> Result<NormResult> {
    luxemburg_norm_with(f, phi, model, 0.0)
}

pub fn luxemburg_norm_with(
    f: &SparseFunction,
    phi: &YoungFunction,
    model: &HypergroupModel,
    rtol: f64,
) -> Result<NormResult> {
    let vals = weighted_values(f, model)?;
    if vals.is_empty() {
        return Ok(NormResult::zero());
    }
    let fits = |k: f64| modular(phi, &vals, 1.0 / k) <= 1.0;
    let max_abs = vals.iter().fold(0.0f64, |a, &(v, _)| a.max(v));
    let m_min = vals.iter().fold(f64::INFINITY, |a, &(_, m)| a.min(m));
    let mut guess = max_abs / phi.inverse(1.0 / m_min);
    if !(guess.is_finite() && guess > 0.0) {
        guess = max_abs;
    }

    let mut iterations = 0u32;
    let (mut lo, mut hi);
    if fits(guess) {
        hi = guess;
        lo = 0.5 * guess;
        while fits(lo) {
            hi = lo;
            lo *= 0.5;
            iterations += 1;
            if iterations > MAX_EXPANSIONS || lo == 0.0 {
                return Err(Error::NonFiniteIntegrand);
            }
        }
    } else {
        lo = guess;
        hi = 2.0 * guess;
        while !fits(hi) {
            lo = hi;
            hi *= 2.0;
            iterations += 1;
            if iterations > MAX_EXPANSIONS || !hi.is_finite() {
                return Err(Error::NonFiniteIntegrand);
            }
        }
    }
    while hi - lo > rtol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(NormResult {
        value: hi,
        iterations,
        bracket: (lo, hi),
    })
}

/// Orlicz norm through the Amemiya formula
/// `inf_{k>0} (1 + Σ Φ(k|f|)·m) / k`, minimized over `log k` by a coarse
/// grid scan and golden-section refinement.
pub fn orlicz_norm(f: &SparseFunction, phi: &YoungFunction, model: &HypergroupModel) -> Result<NormResult> {
    let lux = luxemburg_norm(f, phi, model)?;
    if lux.value == 0.0 {
        return Ok(NormResult::zero());
    }
    let vals = weighted_values(f, model)?;
    let objective = |s: f64| {
        let k = s.exp();
        (1.0 + modular(phi, &vals, k)) / k
    };

    let s_lo = (0.5 / lux.value).ln();
    let s_hi = (AMEMIYA_K_MAX / lux.value).ln();
    let step = (s_hi - s_lo) / AMEMIYA_GRID as f64;
    let grid: Vec<(f64, f64)> = (0..=AMEMIYA_GRID)
        .map(|i| {
            let s = s_lo + step * i as f64;
            (s, objective(s))
        })
        .collect();
    let best = grid
        .iter()
        .enumerate()
        .filter(|(_, (_, g))| g.is_finite())
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .ok_or(Error::NonFiniteIntegrand)?;
    let best_grid = grid[best].1;

    let mut a = grid[best.saturating_sub(1)].0;
    let mut b = grid[(best + 1).min(AMEMIYA_GRID)].0;
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (objective(c), objective(d));
    let mut iterations = grid.len() as u32;
    while b - a > 1e-12 * (1.0 + a.abs().max(b.abs())) && iterations < 400 {
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = objective(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = objective(d);
        }
        iterations += 1;
    }
    let value = best_grid.min(gc).min(gd);
    Ok(NormResult {
        value,
        iterations,
        bracket: (value, gc.max(gd).max(value)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EmbeddingRoute {
    /// `Φ'(0+) > 0`.
    PositiveDerivative,
    /// The truncation window is a finite measure space.
    FiniteWindow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCheck {
    pub holds: bool,
    pub route: EmbeddingRoute,
    /// Estimate of `Φ'(0+)`; `None` when indistinguishable from zero.
    pub derivative_at_zero: Option<f64>,
    /// `min ‖f‖_Φ / ‖f‖_1` over the probe functions. An upper bound for the
    /// best embedding constant, not a proof.
    pub constant_estimate: f64,
    pub rigorous: bool,
}

const DERIV_H: f64 = 1e-8;
const DERIV_ZERO: f64 = 1e-6;
const EMBEDDING_PROBES: usize = 8;

/// Estimate of `Φ'(0+)` from `Φ(h)/h` with one Richardson step.
pub fn derivative_at_zero(phi: &YoungFunction) -> Option<f64> {
    let d = |h: f64| phi.eval(h) / h;
    let est = 2.0 * d(0.5 * DERIV_H) - d(DERIV_H);
    (est.abs() >= DERIV_ZERO).then_some(est)
}

/// Whether `‖·‖_1 ≤ C‖·‖_Φ` on the model, and a probe estimate of the
/// constant `M` in `M‖f‖_1 ≤ ‖f‖_Φ`.
pub fn l1_embedding_check(phi: &YoungFunction, model: &HypergroupModel) -> Result<EmbeddingCheck> {
    let derivative = derivative_at_zero(phi);
    let route = if derivative.is_some() {
        EmbeddingRoute::PositiveDerivative
    } else {
        EmbeddingRoute::FiniteWindow
    };
    let mut labels: Vec<Element> = model.elements().to_vec();
    labels.sort_by_key(|x| (x.0.abs(), x.0));
    labels.truncate(EMBEDDING_PROBES);
    let mut probes: Vec<SparseFunction> = labels.iter().map(|x| SparseFunction::indicator([x])).collect();
    probes.push(SparseFunction::indicator(&labels));

    let mut constant = f64::INFINITY;
    for f in &probes {
        let l1 = f
            .iter()
            .map(|(x, v)| Ok(v.abs() * model.haar_weight(x)?))
            .sum::<Result<f64>>()?;
        if l1 > 0.0 {
            constant = constant.min(orlicz_norm(f, phi, model)?.value / l1);
        }
    }
    Ok(EmbeddingCheck {
        holds: true,
        route,
        derivative_at_zero: derivative,
        constant_estimate: constant,
        rigorous: false,
    })
}
