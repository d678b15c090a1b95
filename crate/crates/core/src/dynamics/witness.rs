use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::probes::{probe_center_conditions, ProbeConfig, Verdict};
use crate::error::{Error, Result};
use crate::function::SparseFunction;
use crate::hypergroup::Element;
use crate::orlicz::{luxemburg_norm, YoungFunction};
use crate::weighted::{ProductConvention, WeightedTranslation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub k: u64,
    pub n_k: u64,
    pub e_k: Vec<Element>,
    /// `N_Φ(v_k − f)`.
    pub err_source: f64,
    /// `N_Φ(Λ_{n_k} v_k − g)`.
    pub err_target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub rows: Vec<WitnessRow>,
    /// `n_k` values dropped because the witness left the window.
    pub skipped: Vec<u64>,
    /// Both errors strictly decrease over the rows after the first quartile.
    pub eventually_decreasing: bool,
    /// `v_k` for the last row.
    pub witness: Option<SparseFunction>,
    /// `Λ_{n_k} v_k` for the last row.
    pub image: Option<SparseFunction>,
    pub convention: ProductConvention,
    pub horizon: u64,
}

/// Transitivity witnesses `v_k = f·χ_{E_k} + S_{n_k}(g·χ_{E_k})` for
/// `E = supp f ∪ supp g`, with `(n_k, E_k)` taken from the center probe.
/// Errors use the Luxemburg norm.
pub fn build_transitivity_witness(
    op: &WeightedTranslation,
    f: &SparseFunction,
    g: &SparseFunction,
    phi: &YoungFunction,
    cfg: &ProbeConfig,
) -> Result<WitnessReport> {
    let e: BTreeSet<Element> = f.support().union(&g.support()).copied().collect();
    let mut out = WitnessReport {
        rows: Vec::new(),
        skipped: Vec::new(),
        eventually_decreasing: true,
        witness: None,
        image: None,
        convention: op.convention,
        horizon: cfg.horizon,
    };
    if e.is_empty() {
        out.rows = (1..=cfg.k_max.min(cfg.horizon))
            .map(|k| WitnessRow {
                k,
                n_k: k,
                e_k: Vec::new(),
                err_source: 0.0,
                err_target: 0.0,
            })
            .collect();
        out.witness = Some(SparseFunction::zero());
        out.image = Some(SparseFunction::zero());
        return Ok(out);
    }

    let probe = probe_center_conditions(op, phi, &e, cfg)?;
    if probe.verdict != Verdict::HoldsEmpirically {
        return Err(Error::PreconditionFailed(
            "center conditions do not hold on supp f ∪ supp g at the horizon".into(),
        ));
    }
    for row in &probe.rows {
        let e_k: BTreeSet<Element> = row.e_k.iter().copied().collect();
        let built = (|| -> Result<(SparseFunction, SparseFunction)> {
            let v = f.restrict(&e_k).add(&op.s_apply(&g.restrict(&e_k), row.n_k)?);
            let image = op.lambda_apply(&v, row.n_k)?;
            Ok((v, image))
        })();
        let (v, image) = match built {
            Ok(pair) => pair,
            Err(Error::WindowOverflow { .. }) => {
                out.skipped.push(row.n_k);
                continue;
            }
            Err(err) => return Err(err),
        };
        out.rows.push(WitnessRow {
            k: row.k,
            n_k: row.n_k,
            e_k: row.e_k.clone(),
            err_source: luxemburg_norm(&v.sub(f), phi, op.model)?.value,
            err_target: luxemburg_norm(&image.sub(g), phi, op.model)?.value,
        });
        out.witness = Some(v);
        out.image = Some(image);
    }
    let start = out.rows.len() / 4;
    out.eventually_decreasing = out.rows[start..]
        .windows(2)
        .all(|w| w[1].err_source < w[0].err_source && w[1].err_target < w[0].err_target);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitResult {
    pub target: usize,
    pub best_n: Option<u64>,
    /// `min_n N_Φ(Λ_n f − g)`; ties go to the smallest `n`.
    pub best_error: Option<f64>,
    /// Orbit indices dropped because `Λ_n f` left the window.
    pub skipped: Vec<u64>,
}

/// Distance from the orbit `{Λ_n f : 0 ≤ n ≤ horizon}` to each target.
pub fn orbit_density_probe(
    op: &WeightedTranslation,
    f: &SparseFunction,
    targets: &[SparseFunction],
    horizon: u64,
    phi: &YoungFunction,
) -> Result<Vec<OrbitResult>> {
    let mut orbit = Vec::new();
    let mut skipped = Vec::new();
    for n in 0..=horizon {
        match op.lambda_apply(f, n) {
            Ok(h) => orbit.push((n, h)),
            Err(Error::WindowOverflow { .. }) => skipped.push(n),
            Err(err) => return Err(err),
        }
    }
    targets
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let mut best: Option<(u64, f64)> = None;
            for (n, h) in &orbit {
                let d = luxemburg_norm(&h.sub(g), phi, op.model)?.value;
                if best.is_none_or(|(_, b)| d < b) {
                    best = Some((*n, d));
                }
            }
            Ok(OrbitResult {
                target: i,
                best_n: best.map(|b| b.0),
                best_error: best.map(|b| b.1),
                skipped: skipped.clone(),
            })
        })
        .collect()
}

/// Whether `N_Φ(Λ_{rn} f − f) ≤ tol` for every `1 ≤ r ≤ r_max`.
pub fn periodic_point_check(
    op: &WeightedTranslation,
    f: &SparseFunction,
    n: u64,
    r_max: u64,
    phi: &YoungFunction,
    tol: f64,
) -> Result<bool> {
    for r in 1..=r_max {
        let d = luxemburg_norm(&op.lambda_apply(f, r * n)?.sub(f), phi, op.model)?.value;
        if d > tol {
            return Ok(false);
        }
    }
    Ok(true)
}
