use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::aperiodic::{aperiodic_center_check, aperiodic_sequence_check, strongly_aperiodic_check};
use crate::error::{Error, Result};
use crate::function::SparseFunction;
use crate::hypergroup::{Element, HypergroupModel};
use crate::orlicz::{l1_embedding_check, luxemburg_norm, YoungFunction};
use crate::weighted::{hereditary_weights, EtaSequence, ProductConvention, Weight, WeightedTranslation};

/// Shared knobs for every probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// Largest sequence index used anywhere.
    pub horizon: u64,
    /// Number of `(n_k, E_k)` rows requested.
    pub k_max: u64,
    /// Terms per series in the strongly aperiodic probe.
    pub series_cutoff: u64,
    /// Bound on `|r|, |s|` in the strong disjointness check.
    pub rs_bound: i64,
    /// `eps(k) = eps_base^k`.
    pub eps_base: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            horizon: 64,
            k_max: 20,
            series_cutoff: 5,
            rs_bound: 3,
            eps_base: 0.5,
        }
    }
}

impl ProbeConfig {
    pub fn eps(&self, k: u64) -> f64 {
        self.eps_base.powi(k as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// Necessary condition for positively densely hypercyclic weights along
    /// an aperiodic sequence.
    WeightProducts,
    /// Necessary condition for density of periodic points along a strongly
    /// aperiodic sequence.
    SeriesCriterion,
    /// Necessary condition for center sequences.
    CenterNecessary,
    /// Sufficient condition for center sequences.
    CenterSufficient,
    /// Characterization of hereditarily hypercyclic `T_{z,w}`.
    Hereditary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsEmpirically,
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionRow {
    pub k: u64,
    pub n_k: u64,
    pub eps: f64,
    pub e_k: Vec<Element>,
    /// `m(E_k) / m(E)`.
    pub measure_ratio: f64,
    pub sup_on_e_k: BTreeMap<String, f64>,
    pub sup_on_e: BTreeMap<String, f64>,
    pub metrics: BTreeMap<String, f64>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub theorem_id: TheoremId,
    pub set: Vec<Element>,
    pub rows: Vec<CriterionRow>,
    pub verdict: Verdict,
    pub convention: ProductConvention,
    pub horizon: u64,
    pub window: (i64, i64),
    pub eps_base: f64,
    pub series_truncated: bool,
    /// Hypotheses of the sufficient condition that are not met.
    pub sufficiency_failures: Vec<String>,
    pub certification: Option<String>,
    pub notes: Vec<String>,
}

pub const SERIES_TRUNCATED: &str = "series_truncated";
pub const NO_FULL_SET: &str = "no_full_sublevel_set";

/// Values of the tracked quantities at every point of `E`, in order.
type Tracked = Vec<Vec<f64>>;

fn window(model: &HypergroupModel) -> (i64, i64) {
    let el = model.elements();
    (el.first().map_or(0, |x| x.0), el.last().map_or(0, |x| x.0))
}

fn positive_set(model: &HypergroupModel, e: &BTreeSet<Element>) -> Result<Vec<Element>> {
    if e.is_empty() {
        return Err(Error::PreconditionFailed("E must have positive Haar measure".into()));
    }
    for &x in e {
        model.require(x)?;
    }
    Ok(e.iter().copied().collect())
}

/// Indices `n ≤ horizon` with `E ∩ (E ∗ {a_n}) = ∅`, and also
/// `E ∩ (E ∗ {a_{−n}}) = ∅` when `both_signs`.
fn disjoint_indices(
    model: &HypergroupModel,
    eta: &EtaSequence,
    e: &BTreeSet<Element>,
    horizon: u64,
    both_signs: bool,
) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for n in 1..=horizon {
        let signs: &[i64] = if both_signs { &[1, -1] } else { &[1] };
        let mut ok = true;
        for &sign in signs {
            match eta.eval(model, sign * n as i64) {
                Ok(a) => {
                    let (set, _) = model.set_convolve_partial(e, &BTreeSet::from([a]))?;
                    ok &= e.is_disjoint(&set);
                }
                Err(Error::WindowOverflow { .. } | Error::EtaOutOfRange(_)) => ok = false,
                Err(err) => return Err(err),
            }
        }
        if ok {
            out.push(n);
        }
    }
    Ok(out)
}

/// Picks `n_k` greedily: the smallest admissible index after `n_{k−1}` whose
/// sublevel set `{x ∈ E : every tracked value ≤ eps(k)}` is all of `E`,
/// falling back to the next admissible index when none is.
fn select_rows<F>(
    model: &HypergroupModel,
    e: &[Element],
    candidates: &[u64],
    cfg: &ProbeConfig,
    names: &[&str],
    mut eval: F,
) -> Result<Vec<CriterionRow>>
where
    F: FnMut(u64) -> Result<Tracked>,
{
    let m_e = model.haar_measure(e)?;
    let mut memo: BTreeMap<u64, Tracked> = BTreeMap::new();
    let mut rows = Vec::new();
    let mut prev = 0;
    for k in 1..=cfg.k_max {
        let eps = cfg.eps(k);
        let start = candidates.partition_point(|&c| c <= prev);
        if start == candidates.len() {
            break;
        }
        let mut chosen = None;
        for &c in &candidates[start..] {
            if let Entry::Vacant(slot) = memo.entry(c) {
                slot.insert(eval(c)?);
            }
            if memo[&c].iter().all(|vals| vals.iter().all(|&v| v <= eps)) {
                chosen = Some(c);
                break;
            }
        }
        let n = chosen.unwrap_or(candidates[start]);
        if let Entry::Vacant(slot) = memo.entry(n) {
            slot.insert(eval(n)?);
        }
        let tracked = &memo[&n];
        let inside: Vec<bool> = tracked.iter().map(|v| v.iter().all(|&t| t <= eps)).collect();
        let e_k: Vec<Element> = e.iter().zip(&inside).filter(|(_, &i)| i).map(|(&x, _)| x).collect();
        let mut sup_on_e_k = BTreeMap::new();
        let mut sup_on_e = BTreeMap::new();
        for (j, name) in names.iter().enumerate() {
            let all = tracked.iter().map(|v| v[j]);
            sup_on_e.insert(name.to_string(), all.clone().fold(0.0, f64::max));
            let sub = all.zip(&inside).filter(|(_, &i)| i).map(|(v, _)| v);
            sup_on_e_k.insert(name.to_string(), sub.fold(0.0, f64::max));
        }
        let mut flags = Vec::new();
        if chosen.is_none() {
            flags.push(NO_FULL_SET.to_string());
        }
        rows.push(CriterionRow {
            k,
            n_k: n,
            eps,
            measure_ratio: model.haar_measure(&e_k)? / m_e,
            e_k,
            sup_on_e_k,
            sup_on_e,
            metrics: BTreeMap::new(),
            flags,
        });
        prev = n;
    }
    Ok(rows)
}

const RATIO_TOL: f64 = 1e-12;
const MIN_ROWS: usize = 4;

/// Holds iff over the last quartile (at least two rows) every `E_k` has full
/// measure and every monitored quantity is nonincreasing.
fn judge(rows: &[CriterionRow], monitored_metrics: &[&str]) -> Verdict {
    if rows.len() < MIN_ROWS {
        return Verdict::Inconclusive;
    }
    let tail = &rows[rows.len() - (rows.len() / 4).max(2)..];
    let full = tail.iter().all(|r| r.measure_ratio >= 1.0 - RATIO_TOL);
    let sups_fall = tail.windows(2).all(|w| {
        w[1].sup_on_e_k
            .iter()
            .all(|(name, v)| *v <= w[0].sup_on_e_k.get(name).copied().unwrap_or(f64::INFINITY))
    });
    let metrics_fall = tail.windows(2).all(|w| {
        monitored_metrics
            .iter()
            .all(|m| w[1].metrics.get(*m).copied().unwrap_or(0.0) <= w[0].metrics.get(*m).copied().unwrap_or(0.0))
    });
    if full && sups_fall && metrics_fall {
        Verdict::HoldsEmpirically
    } else {
        Verdict::Fails
    }
}

fn report(
    theorem_id: TheoremId,
    model: &HypergroupModel,
    e: &[Element],
    rows: Vec<CriterionRow>,
    verdict: Verdict,
    convention: ProductConvention,
    cfg: &ProbeConfig,
) -> CriterionReport {
    CriterionReport {
        theorem_id,
        set: e.to_vec(),
        series_truncated: rows.iter().any(|r| r.flags.iter().any(|f| f == SERIES_TRUNCATED)),
        rows,
        verdict,
        convention,
        horizon: cfg.horizon,
        window: window(model),
        eps_base: cfg.eps_base,
        sufficiency_failures: Vec::new(),
        certification: None,
        notes: Vec::new(),
    }
}

fn require_embedding(phi: &YoungFunction, model: &HypergroupModel) -> Result<()> {
    if l1_embedding_check(phi, model)?.holds {
        Ok(())
    } else {
        Err(Error::PreconditionFailed("L^Φ is not contained in L^1".into()))
    }
}

/// `((χ_E)^{a_{−n}} · v_n)^{a_n}(x)` at every `x ∈ E`.
fn pulled_back_weight(op: &WeightedTranslation, e_set: &BTreeSet<Element>, e: &[Element], n: u64) -> Result<Vec<f64>> {
    let model = op.model;
    let a = op.eta.eval(model, n as i64)?;
    let a_inv = op.eta.eval(model, -(n as i64))?;
    let g = SparseFunction::indicator(e_set)
        .translate(model, a_inv)?
        .multiply_by(|y| op.v_n(y, n))?;
    e.iter()
        .map(|&x| {
            Ok(model
                .convolve_points(x, a)?
                .atoms()
                .iter()
                .map(|&(u, p)| g.get(u) * p)
                .sum())
        })
        .collect()
}

/// Necessary condition along an aperiodic sequence: tracks
/// `w_n = ((χ_E)^{a_n⁻} v_n)^{a_n}` on `E`.
pub fn probe_weight_products(
    op: &WeightedTranslation,
    phi: &YoungFunction,
    e: &BTreeSet<Element>,
    cfg: &ProbeConfig,
) -> Result<CriterionReport> {
    let model = op.model;
    let pts = positive_set(model, e)?;
    let ap = aperiodic_sequence_check(model, &op.eta, e, cfg.horizon)?;
    if !ap.holds_at_horizon {
        return Err(Error::PreconditionFailed(
            "sequence is not aperiodic on E at the horizon".into(),
        ));
    }
    require_embedding(phi, model)?;
    let candidates = disjoint_indices(model, &op.eta, e, cfg.horizon, false)?;
    let rows = select_rows(model, &pts, &candidates, cfg, &["w_n"], |n| {
        Ok(pulled_back_weight(op, e, &pts, n)?
            .into_iter()
            .map(|v| vec![v])
            .collect())
    })?;
    let verdict = judge(&rows, &[]);
    Ok(report(
        TheoremId::WeightProducts,
        model,
        &pts,
        rows,
        verdict,
        op.convention,
        cfg,
    ))
}

/// Necessary condition for dense periodic points along a strongly aperiodic
/// sequence. Both series use the `s`-indexed integrand
/// `(χ_E^{a_{−sn}} v_{sn})^{a_{sn}}` and `v_{sn}^{−1}` for
/// `s = 1..=series_cutoff` with `sn ≤ horizon`.
pub fn probe_series(
    op: &WeightedTranslation,
    phi: &YoungFunction,
    e: &BTreeSet<Element>,
    cfg: &ProbeConfig,
) -> Result<CriterionReport> {
    let model = op.model;
    let pts = positive_set(model, e)?;
    let strong = strongly_aperiodic_check(model, &op.eta, e, cfg.horizon, cfg.rs_bound)?;
    let Some(first) = strong.first_n else {
        return Err(Error::PreconditionFailed(
            "sequence is not strongly aperiodic on E at the horizon".into(),
        ));
    };
    require_embedding(phi, model)?;
    let candidates: Vec<u64> = (first..=cfg.horizon).collect();

    // Per point: (forward terms, inverse terms), summed over s.
    let parts = |n: u64| -> Result<(Vec<f64>, Vec<f64>, bool)> {
        let s_max = cfg.series_cutoff.min(cfg.horizon / n);
        let mut fwd = vec![0.0; pts.len()];
        let mut inv = vec![0.0; pts.len()];
        for s in 1..=s_max {
            let pulled = pulled_back_weight(op, e, &pts, s * n)?;
            for (i, &x) in pts.iter().enumerate() {
                fwd[i] += pulled[i];
                inv[i] += 1.0 / op.v_n(x, s * n)?;
            }
        }
        Ok((fwd, inv, s_max < cfg.series_cutoff))
    };
    let mut rows = select_rows(model, &pts, &candidates, cfg, &["series_integrand"], |n| {
        let (fwd, inv, _) = parts(n)?;
        Ok(fwd.iter().zip(&inv).map(|(a, b)| vec![a + b]).collect())
    })?;
    for row in &mut rows {
        let (fwd, inv, truncated) = parts(row.n_k)?;
        let (mut fs, mut is) = (0.0, 0.0);
        for (i, x) in pts.iter().enumerate() {
            if row.e_k.contains(x) {
                let m = model.haar_weight(*x)?;
                fs += fwd[i] * m;
                is += inv[i] * m;
            }
        }
        row.metrics.insert("forward_series".into(), fs);
        row.metrics.insert("inverse_series".into(), is);
        row.metrics.insert("combined_tail".into(), fs + is);
        if truncated {
            row.flags.push(SERIES_TRUNCATED.into());
        }
    }
    let verdict = judge(&rows, &["combined_tail"]);
    let mut rep = report(
        TheoremId::SeriesCriterion,
        model,
        &pts,
        rows,
        verdict,
        op.convention,
        cfg,
    );
    rep.notes
        .push("both series are summed over the same index s; the first series is stated with index r".into());
    Ok(rep)
}

fn center_generator(op: &WeightedTranslation) -> Result<Element> {
    op.eta
        .center_generator()
        .ok_or_else(|| Error::PreconditionFailed("sequence is not generated by powers of a central element".into()))
}

fn require_aperiodic_center(
    model: &HypergroupModel,
    z: Element,
    e: &BTreeSet<Element>,
    cfg: &ProbeConfig,
) -> Result<()> {
    if !model.is_central(z) {
        return Err(Error::PreconditionFailed(format!("{z} is not central")));
    }
    let c = aperiodic_center_check(model, z, e, cfg.horizon, cfg.rs_bound)?;
    if c.direct.holds_at_horizon {
        Ok(())
    } else {
        Err(Error::PreconditionFailed(format!(
            "{z} is not aperiodic on E at the horizon"
        )))
    }
}

/// Necessary condition for center sequences, tracking `v_n^{−1}` and
/// `h_n(x) = v_n(x·a_n)` on `E`. The hypotheses of the sufficient condition
/// are evaluated too; when they hold and the verdict holds, the report
/// carries a certification label.
pub fn probe_center_conditions(
    op: &WeightedTranslation,
    phi: &YoungFunction,
    e: &BTreeSet<Element>,
    cfg: &ProbeConfig,
) -> Result<CriterionReport> {
    let model = op.model;
    let pts = positive_set(model, e)?;
    let z = center_generator(op)?;
    require_aperiodic_center(model, z, e, cfg)?;
    let candidates = disjoint_indices(model, &op.eta, e, cfg.horizon, true)?;
    let mut rows = select_rows(model, &pts, &candidates, cfg, &["v_inverse", "h"], |n| {
        pts.iter()
            .map(|&x| Ok(vec![1.0 / op.v_n(x, n)?, op.h_n(x, n)?]))
            .collect()
    })?;
    for row in &mut rows {
        let rest: BTreeSet<Element> = pts.iter().copied().filter(|x| !row.e_k.contains(x)).collect();
        let norm = luxemburg_norm(&SparseFunction::indicator(&rest), phi, model)?.value;
        row.metrics.insert("complement_norm".into(), norm);
    }
    let verdict = judge(&rows, &["complement_norm"]);
    let mut rep = report(
        TheoremId::CenterNecessary,
        model,
        &pts,
        rows,
        verdict,
        op.convention,
        cfg,
    );

    if !phi.delta2.is_proven() {
        rep.sufficiency_failures.push("Φ is not proven to satisfy Δ₂".into());
    }
    if op.weight.inf_on(model) <= 0.0 {
        rep.sufficiency_failures
            .push("1/w is not a weight on the window".into());
    }
    if verdict == Verdict::HoldsEmpirically && rep.sufficiency_failures.is_empty() {
        rep.certification = Some("densely hypercyclic certified at horizon".into());
    }
    Ok(rep)
}

/// The sufficient condition for center sequences. Fails with
/// [`Error::PreconditionFailed`] naming any unmet hypothesis.
pub fn probe_sufficiency(
    op: &WeightedTranslation,
    phi: &YoungFunction,
    e: &BTreeSet<Element>,
    cfg: &ProbeConfig,
) -> Result<CriterionReport> {
    let mut rep = probe_center_conditions(op, phi, e, cfg)?;
    if !rep.sufficiency_failures.is_empty() {
        return Err(Error::PreconditionFailed(rep.sufficiency_failures.join("; ")));
    }
    rep.theorem_id = TheoremId::CenterSufficient;
    Ok(rep)
}

/// Hereditary hypercyclicity of `T_{z,w}`: tracks `w_n` and `w̃_n` on `E`.
pub fn probe_hereditary(
    model: &HypergroupModel,
    z: Element,
    w: &Weight,
    phi: &YoungFunction,
    e: &BTreeSet<Element>,
    cfg: &ProbeConfig,
) -> Result<CriterionReport> {
    let pts = positive_set(model, e)?;
    w.validate()?;
    require_aperiodic_center(model, z, e, cfg)?;
    if !phi.strictly_increasing {
        return Err(Error::PreconditionFailed("Φ is not strictly increasing".into()));
    }
    if !phi.delta2.is_proven() {
        return Err(Error::PreconditionFailed("Φ is not proven to satisfy Δ₂".into()));
    }
    let eta = EtaSequence::center_powers(model, z)?;
    let candidates = disjoint_indices(model, &eta, e, cfg.horizon, true)?;
    let rows = select_rows(model, &pts, &candidates, cfg, &["w_n", "w_tilde_n"], |n| {
        pts.iter()
            .map(|&x| {
                let (a, b) = hereditary_weights(model, x, z, w, n)?;
                Ok(vec![a, b])
            })
            .collect()
    })?;
    let verdict = judge(&rows, &[]);
    Ok(report(
        TheoremId::Hereditary,
        model,
        &pts,
        rows,
        verdict,
        ProductConvention::IterateExclusive,
        cfg,
    ))
}
