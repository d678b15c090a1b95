use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{ConvEntry, Element, Family, SparseMeasure};
use crate::error::{Error, Result};

/// Full atoms of `δ_x ∗ δ_y` for the closed-form families, ignoring any window.
pub(super) fn closed_product(family: &Family, x: i64, y: i64) -> Vec<(i64, f64)> {
    match *family {
        Family::DunklRamirez { a } => dunkl_ramirez(a, x, y),
        Family::Su2 => su2(x, y),
        Family::IntegerGroup => vec![(x + y, 1.0)],
        Family::TableDefined => unreachable!("table products are not closed form"),
    }
}

pub(super) fn closed_involution(family: &Family, x: i64) -> i64 {
    match family {
        Family::IntegerGroup => -x,
        _ => x,
    }
}

fn dunkl_ramirez(a: f64, r: i64, s: i64) -> Vec<(i64, f64)> {
    if r != s {
        return vec![(r.max(s), 1.0)];
    }
    if r == 0 {
        return vec![(0, 1.0)];
    }
    let mut out = Vec::with_capacity(r as usize + 1);
    out.push((0, a.powi(r as i32) / (1.0 - a)));
    for k in 1..r {
        out.push((k, a.powi((r - k) as i32)));
    }
    out.push((r, (1.0 - 2.0 * a) / (1.0 - a)));
    out
}

fn su2(m: i64, n: i64) -> Vec<(i64, f64)> {
    let denom = ((m + 1) * (n + 1)) as f64;
    ((m - n).abs()..=m + n)
        .step_by(2)
        .map(|k| (k, (k + 1) as f64 / denom))
        .collect()
}

/// A finite hypergroup given by its complete product table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSpec {
    pub labels: Vec<i64>,
    pub identity: i64,
    /// Pairs `(x, x⁻)`. Empty means the identity map (Hermitian table).
    #[serde(default)]
    pub involution: Vec<(i64, i64)>,
    pub products: Vec<TableProduct>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableProduct {
    pub x: i64,
    pub y: i64,
    pub atoms: Vec<(i64, f64)>,
}

type TableParts = (Vec<Element>, Element, Vec<usize>, Vec<ConvEntry>);

pub(super) fn table_entries(spec: &TableSpec) -> Result<TableParts> {
    let mut labels = spec.labels.clone();
    labels.sort_unstable();
    labels.dedup();
    if labels.len() != spec.labels.len() || labels.is_empty() {
        return Err(Error::InvalidModel("table labels must be nonempty and unique".into()));
    }
    let index: HashMap<i64, usize> = labels.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let lookup = |x: i64| {
        index
            .get(&x)
            .copied()
            .ok_or_else(|| Error::InvalidModel(format!("label {x} is not in the carrier")))
    };
    lookup(spec.identity)?;

    let n = labels.len();
    let mut involution: Vec<usize> = (0..n).collect();
    for &(x, xi) in &spec.involution {
        involution[lookup(x)?] = lookup(xi)?;
    }

    let mut slots: Vec<Option<ConvEntry>> = vec![None; n * n];
    for p in &spec.products {
        let slot = lookup(p.x)? * n + lookup(p.y)?;
        if slots[slot].is_some() {
            return Err(Error::InvalidModel(format!("duplicate product ({}, {})", p.x, p.y)));
        }
        let mut acc = BTreeMap::new();
        for &(u, m) in &p.atoms {
            lookup(u)?;
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::InvalidModel(format!(
                    "product ({}, {}) has non-positive mass {m} at {u}",
                    p.x, p.y
                )));
            }
            *acc.entry(Element(u)).or_insert(0.0) += m;
        }
        slots[slot] = Some(ConvEntry {
            measure: SparseMeasure::from_map(acc),
            overflow_at: None,
        });
    }
    let table = slots
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            e.ok_or_else(|| Error::InvalidModel(format!("missing product ({}, {})", labels[i / n], labels[i % n])))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        labels.into_iter().map(Element).collect(),
        Element(spec.identity),
        involution,
        table,
    ))
}
