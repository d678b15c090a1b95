//! Weights, index sequences and weighted translation operators.
//!
//! Off the center a translated weight factor `w(x ∗ y)` means the translate
//! `w^y(x) = Σ_u w(u)·(δ_x ∗ δ_y)({u})`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::SparseFunction;
use crate::hypergroup::{Element, HypergroupModel};

/// A bounded positive function on the carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Weight {
    Constant {
        c: f64,
    },
    /// `low` for labels `≤ threshold`, `high` above it.
    Step {
        threshold: i64,
        low: f64,
        high: f64,
    },
    /// Listed values, `default` elsewhere.
    Table {
        values: Vec<(i64, f64)>,
        default: f64,
    },
    /// `c·r^label`.
    Geometric {
        c: f64,
        r: f64,
    },
}

impl Weight {
    pub fn constant(c: f64) -> Self {
        Weight::Constant { c }
    }

    pub fn eval(&self, x: Element) -> f64 {
        match self {
            Weight::Constant { c } => *c,
            Weight::Step { threshold, low, high } => {
                if x.0 <= *threshold {
                    *low
                } else {
                    *high
                }
            }
            Weight::Table { values, default } => values
                .iter()
                .rev()
                .find(|(k, _)| *k == x.0)
                .map_or(*default, |&(_, v)| v),
            Weight::Geometric { c, r } => c * r.powf(x.0 as f64),
        }
    }

    /// Checks that every parameter gives finite positive values.
    pub fn validate(&self) -> Result<()> {
        let params: Vec<f64> = match self {
            Weight::Constant { c } => vec![*c],
            Weight::Step { low, high, .. } => vec![*low, *high],
            Weight::Table { values, default } => values.iter().map(|&(_, v)| v).chain([*default]).collect(),
            Weight::Geometric { c, r } => vec![*c, *r],
        };
        if params.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "weight values must be finite and positive: {self:?}"
            )))
        }
    }

    pub fn sup_on(&self, model: &HypergroupModel) -> f64 {
        model.elements().iter().fold(0.0, |m, &x| m.max(self.eval(x)))
    }

    pub fn inf_on(&self, model: &HypergroupModel) -> f64 {
        model.elements().iter().fold(f64::INFINITY, |m, &x| m.min(self.eval(x)))
    }

    /// `w^y(x) = Σ_u w(u)·(δ_x ∗ δ_y)({u})`.
    pub fn translated(&self, model: &HypergroupModel, x: Element, y: Element) -> Result<f64> {
        Ok(model
            .convolve_points(x, y)?
            .atoms()
            .iter()
            .map(|&(u, p)| self.eval(u) * p)
            .sum())
    }
}

/// The index sequence `(a_n)_{n∈ℤ}` with `a_0 = e` and `a_{−n} = a_n⁻`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum EtaSequence {
    /// `a_n = z^n` for central `z`.
    CenterPowers { z: Element },
    /// `a_n = n` for `n ≥ 0`.
    Labels,
    /// `a_n = value` for every `n > 0`.
    Constant { value: Element },
    /// Explicit entries; indices not listed are out of range.
    Table { entries: BTreeMap<i64, Element> },
}

impl EtaSequence {
    pub fn center_powers(model: &HypergroupModel, z: Element) -> Result<Self> {
        if !model.is_central(z) {
            return Err(Error::NotCentral(z));
        }
        Ok(EtaSequence::CenterPowers { z })
    }

    /// Builds a table from entries for any signs of `n`. Missing negative
    /// indices are filled by the involution, and `a_0 = e` is added if absent.
    pub fn table<I>(model: &HypergroupModel, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Element)>,
    {
        let mut map: BTreeMap<i64, Element> = entries.into_iter().collect();
        map.entry(0).or_insert(model.identity());
        let filled: Vec<(i64, Element)> = map
            .iter()
            .filter(|(n, _)| **n > 0 && !map.contains_key(&-**n))
            .map(|(&n, &x)| Ok((-n, model.involution(x)?)))
            .collect::<Result<_>>()?;
        map.extend(filled);
        let eta = EtaSequence::Table { entries: map };
        eta.validate(model)?;
        Ok(eta)
    }

    /// Checks `a_0 = e`, `a_{−n} = a_n⁻` and the generator's own requirements.
    pub fn validate(&self, model: &HypergroupModel) -> Result<()> {
        let e = model.identity();
        match self {
            EtaSequence::CenterPowers { z } => {
                if !model.is_central(*z) {
                    return Err(Error::NotCentral(*z));
                }
            }
            EtaSequence::Labels => {
                if !model.contains(Element(0)) || e != Element(0) {
                    return Err(Error::InvalidArgument("label sequence needs identity label 0".into()));
                }
            }
            EtaSequence::Constant { value } => {
                model.involution(*value)?;
            }
            EtaSequence::Table { entries } => {
                if entries.get(&0) != Some(&e) {
                    return Err(Error::InvalidArgument(format!("a_0 must be the identity {e}")));
                }
                for (&n, &x) in entries.range(1..) {
                    if let Some(&neg) = entries.get(&-n) {
                        let xi = model.involution(x)?;
                        if neg != xi {
                            return Err(Error::InvalidArgument(format!("a_{} = {neg} but a_{n}⁻ = {xi}", -n)));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `a_n`. Fails with [`Error::EtaOutOfRange`] for unlisted table indices
    /// and with [`Error::WindowOverflow`] when `a_n` leaves the window.
    pub fn eval(&self, model: &HypergroupModel, n: i64) -> Result<Element> {
        if n == 0 {
            return Ok(model.identity());
        }
        match self {
            EtaSequence::CenterPowers { z } => model.power_center_point_signed(*z, n),
            EtaSequence::Labels => {
                let x = Element(n.abs());
                if n > 0 {
                    model.require(x)?;
                    Ok(x)
                } else {
                    model.involution(x)
                }
            }
            EtaSequence::Constant { value } => {
                if n > 0 {
                    Ok(*value)
                } else {
                    model.involution(*value)
                }
            }
            EtaSequence::Table { entries } => {
                let x = *entries.get(&n).ok_or(Error::EtaOutOfRange(n))?;
                model.require(x)?;
                Ok(x)
            }
        }
    }

    pub fn center_generator(&self) -> Option<Element> {
        match self {
            EtaSequence::CenterPowers { z } => Some(*z),
            _ => None,
        }
    }
}

/// How many weight factors `v_n` carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductConvention {
    /// `n + 1` factors, `j = 0..=n`.
    Inclusive,
    /// `n` factors, `j = 0..n`, so that `Λ_n = T^n` on groups and `Λ_0 = I`.
    #[default]
    IterateExclusive,
}

impl ProductConvention {
    pub fn factors(self, n: u64) -> u64 {
        match self {
            ProductConvention::Inclusive => n + 1,
            ProductConvention::IterateExclusive => n,
        }
    }
}

/// The operator sequence `Λ_n f = v_n · f^{a_{−n}}`.
#[derive(Debug, Clone)]
pub struct WeightedTranslation<'a> {
    pub model: &'a HypergroupModel,
    pub weight: Weight,
    pub eta: EtaSequence,
    pub convention: ProductConvention,
}

impl<'a> WeightedTranslation<'a> {
    pub fn new(
        model: &'a HypergroupModel,
        weight: Weight,
        eta: EtaSequence,
        convention: ProductConvention,
    ) -> Result<Self> {
        weight.validate()?;
        eta.validate(model)?;
        Ok(WeightedTranslation {
            model,
            weight,
            eta,
            convention,
        })
    }

    /// `w^{a_{−j}}(x)`.
    pub fn factor(&self, x: Element, j: u64) -> Result<f64> {
        let a = self.eta.eval(self.model, -(j as i64))?;
        self.weight.translated(self.model, x, a)
    }

    /// `v_n(x) = ∏_j w^{a_{−j}}(x)` over the convention's factor range.
    pub fn v_n(&self, x: Element, n: u64) -> Result<f64> {
        self.model.require(x)?;
        let mut acc = 1.0;
        for j in (0..self.convention.factors(n)).rev() {
            acc *= self.factor(x, j)?;
        }
        Ok(acc)
    }

    /// `h_n(x) = v_n(x·a_n)`; needs central `a_n`.
    pub fn h_n(&self, x: Element, n: u64) -> Result<f64> {
        let a = self.eta.eval(self.model, n as i64)?;
        let y = self.model.central_product(x, a)?;
        self.v_n(y, n)
    }

    /// `Λ_n f`. Factors are applied innermost first so that the result
    /// agrees bit for bit with iterating [`t_apply`] on groups.
    pub fn lambda_apply(&self, f: &SparseFunction, n: u64) -> Result<SparseFunction> {
        let shift = self.eta.eval(self.model, -(n as i64))?;
        let g = f.translate(self.model, shift)?;
        let factors = self.convention.factors(n);
        let out = g.iter().map(|(x, v)| {
            let mut acc = v;
            for j in (0..factors).rev() {
                acc *= self.factor(x, j)?;
            }
            Ok((x, acc))
        });
        out.collect::<Result<Vec<_>>>().map(SparseFunction::from_pairs)
    }

    /// `(S_n f)(x) = v_n(x·a_n)^{−1}·f(x·a_n)`, a two-sided inverse of `Λ_n`
    /// when `a_n` is central.
    pub fn s_apply(&self, f: &SparseFunction, n: u64) -> Result<SparseFunction> {
        let a = self.eta.eval(self.model, n as i64)?;
        if !self.model.is_central(a) {
            return Err(Error::NotCentral(a));
        }
        let a_inv = self.eta.eval(self.model, -(n as i64))?;
        let mut out = Vec::with_capacity(f.len());
        for (u, v) in f.iter() {
            self.model.require(u)?;
            let x = self.model.central_product(u, a_inv)?;
            debug_assert_eq!(self.model.central_product(x, a)?, u);
            out.push((x, v / self.v_n(u, n)?));
        }
        Ok(SparseFunction::from_pairs(out))
    }
}

/// `T_{a,w} f = w · f^{a⁻}`.
pub fn t_apply(model: &HypergroupModel, f: &SparseFunction, a: Element, w: &Weight) -> Result<SparseFunction> {
    let g = f.translate(model, model.involution(a)?)?;
    g.multiply_by(|x| Ok(w.eval(x)))
}

/// `T_{a,w}^n f`.
pub fn t_iterate(
    model: &HypergroupModel,
    f: &SparseFunction,
    a: Element,
    w: &Weight,
    n: u64,
) -> Result<SparseFunction> {
    let mut g = f.clone();
    for _ in 0..n {
        g = t_apply(model, &g, a, w)?;
    }
    Ok(g)
}

/// `(w_n(x), w̃_n(x))` with `w_n(x) = ∏_{j=1}^{n} w(x·z^j)` and
/// `w̃_n(x) = (∏_{j=0}^{n−1} w(x·z^{−j}))^{−1}` for central `z`.
pub fn hereditary_weights(model: &HypergroupModel, x: Element, z: Element, w: &Weight, n: u64) -> Result<(f64, f64)> {
    if !model.is_central(z) {
        return Err(Error::NotCentral(z));
    }
    model.require(x)?;
    let zi = model.involution(z)?;
    let mut forward = 1.0;
    let mut p = x;
    for _ in 0..n {
        p = model.central_product(p, z)?;
        forward *= w.eval(p);
    }
    let mut backward = 1.0;
    let mut q = x;
    for j in 0..n {
        if j > 0 {
            q = model.central_product(q, zi)?;
        }
        backward *= w.eval(q);
    }
    Ok((forward, 1.0 / backward))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn salas_weight() -> Weight {
        Weight::Step {
            threshold: 0,
            low: 2.0,
            high: 0.5,
        }
    }

    fn chi(x: i64) -> SparseFunction {
        SparseFunction::indicator([&Element(x)])
    }

    fn z_model() -> HypergroupModel {
        HypergroupModel::integer_group(20).unwrap()
    }

    fn shift<'a>(model: &'a HypergroupModel, w: Weight, conv: ProductConvention) -> WeightedTranslation<'a> {
        let eta = EtaSequence::center_powers(model, Element(1)).unwrap();
        WeightedTranslation::new(model, w, eta, conv).unwrap()
    }

    #[test]
    fn v_n_examples() {
        let z = z_model();
        let op = shift(&z, Weight::constant(3.0), ProductConvention::IterateExclusive);
        assert_eq!(op.v_n(Element(2), 4).unwrap(), 81.0);
        let op = shift(&z, salas_weight(), ProductConvention::IterateExclusive);
        assert_eq!(op.v_n(Element(0), 3).unwrap(), 8.0);
        assert_eq!(op.v_n(Element(0), 0).unwrap(), 1.0);
        let op = shift(&z, salas_weight(), ProductConvention::Inclusive);
        assert_eq!(op.v_n(Element(0), 3).unwrap(), 16.0);
        assert_eq!(op.v_n(Element(0), 0).unwrap(), 2.0);
    }

    #[test]
    fn lambda_examples() {
        let z = z_model();
        let op = shift(&z, salas_weight(), ProductConvention::IterateExclusive);
        let f = SparseFunction::from_pairs([(Element(0), 1.5), (Element(-3), 2.0)]);
        assert_eq!(op.lambda_apply(&f, 0).unwrap(), f);
        assert_eq!(op.lambda_apply(&chi(0), 4).unwrap(), chi(4).scale(1.0 / 16.0));
    }

    #[test]
    fn t_apply_examples() {
        let z = z_model();
        let f = SparseFunction::from_pairs([(Element(1), 1.0), (Element(2), -4.0)]);
        assert_eq!(t_apply(&z, &f, Element(0), &Weight::constant(1.0)).unwrap(), f);
        assert_eq!(
            t_apply(&z, &chi(0), Element(1), &Weight::constant(2.0)).unwrap(),
            chi(1).scale(2.0)
        );
        let dr = HypergroupModel::dunkl_ramirez(0.5, 8).unwrap();
        assert_eq!(
            t_apply(&dr, &chi(2), Element(1), &Weight::constant(1.0)).unwrap(),
            chi(2)
        );
        assert_eq!(t_iterate(&z, &f, Element(1), &salas_weight(), 0).unwrap(), f);
        assert_eq!(
            t_iterate(&z, &f, Element(1), &salas_weight(), 1).unwrap(),
            t_apply(&z, &f, Element(1), &salas_weight()).unwrap()
        );
    }

    #[test]
    fn lambda_matches_iterates_on_integers() {
        let z = z_model();
        let w = Weight::Table {
            values: vec![(-3, 0.7), (0, 1.9), (2, 0.31), (5, 2.2)],
            default: 1.1,
        };
        let op = shift(&z, w.clone(), ProductConvention::IterateExclusive);
        let f = SparseFunction::from_pairs([(Element(-2), 0.3), (Element(1), -1.7), (Element(4), 0.9)]);
        for n in 0..=12 {
            assert_eq!(
                op.lambda_apply(&f, n).unwrap(),
                t_iterate(&z, &f, Element(1), &w, n).unwrap(),
                "n={n}"
            );
        }
    }

    #[test]
    fn s_apply_examples() {
        let z = z_model();
        let op = shift(&z, salas_weight(), ProductConvention::IterateExclusive);
        assert_eq!(op.s_apply(&chi(0), 0).unwrap(), chi(0));
        let s = op.s_apply(&chi(0), 3).unwrap();
        assert_eq!(s, chi(-3).scale(1.0 / 8.0));
        assert_eq!(op.lambda_apply(&s, 3).unwrap(), chi(0));
    }

    #[test]
    fn s_apply_inverts_lambda_on_dunkl_ramirez() {
        let dr = HypergroupModel::dunkl_ramirez(0.5, 8).unwrap();
        let w = Weight::Geometric { c: 0.8, r: 1.3 };
        for conv in [ProductConvention::IterateExclusive, ProductConvention::Inclusive] {
            let op = WeightedTranslation::new(
                &dr,
                w.clone(),
                EtaSequence::center_powers(&dr, Element(1)).unwrap(),
                conv,
            )
            .unwrap();
            let f = SparseFunction::from_pairs([(Element(0), 0.4), (Element(1), -2.5), (Element(3), 1.0)]);
            for n in 0..=10 {
                let back = op.lambda_apply(&op.s_apply(&f, n).unwrap(), n).unwrap();
                let fwd = op.s_apply(&op.lambda_apply(&f, n).unwrap(), n).unwrap();
                for g in [back, fwd] {
                    assert!(g.sub(&f).max_abs() <= 1e-12, "n={n} {conv:?}");
                }
            }
        }
    }

    #[test]
    fn s_apply_needs_central_steps() {
        let su = HypergroupModel::su2(8).unwrap();
        let eta = EtaSequence::Labels;
        let op = WeightedTranslation::new(&su, Weight::constant(1.0), eta, ProductConvention::default()).unwrap();
        assert_eq!(op.s_apply(&chi(0), 2), Err(Error::NotCentral(Element(2))));
        assert_eq!(
            EtaSequence::center_powers(&su, Element(1)),
            Err(Error::NotCentral(Element(1)))
        );
    }

    #[test]
    fn hereditary_examples() {
        let z = z_model();
        assert_eq!(
            hereditary_weights(&z, Element(3), Element(1), &Weight::constant(1.0), 5).unwrap(),
            (1.0, 1.0)
        );
        assert_eq!(
            hereditary_weights(&z, Element(0), Element(1), &salas_weight(), 3).unwrap(),
            (0.125, 0.125)
        );
        let w = Weight::Geometric { c: 1.1, r: 0.9 };
        let op = shift(&z, w.clone(), ProductConvention::IterateExclusive);
        for n in 0..8u64 {
            for x in -5..=5 {
                let (wn, _) = hereditary_weights(&z, Element(x), Element(1), &w, n).unwrap();
                let v = op.v_n(Element(x + n as i64), n).unwrap();
                assert!((wn - v).abs() <= 1e-12 * v, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn eta_tables_validate() {
        let z = z_model();
        let eta = EtaSequence::table(&z, [(1, Element(2)), (2, Element(4))]).unwrap();
        assert_eq!(eta.eval(&z, -2).unwrap(), Element(-4));
        assert_eq!(eta.eval(&z, 3), Err(Error::EtaOutOfRange(3)));
        assert!(EtaSequence::table(&z, [(0, Element(1))]).is_err());
        assert!(EtaSequence::table(&z, [(1, Element(2)), (-1, Element(2))]).is_err());
        assert_eq!(EtaSequence::Labels.eval(&z, -3).unwrap(), Element(-3));
        let dr = HypergroupModel::dunkl_ramirez(0.5, 4).unwrap();
        assert!(matches!(
            EtaSequence::Labels.eval(&dr, 5),
            Err(Error::WindowOverflow { .. })
        ));
    }

    #[test]
    fn weights_validate_and_evaluate() {
        assert!(Weight::constant(0.0).validate().is_err());
        assert!(Weight::Geometric { c: 1.0, r: -2.0 }.validate().is_err());
        let w = Weight::Table {
            values: vec![(1, 3.0)],
            default: 0.5,
        };
        assert_eq!(w.eval(Element(1)), 3.0);
        assert_eq!(w.eval(Element(7)), 0.5);
        let z = HypergroupModel::integer_group(3).unwrap();
        assert_eq!(salas_weight().sup_on(&z), 2.0);
        assert_eq!(salas_weight().inf_on(&z), 0.5);
    }
}
