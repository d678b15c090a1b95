//! Finitely supported real functions on the carrier.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hypergroup::{Element, HypergroupModel, SparseMeasure};

/// A real function with finite support. Zero values are never stored, and
/// the function is implicitly zero off its support.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<(Element, f64)>", into = "Vec<(Element, f64)>")]
pub struct SparseFunction {
    values: BTreeMap<Element, f64>,
}

impl From<Vec<(Element, f64)>> for SparseFunction {
    fn from(pairs: Vec<(Element, f64)>) -> Self {
        SparseFunction::from_pairs(pairs)
    }
}

impl From<SparseFunction> for Vec<(Element, f64)> {
    fn from(f: SparseFunction) -> Self {
        f.values.into_iter().collect()
    }
}

impl FromIterator<(Element, f64)> for SparseFunction {
    fn from_iter<I: IntoIterator<Item = (Element, f64)>>(iter: I) -> Self {
        SparseFunction::from_pairs(iter)
    }
}

impl SparseFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Later pairs overwrite earlier ones with the same label.
    pub fn from_pairs<I: IntoIterator<Item = (Element, f64)>>(pairs: I) -> Self {
        let mut values = BTreeMap::new();
        for (x, v) in pairs {
            if v == 0.0 {
                values.remove(&x);
            } else {
                values.insert(x, v);
            }
        }
        SparseFunction { values }
    }

    /// `χ_A`.
    pub fn indicator<'a, I: IntoIterator<Item = &'a Element>>(set: I) -> Self {
        SparseFunction {
            values: set.into_iter().map(|&x| (x, 1.0)).collect(),
        }
    }

    pub fn get(&self, x: Element) -> f64 {
        self.values.get(&x).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Element, f64)> + '_ {
        self.values.iter().map(|(&x, &v)| (x, v))
    }

    pub fn support(&self) -> BTreeSet<Element> {
        self.values.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, c: f64) -> Self {
        self.iter().map(|(x, v)| (x, c * v)).collect()
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: f64, other: &SparseFunction) -> Self {
        let mut values = self.values.clone();
        for (x, v) in other.iter() {
            *values.entry(x).or_insert(0.0) += c * v;
        }
        values.retain(|_, v| *v != 0.0);
        SparseFunction { values }
    }

    pub fn add(&self, other: &SparseFunction) -> Self {
        self.add_scaled(1.0, other)
    }

    pub fn sub(&self, other: &SparseFunction) -> Self {
        self.add_scaled(-1.0, other)
    }

    /// `f·χ_A`.
    pub fn restrict(&self, set: &BTreeSet<Element>) -> Self {
        self.iter().filter(|(x, _)| set.contains(x)).collect()
    }

    /// Pointwise product with a function evaluated on the support only.
    pub fn multiply_by<F>(&self, mut g: F) -> Result<Self>
    where
        F: FnMut(Element) -> Result<f64>,
    {
        let mut out = BTreeMap::new();
        for (x, v) in self.iter() {
            let p = g(x)? * v;
            if p != 0.0 {
                out.insert(x, p);
            }
        }
        Ok(SparseFunction { values: out })
    }

    /// `max_{x∈A} |f(x)|`, zero for empty `A`.
    pub fn sup_on_set(&self, set: &BTreeSet<Element>) -> f64 {
        set.iter().fold(0.0, |m, &x| m.max(self.get(x).abs()))
    }

    /// `Σ_x f(x)·m({x})`.
    pub fn integrate_haar(&self, model: &HypergroupModel) -> Result<f64> {
        self.iter().map(|(x, v)| Ok(v * model.haar_weight(x)?)).sum()
    }

    /// Right translate `f^y(x) = Σ_u f(u)·(δ_x ∗ δ_y)({u})`.
    ///
    /// The points where `f^y` can be nonzero are `supp(f) ∗ {y⁻}`; if that set
    /// leaves the window the translate is not computable and the call fails.
    pub fn translate(&self, model: &HypergroupModel, y: Element) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let yi = model.involution(y)?;
        for x in self.values.keys() {
            model.require(*x)?;
        }
        let targets = model.set_convolve(&self.support(), &BTreeSet::from([yi]))?;
        let mut out = BTreeMap::new();
        for x in targets {
            let entry = model.entry(x, y)?;
            let v: f64 = entry.measure.atoms().iter().map(|&(u, p)| self.get(u) * p).sum();
            if v != 0.0 {
                out.insert(x, v);
            }
        }
        Ok(SparseFunction { values: out })
    }

    /// `(f ∗ μ)(x) = Σ_y μ({y})·f(x ∗ y⁻)`. In particular `f ∗ δ_{y⁻} = f^y`.
    pub fn convolve_measure(&self, model: &HypergroupModel, mu: &SparseMeasure) -> Result<Self> {
        let mut acc = SparseFunction::zero();
        for &(y, m) in mu.atoms() {
            let yi = model.involution(y)?;
            acc = acc.add_scaled(m, &self.translate(model, yi)?);
        }
        Ok(acc)
    }

    /// Checks that every support point lies in the model's window.
    pub fn check_window(&self, model: &HypergroupModel) -> Result<()> {
        match self.values.keys().find(|x| !model.contains(**x)) {
            Some(&x) => Err(model.overflow(x)),
            None => Ok(()),
        }
    }
}

/// `χ_A` for a set that must lie in the window.
pub fn indicator_in_window(model: &HypergroupModel, set: &BTreeSet<Element>) -> Result<SparseFunction> {
    let f = SparseFunction::indicator(set);
    f.check_window(model)?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    fn set(v: &[i64]) -> BTreeSet<Element> {
        v.iter().copied().map(Element).collect()
    }

    fn chi(v: &[i64]) -> SparseFunction {
        SparseFunction::indicator(&set(v))
    }

    #[test]
    fn translate_by_identity_is_noop() {
        let f = SparseFunction::from_pairs([(Element(1), 2.0), (Element(4), -0.5)]);
        for model in [
            HypergroupModel::dunkl_ramirez(0.3, 8).unwrap(),
            HypergroupModel::su2(12).unwrap(),
            HypergroupModel::integer_group(8).unwrap(),
        ] {
            assert_eq!(f.translate(&model, Element(0)).unwrap(), f);
        }
    }

    #[test]
    fn integer_translate_shifts_left() {
        let z = HypergroupModel::integer_group(8).unwrap();
        assert_eq!(chi(&[3]).translate(&z, Element(1)).unwrap(), chi(&[2]));
    }

    #[test]
    fn dunkl_ramirez_translate_example() {
        let dr = HypergroupModel::dunkl_ramirez(0.5, 8).unwrap();
        assert_eq!(chi(&[2]).translate(&dr, Element(1)).unwrap(), chi(&[2]));
        // f^1 swaps the values at 0 and 1 when a = 1/2
        let f = SparseFunction::from_pairs([(Element(0), 3.0), (Element(1), 5.0)]);
        let g = f.translate(&dr, Element(1)).unwrap();
        assert_eq!(g.get(Element(0)), 5.0);
        assert_eq!(g.get(Element(1)), 3.0);
    }

    #[test]
    fn su2_translate_matches_pointwise_evaluation() {
        let su = HypergroupModel::su2(16).unwrap();
        let f = SparseFunction::from_pairs([(Element(1), 1.0), (Element(3), -2.0)]);
        let g = f.translate(&su, Element(2)).unwrap();
        for x in 0..=12 {
            let x = Element(x);
            let mu = su.convolve_points(x, Element(2)).unwrap();
            let direct: f64 = mu.atoms().iter().map(|&(u, p)| f.get(u) * p).sum();
            assert!((g.get(x) - direct).abs() < 1e-15, "x={x}");
        }
    }

    #[test]
    fn translate_overflow_is_reported() {
        let z = HypergroupModel::integer_group(4).unwrap();
        assert!(matches!(
            chi(&[-4]).translate(&z, Element(1)),
            Err(Error::WindowOverflow {
                element: Element(-5),
                ..
            })
        ));
        assert!(chi(&[-4]).translate(&z, Element(-1)).is_ok());
    }

    #[test]
    fn convolve_with_point_masses() {
        let z = HypergroupModel::integer_group(8).unwrap();
        let g = chi(&[0])
            .convolve_measure(&z, &SparseMeasure::point(Element(-1)))
            .unwrap();
        assert_eq!(g, chi(&[-1]));
        let dr = HypergroupModel::dunkl_ramirez(0.5, 8).unwrap();
        let g = chi(&[2])
            .convolve_measure(&dr, &SparseMeasure::point(Element(1)))
            .unwrap();
        assert_eq!(g, chi(&[2]));
        let f = SparseFunction::from_pairs([(Element(2), 1.5)]);
        assert_eq!(f.convolve_measure(&dr, &SparseMeasure::point(Element(0))).unwrap(), f);
    }

    #[test]
    fn haar_integrals() {
        let dr = HypergroupModel::dunkl_ramirez(0.5, 8).unwrap();
        assert_eq!(chi(&[0]).integrate_haar(&dr).unwrap(), 1.0);
        let su = HypergroupModel::su2(8).unwrap();
        assert_eq!(chi(&[1]).integrate_haar(&su).unwrap(), 4.0);
        assert_eq!(SparseFunction::zero().integrate_haar(&su).unwrap(), 0.0);
    }

    #[test]
    fn indicators_and_sups() {
        assert!(chi(&[]).is_zero());
        let f = chi(&[0, 1]);
        assert_eq!(f.support(), set(&[0, 1]));
        assert!(f.iter().all(|(_, v)| v == 1.0));
        let dr = HypergroupModel::dunkl_ramirez(0.5, 5).unwrap();
        let all: BTreeSet<Element> = dr.elements().iter().copied().collect();
        let ones = indicator_in_window(&dr, &all).unwrap();
        assert_eq!(ones.len(), 6);
        assert!(indicator_in_window(&dr, &set(&[9])).is_err());

        assert_eq!(chi(&[0]).sup_on_set(&set(&[0])), 1.0);
        assert_eq!(chi(&[0]).sup_on_set(&set(&[5])), 0.0);
        let g = chi(&[0]).scale(2.0).sub(&chi(&[1]).scale(3.0));
        assert_eq!(g.sup_on_set(&set(&[0, 1])), 3.0);
        assert_eq!(g.sup_on_set(&set(&[])), 0.0);
    }

    #[test]
    fn zero_values_are_not_stored() {
        let f = chi(&[1, 2]).sub(&chi(&[1]));
        assert_eq!(f.support(), set(&[2]));
        let f = SparseFunction::from_pairs([(Element(3), 0.0)]);
        assert!(f.is_zero());
    }
}
