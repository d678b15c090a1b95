//! Discrete hypergroups as sparse convolution algebras.
//!
//! A [`HypergroupModel`] holds a concrete family truncated to a finite window
//! of carrier points. All point-mass products `δ_x ∗ δ_y` for `x, y` in the
//! window are tabulated at construction; every later operation is a read of
//! that table. Products whose support leaves the window keep their in-window
//! atoms but are marked as overflowing, and any operation that needs the full
//! measure fails with [`Error::WindowOverflow`].

mod axioms;
mod families;
mod measure;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use axioms::{Axiom, Violation};
pub use families::{TableProduct, TableSpec};
pub use measure::SparseMeasure;

use crate::error::{Error, Result};

/// Tolerance on the total mass of a probability measure.
pub const PROB_TOL: f64 = 1e-12;
/// Per-atom tolerance for associativity, which accumulates rounding over triple sums.
pub const ASSOC_TOL: f64 = 1e-10;

/// A carrier point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub i64);

impl Element {
    pub fn label(self) -> i64 {
        self.0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<i64> for Element {
    fn from(v: i64) -> Self {
        Element(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// Dunkl–Ramirez hypergroup on ℕ₀ with parameter `a ∈ (0, 1/2]`.
    DunklRamirez { a: f64 },
    /// SU(2) hypergroup on ℕ₀.
    Su2,
    /// The additive group ℤ.
    IntegerGroup,
    /// A finite hypergroup given by its full product table.
    TableDefined,
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::DunklRamirez { a } => format!("dunkl_ramirez(a={a})"),
            Family::Su2 => "su2".into(),
            Family::IntegerGroup => "integer_group".into(),
            Family::TableDefined => "table".into(),
        }
    }
}

/// One tabulated product `δ_x ∗ δ_y`, restricted to the window.
#[derive(Debug, Clone)]
pub(crate) struct ConvEntry {
    pub(crate) measure: SparseMeasure,
    /// First support point outside the window, if any.
    pub(crate) overflow_at: Option<Element>,
}

impl ConvEntry {
    pub(crate) fn overflows(&self) -> bool {
        self.overflow_at.is_some()
    }
}

/// Center members found in the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterReport {
    pub members: Vec<Element>,
    pub horizon: i64,
}

#[derive(Debug, Clone)]
pub struct HypergroupModel {
    family: Family,
    bound: i64,
    elements: Vec<Element>,
    identity: Element,
    involution: Vec<usize>,
    table: Vec<ConvEntry>,
    haar: Vec<f64>,
    central: Vec<bool>,
}

impl HypergroupModel {
    pub fn dunkl_ramirez(a: f64, window: i64) -> Result<Self> {
        if !(a > 0.0 && a <= 0.5) {
            return Err(Error::InvalidModel(format!(
                "Dunkl-Ramirez parameter must lie in (0, 1/2], got {a}"
            )));
        }
        Self::closed_form(Family::DunklRamirez { a }, window)
    }

    pub fn su2(window: i64) -> Result<Self> {
        Self::closed_form(Family::Su2, window)
    }

    pub fn integer_group(window: i64) -> Result<Self> {
        Self::closed_form(Family::IntegerGroup, window)
    }

    /// Builds a finite hypergroup from a product table. Axiom violations are hard errors.
    pub fn from_table(spec: &TableSpec) -> Result<Self> {
        let model = Self::from_table_unchecked(spec)?;
        let violations = model.verify_axioms(model.bound);
        if let Some(v) = violations.first() {
            return Err(Error::InvalidModel(format!(
                "table violates {} ({} witnesses, first {:?})",
                v.axiom,
                v.count,
                v.witnesses.first()
            )));
        }
        Ok(model)
    }

    /// Builds a table model checking structure only (labels, completeness,
    /// involution, masses). Used to run [`HypergroupModel::verify_axioms`] on
    /// deliberately broken tables.
    pub fn from_table_unchecked(spec: &TableSpec) -> Result<Self> {
        let (elements, identity, involution, table) = families::table_entries(spec)?;
        Self::assemble(Family::TableDefined, elements, identity, involution, table)
    }

    fn closed_form(family: Family, window: i64) -> Result<Self> {
        if window < 1 {
            return Err(Error::InvalidModel(format!(
                "window bound must be at least 1, got {window}"
            )));
        }
        let labels: Vec<i64> = match family {
            Family::IntegerGroup => (-window..=window).collect(),
            _ => (0..=window).collect(),
        };
        let elements: Vec<Element> = labels.iter().copied().map(Element).collect();
        let lo = labels[0];
        let hi = *labels.last().unwrap();
        let n = elements.len();
        let index = |x: i64| (x - lo) as usize;
        let involution: Vec<usize> = labels
            .iter()
            .map(|&x| index(families::closed_involution(&family, x)))
            .collect();
        let mut table = Vec::with_capacity(n * n);
        for &x in &labels {
            for &y in &labels {
                let full = families::closed_product(&family, x, y);
                let overflow_at = full.iter().map(|&(u, _)| u).find(|&u| u < lo || u > hi).map(Element);
                let measure = SparseMeasure::from_sorted_unchecked(
                    full.into_iter()
                        .filter(|&(u, m)| u >= lo && u <= hi && m > 0.0)
                        .map(|(u, m)| (Element(u), m))
                        .collect(),
                );
                table.push(ConvEntry { measure, overflow_at });
            }
        }
        Self::assemble(family, elements, Element(0), involution, table)
    }

    fn assemble(
        family: Family,
        elements: Vec<Element>,
        identity: Element,
        involution: Vec<usize>,
        table: Vec<ConvEntry>,
    ) -> Result<Self> {
        let n = elements.len();
        let bound = elements.iter().map(|e| e.0.abs()).max().unwrap_or(0);
        let mut model = HypergroupModel {
            family,
            bound,
            elements,
            identity,
            involution,
            table,
            haar: Vec::new(),
            central: Vec::new(),
        };
        let e_idx = model
            .index_of(identity)
            .ok_or_else(|| Error::InvalidModel(format!("identity {identity} not in carrier")))?;
        let mut haar = Vec::with_capacity(n);
        let mut central = Vec::with_capacity(n);
        for i in 0..n {
            let inv = model.involution[i];
            let self_product = &model.table[i * n + inv].measure;
            let at_e = self_product.mass_at(identity);
            if at_e <= 0.0 {
                return Err(Error::InvalidModel(format!(
                    "identity not in supp(δ_x ∗ δ_x⁻) for x = {}",
                    model.elements[i]
                )));
            }
            haar.push(if i == e_idx { 1.0 } else { 1.0 / at_e });
            let other = &model.table[inv * n + i];
            central.push(is_identity_mass(&model.table[i * n + inv], identity) && is_identity_mass(other, identity));
        }
        model.haar = haar;
        model.central = central;
        Ok(model)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Truncation bound `B`: the largest absolute label in the window.
    pub fn window(&self) -> i64 {
        self.bound
    }

    /// Window elements, sorted by label.
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn identity(&self) -> Element {
        self.identity
    }

    pub fn contains(&self, x: Element) -> bool {
        self.index_of(x).is_some()
    }

    pub(crate) fn index_of(&self, x: Element) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }

    pub(crate) fn require(&self, x: Element) -> Result<usize> {
        self.index_of(x).ok_or_else(|| self.overflow(x))
    }

    pub(crate) fn overflow(&self, x: Element) -> Error {
        Error::WindowOverflow {
            element: x,
            lo: self.elements.first().map_or(0, |e| e.0),
            hi: self.elements.last().map_or(0, |e| e.0),
        }
    }

    pub fn involution(&self, x: Element) -> Result<Element> {
        let i = self.require(x)?;
        Ok(self.elements[self.involution[i]])
    }

    pub(crate) fn entry(&self, x: Element, y: Element) -> Result<&ConvEntry> {
        let i = self.require(x)?;
        let j = self.require(y)?;
        Ok(&self.table[i * self.elements.len() + j])
    }

    /// `δ_x ∗ δ_y` as a probability measure.
    pub fn convolve_points(&self, x: Element, y: Element) -> Result<&SparseMeasure> {
        let entry = self.entry(x, y)?;
        match entry.overflow_at {
            Some(u) => Err(self.overflow(u)),
            None => Ok(&entry.measure),
        }
    }

    /// Bilinear extension of the point product to finitely supported measures.
    pub fn convolve_measures(&self, mu: &SparseMeasure, nu: &SparseMeasure) -> Result<SparseMeasure> {
        let mut acc: BTreeMap<Element, f64> = BTreeMap::new();
        for &(x, mx) in mu.atoms() {
            for &(y, my) in nu.atoms() {
                for &(u, p) in self.convolve_points(x, y)?.atoms() {
                    *acc.entry(u).or_insert(0.0) += mx * my * p;
                }
            }
        }
        Ok(SparseMeasure::from_map(acc))
    }

    /// Push-forward of a measure under the involution.
    pub fn involute_measure(&self, mu: &SparseMeasure) -> Result<SparseMeasure> {
        let mut acc = BTreeMap::new();
        for &(x, m) in mu.atoms() {
            *acc.entry(self.involution(x)?).or_insert(0.0) += m;
        }
        Ok(SparseMeasure::from_map(acc))
    }

    pub fn is_central(&self, z: Element) -> bool {
        self.index_of(z).is_some_and(|i| self.central[i])
    }

    /// The single support point of `δ_x ∗ δ_z` for central `z`.
    pub fn central_product(&self, x: Element, z: Element) -> Result<Element> {
        if !self.is_central(z) {
            return Err(Error::NotCentral(z));
        }
        let entry = self.entry(x, z)?;
        if let Some(u) = entry.overflow_at {
            return Err(self.overflow(u));
        }
        point_of(&entry.measure).ok_or(Error::NotCentral(z))
    }

    /// The support point of `δ_z^n`; `n = 0` gives the identity.
    pub fn power_center_point(&self, z: Element, n: u64) -> Result<Element> {
        if !self.is_central(z) {
            return Err(Error::NotCentral(z));
        }
        let mut p = self.identity;
        for _ in 0..n {
            p = self.central_product(p, z)?;
        }
        Ok(p)
    }

    /// Signed center power: negative exponents use the involute.
    pub fn power_center_point_signed(&self, z: Element, n: i64) -> Result<Element> {
        if n >= 0 {
            self.power_center_point(z, n as u64)
        } else {
            let zi = self.involution(z)?;
            self.power_center_point(zi, n.unsigned_abs())
        }
    }

    /// Right Haar weight `m({x}) = 1 / (δ_x ∗ δ_x⁻)({e})`, normalized by `m({e}) = 1`.
    pub fn haar_weight(&self, x: Element) -> Result<f64> {
        Ok(self.haar[self.require(x)?])
    }

    /// Haar measure of a finite set of window points.
    pub fn haar_measure<'a, I>(&self, set: I) -> Result<f64>
    where
        I: IntoIterator<Item = &'a Element>,
    {
        set.into_iter().map(|&x| self.haar_weight(x)).sum()
    }

    pub fn center_elements(&self) -> CenterReport {
        CenterReport {
            members: self
                .elements
                .iter()
                .zip(&self.central)
                .filter(|(_, &c)| c)
                .map(|(&x, _)| x)
                .collect(),
            horizon: self.bound,
        }
    }

    /// `A ∗ B`: union of the supports of `δ_x ∗ δ_y` over `x ∈ A`, `y ∈ B`.
    pub fn set_convolve(&self, a: &BTreeSet<Element>, b: &BTreeSet<Element>) -> Result<BTreeSet<Element>> {
        let (set, overflow) = self.set_convolve_partial(a, b)?;
        match overflow {
            Some(u) => Err(self.overflow(u)),
            None => Ok(set),
        }
    }

    /// In-window part of `A ∗ B` plus the first out-of-window point if the
    /// full set leaves the window. Inputs must lie in the window.
    pub(crate) fn set_convolve_partial(
        &self,
        a: &BTreeSet<Element>,
        b: &BTreeSet<Element>,
    ) -> Result<(BTreeSet<Element>, Option<Element>)> {
        let mut out = BTreeSet::new();
        let mut overflow = None;
        for &x in a {
            for &y in b {
                let entry = self.entry(x, y)?;
                overflow = overflow.or(entry.overflow_at);
                out.extend(entry.measure.support());
            }
        }
        Ok((out, overflow))
    }
}

fn point_of(mu: &SparseMeasure) -> Option<Element> {
    let heavy: Vec<_> = mu.atoms().iter().filter(|(_, m)| *m > PROB_TOL).collect();
    match heavy.as_slice() {
        [(x, m)] if (m - 1.0).abs() <= PROB_TOL => Some(*x),
        _ => None,
    }
}

fn is_identity_mass(entry: &ConvEntry, e: Element) -> bool {
    !entry.overflows() && point_of(&entry.measure) == Some(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(v: &[i64]) -> BTreeSet<Element> {
        v.iter().copied().map(Element).collect()
    }

    fn atoms(mu: &SparseMeasure) -> Vec<(i64, f64)> {
        mu.atoms().iter().map(|&(x, m)| (x.0, m)).collect()
    }

    fn assert_atoms(mu: &SparseMeasure, expected: &[(i64, f64)]) {
        let got = atoms(mu);
        assert_eq!(got.len(), expected.len(), "{got:?} vs {expected:?}");
        for ((gx, gm), (ex, em)) in got.iter().zip(expected) {
            assert_eq!(gx, ex);
            assert!((gm - em).abs() < 1e-14, "{got:?} vs {expected:?}");
        }
    }

    #[test]
    fn dunkl_ramirez_distinct_points_give_max() {
        let k = HypergroupModel::dunkl_ramirez(0.5, 16).unwrap();
        assert_atoms(k.convolve_points(Element(1), Element(2)).unwrap(), &[(2, 1.0)]);
        assert_atoms(k.convolve_points(Element(7), Element(3)).unwrap(), &[(7, 1.0)]);
    }

    #[test]
    fn dunkl_ramirez_half_square_of_one_is_identity() {
        let k = HypergroupModel::dunkl_ramirez(0.5, 16).unwrap();
        assert_atoms(k.convolve_points(Element(1), Element(1)).unwrap(), &[(0, 1.0)]);
    }

    #[test]
    fn dunkl_ramirez_diagonal_masses() {
        let k = HypergroupModel::dunkl_ramirez(0.3, 16).unwrap();
        assert_atoms(
            k.convolve_points(Element(1), Element(1)).unwrap(),
            &[(0, 3.0 / 7.0), (1, 4.0 / 7.0)],
        );
        let a: f64 = 0.3;
        assert_atoms(
            k.convolve_points(Element(3), Element(3)).unwrap(),
            &[
                (0, a.powi(3) / (1.0 - a)),
                (1, a * a),
                (2, a),
                (3, (1.0 - 2.0 * a) / (1.0 - a)),
            ],
        );
    }

    #[test]
    fn su2_products() {
        let k = HypergroupModel::su2(16).unwrap();
        assert_atoms(
            k.convolve_points(Element(1), Element(2)).unwrap(),
            &[(1, 1.0 / 3.0), (3, 2.0 / 3.0)],
        );
        assert_atoms(
            k.convolve_points(Element(1), Element(1)).unwrap(),
            &[(0, 0.25), (2, 0.75)],
        );
    }

    #[test]
    fn integer_group_inverse() {
        let k = HypergroupModel::integer_group(8).unwrap();
        assert_atoms(k.convolve_points(Element(3), Element(-3)).unwrap(), &[(0, 1.0)]);
        assert_eq!(k.involution(Element(5)).unwrap(), Element(-5));
    }

    #[test]
    fn hermitian_involutions() {
        let dr = HypergroupModel::dunkl_ramirez(0.5, 8).unwrap();
        let su = HypergroupModel::su2(8).unwrap();
        assert_eq!(dr.involution(Element(7)).unwrap(), Element(7));
        assert_eq!(su.involution(Element(3)).unwrap(), Element(3));
    }

    #[test]
    fn overflow_is_loud() {
        let k = HypergroupModel::su2(4).unwrap();
        assert!(matches!(
            k.convolve_points(Element(3), Element(2)),
            Err(Error::WindowOverflow { .. })
        ));
        let z = HypergroupModel::integer_group(4).unwrap();
        assert!(matches!(
            z.convolve_points(Element(3), Element(2)),
            Err(Error::WindowOverflow {
                element: Element(5),
                ..
            })
        ));
        assert!(matches!(
            z.convolve_points(Element(9), Element(0)),
            Err(Error::WindowOverflow { .. })
        ));
    }

    #[test]
    fn measure_convolution_examples() {
        let dr = HypergroupModel::dunkl_ramirez(0.5, 8).unwrap();
        let mu = SparseMeasure::from_atoms([(Element(1), 0.5), (Element(2), 0.5)]).unwrap();
        let nu = SparseMeasure::point(Element(1));
        assert_atoms(&dr.convolve_measures(&mu, &nu).unwrap(), &[(0, 0.5), (2, 0.5)]);

        let su = HypergroupModel::su2(8).unwrap();
        let d1 = SparseMeasure::point(Element(1));
        assert_atoms(&su.convolve_measures(&d1, &d1).unwrap(), &[(0, 0.25), (2, 0.75)]);

        let nu = SparseMeasure::from_atoms([(Element(2), 0.25), (Element(5), 0.75)]).unwrap();
        let e = SparseMeasure::point(Element(0));
        assert_eq!(su.convolve_measures(&e, &nu).unwrap(), nu);
    }

    #[test]
    fn center_power_examples() {
        let z = HypergroupModel::integer_group(8).unwrap();
        assert_eq!(z.power_center_point(Element(1), 5).unwrap(), Element(5));
        assert_eq!(z.power_center_point(Element(3), 0).unwrap(), Element(0));
        let dr = HypergroupModel::dunkl_ramirez(0.5, 8).unwrap();
        assert_eq!(dr.power_center_point(Element(1), 2).unwrap(), Element(0));
        assert_eq!(dr.power_center_point(Element(1), 3).unwrap(), Element(1));
        assert_eq!(dr.power_center_point(Element(0), 0).unwrap(), Element(0));
        assert!(matches!(
            dr.power_center_point(Element(2), 1),
            Err(Error::NotCentral(Element(2)))
        ));
    }

    #[test]
    fn haar_examples() {
        let dr = HypergroupModel::dunkl_ramirez(0.5, 8).unwrap();
        assert!((dr.haar_weight(Element(2)).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(dr.haar_weight(Element(0)).unwrap(), 1.0);
        let su = HypergroupModel::su2(32).unwrap();
        for n in 0..=32 {
            let m = su.haar_weight(Element(n)).unwrap();
            assert!((m - ((n + 1) * (n + 1)) as f64).abs() < 1e-9 * m, "n={n} m={m}");
        }
        let z = HypergroupModel::integer_group(8).unwrap();
        assert!(z.elements().iter().all(|&x| z.haar_weight(x).unwrap() == 1.0));
    }

    #[test]
    fn center_examples() {
        let su = HypergroupModel::su2(16).unwrap();
        assert_eq!(su.center_elements().members, vec![Element(0)]);
        let dr = HypergroupModel::dunkl_ramirez(0.5, 16).unwrap();
        assert_eq!(dr.center_elements().members, vec![Element(0), Element(1)]);
        let dr3 = HypergroupModel::dunkl_ramirez(0.3, 16).unwrap();
        assert_eq!(dr3.center_elements().members, vec![Element(0)]);
        let z = HypergroupModel::integer_group(4).unwrap();
        assert_eq!(z.center_elements().members.len(), 9);
    }

    #[test]
    fn set_convolution_examples() {
        let dr = HypergroupModel::dunkl_ramirez(0.5, 8).unwrap();
        assert_eq!(dr.set_convolve(&el(&[0, 1, 2]), &el(&[5])).unwrap(), el(&[5]));
        let su = HypergroupModel::su2(8).unwrap();
        assert_eq!(su.set_convolve(&el(&[1]), &el(&[2])).unwrap(), el(&[1, 3]));
        let a = el(&[0, 3, 4]);
        assert_eq!(su.set_convolve(&a, &el(&[0])).unwrap(), a);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(HypergroupModel::dunkl_ramirez(0.6, 8).is_err());
        assert!(HypergroupModel::dunkl_ramirez(0.0, 8).is_err());
        assert!(HypergroupModel::su2(0).is_err());
    }
}
