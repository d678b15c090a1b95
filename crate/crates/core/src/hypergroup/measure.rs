use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Element, PROB_TOL};
use crate::error::{Error, Result};

/// Finitely supported nonnegative measure. Atoms are sorted by label, labels
/// are unique and every stored mass is strictly positive.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseMeasure {
    atoms: Vec<(Element, f64)>,
}

impl SparseMeasure {
    pub fn point(x: Element) -> Self {
        SparseMeasure { atoms: vec![(x, 1.0)] }
    }

    /// Collects atoms, merging repeated labels and dropping zero masses.
    pub fn from_atoms<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Element, f64)>,
    {
        let mut acc = BTreeMap::new();
        for (x, m) in atoms {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "mass {m} at {x} is not a finite nonnegative number"
                )));
            }
            *acc.entry(x).or_insert(0.0) += m;
        }
        Ok(Self::from_map(acc))
    }

    pub(crate) fn from_map(map: BTreeMap<Element, f64>) -> Self {
        SparseMeasure {
            atoms: map.into_iter().filter(|&(_, m)| m > 0.0).collect(),
        }
    }

    pub(crate) fn from_sorted_unchecked(atoms: Vec<(Element, f64)>) -> Self {
        debug_assert!(atoms.windows(2).all(|w| w[0].0 < w[1].0));
        SparseMeasure { atoms }
    }

    pub fn atoms(&self) -> &[(Element, f64)] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = Element> + '_ {
        self.atoms.iter().map(|&(x, _)| x)
    }

    pub fn mass_at(&self, x: Element) -> f64 {
        self.atoms
            .binary_search_by_key(&x, |&(u, _)| u)
            .map_or(0.0, |i| self.atoms[i].1)
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, m)| m).sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= PROB_TOL
    }

    /// Largest per-atom absolute difference over the union of supports.
    pub fn max_atom_diff(&self, other: &SparseMeasure) -> f64 {
        let mut diff = 0.0f64;
        for &(x, m) in &self.atoms {
            diff = diff.max((m - other.mass_at(x)).abs());
        }
        for &(x, m) in &other.atoms {
            diff = diff.max((m - self.mass_at(x)).abs());
        }
        diff
    }

    pub fn scaled(&self, c: f64) -> Self {
        SparseMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|&(x, m)| (x, m * c))
                .filter(|&(_, m)| m > 0.0)
                .collect(),
        }
    }
}
