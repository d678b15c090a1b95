use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Element, HypergroupModel, SparseMeasure, ASSOC_TOL, PROB_TOL};

/// Hypergroup axioms that are finitely checkable on a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axiom {
    /// `δ_x ∗ δ_y` is a probability measure.
    Probability,
    /// `δ_x ∗ δ_e = δ_e ∗ δ_x = δ_x`.
    Identity,
    /// The involution maps the window to itself and is its own inverse.
    Involution,
    /// `e ∈ supp(δ_x ∗ δ_y)` iff `x = y⁻`.
    IdentitySupport,
    /// `(δ_x ∗ δ_y)⁻ = δ_{y⁻} ∗ δ_{x⁻}`.
    Adjoint,
    /// `(δ_x ∗ δ_y) ∗ δ_z = δ_x ∗ (δ_y ∗ δ_z)`.
    Associativity,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Probability => "probability",
            Axiom::Identity => "identity",
            Axiom::Involution => "involution",
            Axiom::IdentitySupport => "identity-support",
            Axiom::Adjoint => "adjoint",
            Axiom::Associativity => "associativity",
        };
        f.write_str(s)
    }
}

/// All failures of one axiom. Only the first few witnesses are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub count: usize,
    pub witnesses: Vec<Vec<Element>>,
    pub max_residual: f64,
}

const MAX_WITNESSES: usize = 16;

#[derive(Default)]
struct Collector {
    found: Vec<Violation>,
}

impl Collector {
    fn record(&mut self, axiom: Axiom, witness: Vec<Element>, residual: f64) {
        let v = match self.found.iter_mut().find(|v| v.axiom == axiom) {
            Some(v) => v,
            None => {
                self.found.push(Violation {
                    axiom,
                    count: 0,
                    witnesses: Vec::new(),
                    max_residual: 0.0,
                });
                self.found.last_mut().unwrap()
            }
        };
        v.count += 1;
        if v.witnesses.len() < MAX_WITNESSES {
            v.witnesses.push(witness);
        }
        v.max_residual = v.max_residual.max(residual);
    }
}

impl HypergroupModel {
    /// Checks the axioms on the window. Pairwise axioms use every window
    /// pair; associativity uses triples with `|label| ≤ triple_bound`, skipping
    /// triples whose intermediate supports leave the window. Returns one
    /// [`Violation`] per failing axiom; an empty list means every check passed.
    pub fn verify_axioms(&self, triple_bound: i64) -> Vec<Violation> {
        let mut c = Collector::default();
        let e = self.identity;
        let elements = self.elements.clone();

        for &x in &elements {
            match self.involution(x).and_then(|xi| self.involution(xi)) {
                Ok(back) if back == x => {}
                _ => c.record(Axiom::Involution, vec![x], f64::INFINITY),
            }
        }

        for &x in &elements {
            let point = SparseMeasure::point(x);
            for (l, r) in [(x, e), (e, x)] {
                match self.convolve_points(l, r) {
                    Ok(mu) => {
                        let d = mu.max_atom_diff(&point);
                        if d > PROB_TOL {
                            c.record(Axiom::Identity, vec![l, r], d);
                        }
                    }
                    Err(_) => c.record(Axiom::Identity, vec![l, r], f64::INFINITY),
                }
            }
        }

        for &x in &elements {
            for &y in &elements {
                let entry = self.entry(x, y).expect("window pair");
                let yi = self.involution(y).expect("window element");
                let has_e = entry.measure.mass_at(e) > 0.0;
                if has_e != (x == yi) {
                    c.record(Axiom::IdentitySupport, vec![x, y], 1.0);
                }
                if entry.overflows() {
                    continue;
                }
                let total = entry.measure.total_mass();
                if (total - 1.0).abs() > PROB_TOL {
                    c.record(Axiom::Probability, vec![x, y], (total - 1.0).abs());
                }
                let xi = self.involution(x).expect("window element");
                let lhs = self.involute_measure(&entry.measure);
                let rhs = self.convolve_points(yi, xi);
                match (lhs, rhs) {
                    (Ok(l), Ok(r)) => {
                        let d = l.max_atom_diff(r);
                        if d > PROB_TOL {
                            c.record(Axiom::Adjoint, vec![x, y], d);
                        }
                    }
                    _ => c.record(Axiom::Adjoint, vec![x, y], f64::INFINITY),
                }
            }
        }

        let small: Vec<Element> = elements.iter().copied().filter(|x| x.0.abs() <= triple_bound).collect();
        for &x in &small {
            for &y in &small {
                let Ok(xy) = self.convolve_points(x, y) else { continue };
                for &z in &small {
                    let Ok(yz) = self.convolve_points(y, z) else { continue };
                    let left = self.convolve_measures(xy, &SparseMeasure::point(z));
                    let right = self.convolve_measures(&SparseMeasure::point(x), yz);
                    if let (Ok(l), Ok(r)) = (left, right) {
                        let d = l.max_atom_diff(&r);
                        if d > ASSOC_TOL {
                            c.record(Axiom::Associativity, vec![x, y, z], d);
                        }
                    }
                }
            }
        }

        c.found.sort_by_key(|v| v.axiom);
        c.found
    }
}

#[cfg(test)]
mod tests {
    use super::super::{TableProduct, TableSpec};
    use super::*;

    /// Dunkl–Ramirez(a) restricted to {0, 1, 2}, which is closed under products.
    fn dr_three(a: f64) -> TableSpec {
        let model = HypergroupModel::dunkl_ramirez(a, 2).unwrap();
        let mut products = Vec::new();
        for x in 0..=2 {
            for y in 0..=2 {
                let mu = model.convolve_points(Element(x), Element(y)).unwrap();
                products.push(TableProduct {
                    x,
                    y,
                    atoms: mu.atoms().iter().map(|&(u, m)| (u.0, m)).collect(),
                });
            }
        }
        TableSpec {
            labels: vec![0, 1, 2],
            identity: 0,
            involution: vec![],
            products,
        }
    }

    #[test]
    fn builtin_families_pass() {
        for model in [
            HypergroupModel::dunkl_ramirez(0.3, 16).unwrap(),
            HypergroupModel::dunkl_ramirez(0.5, 16).unwrap(),
            HypergroupModel::su2(16).unwrap(),
            HypergroupModel::integer_group(8).unwrap(),
        ] {
            assert_eq!(model.verify_axioms(6), vec![], "{:?}", model.family());
        }
    }

    #[test]
    fn valid_table_loads() {
        let model = HypergroupModel::from_table(&dr_three(0.3)).unwrap();
        assert!((model.haar_weight(Element(2)).unwrap() - 0.7 / 0.09).abs() < 1e-12);
    }

    #[test]
    fn corrupted_row_reports_one_associativity_violation() {
        let mut spec = dr_three(0.3);
        let row = spec.products.iter_mut().find(|p| p.x == 2 && p.y == 2).unwrap();
        row.atoms = vec![(0, 0.5), (2, 0.5)];
        let model = HypergroupModel::from_table_unchecked(&spec).unwrap();
        let violations = model.verify_axioms(2);
        assert_eq!(violations.len(), 1, "{violations:?}");
        assert_eq!(violations[0].axiom, Axiom::Associativity);
        assert!(violations[0]
            .witnesses
            .contains(&vec![Element(1), Element(2), Element(2)]));
        assert!(HypergroupModel::from_table(&spec).is_err());
    }

    #[test]
    fn table_structure_errors() {
        let mut spec = dr_three(0.3);
        spec.products.pop();
        assert!(matches!(
            HypergroupModel::from_table_unchecked(&spec),
            Err(crate::Error::InvalidModel(_))
        ));
        let mut spec = dr_three(0.3);
        spec.products[0].atoms = vec![(7, 1.0)];
        assert!(HypergroupModel::from_table_unchecked(&spec).is_err());
    }

    #[test]
    fn non_probability_row_detected() {
        let mut spec = dr_three(0.3);
        let row = spec.products.iter_mut().find(|p| p.x == 1 && p.y == 2).unwrap();
        row.atoms = vec![(2, 0.9)];
        let model = HypergroupModel::from_table_unchecked(&spec).unwrap();
        let axioms: Vec<Axiom> = model.verify_axioms(2).iter().map(|v| v.axiom).collect();
        assert!(axioms.contains(&Axiom::Probability));
    }
}
