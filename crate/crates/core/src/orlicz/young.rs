use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum YoungKind {
    /// `Φ_p(t) = t^p / p`, `p ≥ 1`.
    PhiP { p: f64 },
    /// `e^t − t − 1`.
    ExpMinusLinear,
    /// `cosh t − 1`.
    CoshMinusOne,
    /// Piecewise linear through the knots, extended past the last knot with
    /// the last slope. The knot `(0, 0)` is implied.
    Tabulated { knots: Vec<(f64, f64)> },
}

/// Outcome of a Δ₂ check `Φ(2t) ≤ kΦ(t)` for large `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Delta2 {
    Proven { constant: f64 },
    Refuted { t: f64, ratio: f64 },
    Unknown,
}

impl Delta2 {
    pub fn is_proven(&self) -> bool {
        matches!(self, Delta2::Proven { .. })
    }
}

/// Value of the complementary function; `+∞` is explicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Conjugate {
    Finite(f64),
    Infinite,
}

impl Conjugate {
    pub fn finite(self) -> Option<f64> {
        match self {
            Conjugate::Finite(v) => Some(v),
            Conjugate::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YoungFunction {
    pub kind: YoungKind,
    pub delta2: Delta2,
    pub strictly_increasing: bool,
}

/// Ratios above this on a growing tail refute Δ₂.
const REFUTE_RATIO: f64 = 1e3;
const MIN_GRID_POINTS: usize = 4;

/// `t = 0.5, 1.0, …, 50`.
pub fn default_delta2_grid() -> Vec<f64> {
    (1..=100).map(|i| 0.5 * i as f64).collect()
}

impl YoungFunction {
    pub fn phi_p(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("Φ_p needs p ≥ 1, got {p}")));
        }
        Ok(YoungFunction {
            kind: YoungKind::PhiP { p },
            delta2: Delta2::Proven { constant: 2f64.powf(p) },
            strictly_increasing: true,
        })
    }

    pub fn exp_minus_linear() -> Self {
        Self::with_grid_delta2(YoungKind::ExpMinusLinear)
    }

    pub fn cosh_minus_one() -> Self {
        Self::with_grid_delta2(YoungKind::CoshMinusOne)
    }

    /// Validates convexity, monotonicity and unbounded growth of the table.
    pub fn tabulated(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots
            .iter()
            .any(|&(t, v)| !(t.is_finite() && v.is_finite() && t >= 0.0 && v >= 0.0))
        {
            return Err(Error::InvalidArgument(
                "tabulated knots must be finite and nonnegative".into(),
            ));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if knots.first().is_none_or(|k| k.0 > 0.0) {
            knots.insert(0, (0.0, 0.0));
        }
        if knots[0].1 != 0.0 {
            return Err(Error::InvalidArgument("tabulated Φ must vanish at 0".into()));
        }
        if knots.len() < 2 || knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument("tabulated knots need distinct abscissae".into()));
        }
        let slopes: Vec<f64> = knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        if slopes[0] < 0.0 || slopes.windows(2).any(|s| s[1] < s[0] - 1e-12) {
            return Err(Error::InvalidArgument(
                "tabulated Φ must be nondecreasing and convex".into(),
            ));
        }
        if *slopes.last().unwrap() <= 0.0 {
            return Err(Error::InvalidArgument("tabulated Φ must grow without bound".into()));
        }
        let strictly_increasing = slopes[0] > 0.0;
        Ok(YoungFunction {
            kind: YoungKind::Tabulated { knots },
            delta2: Delta2::Unknown,
            strictly_increasing,
        })
    }

    fn with_grid_delta2(kind: YoungKind) -> Self {
        let mut phi = YoungFunction {
            kind,
            delta2: Delta2::Unknown,
            strictly_increasing: true,
        };
        phi.delta2 = phi.delta2_check(&default_delta2_grid());
        phi
    }

    pub fn name(&self) -> String {
        match &self.kind {
            YoungKind::PhiP { p } => format!("phi_p(p={p})"),
            YoungKind::ExpMinusLinear => "exp_minus_linear".into(),
            YoungKind::CoshMinusOne => "cosh_minus_one".into(),
            YoungKind::Tabulated { knots } => format!("tabulated({} knots)", knots.len()),
        }
    }

    /// `Φ(t)` for `t ≥ 0`.
    pub fn eval(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match &self.kind {
            YoungKind::PhiP { p } => {
                if *p == 1.0 {
                    t
                } else if *p == 2.0 {
                    0.5 * t * t
                } else {
                    t.powf(*p) / p
                }
            }
            YoungKind::ExpMinusLinear => t.exp_m1() - t,
            YoungKind::CoshMinusOne => {
                let s = (0.5 * t).sinh();
                2.0 * s * s
            }
            YoungKind::Tabulated { knots } => {
                let (i, slope) = segment(knots, t);
                knots[i].1 + slope * (t - knots[i].0)
            }
        }
    }

    /// Right derivative `Φ'(t+)`.
    pub fn derivative(&self, t: f64) -> f64 {
        match &self.kind {
            YoungKind::PhiP { p } => {
                if *p == 1.0 {
                    1.0
                } else {
                    t.powf(p - 1.0)
                }
            }
            YoungKind::ExpMinusLinear => t.exp_m1(),
            YoungKind::CoshMinusOne => t.sinh(),
            YoungKind::Tabulated { knots } => segment(knots, t).1,
        }
    }

    /// Smallest `t` with `Φ(t) ≥ s`.
    pub fn inverse(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        if let YoungKind::PhiP { p } = self.kind {
            return (p * s).powf(1.0 / p);
        }
        let mut hi = 1.0;
        while self.eval(hi) < s {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// Complementary function `Ψ(y) = sup_{x≥0} (xy − Φ(x))`.
    pub fn complementary(&self, y: f64) -> Conjugate {
        if y <= 0.0 {
            return Conjugate::Finite(0.0);
        }
        match &self.kind {
            YoungKind::PhiP { p } if *p == 1.0 => {
                if y <= 1.0 {
                    Conjugate::Finite(0.0)
                } else {
                    Conjugate::Infinite
                }
            }
            YoungKind::PhiP { p } => {
                let q = p / (p - 1.0);
                Conjugate::Finite(y.powf(q) / q)
            }
            YoungKind::Tabulated { knots } => {
                let last_slope = segment(knots, f64::INFINITY).1;
                if y > last_slope {
                    return Conjugate::Infinite;
                }
                let best = knots.iter().map(|&(t, v)| t * y - v).fold(0.0, f64::max);
                Conjugate::Finite(best)
            }
            _ => {
                // xy − Φ(x) is concave; its maximizer solves Φ'(x) = y.
                let mut hi = 1.0;
                while self.derivative(hi) < y {
                    hi *= 2.0;
                }
                let mut lo = 0.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.derivative(mid) < y {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let x = 0.5 * (lo + hi);
                Conjugate::Finite(x * y - self.eval(x))
            }
        }
    }

    /// Δ₂ check. `Φ_p` is proven analytically with `k = 2^p`; other kinds
    /// are judged from the ratios `Φ(2t)/Φ(t)` on the grid and can only be
    /// refuted or left unknown.
    pub fn delta2_check(&self, grid: &[f64]) -> Delta2 {
        if let YoungKind::PhiP { p } = self.kind {
            return Delta2::Proven { constant: 2f64.powf(p) };
        }
        let mut pts: Vec<f64> = grid.iter().copied().filter(|&t| t > 0.0 && t.is_finite()).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let ratios: Vec<(f64, f64)> = pts
            .iter()
            .filter_map(|&t| {
                let base = self.eval(t);
                (base > 0.0).then(|| (t, self.eval(2.0 * t) / base))
            })
            .collect();
        if ratios.len() < MIN_GRID_POINTS {
            return Delta2::Unknown;
        }
        let tail = &ratios[ratios.len() / 2..];
        let growing = tail.windows(2).all(|w| w[1].1 > w[0].1);
        let (t, ratio) = *tail.last().unwrap();
        if growing && ratio > REFUTE_RATIO {
            Delta2::Refuted { t, ratio }
        } else {
            Delta2::Unknown
        }
    }

    /// Whether `Ψ` is strictly increasing, which holds iff `Φ'(0+) = 0`.
    pub fn complementary_is_increasing(&self) -> bool {
        self.derivative(0.0) == 0.0
    }

    /// Spot checks of the Young function axioms on a grid: `Φ(0) = 0`,
    /// monotone, midpoint convex.
    pub fn check_axioms(&self, grid: &[f64]) -> Result<()> {
        if self.eval(0.0) != 0.0 {
            return Err(Error::InvalidArgument(format!("{} does not vanish at 0", self.name())));
        }
        let mut pts: Vec<f64> = grid.iter().copied().filter(|t| *t >= 0.0).collect();
        pts.sort_by(f64::total_cmp);
        for w in pts.windows(2) {
            let (s, t) = (w[0], w[1]);
            let (fs, ft) = (self.eval(s), self.eval(t));
            if ft < fs {
                return Err(Error::InvalidArgument(format!(
                    "{} decreases on [{s}, {t}]",
                    self.name()
                )));
            }
            let mid = self.eval(0.5 * (s + t));
            if mid > 0.5 * (fs + ft) * (1.0 + 1e-12) + 1e-300 {
                return Err(Error::InvalidArgument(format!(
                    "{} is not convex on [{s}, {t}]",
                    self.name()
                )));
            }
        }
        Ok(())
    }
}

/// Index of the knot starting the segment containing `t`, and its slope.
fn segment(knots: &[(f64, f64)], t: f64) -> (usize, f64) {
    let n = knots.len();
    let i = match knots.iter().rposition(|&(k, _)| k <= t) {
        Some(i) if i + 1 < n => i,
        _ => n - 2,
    };
    let slope = (knots[i + 1].1 - knots[i].1) / (knots[i + 1].0 - knots[i].0);
    (i, slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(YoungFunction::phi_p(2.0).unwrap().eval(2.0), 2.0);
        assert_eq!(YoungFunction::exp_minus_linear().eval(0.0), 0.0);
        let c = YoungFunction::cosh_minus_one().eval(1.0);
        assert!((c - (1f64.cosh() - 1.0)).abs() < 1e-15);
        assert!((c - 0.5430806348152437).abs() < 1e-15);
        assert!((YoungFunction::phi_p(3.0).unwrap().eval(1.5) - 3.375 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn complementary_examples() {
        let phi2 = YoungFunction::phi_p(2.0).unwrap();
        assert!((phi2.complementary(3.0).finite().unwrap() - 4.5).abs() < 1e-12);
        let phi1 = YoungFunction::phi_p(1.0).unwrap();
        assert_eq!(phi1.complementary(0.5), Conjugate::Finite(0.0));
        assert_eq!(phi1.complementary(2.0), Conjugate::Infinite);
        for phi in [
            phi1,
            phi2,
            YoungFunction::exp_minus_linear(),
            YoungFunction::cosh_minus_one(),
        ] {
            assert_eq!(phi.complementary(0.0), Conjugate::Finite(0.0));
        }
    }

    #[test]
    fn complementary_by_bisection_matches_closed_forms() {
        let e = YoungFunction::exp_minus_linear();
        let c = YoungFunction::cosh_minus_one();
        for &y in &[0.1, 0.5, 1.0, 3.0, 20.0] {
            let exp_psi = (1.0 + y) * (1.0f64 + y).ln() - y;
            let cosh_psi = y * y.asinh() - (1.0 + y * y).sqrt() + 1.0;
            assert!((e.complementary(y).finite().unwrap() - exp_psi).abs() < 1e-9 * (1.0 + exp_psi));
            assert!((c.complementary(y).finite().unwrap() - cosh_psi).abs() < 1e-9 * (1.0 + cosh_psi));
        }
    }

    #[test]
    fn young_inequality_holds() {
        // xy ≤ Φ(x) + Ψ(y)
        let phis = [
            YoungFunction::phi_p(1.5).unwrap(),
            YoungFunction::phi_p(3.0).unwrap(),
            YoungFunction::exp_minus_linear(),
            YoungFunction::cosh_minus_one(),
            YoungFunction::tabulated(vec![(1.0, 0.5), (2.0, 2.0), (3.0, 4.0)]).unwrap(),
        ];
        for phi in &phis {
            for i in 0..20 {
                for j in 0..20 {
                    let (x, y) = (0.3 * i as f64, 0.2 * j as f64);
                    if let Conjugate::Finite(psi) = phi.complementary(y) {
                        assert!(x * y <= phi.eval(x) + psi + 1e-9, "{} x={x} y={y}", phi.name());
                    }
                }
            }
        }
    }

    #[test]
    fn delta2_examples() {
        assert_eq!(
            YoungFunction::phi_p(3.0).unwrap().delta2_check(&[1.0]),
            Delta2::Proven { constant: 8.0 }
        );
        assert!(matches!(
            YoungFunction::exp_minus_linear().delta2_check(&default_delta2_grid()),
            Delta2::Refuted { .. }
        ));
        assert!(matches!(YoungFunction::cosh_minus_one().delta2, Delta2::Refuted { .. }));
        let tab = YoungFunction::tabulated(vec![(1.0, 1.0), (2.0, 3.0)]).unwrap();
        assert_eq!(tab.delta2_check(&[1.0, 2.0]), Delta2::Unknown);
        assert_eq!(tab.delta2_check(&default_delta2_grid()), Delta2::Unknown);
    }

    #[test]
    fn tabulated_interpolates_and_extrapolates() {
        let tab = YoungFunction::tabulated(vec![(1.0, 1.0), (2.0, 3.0)]).unwrap();
        assert_eq!(tab.eval(0.5), 0.5);
        assert_eq!(tab.eval(1.5), 2.0);
        assert_eq!(tab.eval(4.0), 7.0);
        assert_eq!(tab.derivative(1.0), 2.0);
        assert_eq!(tab.complementary(1.5), Conjugate::Finite(0.5));
        assert_eq!(tab.complementary(2.5), Conjugate::Infinite);
        assert!(YoungFunction::tabulated(vec![(1.0, 2.0), (2.0, 3.0)]).is_err());
        assert!(YoungFunction::tabulated(vec![(1.0, 0.0)]).is_err());
    }

    #[test]
    fn axioms_spot_check() {
        let grid: Vec<f64> = (0..200).map(|i| 0.1 * i as f64).collect();
        for phi in [
            YoungFunction::phi_p(1.0).unwrap(),
            YoungFunction::phi_p(2.5).unwrap(),
            YoungFunction::exp_minus_linear(),
            YoungFunction::cosh_minus_one(),
        ] {
            phi.check_axioms(&grid).unwrap();
        }
        assert!(YoungFunction::phi_p(0.5).is_err());
    }

    #[test]
    fn inverse_round_trips() {
        for phi in [YoungFunction::phi_p(2.0).unwrap(), YoungFunction::cosh_minus_one()] {
            for &s in &[0.01, 1.0, 7.5] {
                let t = phi.inverse(s);
                assert!((phi.eval(t) - s).abs() < 1e-9 * s);
            }
        }
    }

    #[test]
    fn complementary_monotonicity_flag() {
        assert!(!YoungFunction::phi_p(1.0).unwrap().complementary_is_increasing());
        assert!(YoungFunction::phi_p(2.0).unwrap().complementary_is_increasing());
        assert!(YoungFunction::exp_minus_linear().complementary_is_increasing());
    }
}
