//! Scenario files: a TOML (or JSON) description of one hypergroup, Young
//! function, weight, index sequence, named sets and functions, and run knobs.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use hgdyn::dynamics::ProbeConfig;
use hgdyn::hypergroup::TableSpec;
use hgdyn::orlicz::Delta2;
use hgdyn::{Element, Error, EtaSequence, HypergroupModel, ProductConvention, SparseFunction, Weight, YoungFunction};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    pub hypergroup: HypergroupSection,
    pub young: YoungSection,
    #[serde(default = "unit_weight")]
    pub weight: Weight,
    pub eta: EtaSection,
    #[serde(default)]
    pub sets: BTreeMap<String, Vec<i64>>,
    #[serde(default)]
    pub functions: BTreeMap<String, Vec<(i64, f64)>>,
    #[serde(default)]
    pub run: RunSection,
}

fn unit_weight() -> Weight {
    Weight::constant(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum HypergroupSection {
    DunklRamirez { a: f64, window: i64 },
    Su2 { window: i64 },
    IntegerGroup { window: i64 },
    Table(TableSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum YoungSection {
    PhiP {
        p: f64,
    },
    ExpMinusLinear,
    CoshMinusOne,
    Tabulated {
        knots: Vec<(f64, f64)>,
        /// Optional user assertion `Φ(2t) ≤ k·Φ(t)` with this `k`.
        #[serde(default)]
        delta2_constant: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum EtaSection {
    CenterPowers { z: i64 },
    Labels,
    Constant { value: i64 },
    Table { entries: Vec<(i64, i64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "defaults::horizon")]
    pub horizon: u64,
    #[serde(default = "defaults::k_max")]
    pub k_max: u64,
    #[serde(default = "defaults::series_cutoff")]
    pub series_cutoff: u64,
    #[serde(default = "defaults::rs_bound")]
    pub rs_bound: i64,
    #[serde(default = "defaults::eps_base")]
    pub eps_base: f64,
    #[serde(default = "defaults::triple_bound")]
    pub triple_bound: i64,
    #[serde(default)]
    pub convention: ProductConvention,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            horizon: defaults::horizon(),
            k_max: defaults::k_max(),
            series_cutoff: defaults::series_cutoff(),
            rs_bound: defaults::rs_bound(),
            eps_base: defaults::eps_base(),
            triple_bound: defaults::triple_bound(),
            convention: ProductConvention::default(),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "defaults::haar_tol")]
    pub haar: f64,
    #[serde(default = "defaults::sandwich_tol")]
    pub sandwich: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            haar: defaults::haar_tol(),
            sandwich: defaults::sandwich_tol(),
        }
    }
}

mod defaults {
    pub fn horizon() -> u64 {
        64
    }
    pub fn k_max() -> u64 {
        20
    }
    pub fn series_cutoff() -> u64 {
        5
    }
    pub fn rs_bound() -> i64 {
        3
    }
    pub fn eps_base() -> f64 {
        0.5
    }
    pub fn triple_bound() -> i64 {
        12
    }
    pub fn haar_tol() -> f64 {
        1e-10
    }
    pub fn sandwich_tol() -> f64 {
        1e-9
    }
}

/// A scenario whose objects have been built and validated.
pub struct Loaded {
    pub scenario: Scenario,
    /// SHA-256 of the file bytes, hex encoded.
    pub hash: String,
    pub model: HypergroupModel,
    pub phi: YoungFunction,
    pub eta: EtaSequence,
    pub sets: BTreeMap<String, BTreeSet<Element>>,
    pub functions: BTreeMap<String, SparseFunction>,
}

impl Loaded {
    pub fn id(&self) -> String {
        self.scenario
            .name
            .clone()
            .unwrap_or_else(|| self.hash[..12].to_string())
    }

    pub fn probe_config(&self) -> ProbeConfig {
        let r = &self.scenario.run;
        ProbeConfig {
            horizon: r.horizon,
            k_max: r.k_max,
            series_cutoff: r.series_cutoff,
            rs_bound: r.rs_bound,
            eps_base: r.eps_base,
        }
    }

    pub fn set(&self, name: &str) -> Result<&BTreeSet<Element>, CliError> {
        self.sets
            .get(name)
            .ok_or_else(|| CliError::Validation(format!("no set named {name:?}")))
    }

    pub fn function(&self, name: &str) -> Result<&SparseFunction, CliError> {
        self.functions
            .get(name)
            .ok_or_else(|| CliError::Validation(format!("no function named {name:?}")))
    }
}

pub fn parse(text: &str, json: bool) -> Result<Scenario, CliError> {
    if json {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("scenario: {e}")))
    } else {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("scenario: {e}")))
    }
}

pub fn load_file(path: &Path) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| CliError::Validation(format!("scenario: {e}")))?;
    let json = path.extension().is_some_and(|x| x == "json");
    let scenario = parse(&text, json)?;
    let hash = hex(&Sha256::digest(&bytes));
    build(scenario, hash)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn invalid(err: Error) -> CliError {
    CliError::Validation(err.to_string())
}

/// Builds every object and checks the scenario before any command runs.
pub fn build(scenario: Scenario, hash: String) -> Result<Loaded, CliError> {
    let model = match &scenario.hypergroup {
        HypergroupSection::DunklRamirez { a, window } => HypergroupModel::dunkl_ramirez(*a, *window),
        HypergroupSection::Su2 { window } => HypergroupModel::su2(*window),
        HypergroupSection::IntegerGroup { window } => HypergroupModel::integer_group(*window),
        HypergroupSection::Table(spec) => HypergroupModel::from_table(spec),
    }
    .map_err(invalid)?;

    let phi = match &scenario.young {
        YoungSection::PhiP { p } => YoungFunction::phi_p(*p).map_err(invalid)?,
        YoungSection::ExpMinusLinear => YoungFunction::exp_minus_linear(),
        YoungSection::CoshMinusOne => YoungFunction::cosh_minus_one(),
        YoungSection::Tabulated { knots, delta2_constant } => {
            let mut phi = YoungFunction::tabulated(knots.clone()).map_err(invalid)?;
            if let Some(k) = delta2_constant {
                phi.delta2 = Delta2::Proven { constant: *k };
            }
            phi
        }
    };

    scenario.weight.validate().map_err(invalid)?;

    let eta = match &scenario.eta {
        EtaSection::CenterPowers { z } => EtaSequence::center_powers(&model, Element(*z)),
        EtaSection::Labels => Ok(EtaSequence::Labels),
        EtaSection::Constant { value } => Ok(EtaSequence::Constant { value: Element(*value) }),
        EtaSection::Table { entries } => EtaSequence::table(&model, entries.iter().map(|&(n, x)| (n, Element(x)))),
    }
    .map_err(invalid)?;
    eta.validate(&model).map_err(invalid)?;

    let mut sets = BTreeMap::new();
    for (name, labels) in &scenario.sets {
        let set: BTreeSet<Element> = labels.iter().copied().map(Element).collect();
        if let Some(x) = set.iter().find(|x| !model.contains(**x)) {
            return Err(CliError::Validation(format!("set {name:?} has {x} outside the window")));
        }
        sets.insert(name.clone(), set);
    }
    let mut functions = BTreeMap::new();
    for (name, pairs) in &scenario.functions {
        if pairs.iter().any(|(_, v)| !v.is_finite()) {
            return Err(CliError::Validation(format!(
                "function {name:?} has a non-finite value"
            )));
        }
        let f: SparseFunction = pairs.iter().map(|&(x, v)| (Element(x), v)).collect();
        f.check_window(&model)
            .map_err(|_| CliError::Validation(format!("function {name:?} leaves the window")))?;
        functions.insert(name.clone(), f);
    }

    let loaded = Loaded {
        scenario,
        hash,
        model,
        phi,
        eta,
        sets,
        functions,
    };
    check_reach(&loaded)?;
    Ok(loaded)
}

/// Dry run: every `a_{±n}` up to the horizon must exist in the window, and
/// every named set and function support must stay in the window under those
/// translations.
fn check_reach(l: &Loaded) -> Result<(), CliError> {
    let h = l.scenario.run.horizon as i64;
    let mut supports: Vec<(String, BTreeSet<Element>)> =
        l.sets.iter().map(|(k, v)| (format!("set {k:?}"), v.clone())).collect();
    supports.extend(
        l.functions
            .iter()
            .map(|(k, f)| (format!("function {k:?}"), f.support())),
    );
    for m in -h..=h {
        let a = l.eta.eval(&l.model, m).map_err(|e| {
            CliError::Validation(format!("window too small for horizon {h}: a_{m} is unavailable ({e})"))
        })?;
        for (what, s) in &supports {
            if s.is_empty() {
                continue;
            }
            l.model
                .set_convolve(s, &BTreeSet::from([a]))
                .map_err(|e| CliError::Validation(format!("window too small for horizon {h}: {what} ∗ a_{m} ({e})")))?;
        }
    }
    Ok(())
}
