//! Command dispatch. Each command returns its body rows and a pass/fail
//! outcome; errors are mapped to exit codes by the caller.

use std::collections::BTreeSet;

use hgdyn::dynamics::{
    aperiodic_center_check, aperiodic_sequence_check, build_transitivity_witness, orbit_density_probe,
    probe_center_conditions, probe_hereditary, probe_series, probe_sufficiency, probe_weight_products,
    strongly_aperiodic_check, CriterionReport, Verdict,
};
use hgdyn::orlicz::{l1_embedding_check, luxemburg_norm, orlicz_norm};
use hgdyn::{Element, Error, SparseFunction, WeightedTranslation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::scenario::Loaded;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
        }
    }
}

pub struct CommandOutput {
    pub rows: Vec<Value>,
    pub outcome: Outcome,
}

pub const COMMANDS: &[&str] = &["axioms", "haar", "norm", "aperiodic", "probe", "witness", "orbit"];

pub fn run_command(l: &Loaded, command: &str, args: &[String], seed: u64) -> Result<CommandOutput, CliError> {
    match command {
        "axioms" => axioms(l),
        "haar" => haar(l, seed),
        "norm" => norm(l, arg(args, 0, "function name")?),
        "aperiodic" => aperiodic(l, arg(args, 0, "set name")?),
        "probe" => probe(l, arg(args, 0, "probe name")?, arg(args, 1, "set name")?),
        "witness" => witness(l, arg(args, 0, "source function")?, arg(args, 1, "target function")?),
        "orbit" => orbit(l, arg(args, 0, "function name")?, &args[1..]),
        other => Err(CliError::Usage(format!(
            "unknown command {other:?}; expected one of {}",
            COMMANDS.join(", ")
        ))),
    }
}

fn arg<'a>(args: &'a [String], i: usize, what: &str) -> Result<&'a str, CliError> {
    args.get(i)
        .map(String::as_str)
        .ok_or_else(|| CliError::Usage(format!("missing argument {}: {what}", i + 1)))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn summary(outcome: Outcome, extra: Value) -> Value {
    let mut v = json!({"kind": "summary", "verdict": outcome.label()});
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

fn axioms(l: &Loaded) -> Result<CommandOutput, CliError> {
    let violations = l.model.verify_axioms(l.scenario.run.triple_bound);
    let outcome = Outcome::from_bool(violations.is_empty());
    let mut rows: Vec<Value> = violations
        .iter()
        .map(|v| {
            let mut row = to_value(v);
            row["kind"] = json!("violation");
            row
        })
        .collect();
    rows.push(summary(
        outcome,
        json!({
            "family": l.model.family().name(),
            "window": l.model.window(),
            "triple_bound": l.scenario.run.triple_bound,
            "violations": violations.len(),
        }),
    ));
    Ok(CommandOutput { rows, outcome })
}

const HAAR_SAMPLES: usize = 20;
const HAAR_SHIFT: i64 = 8;

fn haar(l: &Loaded, seed: u64) -> Result<CommandOutput, CliError> {
    let model = &l.model;
    let mut rows = Vec::new();
    for &x in model.elements() {
        rows.push(json!({"kind": "haar_weight", "x": x, "weight": model.haar_weight(x)?}));
    }
    let mut labels: Vec<Element> = model.elements().to_vec();
    labels.sort_by_key(|x| (x.0.abs(), x.0));
    labels.truncate(9);
    let shifts: Vec<Element> = model
        .elements()
        .iter()
        .copied()
        .filter(|y| y.0.abs() <= HAAR_SHIFT)
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut residual, mut checked, mut skipped) = (0.0f64, 0usize, 0usize);
    for _ in 0..HAAR_SAMPLES {
        let size = rng.gen_range(1..=labels.len().min(5));
        let f: SparseFunction = (0..size)
            .map(|_| (labels[rng.gen_range(0..labels.len())], rng.gen_range(-1.0..1.0)))
            .collect();
        let total = f.integrate_haar(model)?;
        for &y in &shifts {
            match f.translate(model, y) {
                Ok(g) => {
                    residual = residual.max((g.integrate_haar(model)? - total).abs());
                    checked += 1;
                }
                Err(Error::WindowOverflow { .. }) => skipped += 1,
                Err(e) => return Err(e.into()),
            }
        }
    }
    let tol = l.scenario.run.tolerances.haar;
    let outcome = Outcome::from_bool(residual <= tol);
    rows.push(summary(
        outcome,
        json!({
            "seed": seed,
            "samples": HAAR_SAMPLES,
            "translates_checked": checked,
            "translates_skipped": skipped,
            "max_invariance_residual": residual,
            "tolerance": tol,
        }),
    ));
    Ok(CommandOutput { rows, outcome })
}

fn norm(l: &Loaded, name: &str) -> Result<CommandOutput, CliError> {
    let f = l.function(name)?;
    let lux = luxemburg_norm(f, &l.phi, &l.model)?;
    let ami = orlicz_norm(f, &l.phi, &l.model)?;
    let residual = (lux.value - ami.value).max(ami.value - 2.0 * lux.value).max(0.0);
    let tol = l.scenario.run.tolerances.sandwich;
    let outcome = Outcome::from_bool(residual <= tol);
    let embedding = l1_embedding_check(&l.phi, &l.model)?;
    let rows = vec![
        json!({
            "kind": "norm",
            "function": name,
            "young": l.phi.name(),
            "delta2": l.phi.delta2,
            "luxemburg": lux,
            "amemiya": ami,
        }),
        json!({"kind": "embedding", "check": embedding}),
        summary(outcome, json!({"sandwich_residual": residual, "tolerance": tol})),
    ];
    Ok(CommandOutput { rows, outcome })
}

fn aperiodic(l: &Loaded, set_name: &str) -> Result<CommandOutput, CliError> {
    let e = l.set(set_name)?;
    let run = &l.scenario.run;
    let simple = aperiodic_sequence_check(&l.model, &l.eta, e, run.horizon)?;
    let strong = strongly_aperiodic_check(&l.model, &l.eta, e, run.horizon, run.rs_bound)?;
    let mut rows = vec![
        json!({"kind": "aperiodicity", "check": "sequence", "set": set_name, "result": simple}),
        json!({"kind": "aperiodicity", "check": "strong", "set": set_name, "rs_bound": run.rs_bound, "result": strong}),
    ];
    if let Some(z) = l.eta.center_generator() {
        let c = aperiodic_center_check(&l.model, z, e, run.horizon, run.rs_bound)?;
        rows.push(json!({
            "kind": "aperiodicity",
            "check": "center",
            "set": set_name,
            "z": z,
            "agree": c.agree,
            "readings_differ": c.readings_differ,
            "via_powers": c.via_powers,
        }));
    }
    let outcome = Outcome::from_bool(simple.holds_at_horizon);
    rows.push(summary(
        outcome,
        json!({"first_n": simple.first_n, "strong_first_n": strong.first_n}),
    ));
    Ok(CommandOutput { rows, outcome })
}

fn operator(l: &Loaded) -> Result<WeightedTranslation<'_>, CliError> {
    Ok(WeightedTranslation::new(
        &l.model,
        l.scenario.weight.clone(),
        l.eta.clone(),
        l.scenario.run.convention,
    )?)
}

fn criterion_rows(rep: &CriterionReport) -> (Vec<Value>, Outcome) {
    let mut rows: Vec<Value> = rep
        .rows
        .iter()
        .map(|r| {
            let mut row = to_value(r);
            row["kind"] = json!("criterion_row");
            row["theorem_id"] = to_value(&rep.theorem_id);
            row
        })
        .collect();
    let outcome = Outcome::from_bool(rep.verdict == Verdict::HoldsEmpirically);
    rows.push(summary(
        outcome,
        json!({
            "theorem_id": rep.theorem_id,
            "set": rep.set,
            "probe_verdict": rep.verdict,
            "window": rep.window,
            "eps_base": rep.eps_base,
            "series_truncated": rep.series_truncated,
            "sufficiency_failures": rep.sufficiency_failures,
            "certification": rep.certification,
            "notes": rep.notes,
        }),
    ));
    (rows, outcome)
}

fn probe(l: &Loaded, which: &str, set_name: &str) -> Result<CommandOutput, CliError> {
    let e = l.set(set_name)?;
    let cfg = l.probe_config();
    let op = operator(l)?;
    let rep = match which {
        "weights" => probe_weight_products(&op, &l.phi, e, &cfg)?,
        "series" => probe_series(&op, &l.phi, e, &cfg)?,
        "center" => probe_center_conditions(&op, &l.phi, e, &cfg)?,
        "sufficient" => probe_sufficiency(&op, &l.phi, e, &cfg)?,
        "hereditary" => {
            let z = l
                .eta
                .center_generator()
                .ok_or_else(|| Error::PreconditionFailed("hereditary probe needs a center_powers sequence".into()))?;
            probe_hereditary(&l.model, z, &l.scenario.weight, &l.phi, e, &cfg)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown probe {other:?}; expected weights, series, center, sufficient or hereditary"
            )))
        }
    };
    let (rows, outcome) = criterion_rows(&rep);
    Ok(CommandOutput { rows, outcome })
}

fn witness(l: &Loaded, f_name: &str, g_name: &str) -> Result<CommandOutput, CliError> {
    let f = l.function(f_name)?;
    let g = l.function(g_name)?;
    let op = operator(l)?;
    let rep = build_transitivity_witness(&op, f, g, &l.phi, &l.probe_config())?;
    let mut rows: Vec<Value> = rep
        .rows
        .iter()
        .map(|r| {
            let mut row = to_value(r);
            row["kind"] = json!("witness_row");
            row
        })
        .collect();
    let outcome = Outcome::from_bool(rep.eventually_decreasing);
    rows.push(summary(
        outcome,
        json!({
            "source": f_name,
            "target": g_name,
            "eventually_decreasing": rep.eventually_decreasing,
            "skipped": rep.skipped,
            "witness": rep.witness,
            "image": rep.image,
        }),
    ));
    Ok(CommandOutput { rows, outcome })
}

fn orbit(l: &Loaded, f_name: &str, target_names: &[String]) -> Result<CommandOutput, CliError> {
    let f = l.function(f_name)?;
    let names: Vec<String> = if target_names.is_empty() {
        l.functions.keys().cloned().collect()
    } else {
        let unique: BTreeSet<&String> = target_names.iter().collect();
        unique.into_iter().cloned().collect()
    };
    let targets = names
        .iter()
        .map(|n| l.function(n).cloned())
        .collect::<Result<Vec<_>, _>>()?;
    let op = operator(l)?;
    let results = orbit_density_probe(&op, f, &targets, l.scenario.run.horizon, &l.phi)?;
    let mut rows: Vec<Value> = results
        .iter()
        .map(|r| {
            json!({
                "kind": "orbit",
                "source": f_name,
                "target": names[r.target],
                "best_n": r.best_n,
                "best_error": r.best_error,
                "skipped": r.skipped,
            })
        })
        .collect();
    rows.push(summary(Outcome::Pass, json!({"targets": names.len()})));
    Ok(CommandOutput {
        rows,
        outcome: Outcome::Pass,
    })
}
