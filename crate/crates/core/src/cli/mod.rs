//! Command-line front end: JSON adapters over the library and the
//! verification-suite runner.

pub mod json;
pub mod suites;

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::adele::conj_by_dlambda;
use crate::approx::{
    approx_eq, canonical_rep, curve_component, eval_curve, faithfulness_check, lift_automorphism, relation_r,
    spanning_sample, table_of,
};
use crate::error::{Error, Result};
use crate::galois::{branch_map, component_action, shadow_act, shadow_eq};
use crate::qforms::{self, QuadForm};
use crate::shimura::{
    act_rational, act_unit, canonical_point, component, fixed_witness, is_cm, is_fixed, orbit_rep, point_eq, project,
    same_orbit, LevelPoint,
};
use json::*;
use suites::{run_suite, Check, Status, SuiteConfig};

/// JSON schemas of every command input.
pub const SCHEMA: &str = include_str!("../../../../schemas/cmcurve.schema.json");

/// Which subcommand reaches each library operation.
pub const OPERATION_COVERAGE: &[(&str, &str)] = &[
    ("point_eq", "point-eq"),
    ("approx_eq", "point-eq"),
    ("canonical_rep", "point-eq"),
    ("orbit_rep", "orbit"),
    ("same_orbit", "orbit"),
    ("form_of", "orbit"),
    ("reduce", "orbit"),
    ("automorphs", "orbit"),
    ("is_fixed", "fixed"),
    ("is_cm", "fixed"),
    ("act_unit", "act"),
    ("act_rational", "act"),
    ("project", "act"),
    ("shadow_act", "act"),
    ("component", "act"),
    ("component_action", "act"),
    ("curve_component", "act"),
    ("conj_by_dlambda", "act"),
    ("relation_R", "relation"),
    ("lift_automorphism", "lift"),
    ("faithfulness_check", "lift"),
    ("shadow_eq", "lift"),
    ("branch_map", "lift"),
    ("reduced_forms", "verify"),
    ("class_number", "verify"),
    ("count_cm_points", "verify"),
    ("cornacchia", "verify"),
    ("solve_form_rational", "verify"),
    ("hilbert_symbol", "verify"),
    ("factor", "verify"),
    ("squarefree_part", "verify"),
    ("jacobi", "verify"),
    ("sqrt_mod", "verify"),
    ("mul", "verify"),
    ("reduce_level", "verify"),
    ("shape_test", "verify"),
    ("reciprocity_matrix", "verify"),
    ("in_gamma_tilde", "verify"),
    ("shadow_mul", "verify"),
    ("enumerate_shadows", "verify"),
    ("surjective_common_det", "verify"),
    ("equalize_dets", "verify"),
    ("goursat", "verify"),
    ("stable_saturation", "verify"),
    ("minimal_subtorus_check", "verify"),
    ("independent", "verify"),
];

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_OBSTRUCTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cmcurve", version, about = "CM points and Galois shadows on adelic modular curves at finite level")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Level N; fills "level" wherever an input omits it.
    #[arg(long, global = true)]
    pub level: Option<u64>,
    /// Orbit support m1,m2,...; fills "support" wherever an input omits it.
    #[arg(long, global = true, value_delimiter = ',')]
    pub support: Option<Vec<u64>>,
    /// Seed of the randomized checks (default 0).
    #[arg(long, global = true, env = "CMCURVE_SEED")]
    pub seed: Option<u64>,
    /// Input JSON file (default: stdin; optional for verify).
    #[arg(long = "in", global = true)]
    pub input: Option<PathBuf>,
    /// Output JSON file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report every level-dependent check as obstructed at a bad level.
    #[arg(long, global = true)]
    pub strict_good_level: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equality of two points, with a witness.
    PointEq,
    /// Orbit representative, forms and automorphs of a CM point.
    Orbit,
    /// Fixed-point test for a matrix mod N.
    Fixed,
    /// Actions on points: unit, rational, project, shadow, component, curve, conj.
    Act,
    /// The relation R on a 4-tuple of points.
    Relation,
    /// Lift a table of point images to a Galois shadow.
    Lift,
    /// Run a verification suite.
    Verify { suite: String },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::PointEq => "point-eq",
            Command::Orbit => "orbit",
            Command::Fixed => "fixed",
            Command::Act => "act",
            Command::Relation => "relation",
            Command::Lift => "lift",
            Command::Verify { .. } => "verify",
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        _ if e.is_obstruction() => EXIT_OBSTRUCTED,
        Error::RViolation(_) => EXIT_FAIL,
        _ => EXIT_INPUT,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::PrecisionObstruction(_) => "precision_obstruction",
        Error::LevelObstruction { .. } => "level_obstruction",
        Error::NormObstruction(_) => "norm_obstruction",
        Error::UnsupportedOrbit(_) => "unsupported_orbit",
        Error::RViolation(_) => "relation_violation",
        Error::NotSubdirect(_) => "not_subdirect",
        Error::InvalidInput(_) => "invalid_input",
    }
}

pub fn error_json(e: &Error) -> Value {
    let mut v = json!({"error": {"kind": error_kind(e), "message": e.to_string()}});
    if let Error::RViolation(k) = e {
        v["error"]["row"] = json!(k);
    }
    v
}

/// Fill `"level"` into points, shadows and adelic matrices and `"support"`
/// into shadows that omit them.
pub fn inject_defaults(v: &mut Value, level: Option<u64>, support: Option<&[u64]>) {
    match v {
        Value::Object(map) => {
            let is_point = map.contains_key("tau") && (map.contains_key("a") || map.contains_key("u") || map.contains_key("r"));
            let is_shadow = map.contains_key("components");
            let is_adelic = map.contains_key("delta");
            if let Some(n) = level {
                if (is_point || is_shadow || is_adelic) && !map.contains_key("level") {
                    map.insert("level".into(), json!(n));
                }
            }
            if let Some(s) = support {
                if is_shadow && !map.contains_key("support") {
                    map.insert("support".into(), json!(s));
                }
            }
            for x in map.values_mut() {
                inject_defaults(x, level, support);
            }
        }
        Value::Array(a) => a.iter_mut().for_each(|x| inject_defaults(x, level, support)),
        _ => {}
    }
}

/// Validate `input` against the schema definition of a command.
pub fn validate_input(command: &str, input: &Value) -> Result<()> {
    let mut root: Value = serde_json::from_str(SCHEMA).expect("bundled schema is valid JSON");
    let def = format!("#/$defs/{command}-input");
    root.as_object_mut().expect("schema root is an object").insert("$ref".into(), json!(def));
    let validator =
        jsonschema::validator_for(&root).map_err(|e| Error::invalid(format!("schema for {command}: {e}")))?;
    let errors: Vec<String> = validator.iter_errors(input).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(Error::invalid(format!("schema violation: {}", errors.join("; "))))
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::invalid(format!("missing field {key:?}")))
}

fn canonical(p: &LevelPoint) -> Value {
    let mut v = point(&canonical_point(p));
    v["canonical"] = json!(true);
    v
}

pub fn cmd_point_eq(input: &Value) -> Result<Value> {
    let p1 = parse_point(field(input, "p1")?)?;
    let p2 = parse_point(field(input, "p2")?)?;
    if p1.level() != p2.level() {
        return Err(Error::invalid("points at different levels"));
    }
    let w = point_eq(&p1, &p2)?;
    Ok(json!({
        "equal": w.is_some(),
        "witness": w.as_ref().map(witness),
        "approx_equal": approx_eq(&p1, &p2),
        "components": [component(&p1).value(), component(&p2).value()],
        "canonical_reps": [canonical(&canonical_rep(&p1)), canonical(&canonical_rep(&p2))],
    }))
}

pub fn cmd_orbit(input: &Value) -> Result<Value> {
    let tau = match (input.get("tau"), input.get("form")) {
        (Some(t), None) => parse_quad_point(t)?,
        (None, Some(f)) => {
            let c = f.as_array().filter(|a| a.len() == 3).ok_or_else(|| Error::invalid("form must be [a, b, c]"))?;
            QuadForm::new(parse_int(&c[0])?, parse_int(&c[1])?, parse_int(&c[2])?)?.root()
        }
        _ => return Err(Error::invalid("give exactly one of \"tau\" and \"form\"")),
    };
    let (n, r) = orbit_rep(&tau);
    let f = qforms::form_of(&tau);
    let (g, gamma) = qforms::reduce(&f);
    let mut out = json!({
        "n": n,
        "r": rat_matrix(&r),
        "form": quad_form(&f),
        "reduced": quad_form(&g),
        "gamma": unimodular(&gamma),
        "automorphs": qforms::automorphs(&g).iter().map(unimodular).collect::<Vec<_>>(),
    });
    if let Some(o) = input.get("other") {
        out["same_orbit"] = json!(same_orbit(&tau, &parse_quad_point(o)?));
    }
    Ok(out)
}

pub fn cmd_fixed(input: &Value) -> Result<Value> {
    let p = parse_point(field(input, "point")?)?;
    let g = parse_level_matrix(field(input, "g")?, p.level())?;
    let fixed = is_fixed(&g, &p)?;
    Ok(json!({
        "fixed": fixed,
        "cm": is_cm(&p),
        "witness": fixed_witness(&g, &p)?.map(|(x, y)| json!({"x": x, "y": y})),
    }))
}

pub fn cmd_act(input: &Value) -> Result<Value> {
    let op = field(input, "op")?.as_str().ok_or_else(|| Error::invalid("op must be a string"))?;
    let pt = || parse_point(field(input, "point")?);
    Ok(match op {
        "unit" => {
            let p = pt()?;
            let g = parse_level_matrix(field(input, "g")?, p.level())?;
            json!({"point": canonical(&act_unit(&g, &p)?)})
        }
        "rational" => {
            let p = pt()?;
            json!({"point": canonical(&act_rational(&parse_unimodular(field(input, "gamma")?)?, &p))})
        }
        "project" => {
            let p = pt()?;
            json!({"point": canonical(&project(&p, parse_u64(field(input, "to")?)?)?)})
        }
        "shadow" => {
            let s = parse_shadow(field(input, "shadow")?)?;
            json!({"point": canonical(&shadow_act(&s, &pt()?)?), "branch": branch_map(&s)})
        }
        "component" => match input.get("shadow") {
            Some(s) => json!({"component_action": component_action(&parse_shadow(s)?).value()}),
            None => json!({"component": component(&pt()?).value()}),
        },
        "curve" => {
            let p = pt()?;
            let h = parse_level_matrix(field(input, "h")?, p.level())?;
            let label = curve_component(&h, parse_u64(field(input, "mu")?)?)?;
            let img = eval_curve(&label, &p)?;
            json!({"acting_matrix": level_matrix(&label.acting_matrix()), "point": canonical(img.point())})
        }
        "conj" => {
            let n = parse_u64(field(input, "level")?)?;
            let h = parse_level_matrix(field(input, "h")?, n)?;
            json!({"matrix": level_matrix(&conj_by_dlambda(&h, parse_u64(field(input, "lambda")?)?)?)})
        }
        other => return Err(Error::invalid(format!("unknown act op {other:?}"))),
    })
}

pub fn cmd_relation(input: &Value) -> Result<Value> {
    let p = |k| parse_point(field(input, k)?);
    let w = relation_r(&p("s1")?, &p("s2")?, &p("t1")?, &p("t2")?)?;
    Ok(match w {
        Some(w) => json!({
            "holds": true,
            "lambda": w.lambda,
            "branch": w.branch,
            "r1": level_matrix(&w.r1),
            "r2": level_matrix(&w.r2),
        }),
        None => json!({"holds": false}),
    })
}

pub fn cmd_lift(input: &Value) -> Result<Value> {
    let (table, given) = match (input.get("table"), input.get("shadow")) {
        (Some(t), None) => {
            let rows = t.as_array().ok_or_else(|| Error::invalid("table must be an array"))?;
            let table = rows
                .iter()
                .map(|r| Ok((parse_point(field(r, "s")?)?, parse_point(field(r, "t")?)?)))
                .collect::<Result<Vec<_>>>()?;
            (table, None)
        }
        (None, Some(s)) => {
            let s = parse_shadow(s)?;
            let sample = spanning_sample(s.support(), s.level())?;
            (table_of(&s, &sample)?, Some(s))
        }
        _ => return Err(Error::invalid("give exactly one of \"table\" and \"shadow\"")),
    };
    if table.is_empty() {
        return Err(Error::invalid("empty table"));
    }
    let lift = lift_automorphism(&table)?;
    let sample: Vec<LevelPoint> = table.iter().map(|(s, _)| s.clone()).collect();
    let mut out = json!({
        "shadow": shadow(&lift.shadow),
        "lambda": lift.lambda,
        "branch": branch_map(&lift.shadow),
        "faithful": faithfulness_check(&lift.shadow, &sample)?,
    });
    if let Some(s) = given {
        out["matches_input"] = json!(shadow_eq(&lift.shadow, &s)?);
    }
    Ok(out)
}

/// Validate and run one JSON command (every subcommand except `verify`).
pub fn run_command(name: &str, input: &Value) -> Result<Value> {
    let cmd: fn(&Value) -> Result<Value> = match name {
        "point-eq" => cmd_point_eq,
        "orbit" => cmd_orbit,
        "fixed" => cmd_fixed,
        "act" => cmd_act,
        "relation" => cmd_relation,
        "lift" => cmd_lift,
        other => return Err(Error::invalid(format!("unknown command {other:?}"))),
    };
    validate_input(name, input)?;
    cmd(input)
}

/// Machine-readable suite report; everything outside `env` is reproducible.
pub fn report(suite: &str, cfg: &SuiteConfig, checks: &[Check]) -> Value {
    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    let timing: Map<String, Value> =
        checks.iter().enumerate().map(|(i, c)| (format!("{:02}-{}", i, c.name), json!(c.elapsed_ms))).collect();
    json!({
        "suite": suite,
        "config": cfg,
        "summary": {"pass": count(Status::Pass), "fail": count(Status::Fail), "obstructed": count(Status::Obstructed)},
        "checks": checks,
        "env": {
            "version": env!("CARGO_PKG_VERSION"),
            "os": std::env::consts::OS,
            "arch": std::env::consts::ARCH,
            "elapsed_ms": timing,
        },
    })
}

/// Exit code of a suite: any failure, else any obstruction, else success.
pub fn suite_exit(checks: &[Check]) -> i32 {
    if checks.iter().any(|c| c.status == Status::Fail) {
        EXIT_FAIL
    } else if checks.iter().any(|c| c.status == Status::Obstructed) {
        EXIT_OBSTRUCTED
    } else {
        EXIT_OK
    }
}

fn suite_config(cli: &Cli, input: Option<&Value>) -> Result<SuiteConfig> {
    let mut cfg = SuiteConfig {
        level: cli.level,
        support: cli.support.clone(),
        seed: cli.seed.unwrap_or(0),
        strict_good_level: cli.strict_good_level,
        ..Default::default()
    };
    if let Some(counts) = input.and_then(|v| v.get("counts")) {
        let c = &mut cfg.counts;
        for (key, slot) in [
            ("hilbert_pairs", &mut c.hilbert_pairs),
            ("fixed_instances", &mut c.fixed_instances),
            ("goursat_groups", &mut c.goursat_groups),
            ("lattice_probes", &mut c.lattice_probes),
            ("closure_instances", &mut c.closure_instances),
            ("relation_tuples", &mut c.relation_tuples),
            ("functoriality", &mut c.functoriality),
        ] {
            if let Some(v) = counts.get(key) {
                *slot = parse_u64(v)? as usize;
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read_input(cli: &Cli, required: bool) -> Result<Option<Value>> {
    let text = match &cli.input {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?,
        None if required => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Error::invalid(format!("stdin: {e}")))?;
            s
        }
        None => return Ok(None),
    };
    let mut v: Value = serde_json::from_str(&text).map_err(|e| Error::invalid(format!("malformed JSON: {e}")))?;
    inject_defaults(&mut v, cli.level, cli.support.as_deref());
    Ok(Some(v))
}

/// Run one command; returns the output document and the exit code.
pub fn execute(cli: &Cli) -> (Value, i32) {
    let name = cli.command.name();
    if let Command::Verify { suite } = &cli.command {
        let res = read_input(cli, false).and_then(|input| {
            if let Some(i) = &input {
                validate_input(name, i)?;
            }
            let cfg = suite_config(cli, input.as_ref())?;
            let checks = run_suite(suite, &cfg)?;
            Ok((report(suite, &cfg, &checks), suite_exit(&checks)))
        });
        return res.unwrap_or_else(|e| (error_json(&e), exit_code(&e)));
    }
    let res = read_input(cli, true).and_then(|input| run_command(name, &input.expect("required input")));
    match res {
        Ok(v) => (v, EXIT_OK),
        Err(e) => (error_json(&e), exit_code(&e)),
    }
}

/// Parse arguments, run, write the output; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (out, code) = execute(&cli);
    let text = serde_json::to_string_pretty(&out).expect("serializable") + "\n";
    if let Some(msg) = out.get("error").and_then(|e| e.get("message")) {
        eprintln!("cmcurve: {}", msg.as_str().unwrap_or_default());
    }
    if let Command::Verify { .. } = cli.command {
        if let Some(checks) = out.get("checks").and_then(Value::as_array) {
            for c in checks {
                eprintln!(
                    "{:<10} {}",
                    c["status"].as_str().unwrap_or_default(),
                    c["name"].as_str().unwrap_or_default()
                );
            }
        }
    }
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("cmcurve: {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => print!("{text}"),
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn coverage_is_a_function_onto_subcommands() {
        let ops: BTreeSet<_> = OPERATION_COVERAGE.iter().map(|(op, _)| *op).collect();
        assert_eq!(ops.len(), OPERATION_COVERAGE.len(), "an operation is mapped twice");
        let cmds: BTreeSet<_> = OPERATION_COVERAGE.iter().map(|(_, c)| *c).collect();
        let expected: BTreeSet<_> =
            ["point-eq", "orbit", "fixed", "act", "relation", "lift", "verify"].into_iter().collect();
        assert_eq!(cmds, expected);
        let exercised = suites::exercised_ops();
        for (op, cmd) in OPERATION_COVERAGE {
            if *cmd == "verify" {
                assert!(exercised.contains(op), "{op} is not exercised by any check");
            }
        }
    }

    #[test]
    fn schema_has_every_command() {
        let root: Value = serde_json::from_str(SCHEMA).unwrap();
        for c in ["point-eq", "orbit", "fixed", "act", "relation", "lift", "verify"] {
            assert!(root["$defs"].get(format!("{c}-input")).is_some(), "{c}");
        }
    }

    #[test]
    fn orbit_of_one_plus_two_sqrt_minus_five() {
        let out = cmd_orbit(&json!({"tau": {"m": 5, "p": [1, 1], "q": [2, 1]}})).unwrap();
        assert_eq!(out["n"], json!(5));
        assert_eq!(out["r"], json!([[2, 1], [1, 1], [0, 1], [1, 1]]));
    }

    #[test]
    fn defaults_are_injected() {
        let mut v = json!({"p1": {"tau": {"m": 1, "p": [0, 1], "q": [1, 1]}, "u": [1, 0, 0, 1]}});
        inject_defaults(&mut v, Some(5), None);
        assert_eq!(v["p1"]["level"], json!(5));
        assert!(v["p1"]["tau"].get("level").is_none());
    }

    #[test]
    fn schema_rejects_malformed_points() {
        let bad = json!({"p1": {"tau": {"m": 1}}, "p2": {}});
        assert!(validate_input("point-eq", &bad).is_err());
    }
}
