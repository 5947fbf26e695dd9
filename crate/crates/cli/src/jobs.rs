//! Subcommand dispatch: flag parsing, guard-digit provisioning, library
//! calls, JSON output and the exit-code contract.
//!
//! Exit codes: 0 success / identity holds, 1 verification failed (the
//! requested identity or object does not exist), 2 input error, 3 working
//! precision exhausted. Outputs are stamped at the requested precN; the
//! internally widened precision is recorded in the `meta` field.

use std::collections::BTreeMap;
use std::fs;

use serde_json::{json, Map, Value};

use padic_dynamics::condense::{norm_series, verify_condensation_laws, CondenseError};
use padic_dynamics::dynamics::{
    check_phi_iterate_seed, commutant, lubin_log, normalize_fixed_point, root_valuation_profile,
    verify_lift_datum, DynamicsError, StableNoninvertible,
};
use padic_dynamics::formal_group::{
    build_formal_group, FormalGroup, FormalGroupError, FrobeniusSeries,
};
use padic_dynamics::json as enc;
use padic_dynamics::semiconj::{solve_semiconj_twisted, verify_semiconj_twisted, SemiConjError};
use padic_dynamics::series::{newton_polygon, Series};
use padic_dynamics::zq::Ring;

use crate::parse::{parse_element, parse_series};

pub enum CliError {
    Input(String),
    Verification(String),
    Precision(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) => 2,
            CliError::Precision(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Verification(m) | CliError::Precision(m) => m,
        }
    }
}

impl From<FormalGroupError> for CliError {
    fn from(e: FormalGroupError) -> CliError {
        match e {
            FormalGroupError::PrecisionExhausted { .. } => CliError::Precision(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> CliError {
        match e {
            DynamicsError::PrecisionExhausted(_) => CliError::Precision(e.to_string()),
            DynamicsError::NoCommutant { .. } | DynamicsError::NoInteriorFixedPoint(_) => {
                CliError::Verification(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<CondenseError> for CliError {
    fn from(e: CondenseError) -> CliError {
        match e {
            CondenseError::Group(inner) => inner.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SemiConjError> for CliError {
    fn from(e: SemiConjError) -> CliError {
        match e {
            SemiConjError::NoSolution { .. } => CliError::Verification(e.to_string()),
            SemiConjError::PrecisionExhausted(_) => CliError::Precision(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<enc::JsonError> for CliError {
    fn from(e: enc::JsonError) -> CliError {
        CliError::Input(e.to_string())
    }
}

struct Flags {
    values: BTreeMap<String, String>,
}

impl Flags {
    fn parse(args: &[String]) -> Result<Flags, CliError> {
        let mut values = BTreeMap::new();
        let mut i = 0;
        while i < args.len() {
            let key = args[i]
                .strip_prefix("--")
                .ok_or_else(|| CliError::Input(format!("expected a --flag, got \"{}\"", args[i])))?;
            let value = args
                .get(i + 1)
                .ok_or_else(|| CliError::Input(format!("flag --{key} needs a value")))?;
            values.insert(key.to_string(), value.clone());
            i += 2;
        }
        Ok(Flags { values })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::Input(format!("missing required flag --{key}")))
    }

    fn get_usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Input(format!("--{key} must be a nonnegative integer"))),
        }
    }

    fn require_usize(&self, key: &str) -> Result<usize, CliError> {
        self.get_usize(key)?
            .ok_or_else(|| CliError::Input(format!("missing required flag --{key}")))
    }
}

fn guard_override() -> Option<u32> {
    std::env::var("PADIC_DYNAMICS_GUARD")
        .ok()
        .and_then(|v| v.parse().ok())
}

/// Ring from --p/--f/--precN/--modulus at precN + guard.
fn build_ring(flags: &Flags, guard: u32) -> Result<(Ring, u32), CliError> {
    let p: u64 = flags
        .require("p")?
        .parse()
        .map_err(|_| CliError::Input("--p must be a prime".into()))?;
    let f = flags.get_usize("f")?.unwrap_or(1);
    let prec_n: u32 = flags
        .require("precN")?
        .parse()
        .map_err(|_| CliError::Input("--precN must be a positive integer".into()))?;
    let guard = guard_override().unwrap_or(guard);
    let wide = prec_n
        .checked_add(guard)
        .ok_or_else(|| CliError::Input("precN + guard overflows".into()))?;
    let ring = match flags.get("modulus") {
        Some(text) => {
            let coeffs: Result<Vec<i64>, _> =
                text.split(',').map(|c| c.trim().parse::<i64>()).collect();
            let coeffs =
                coeffs.map_err(|_| CliError::Input("--modulus must be comma-separated integers".into()))?;
            Ring::new(p, f, &coeffs, wide)
        }
        None => Ring::unramified(p, f, wide),
    }
    .map_err(|e| CliError::Input(e.to_string()))?;
    Ok((ring, prec_n))
}

/// A series input: either a `--<key>` literal or a `--<key>-json` file whose
/// series must live in the ambient ring (so extension-ring coefficients,
/// which the literal grammar cannot spell, stay reachable).
fn get_series(flags: &Flags, key: &str, ring: &Ring, prec_t: usize) -> Result<Series, CliError> {
    let json_key = format!("{key}-json");
    match (flags.get(key), flags.get(&json_key)) {
        (Some(text), None) => {
            parse_series(text, ring, prec_t).map_err(|e| CliError::Input(format!("--{key} {e}")))
        }
        (None, Some(path)) => {
            let value = read_json_file(path)?;
            let series = enc::series_from_value(&value, "$")?;
            let declared = series.ring();
            if declared.p() != ring.p()
                || declared.degree() != ring.degree()
                || declared
                    .modulus()
                    .iter()
                    .zip(ring.modulus())
                    .any(|(a, b)| &(a % ring.p_pow()) != b && &(b % declared.p_pow()) != a)
            {
                return Err(CliError::Input(format!(
                    "--{json_key}: series ring disagrees with the flag ring"
                )));
            }
            if declared.precision() < ring.precision() {
                return Err(CliError::Input(format!(
                    "--{json_key}: series carries {} digits, the job needs {} \
                     (widen precN in the file or lower --precN)",
                    declared.precision(),
                    ring.precision()
                )));
            }
            Ok(series.restamp(ring).truncate(prec_t.min(series.prec_t())))
        }
        (Some(_), Some(_)) => Err(CliError::Input(format!(
            "--{key} and --{json_key} are mutually exclusive"
        ))),
        (None, None) => Err(CliError::Input(format!(
            "missing required flag --{key} (or --{json_key})"
        ))),
    }
}

fn read_json_file(path: &str) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Input(format!(
            "{path}: malformed JSON at line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

fn meta(requested: u32, internal: u32) -> Value {
    json!({
        "requestedPrecN": requested,
        "internalPrecN": internal,
        "guard": internal - requested,
    })
}

struct Output {
    value: Value,
    summary: String,
    exit: i32,
}

fn build_group_from_flags(flags: &Flags) -> Result<(FormalGroup, Ring, u32, usize), CliError> {
    let m = flags.require_usize("precT")?;
    if m < 2 {
        return Err(CliError::Input("--precT must be at least 2".into()));
    }
    let (ring, prec_n) = build_ring(flags, m as u32 - 1)?;
    let twist = flags.get_usize("twist")?.unwrap_or(1);
    let f_series = get_series(flags, "frob", &ring, m)?;
    let frob = FrobeniusSeries::new(f_series, twist)?;
    let group = build_formal_group(&frob, m)?;
    if group.stamp_ring().precision() < prec_n {
        return Err(CliError::Precision(format!(
            "law is reliable to {} digits, {} requested; raise PADIC_DYNAMICS_GUARD",
            group.stamp_ring().precision(),
            prec_n
        )));
    }
    Ok((group, ring, prec_n, m))
}

/// Reconstruct the Frobenius datum at the requested output precision.
fn frob_at(group: &FormalGroup, target: &Ring) -> Result<Value, CliError> {
    let narrow = FrobeniusSeries::new(
        group.frobenius_series().series().restamp(target),
        group.frobenius_series().twist(),
    )?;
    Ok(enc::frobenius_to_value(&narrow))
}

fn cmd_fg_build(flags: &Flags) -> Result<Output, CliError> {
    let (group, ring, prec_n, m) = build_group_from_flags(flags)?;
    let target = ring.with_precision(prec_n);
    let law = group.law().restamp(&target);
    let report = group.verify_group_axioms();
    let mut endos = Map::new();
    if let Some(list) = flags.get("endos") {
        for text in list.split(';') {
            let a = parse_element(text, &ring)
                .map_err(|e| CliError::Input(format!("--endos {e}")))?;
            let endo = group.endomorphism(&a)?.restamp(&target);
            endos.insert(a.restamp(&target).label(), enc::series_to_value(&endo));
        }
    }
    let mut obj = Map::new();
    obj.insert("frob".into(), frob_at(&group, &target)?);
    obj.insert("law".into(), enc::biseries_to_value(&law));
    obj.insert("endos".into(), Value::Object(endos));
    obj.insert("axioms".into(), enc::axiom_report_to_value(&report));
    if let Some(alpha) = flags.get("alpha") {
        obj.insert("alpha".into(), json!(alpha));
    }
    obj.insert("meta".into(), meta(prec_n, ring.precision()));
    let residual_zero = group.functional_equation_residual().is_zero();
    Ok(Output {
        value: Value::Object(obj),
        summary: format!(
            "formal group law at (p^{prec_n}, deg {m}); functional-equation residual {}; axioms {}",
            if residual_zero { "0" } else { "NONZERO" },
            if report.all_ok() { "ok" } else { "FAILED" }
        ),
        exit: if residual_zero && report.all_ok() { 0 } else { 1 },
    })
}

fn cmd_fg_endo(flags: &Flags) -> Result<Output, CliError> {
    let (group, ring, prec_n, m) = build_group_from_flags(flags)?;
    let target = ring.with_precision(prec_n);
    let a = parse_element(flags.require("a")?, &ring)
        .map_err(|e| CliError::Input(format!("--a {e}")))?;
    let endo = group.endomorphism(&a)?.restamp(&target);
    let value = json!({
        "a": enc::zq_to_value(&a.restamp(&target)),
        "endo": enc::series_to_value(&endo),
        "meta": meta(prec_n, ring.precision()),
    });
    Ok(Output {
        value,
        summary: format!("endomorphism [{}] at (p^{prec_n}, T^{m})", a.label()),
        exit: 0,
    })
}

fn cmd_log(flags: &Flags) -> Result<Output, CliError> {
    let m = flags.require_usize("precT")?;
    let eff: u32 = flags
        .get("eff-prec")
        .unwrap_or("5")
        .parse()
        .map_err(|_| CliError::Input("--eff-prec must be a positive integer".into()))?;
    // two passes: probe the derivative valuation, then provision for the
    // limit iteration (each iterate divides by lambda once)
    let (probe_ring, prec_n) = build_ring(flags, 0)?;
    let probe = get_series(flags, "series", &probe_ring, m)?;
    if probe.prec_t() < 2 {
        return Err(CliError::Input("--precT must be at least 2".into()));
    }
    let v = probe.derivative_at_zero().valuation();
    let log2m = usize::BITS - m.leading_zeros();
    let default_guard = eff + v * (log2m + 2) + eff * v + 4;
    let (ring, _) = build_ring(flags, default_guard)?;
    let series = get_series(flags, "series", &ring, m)?;
    let stable = StableNoninvertible::new(series)?;
    let result = lubin_log(&stable, eff)?;
    let target = ring.with_precision(prec_n.max(eff).min(ring.precision()));
    let value = json!({
        "log": enc::logseries_to_value(&result.log.restamp(&target), eff, result.stop_index),
        "meta": meta(prec_n, ring.precision()),
    });
    Ok(Output {
        value,
        summary: format!(
            "Lubin logarithm at effective precision {eff}; limit stabilized at iterate {}",
            result.stop_index
        ),
        exit: 0,
    })
}

fn cmd_commutant(flags: &Flags) -> Result<Output, CliError> {
    let m = flags.require_usize("precT")?;
    let (probe_ring, prec_n) = build_ring(flags, 0)?;
    let probe = get_series(flags, "series", &probe_ring, m)?;
    if probe.prec_t() < 2 {
        return Err(CliError::Input("--precT must be at least 2".into()));
    }
    let v = probe.derivative_at_zero().valuation();
    let guard = (m.saturating_sub(2) as u32) * v;
    let (ring, _) = build_ring(flags, guard)?;
    let series = get_series(flags, "series", &ring, m)?;
    let stable = StableNoninvertible::new(series)?;
    let c = parse_element(flags.require("c")?, &ring)
        .map_err(|e| CliError::Input(format!("--c {e}")))?;
    let g = commutant(&stable, &c)?;
    if g.ring().precision() < prec_n {
        return Err(CliError::Precision(format!(
            "commutant reliable to {} digits, {} requested",
            g.ring().precision(),
            prec_n
        )));
    }
    let target = ring.with_precision(prec_n);
    let value = json!({
        "commutant": enc::series_to_value(&g.restamp(&target)),
        "meta": meta(prec_n, ring.precision()),
    });
    Ok(Output {
        value,
        summary: format!("commutant with derivative {} at (p^{prec_n}, T^{m})", c.label()),
        exit: 0,
    })
}

fn cmd_normalize(flags: &Flags) -> Result<Output, CliError> {
    let m = flags.require_usize("precT")?;
    let (probe_ring, prec_n) = build_ring(flags, 0)?;
    let probe = get_series(flags, "series", &probe_ring, m)?;
    if probe.prec_t() < 2 {
        return Err(CliError::Input("--precT must be at least 2".into()));
    }
    // the found point is reliable to precN - val(Q'(0) - 1) digits
    let v1 = (probe.derivative_at_zero().clone() - probe_ring.one()).valuation();
    let guard = v1.min(probe_ring.precision());
    let (ring, _) = build_ring(flags, guard)?;
    let series = get_series(flags, "series", &ring, m)?;
    let (a, shifted) = normalize_fixed_point(&series)?;
    let target = ring.with_precision(prec_n);
    let value = json!({
        "a": enc::zq_to_value(&a.restamp(&target)),
        "shifted": enc::series_to_value(&shifted.restamp(&target)),
        "meta": meta(prec_n, ring.precision()),
    });
    Ok(Output {
        value,
        summary: format!("interior fixed point a = {} mod p^{prec_n}", a.restamp(&target).label()),
        exit: 0,
    })
}

fn cmd_seed_check(flags: &Flags) -> Result<Output, CliError> {
    let m = flags.require_usize("precT")?;
    let d = flags.require_usize("d")?;
    let (ring, _) = build_ring(flags, 0)?;
    let series = get_series(flags, "series", &ring, m)?;
    let ok = check_phi_iterate_seed(&series, d);
    Ok(Output {
        value: json!({ "d": d, "ok": ok }),
        summary: format!(
            "P(0) = 0 and P = T^{d} mod p: {}",
            if ok { "holds" } else { "fails" }
        ),
        exit: if ok { 0 } else { 1 },
    })
}

fn cmd_verify_lift(flags: &Flags) -> Result<Output, CliError> {
    let path = flags
        .get("datum")
        .or_else(|| flags.get("json"))
        .ok_or_else(|| CliError::Input("missing --datum <path> (or --json <path>)".into()))?;
    let value = read_json_file(path)?;
    let datum = enc::lift_datum_from_value(&value, "$")?;
    let report = verify_lift_datum(&datum);
    let ok = report.all_ok();
    Ok(Output {
        value: enc::lift_report_to_value(&report),
        summary: format!(
            "lift datum: {} members, {} table entries, {}",
            datum.members().len(),
            datum.table().len(),
            if ok { "all relations hold" } else { "RELATIONS FAILED" }
        ),
        exit: if ok { 0 } else { 1 },
    })
}

fn cmd_condense(flags: &Flags) -> Result<Output, CliError> {
    let (group, ring, prec_n, m) = build_group_from_flags(flags)?;
    let target = ring.with_precision(prec_n);
    let w_units: Result<Vec<_>, _> = flags
        .require("w")?
        .split(';')
        .map(|text| parse_element(text, &ring))
        .collect();
    let w_units = w_units.map_err(|e| CliError::Input(format!("--w {e}")))?;
    let setup = norm_series(group, w_units)?;

    let mut gammas = BTreeMap::new();
    let mut samples = Vec::new();
    if let Some(sample_text) = flags.get("samples") {
        for text in sample_text.split(';') {
            let a = parse_element(text, &ring)
                .map_err(|e| CliError::Input(format!("--samples {e}")))?;
            samples.push(a);
        }
    }
    for a in &samples {
        gammas.insert(a.label(), setup.condense(a)?.restamp(&target));
    }
    let laws = if samples.is_empty() {
        None
    } else {
        Some(verify_condensation_laws(&setup, &samples)?)
    };
    let laws_ok = laws.as_ref().map(|l| l.all_ok()).unwrap_or(true);

    let w_json: Vec<Value> = setup
        .w_units()
        .iter()
        .map(|w| enc::zq_to_value(&w.restamp(&target)))
        .collect();
    let mut obj = Map::new();
    obj.insert("group".into(), json!({
        "frob": frob_at(setup.group(), &target)?,
        "law": enc::biseries_to_value(&setup.group().law().restamp(&target)),
    }));
    obj.insert("W".into(), Value::Array(w_json));
    obj.insert(
        "R".into(),
        enc::series_to_value(&setup.r_series().restamp(&target)),
    );
    obj.insert(
        "gamma".into(),
        Value::Object(
            gammas
                .iter()
                .map(|(k, s)| (k.clone(), enc::series_to_value(s)))
                .collect(),
        ),
    );
    if let Some(report) = &laws {
        let checks: Vec<Value> = report
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "ok": c.ok}))
            .collect();
        obj.insert("laws".into(), Value::Array(checks));
    }
    obj.insert("meta".into(), meta(prec_n, ring.precision()));
    Ok(Output {
        value: Value::Object(obj),
        summary: format!(
            "condensation by |W| = {} at (p^{prec_n}, T^{m}); gamma truncated at {}; laws {}",
            setup.degree(),
            setup.r_series().prec_t() / setup.degree(),
            if laws_ok { "ok" } else { "FAILED" }
        ),
        exit: if laws_ok { 0 } else { 1 },
    })
}

fn cmd_semiconj_verify(flags: &Flags) -> Result<Output, CliError> {
    let path = flags.require("json")?;
    let value = read_json_file(path)?;
    let (triple, twist) = enc::semiconj_triple_from_value(&value, "$")?;
    let report = verify_semiconj_twisted(&triple, twist);
    Ok(Output {
        value: enc::semiconj_report_to_value(&report),
        summary: format!(
            "F o h = h o G (twist {twist}): {}",
            if report.holds {
                "holds".to_string()
            } else {
                format!(
                    "fails at degree {}",
                    report
                        .first_failing_degree
                        .map(|d| d.to_string())
                        .unwrap_or_else(|| "?".into())
                )
            }
        ),
        exit: if report.holds { 0 } else { 1 },
    })
}

fn cmd_semiconj_solve(flags: &Flags) -> Result<Output, CliError> {
    let path = flags.require("json")?;
    let value = read_json_file(path)?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::Input("$: expected an object".into()))?;
    let f_val = obj
        .get("F")
        .ok_or_else(|| CliError::Input("$: missing field \"F\"".into()))?;
    let g_val = obj
        .get("G")
        .ok_or_else(|| CliError::Input("$: missing field \"G\"".into()))?;
    let twist = obj
        .get("twist")
        .and_then(|v| v.as_u64())
        .unwrap_or(0) as usize;
    let f = enc::series_from_value(f_val, "$.F")?;
    let g = enc::series_from_value(g_val, "$.G")?;
    let ring = f.ring().clone();
    let c = parse_element(flags.require("c")?, &ring)
        .map_err(|e| CliError::Input(format!("--c {e}")))?;
    let fs = StableNoninvertible::new(f)?;
    let gs = StableNoninvertible::new(g)?;
    let h = solve_semiconj_twisted(&fs, &gs, &c, twist)?;
    let stamped = h.ring().precision();
    let value = json!({
        "h": enc::series_to_value(&h),
        "meta": { "stampedPrecN": stamped },
    });
    Ok(Output {
        value,
        summary: format!("semi-conjugacy solved; result stamped at p^{stamped}"),
        exit: 0,
    })
}

fn cmd_newton(flags: &Flags) -> Result<Output, CliError> {
    let m = flags.require_usize("precT")?;
    let (ring, _) = build_ring(flags, 0)?;
    let series = get_series(flags, "series", &ring, m)?;
    let polygon = newton_polygon(&series).map_err(|e| CliError::Input(e.to_string()))?;
    let summary = format!(
        "{} vertices, {} segments{}",
        polygon.vertices.len(),
        polygon.segments.len(),
        if polygon.provisional { " (provisional)" } else { "" }
    );
    Ok(Output {
        value: enc::polygon_to_value(&polygon),
        summary,
        exit: 0,
    })
}

fn cmd_root_profile(flags: &Flags) -> Result<Output, CliError> {
    let m = flags.require_usize("precT")?;
    let n = flags.require_usize("n")?;
    let (ring, _) = build_ring(flags, 0)?;
    let series = get_series(flags, "series", &ring, m)?;
    let stable = StableNoninvertible::new(series)?;
    let profile = root_valuation_profile(&stable, n)?;
    let entries: Vec<Value> = profile
        .iter()
        .map(|(slope, mult)| {
            json!({
                "slope": [slope.num(), slope.den()],
                "multiplicity": mult,
            })
        })
        .collect();
    Ok(Output {
        value: json!({ "n": n, "profile": Value::Array(entries) }),
        summary: format!("{} slope classes at level {n}", profile.len()),
        exit: 0,
    })
}

const USAGE: &str = "padic-dynamics <command> [--flag value ...]

Commands:
  fg-build         --p --precN --precT --frob \"(1+T)^3-1\" [--f] [--twist] [--modulus] [--alpha] [--endos \"1;2\"]
  fg-endo          fg-build flags plus --a <element>
  log              --p --precN --precT --series <literal> [--eff-prec]
  commutant        --p --precN --precT --series <literal> --c <element>
  normalize        --p --precN --precT --series <literal>
  seed-check       --p --precN --precT --series <literal> --d <power of q>
  verify-lift      --datum <file.json>
  condense         fg-build flags plus --w \"1;-1\" [--samples \"2;3\"]
  semiconj-verify  --json <file.json with F, G, h, twist>
  semiconj-solve   --json <file.json with F, G, twist> --c <element>
  newton           --p --precN --precT --series <literal>
  root-profile     --p --precN --precT --series <literal> --n <level>

Common flags: --out <path> writes the JSON there instead of stdout.
Element literals: \"7\", \"-1\", \"2,1\" (power-basis coefficients), \"teich:2\".
Series flags also accept --frob-json/--series-json <file> carrying a full
series encoding, for coefficients the literal grammar cannot spell.
Environment: PADIC_DYNAMICS_GUARD overrides the guard-digit width.

Exit codes: 0 holds/success, 1 verification failed, 2 input error,
3 precision exhausted.";

pub fn run(args: &[String]) -> i32 {
    if args.is_empty() || args[0] == "--help" || args[0] == "help" {
        println!("{USAGE}");
        return if args.is_empty() { 2 } else { 0 };
    }
    let command = args[0].as_str();
    let flags = match Flags::parse(&args[1..]) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return e.exit_code();
        }
    };
    let result = match command {
        "fg-build" => cmd_fg_build(&flags),
        "fg-endo" => cmd_fg_endo(&flags),
        "log" => cmd_log(&flags),
        "commutant" => cmd_commutant(&flags),
        "normalize" => cmd_normalize(&flags),
        "seed-check" => cmd_seed_check(&flags),
        "verify-lift" => cmd_verify_lift(&flags),
        "condense" => cmd_condense(&flags),
        "semiconj-verify" => cmd_semiconj_verify(&flags),
        "semiconj-solve" => cmd_semiconj_solve(&flags),
        "newton" => cmd_newton(&flags),
        "root-profile" => cmd_root_profile(&flags),
        other => {
            eprintln!("error: unknown command \"{other}\"\n\n{USAGE}");
            return 2;
        }
    };
    match result {
        Ok(output) => {
            let text = enc::to_string_sorted(&output.value);
            match flags.get("out") {
                Some(path) => {
                    if let Err(e) = fs::write(path, text + "\n") {
                        eprintln!("error: cannot write {path}: {e}");
                        return 2;
                    }
                }
                None => println!("{text}"),
            }
            eprintln!("{}", output.summary);
            output.exit
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
