//! Command-line front end: spec parsing, check dispatch and JSON reports.

pub mod grammar;

use polproj_core::forms::{prime_power, FormSpec};
use polproj_core::gf::Field;
use polproj_core::polar::{PolarSpace, Side};
use polproj_core::verify::{self, Outcome, Report, ResidueSel, RunConfig};
use polproj_core::Error;
use serde::Serialize;
use thiserror::Error as ThisError;

use grammar::{parse_field_spec, parse_spec, ResidueKind, ResidueSpec, Spec};

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid spec: {0}")]
    Semantic(String),
    #[error("unknown check '{0}'")]
    UnknownCheck(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Check ids accepted by `verify`.
pub const CHECKS: &[&str] = &[
    "triangles",
    "upanddown",
    "gamma",
    "reflections",
    "oddeven",
    "normset",
    "maxsubspace",
    "nonmaxlower",
    "conic-elation",
    "tworeflections",
    "engine",
];

/// Checks run by `verify all`.
pub const ALL: &[&str] = &[
    "triangles",
    "upanddown",
    "gamma",
    "reflections",
    "oddeven",
    "normset",
    "maxsubspace",
    "nonmaxlower",
    "conic-elation",
];

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_DISCREPANCY: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Serialize)]
struct Document<'a> {
    version: u32,
    runs: &'a [Report],
}

/// The JSON report document.
pub fn render_json(runs: &[Report]) -> String {
    serde_json::to_string_pretty(&Document { version: 1, runs }).expect("reports serialize")
}

/// Exit status for a finished set of runs.
pub fn exit_code(runs: &[Report]) -> i32 {
    if runs.iter().any(|r| r.outcome == Outcome::Fail) {
        EXIT_FAIL
    } else if runs.iter().any(|r| r.outcome == Outcome::Discrepancy) {
        EXIT_DISCREPANCY
    } else {
        EXIT_PASS
    }
}

/// Exit status for an error.
pub fn error_code(_: &CliError) -> i32 {
    EXIT_ERROR
}

/// Canonical form of a spec string.
pub fn canonical(text: &str) -> Result<String, CliError> {
    let spec = parse_spec(text)?;
    let form = spec.space.to_form()?;
    if let Some(r) = &spec.residue {
        r.level_side(form.rank())?;
    }
    Ok(spec.to_string())
}

fn build(spec: &Spec, cfg: &RunConfig) -> Result<(FormSpec, PolarSpace), CliError> {
    let form = spec.space.to_form()?;
    let space = verify::build_space(&form, cfg)?;
    Ok((form, space))
}

fn with_residue(spec: &Spec, r: ResidueSpec) -> String {
    Spec { space: spec.space.clone(), residue: Some(r) }.to_string()
}

/// Residue of a spec, defaulting to `default`, as a selector and the
/// label of the run.
fn residue(spec: &Spec, rank: usize, default: ResidueKind) -> Result<(ResidueSel, String), CliError> {
    let r = spec.residue.unwrap_or(ResidueSpec { kind: default, side: None });
    let (level, side) = r.level_side(rank)?;
    let full = ResidueSpec { kind: r.kind, side: Some(side) };
    Ok((ResidueSel { level, side }, with_residue(spec, full)))
}

/// `Π` and `Π⁺` of a residue.
pub fn group(text: &str, cfg: &RunConfig) -> Result<Report, CliError> {
    let spec = parse_spec(text)?;
    let (form, space) = build(&spec, cfg)?;
    let (sel, label) = residue(&spec, form.rank(), ResidueKind::Point)?;
    Ok(verify::group_report(&space, sel, &label, cfg)?)
}

fn conic(text: &str, cfg: &RunConfig) -> Result<Report, CliError> {
    let (q, label) = match parse_field_spec(text) {
        Ok(q) => (q, format!("q={q}")),
        Err(e) => match parse_spec(text) {
            Ok(spec) => (spec.space.to_form()?.field().q() as u64, format!("q={}", spec.space.to_form()?.field().q())),
            Err(_) => return Err(e),
        },
    };
    let (p, k) = prime_power(q).ok_or_else(|| CliError::Semantic(format!("q = {q} is not a prime power")))?;
    let f = Field::new(p, k)?;
    Ok(verify::check_conic_elation(&f, &label, cfg)?)
}

fn dispatch(id: &str, text: &str, cfg: &RunConfig) -> Result<Report, CliError> {
    if id == "conic-elation" {
        return conic(text, cfg);
    }
    let spec = parse_spec(text)?;
    let (form, space) = build(&spec, cfg)?;
    let r = form.rank();
    let rep = match id {
        "triangles" => {
            let (sel, label) = residue(&spec, r, ResidueKind::Point)?;
            verify::check_triangles(&space, sel, &label, cfg)?
        }
        "upanddown" => {
            let (sel, label) = residue(&spec, r, ResidueKind::Point)?;
            verify::check_upanddown(&space, sel, &label, cfg)?
        }
        "engine" => {
            let (sel, label) = residue(&spec, r, ResidueKind::Point)?;
            verify::check_engine_oracle(&space, sel, 6, &label, cfg)?
        }
        "gamma" => {
            let (sel, label) = residue(&spec, r, ResidueKind::Point)?;
            verify::check_gamma(&space, sel.level, &label, cfg)?
        }
        "reflections" => {
            let (sel, label) = residue(&spec, r, ResidueKind::Point)?;
            if sel != ResidueSel::point() {
                return Err(CliError::Semantic("reflections act on point residues".into()));
            }
            verify::check_reflections(&space, &label, cfg)?
        }
        "oddeven" => {
            let (sel, label) = residue(&spec, r, ResidueKind::Subspace(1))?;
            verify::check_oddeven(&space, sel.level - 1, &label, cfg)?
        }
        "tworeflections" => {
            let (sel, label) = residue(&spec, r, ResidueKind::Line)?;
            verify::check_two_reflections(&space, sel.level, &label, cfg)?
        }
        "normset" => verify::check_normset(&form, &spec.to_string(), cfg)?,
        "maxsubspace" => {
            let (sel, label) = residue(&spec, r, ResidueKind::Max)?;
            if sel != ResidueSel::lower(r) {
                return Err(CliError::Semantic("maxsubspace needs the lower residue of a maximal subspace".into()));
            }
            verify::check_maxsubspace(&space, &label, cfg)?
        }
        "nonmaxlower" => {
            let default = if r >= 3 { ResidueKind::Line } else { ResidueKind::Point };
            let r0 = spec.residue.unwrap_or(ResidueSpec { kind: default, side: Some(Side::Lower) });
            let label = with_residue(&spec, ResidueSpec { side: Some(Side::Lower), ..r0 });
            let level = match r0.kind {
                ResidueKind::Point => 1,
                ResidueKind::Line => 2,
                ResidueKind::Subspace(d) => d as usize + 1,
                ResidueKind::Max => r,
            };
            verify::check_nonmax_lower(&space, level, &label, cfg)?
        }
        other => return Err(CliError::UnknownCheck(other.to_string())),
    };
    Ok(rep)
}

/// Run one check on one spec. Unmet preconditions give a skipped report.
pub fn run_check(id: &str, text: &str, cfg: &RunConfig) -> Result<Report, CliError> {
    if !CHECKS.contains(&id) {
        return Err(CliError::UnknownCheck(id.to_string()));
    }
    match dispatch(id, text, cfg) {
        Err(CliError::Core(e @ (Error::ConditionNotMet(_) | Error::WrongKind(_)))) => {
            let label = parse_spec(text).map(|s| s.to_string()).unwrap_or_else(|_| text.trim().to_string());
            Ok(Report::skipped(id, &label, cfg, &e.to_string()))
        }
        other => other,
    }
}

/// Run a check id, or `all`, over a list of specs.
pub fn verify_all(id: &str, specs: &[String], cfg: &RunConfig) -> Result<Vec<Report>, CliError> {
    let ids: Vec<&str> = if id == "all" {
        ALL.to_vec()
    } else if CHECKS.contains(&id) {
        vec![id]
    } else {
        return Err(CliError::UnknownCheck(id.to_string()));
    };
    let mut runs = Vec::new();
    for s in specs {
        for &c in &ids {
            runs.push(run_check(c, s, cfg)?);
        }
    }
    Ok(runs)
}

/// One line per run, for terminal output.
pub fn render_text(runs: &[Report]) -> String {
    let mut out = String::new();
    for r in runs {
        out.push_str(&format!("{} {} [{}, seed {}]: {}\n", r.check, r.spec, r.mode, r.seed, r.outcome));
        if let (Some(a), Some(b), Some(i)) = (&r.order_pi, &r.order_pi_plus, &r.index) {
            out.push_str(&format!("  |Π| = {a}, |Π⁺| = {b}, index {i}\n"));
        }
        if let Some(c) = &r.catalog {
            out.push_str(&format!("  {c}\n"));
        }
        for (k, v) in &r.witnesses {
            out.push_str(&format!("  {k}: {v}\n"));
        }
        if let Some(ms) = r.ms {
            out.push_str(&format!("  {ms} ms\n"));
        }
    }
    out
}
