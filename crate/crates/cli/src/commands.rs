use std::fmt::{self, Write as _};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use flagsym_core::flags::enumerate;
use flagsym_core::frames::{classify_point, sandwich_at, small_growth_vector};
use flagsym_core::moduli::{forced_analysis, freeze_system, orbit_table, prolong_forms_1211, Orbit};
use flagsym_core::sampling::random_assignment;
use flagsym_core::symmetry::{build_with_frame, instantiate, verify_field, verify_symmetry, VerifyReport};
use flagsym_core::{AnalysisError, ClassCode, Frame, Mode, PointSpec, Scalar};

use crate::{Cli, Format, Verb};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments: exit 1.
    Invalid(String),
    /// The computation ran but failed: exit 2, with whatever report exists.
    Analysis { message: String, report: Option<String> },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Analysis { .. } => 2,
        }
    }

    pub fn report(&self) -> Option<&str> {
        match self {
            CliError::Analysis { report, .. } => report.as_deref(),
            CliError::Invalid(_) => None,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => f.write_str(m),
            CliError::Analysis { message, .. } => f.write_str(message),
        }
    }
}

fn invalid(e: impl fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

fn analysis(e: AnalysisError) -> CliError {
    CliError::Analysis { message: e.to_string(), report: None }
}

fn to_json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn parse_code(text: &str, mode: Mode) -> Result<ClassCode, CliError> {
    ClassCode::validate(text, mode).map_err(|e| invalid(format!("code `{text}`: {e}")))
}

fn parse_point(code: &ClassCode, text: &str) -> Result<PointSpec, CliError> {
    PointSpec::parse(code.mode(), code.len(), text).map_err(|e| invalid(format!("point: {e}")))
}

fn numeric_point(code: &ClassCode, text: &str) -> Result<PointSpec, CliError> {
    let p = parse_point(code, text)?;
    if !p.is_numeric() {
        return Err(invalid("point: every value must be a rational number"));
    }
    Ok(p)
}

fn parse_assumption(text: &str) -> Result<String, CliError> {
    let name = text
        .split_once("!=")
        .or_else(|| text.split_once('≠'))
        .filter(|(_, rhs)| rhs.trim() == "0")
        .map(|(lhs, _)| lhs.trim())
        .filter(|n| !n.is_empty() && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
        .ok_or_else(|| invalid(format!("assumption `{text}`: expected `name!=0`")))?;
    Ok(name.to_string())
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    let mode = cli.mode;
    let fmt = cli.format;
    match &cli.verb {
        Verb::Enumerate { length, count } => {
            let codes = enumerate(*length, mode);
            Ok(match (fmt, count) {
                (Format::Json, true) => to_json(&json!({ "mode": mode, "length": length, "count": codes.len() })),
                (Format::Json, false) => to_json(&codes),
                (_, true) => format!("{}\n", codes.len()),
                (Format::Latex, false) => codes.iter().map(|c| format!("{}\\\\\n", c)).collect(),
                (Format::Text, false) => codes.iter().map(|c| format!("{c}\n")).collect(),
            })
        }
        Verb::Frame { code } => {
            let frame = Frame::build(&parse_code(&code.code, mode)?);
            Ok(match fmt {
                Format::Text => frame.to_string(),
                Format::Latex => frame.to_latex(),
                Format::Json => to_json(&frame),
            })
        }
        Verb::Symmetry { code, manifest } => {
            let y = build_with_frame(&Frame::build(&parse_code(&code.code, mode)?));
            if *manifest {
                let m = y.manifest();
                return Ok(match fmt {
                    Format::Json => to_json(&m),
                    _ => {
                        let mut s = format!("{} ({}, r = {})\n", m.code, m.mode.name(), m.r);
                        for (n, k) in &m.terms {
                            let _ = writeln!(s, "{n}: {k} terms");
                        }
                        s
                    }
                });
            }
            Ok(match fmt {
                Format::Text => y.to_string(),
                Format::Latex => y.to_latex(),
                Format::Json => to_json(&y),
            })
        }
        Verb::Verify { code, length, instances, seed } => {
            let codes = match (code, length) {
                (Some(c), _) => vec![parse_code(c, mode)?],
                (None, Some(r)) => enumerate(*r, mode),
                (None, None) => return Err(invalid("verify needs --code or --length")),
            };
            if codes.is_empty() {
                return Err(invalid("no classes of that length"));
            }
            verify(&codes, *instances, *seed, fmt)
        }
        Verb::Sgv { code, point } => {
            let c = parse_code(&code.code, mode)?;
            let p = numeric_point(&c, &point.point)?;
            let v = small_growth_vector(&Frame::build(&c), &p).map_err(|e| analysis(e.into()))?;
            let tuple = v.iter().map(usize::to_string).collect::<Vec<_>>().join(", ");
            Ok(match fmt {
                Format::Json => to_json(&json!({ "code": c, "point": p, "small_growth_vector": v })),
                _ => format!("({tuple})\n"),
            })
        }
        Verb::Classify { code, point } => {
            let c = parse_code(&code.code, mode)?;
            if mode != Mode::Flag2 {
                return Err(invalid("classify is defined for flag2 charts"));
            }
            let p = numeric_point(&c, &point.point)?;
            let frame = Frame::build(&c);
            let sandwich = sandwich_at(&frame, &p).map_err(analysis)?;
            let class = classify_point(&frame, &p).map_err(analysis)?;
            Ok(match fmt {
                Format::Json => to_json(&json!({
                    "chart": c,
                    "point": p,
                    "sandwich": sandwich.to_string(),
                    "class": class,
                })),
                Format::Latex => format!("{}\n", class),
                Format::Text => format!("{class}\nsandwich class {sandwich}\n"),
            })
        }
        Verb::Freeze { code, point, exempt, assume } => {
            let c = parse_code(&code.code, mode)?;
            let p = parse_point(&c, &point.point)?;
            let names: Vec<String> = assume.iter().map(|a| parse_assumption(a)).collect::<Result<_, _>>()?;
            let known = component_names(&c);
            if let Some(e) = exempt.iter().find(|e| !known.contains(e)) {
                return Err(invalid(format!("unknown component `{e}` for {c}")));
            }
            let y = build_with_frame(&Frame::build(&c));
            let exempt: Vec<&str> = exempt.iter().map(String::as_str).collect();
            let mut sys = freeze_system(&y, &p, &exempt).map_err(analysis)?;
            for n in &names {
                sys = sys.assume_nonzero(n);
            }
            let a = forced_analysis(&sys);
            Ok(match fmt {
                Format::Json => {
                    let verdicts: Vec<_> = sys
                        .targets
                        .iter()
                        .map(|(n, _)| json!({ "target": n, "verdict": a.verdict(n) }))
                        .collect();
                    to_json(&json!({ "code": c, "point": p, "analysis": a, "verdicts": verdicts }))
                }
                Format::Latex => a.to_latex(),
                Format::Text => {
                    let mut s = a.to_text();
                    for (n, _) in &sys.targets {
                        let v = a.verdict(n).map_or("undecided (branches disagree or are unresolved)".into(), |v| v.to_string());
                        let _ = writeln!(s, "verdict {n}: {v}");
                    }
                    s
                }
            })
        }
        Verb::Orbits => {
            let table = orbit_table();
            Ok(match fmt {
                Format::Json => to_json(&table),
                _ => table
                    .iter()
                    .enumerate()
                    .map(|(i, o)| {
                        let nonzero: Vec<String> =
                            o.point.values().filter(|(_, v)| !v.is_zero()).map(|(c, v)| format!("{c}={v}")).collect();
                        format!("{} {} {}\n", i + 1, o.name, if nonzero.is_empty() { "origin".into() } else { nonzero.join(",") })
                    })
                    .collect(),
            })
        }
        Verb::Prolong1211 { i5, orbit, x5, y5 } => {
            let x5 = Scalar::parse(x5).map_err(|e| invalid(format!("x5: {e}")))?;
            let y5 = Scalar::parse(y5).map_err(|e| invalid(format!("y5: {e}")))?;
            let orbits = select_orbits(orbit.as_deref())?;
            let forms = orbits
                .iter()
                .map(|o| prolong_forms_1211(*i5, o, x5.clone(), y5.clone()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(analysis)?;
            Ok(match fmt {
                Format::Json => to_json(&forms),
                Format::Latex => forms
                    .iter()
                    .map(|f| format!("{}: F^{{5}} = {}, \\quad G^{{5}} = {} \\\\\n", f.orbit, f.f5.to_latex(), f.g5.to_latex()))
                    .collect(),
                Format::Text => forms
                    .iter()
                    .map(|f| {
                        format!("{} {}\n  F5 = {}\n  G5 = {}\n  degree in (x5, y5): {}\n", f.code, f.orbit, f.f5, f.g5, f.lift_degree)
                    })
                    .collect(),
            })
        }
    }
}

fn component_names(c: &ClassCode) -> Vec<String> {
    match c.mode() {
        Mode::Flag2 => ["A", "B", "C"]
            .into_iter()
            .map(String::from)
            .chain((1..=c.len()).flat_map(|k| [format!("F{k}"), format!("G{k}")]))
            .collect(),
        Mode::Goursat => (1..=c.len() + 2).map(|k| format!("F{k}")).collect(),
    }
}

fn select_orbits(sel: Option<&str>) -> Result<Vec<Orbit>, CliError> {
    let table = orbit_table();
    let Some(sel) = sel else {
        return Ok(table);
    };
    if let Ok(i) = sel.parse::<usize>() {
        return match i {
            1..=6 => Ok(vec![table[i - 1].clone()]),
            _ => Err(invalid(format!("orbit number {i} out of range 1..=6"))),
        };
    }
    table
        .into_iter()
        .find(|o| o.name == sel)
        .map(|o| vec![o])
        .ok_or_else(|| invalid(format!("unknown orbit `{sel}`")))
}

#[derive(Serialize)]
struct VerifyEntry {
    code: String,
    symbolic: VerifyReport,
    instances: Vec<bool>,
    passed: bool,
}

fn verify(codes: &[ClassCode], instances: usize, seed: u64, fmt: Format) -> Result<String, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for c in codes {
        let frame = Frame::build(c);
        let y = build_with_frame(&frame);
        let symbolic = verify_symmetry(&y, &frame);
        let mut inst = Vec::with_capacity(instances);
        for _ in 0..instances {
            let v = instantiate(&y, &random_assignment(&mut rng, c.mode())).map_err(|e| analysis(e.into()))?;
            inst.push(verify_field(&v, &frame).map_err(|e| analysis(e.into()))?.passed);
        }
        let passed = symbolic.passed && inst.iter().all(|&b| b);
        entries.push(VerifyEntry { code: c.to_string(), symbolic, instances: inst, passed });
    }
    let report = match fmt {
        Format::Json => to_json(&entries),
        _ => {
            let mut s = String::new();
            for e in &entries {
                let status = if e.passed { "ok" } else { "FAILED" };
                let _ = write!(s, "{}: {status} (symbolic", e.code);
                if !e.instances.is_empty() {
                    let good = e.instances.iter().filter(|&&b| b).count();
                    let _ = write!(s, ", {good}/{} instances", e.instances.len());
                }
                s.push_str(")\n");
                for chk in e.symbolic.checks.iter().filter(|k| k.residual.is_some()) {
                    let r = chk.residual.as_ref().unwrap();
                    let _ = writeln!(s, "  [Y, {}] leaves d_{} with residual {}", chk.generator, r.coord, r.residual);
                }
            }
            s
        }
    };
    let failed: Vec<&str> = entries.iter().filter(|e| !e.passed).map(|e| e.code.as_str()).collect();
    if failed.is_empty() {
        Ok(report)
    } else {
        Err(CliError::Analysis { message: format!("not tangent: {}", failed.join(", ")), report: Some(report) })
    }
}
