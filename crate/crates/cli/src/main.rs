//! `orthoform`: command-line front end. Every subcommand prints JSON on stdout.
//!
//! Exit codes: 0 certificate or true, 1 disproved, 2 indeterminate, 3 input error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orthoform::family::{family_radical, minimal_radical_support, nondegenerate_combination, NotFound};
use orthoform::hyperreal::{check_standard_part, st_form, HyperError, HyperFamily};
use orthoform::io::{
    certificate_file, family_file, matrix_strings, obstruction_file, parse_certificate, parse_family, subspace_strings, to_pretty,
    vector_strings, verdict_file, violation_file, ParsedFamily,
};
use orthoform::oracle::{generate_corpus, generate_stratum, oracle_so, OracleError, OracleOutcome, Stratum};
use orthoform::pipeline::{
    check_so_with_budget, orthogonalize_degenerate, orthogonalize_nondegenerate, PipelineError, Verdict, DEFAULT_BUDGET,
};
use orthoform::ultrafilter::{double_bracket, pathological_subspace, Provenance};
use orthoform::family::FormFamily;
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "orthoform", version, about = "Exact simultaneous orthogonalization of symmetric bilinear forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Radical of one member.
    Radical {
        family: PathBuf,
        #[arg(long, default_value_t = 0)]
        member: usize,
    },
    /// Intersection of all member radicals.
    FamilyRadical { family: PathBuf },
    /// Decide simultaneous orthogonalizability; several files are processed in parallel.
    Check {
        #[arg(required = true)]
        families: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Run the pipeline with a chosen member as base.
    Orthogonalize {
        family: PathBuf,
        #[arg(long)]
        base: usize,
    },
    /// Search for a linear combination nondegenerate modulo the family radical.
    Combo {
        family: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Members as forms on the quotient by the family radical.
    Quotient { family: PathBuf },
    /// Gram matrix of the ultraproduct form.
    DoubleBracket { family: PathBuf },
    /// Elements pairing to zero with everything under the ultraproduct form.
    Pathological { family: PathBuf },
    /// Entrywise standard part of a hyper-mode family.
    StForm { family: PathBuf },
    /// Replay the standard-part assertions, optionally against a certificate.
    WweCheck {
        family: PathBuf,
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Re-check a certificate against a family.
    Verify { family: PathBuf, certificate: PathBuf },
    /// Exhaustive search over GL(n, p).
    Oracle { family: PathBuf },
    /// Write a reproducible stratified corpus of family files.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long)]
        stratum: Option<String>,
        /// Output directory; the corpus is printed when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Status {
    True = 0,
    Disproved = 1,
    Indeterminate = 2,
    InputError = 3,
}

type Outcome = Result<(Value, Status), String>;

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load(path: &Path) -> Result<ParsedFamily, String> {
    parse_family(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_hyper(path: &Path) -> Result<HyperFamily, String> {
    match load(path)? {
        ParsedFamily::Hyper(h) => Ok(h),
        _ => Err(format!("{}: expected mode \"hyper\"", path.display())),
    }
}

fn value<T: serde::Serialize>(v: T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn verdict_status(v: &Verdict) -> Status {
    match v {
        Verdict::Certificate(_) => Status::True,
        Verdict::NotSimultaneouslyOrthogonalizable(_) => Status::Disproved,
        Verdict::Indeterminate(_) => Status::Indeterminate,
    }
}

fn check_one(path: &Path, budget: u64) -> Outcome {
    let f = load(path)?.as_finite();
    let v = check_so_with_budget(&f, budget);
    Ok((value(verdict_file(&v)), verdict_status(&v)))
}

fn check(paths: &[PathBuf], budget: u64) -> Outcome {
    if let [path] = paths {
        return check_one(path, budget);
    }
    let results: Vec<(String, Value, Status)> = paths
        .par_iter()
        .map(|p| {
            let key = p.display().to_string();
            match check_one(p, budget) {
                Ok((v, s)) => (key, v, s),
                Err(e) => (key, json!({ "error": e }), Status::InputError),
            }
        })
        .collect();
    let status = results.iter().map(|r| r.2).max().unwrap_or(Status::True);
    let map: BTreeMap<String, Value> = results.into_iter().map(|(k, v, _)| (k, v)).collect();
    Ok((value(map), status))
}

fn orthogonalize(f: &FormFamily, base: usize) -> Outcome {
    let m = f.members().get(base).ok_or_else(|| format!("member {base} out of range"))?;
    let result = if m.is_nondegenerate() {
        orthogonalize_nondegenerate(f, base)
    } else {
        orthogonalize_degenerate(f, base)
    };
    match result {
        Ok(c) => Ok((json!({ "verdict": "certificate", "certificate": certificate_file(&c) }), Status::True)),
        Err(PipelineError::NotSimultaneouslyOrthogonalizable(o)) => Ok((
            json!({ "verdict": "not_simultaneously_orthogonalizable", "obstruction": obstruction_file(&o) }),
            Status::Disproved,
        )),
        Err(PipelineError::Unsupported(e)) => Ok((json!({ "verdict": "indeterminate", "reason": e.to_string() }), Status::Indeterminate)),
        Err(e) => Err(e.to_string()),
    }
}

fn combo(f: &FormFamily, budget: u64) -> Outcome {
    Ok(match nondegenerate_combination(f, budget) {
        Ok(c) => (json!({ "combination": vector_strings(&c) }), Status::True),
        Err(e @ NotFound::IdenticallySingular) => (json!({ "combination": null, "reason": e.to_string() }), Status::Disproved),
        Err(e) => (json!({ "combination": null, "reason": e.to_string() }), Status::Indeterminate),
    })
}

fn quotient(f: &FormFamily) -> Outcome {
    let rad = family_radical(f);
    let quotients = f
        .members()
        .iter()
        .map(|m| m.quotient_by(&rad).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let section = quotients[0].section().clone();
    let forms = quotients.into_iter().map(|q| q.form().clone()).collect();
    let family = FormFamily::new(forms).map_err(|e| e.to_string())?;
    Ok((
        json!({
            "radical": subspace_strings(&rad),
            "section": matrix_strings(&section),
            "family": family_file(&ParsedFamily::Finite(family)),
        }),
        Status::True,
    ))
}

fn standard_part_check(family: &Path, certificate: Option<&Path>) -> Outcome {
    let h = load_hyper(family)?;
    let cert = match certificate {
        Some(p) => Some(parse_certificate(&certificate_text(p)?, h.form().field(), h.dim(), 1).map_err(|e| format!("{}: {e}", p.display()))?),
        None => None,
    };
    match check_standard_part(&h, cert.as_ref()) {
        Ok(r) => {
            let holds = r.negligible_is_st_radical
                && (!r.robust || r.st_nondegenerate)
                && r.certificate_diagonalizes_st != Some(false)
                && r.enlarged_implies_family != Some(false);
            let v = json!({
                "negligible_is_st_radical": r.negligible_is_st_radical,
                "robust": r.robust,
                "st_nondegenerate": r.st_nondegenerate,
                "certificate_diagonalizes_st": r.certificate_diagonalizes_st,
                "enlarged_implies_family": r.enlarged_implies_family,
            });
            Ok((v, if holds { Status::True } else { Status::Disproved }))
        }
        Err(e @ HyperError::CertificateNotConstant) => Ok((json!({ "error": e.to_string() }), Status::Indeterminate)),
        Err(e @ (HyperError::UnboundedFamily(..) | HyperError::Certificate(_))) => Ok((json!({ "error": e.to_string() }), Status::Disproved)),
        Err(e) => Err(e.to_string()),
    }
}

/// A bare certificate, or the output of `check` wrapping one.
fn certificate_text(path: &Path) -> Result<String, String> {
    let text = read(path)?;
    if let Ok(Value::Object(mut top)) = serde_json::from_str::<Value>(&text) {
        if top.contains_key("verdict") {
            return match top.remove("certificate") {
                Some(c) => Ok(to_pretty(&c)),
                None => Err(format!("{}: verdict carries no certificate", path.display())),
            };
        }
    }
    Ok(text)
}

fn verify(family: &Path, certificate: &Path) -> Outcome {
    let f = load(family)?.as_finite();
    let c = parse_certificate(&certificate_text(certificate)?, f.field(), f.dim(), f.len())
        .map_err(|e| format!("{}: {e}", certificate.display()))?;
    Ok(match c.verify(&f) {
        Ok(()) => (json!({ "valid": true }), Status::True),
        Err(v) => (json!({ "valid": false, "violation": violation_file(&v) }), Status::Disproved),
    })
}

fn oracle(f: &FormFamily) -> Outcome {
    match oracle_so(f) {
        Ok(OracleOutcome::Basis(b)) => Ok((json!({ "result": "basis", "basis": matrix_strings(&b) }), Status::True)),
        Ok(OracleOutcome::Nonexistent) => Ok((json!({ "result": "nonexistent" }), Status::Disproved)),
        Err(e @ OracleError::OutOfBudget { .. }) => Ok((json!({ "result": "out_of_budget", "reason": e.to_string() }), Status::Indeterminate)),
        Err(e) => Err(e.to_string()),
    }
}

fn generate(seed: u64, count: usize, stratum: Option<&str>, out: Option<&Path>) -> Outcome {
    let entries = match stratum {
        Some(name) => {
            let s = Stratum::from_name(name).ok_or_else(|| {
                let names: Vec<_> = Stratum::ALL.iter().map(|s| s.name()).collect();
                format!("unknown stratum {name:?}; expected one of {}", names.join(", "))
            })?;
            generate_stratum(seed, s, count)
        }
        None => generate_corpus(seed, count),
    };
    let Some(dir) = out else {
        return Ok((value(&entries), Status::True));
    };
    std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let mut written = Vec::new();
    for (k, e) in entries.iter().enumerate() {
        let path = dir.join(format!("{k:04}-{}.json", e.stratum.name()));
        std::fs::write(&path, to_pretty(&e.family)).map_err(|e| format!("{}: {e}", path.display()))?;
        written.push(path.display().to_string());
    }
    Ok((json!({ "written": written }), Status::True))
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Radical { family, member } => {
            let f = load(&family)?.as_finite();
            let m = f.members().get(member).ok_or_else(|| format!("member {member} out of range"))?;
            let r = m.radical();
            Ok((json!({ "dim": r.dim(), "radical": subspace_strings(&r) }), Status::True))
        }
        Command::FamilyRadical { family } => {
            let f = load(&family)?.as_finite();
            let r = family_radical(&f);
            Ok((
                json!({ "dim": r.dim(), "radical": subspace_strings(&r), "minimal_support": minimal_radical_support(&f) }),
                Status::True,
            ))
        }
        Command::Check { families, budget } => check(&families, budget),
        Command::Orthogonalize { family, base } => orthogonalize(&load(&family)?.as_finite(), base),
        Command::Combo { family, budget } => combo(&load(&family)?.as_finite(), budget),
        Command::Quotient { family } => quotient(&load(&family)?.as_finite()),
        Command::DoubleBracket { family } => {
            let db = double_bracket(&load(&family)?.as_stable_tail());
            let provenance = match db.provenance {
                Provenance::Finite => "finite",
                Provenance::StableTail => "stable_tail",
            };
            Ok((json!({ "gram": matrix_strings(db.gram()), "provenance": provenance }), Status::True))
        }
        Command::Pathological { family } => {
            let p = pathological_subspace(&load(&family)?.as_stable_tail());
            Ok((json!({ "dim": p.dim(), "pathological": subspace_strings(&p) }), Status::True))
        }
        Command::StForm { family } => match st_form(&load_hyper(&family)?) {
            Ok(st) => Ok((json!({ "st_form": matrix_strings(st.gram()) }), Status::True)),
            Err(e) => Ok((json!({ "error": e.to_string() }), Status::Disproved)),
        },
        Command::WweCheck { family, certificate } => standard_part_check(&family, certificate.as_deref()),
        Command::Verify { family, certificate } => verify(&family, &certificate),
        Command::Oracle { family } => oracle(&load(&family)?.as_finite()),
        Command::Generate { seed, count, stratum, out } => generate(seed, count, stratum.as_deref(), out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::InputError as u8 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok((v, status)) => {
            print!("{}", to_pretty(&v));
            ExitCode::from(status as u8)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(Status::InputError as u8)
        }
    }
}
