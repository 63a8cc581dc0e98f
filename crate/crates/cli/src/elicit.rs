//! Terminal questionnaire over an elicitation session.

use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use pcm_core::elicitation::{SessionDocument, SessionOptions, SessionStatus, ACCEPTANCE_THRESHOLD};
use pcm_core::{Judgment, PcmError, QuestionPolicy, Scale, Session};

use crate::output::sig;
use crate::{CliError, CliResult};

#[derive(Clone, Copy, ValueEnum)]
pub enum ScaleArg {
    Saaty,
    Free,
}

#[derive(Args)]
pub struct ElicitArgs {
    /// Number of alternatives (ignored with --resume).
    #[arg(long, required_unless_present = "resume")]
    n: Option<usize>,
    /// Comma-separated display labels.
    #[arg(long, value_delimiter = ',')]
    labels: Vec<String>,
    /// `balanced`, `ross`, or an explicit order such as `1-2,3-1,2-3`.
    #[arg(long, default_value = "balanced")]
    policy: String,
    #[arg(long, value_enum, default_value = "saaty")]
    scale: ScaleArg,
    /// Use the unbounded eigenvalue-optimal completion.
    #[arg(long)]
    unbounded: bool,
    /// Continue a session exported earlier.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Write the session document here when the loop ends.
    #[arg(long)]
    export: Option<PathBuf>,
}

fn build(args: &ElicitArgs) -> CliResult<Session> {
    if let Some(path) = &args.resume {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let doc: SessionDocument = serde_json::from_str(&text)
            .map_err(|e| CliError::Domain(PcmError::Parse(e.to_string())))?;
        return Ok(Session::from_document(&doc)?);
    }
    let policy: QuestionPolicy = args.policy.parse()?;
    let opts = SessionOptions {
        labels: args.labels.clone(),
        policy,
        scale: match args.scale {
            ScaleArg::Saaty => Scale::Saaty,
            ScaleArg::Free => Scale::Free,
        },
        bounded: !args.unbounded,
    };
    Ok(Session::create(args.n.expect("required by clap"), opts)?)
}

/// Reads one token per line. `q` stops early (the session is abandoned),
/// an invalid value is reported and the question repeated.
pub fn run(args: ElicitArgs, input: &mut dyn BufRead, out: &mut dyn Write) -> CliResult {
    let mut s = build(&args)?;
    let total = s.total_questions();
    writeln!(
        out,
        "session {} with {} alternatives, {total} questions",
        s.id(),
        s.n()
    )?;
    while let Some((i, j)) = s.next_pair() {
        if s.status() != SessionStatus::Active {
            break;
        }
        let labels = s.labels();
        write!(
            out,
            "[{}/{total}] how much is {} preferred to {} (a_{}{})? ",
            s.answers().len() + 1,
            labels[i],
            labels[j],
            i + 1,
            j + 1
        )?;
        out.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            break;
        }
        let token = line.trim();
        if token.is_empty() {
            continue;
        }
        if token == "q" {
            s.abandon()?;
            break;
        }
        let value = match Judgment::parse(token) {
            Ok(v) => v,
            Err(e) => {
                writeln!(out, "  {e}")?;
                continue;
            }
        };
        match s.submit((i, j), value) {
            Ok(Some(r)) => {
                let gen = r.cr_generalized.map(sig).unwrap_or_else(|| "-".into());
                let naive = r.cr_naive.map(sig).unwrap_or_else(|| "-".into());
                let flag = match r.cr_generalized {
                    Some(c) if c >= ACCEPTANCE_THRESHOLD => {
                        "  above 0.1, consider revising this judgment"
                    }
                    _ => "",
                };
                writeln!(out, "  cr {gen} (naive {naive}), {} missing{flag}", r.m)?;
            }
            Ok(None) => writeln!(out, "  comparison graph not yet connected")?,
            Err(e @ PcmError::BadValue(_)) => writeln!(out, "  {e}")?,
            Err(e) => return Err(e.into()),
        }
    }
    let report = s.report();
    let status = match report.status {
        SessionStatus::Active => "active",
        SessionStatus::Completed => "completed",
        SessionStatus::Abandoned => "abandoned",
    };
    writeln!(out, "status {status}, {}/{total} answered", report.answered)?;
    if let Some(w) = &report.weights {
        let w: Vec<String> = w.iter().map(|&v| sig(v)).collect();
        writeln!(out, "weights {}", w.join(","))?;
    }
    if let Some(path) = &args.export {
        let doc = serde_json::to_string_pretty(&s.to_document())
            .map_err(|e| CliError::Usage(e.to_string()))?;
        std::fs::write(path, doc)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
