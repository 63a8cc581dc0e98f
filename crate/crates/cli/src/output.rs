//! Text rendering. Every number goes through [`sig`] (10 significant digits).

use std::io::{self, Write};

use pcm_core::analysis::Analysis;
use pcm_core::format::{fmt_sig, round_sig, EntryDocument, ValueToken};
use pcm_core::structures::BwmBoundsReport;
use pcm_core::{DocumentFormat, IncompletePcm, Judgment, MatrixDocument};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DIGITS: usize = 10;

pub fn sig(x: f64) -> String {
    fmt_sig(x, DIGITS)
}

fn token(j: Judgment) -> String {
    match j.exact() {
        Some(_) => j.to_token(),
        None => sig(j.value()),
    }
}

pub fn write_matrix(
    out: &mut dyn Write,
    pcm: &IncompletePcm,
    format: DocumentFormat,
) -> io::Result<()> {
    let n = pcm.n();
    match format {
        DocumentFormat::Csv => {
            for i in 0..n {
                let row: Vec<String> = (0..n)
                    .map(|j| pcm.judgment(i, j).map(token).unwrap_or_else(|| "*".into()))
                    .collect();
                writeln!(out, "{}", row.join(","))?;
            }
        }
        DocumentFormat::Structured => {
            let mut doc = MatrixDocument::from_pcm(pcm);
            for e in &mut doc.entries {
                let j = pcm.judgment(e.i - 1, e.j - 1).expect("known");
                if j.exact().is_none() {
                    *e = EntryDocument {
                        i: e.i,
                        j: e.j,
                        value: ValueToken::Number(round_sig(j.value(), DIGITS)),
                    };
                }
            }
            let text = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
            writeln!(out, "{text}")?;
        }
    }
    Ok(())
}

pub fn write_analysis(out: &mut dyn Write, a: &Analysis) -> io::Result<()> {
    let g = &a.graph;
    let edges: Vec<String> = g.edges.iter().map(|[i, j]| format!("{i}-{j}")).collect();
    writeln!(out, "n\t{}", g.n)?;
    writeln!(out, "missing\t{}", a.missing)?;
    writeln!(out, "edges\t{}", edges.join(","))?;
    writeln!(out, "connected\t{}", g.connected)?;
    writeln!(out, "spanning_trees\t{}", g.spanning_trees)?;
    writeln!(out, "known_triads\t{}", a.triads.len())?;
    if let Some(t) = a.triads.first() {
        writeln!(out, "max_triad\t{}-{}-{}\t{}", t.i, t.j, t.k, sig(t.ti))?;
    }
    match &a.inconsistency {
        Some(r) => {
            writeln!(out, "lambda_max\t{}", sig(r.lambda_max))?;
            writeln!(out, "ci\t{}", sig(r.ci))?;
            writeln!(out, "ri\t{}\t{}", sig(r.ri_used.value), r.ri_used.source)?;
            writeln!(out, "cr\t{}", sig(r.cr))?;
            writeln!(out, "acceptable\t{}", r.cr < 0.1)?;
        }
        None => writeln!(out, "cr\t-\tno random index for this shape")?,
    }
    let w: Vec<String> = a.weights.iter().map(|&v| sig(v)).collect();
    writeln!(out, "weights\t{}\t{}", a.method.name(), w.join(","))?;
    if a.violations.is_empty() {
        writeln!(out, "violations\tnone")?;
    } else {
        let v: Vec<String> = a
            .violations
            .violations
            .iter()
            .map(|v| format!("{}-{}", v.i + 1, v.j + 1))
            .collect();
        writeln!(out, "violations\t{}", v.join(","))?;
    }
    Ok(())
}

pub fn write_bwm_report(out: &mut dyn Write, r: &BwmBoundsReport) -> io::Result<()> {
    writeln!(out, "n\t{}", r.n)?;
    writeln!(out, "p\t{}", sig(r.p))?;
    writeln!(out, "max_pref\t{}", sig(r.max_pref))?;
    writeln!(out, "a_1n\t{}", sig(r.a_1n))?;
    let status = |holds: bool, why: &Option<String>| match (holds, why) {
        (true, _) => "holds".to_owned(),
        (false, Some(w)) => format!("fails\t{w}"),
        (false, None) => "fails".to_owned(),
    };
    writeln!(
        out,
        "theorem1\t{}",
        status(r.theorem1_holds, &r.theorem1_failure)
    )?;
    writeln!(
        out,
        "theorem2\t{}",
        status(r.theorem2_holds, &r.theorem2_failure)
    )?;
    writeln!(out, "certified\t{}", r.certified())?;
    Ok(())
}

/// Integer judgments 2..=9 for a best-worst matrix.
pub fn random_bwm(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |k: usize| {
        (0..k)
            .map(|_| f64::from(rng.random_range(2u32..=9)))
            .collect::<Vec<_>>()
    };
    let best = draw(n.saturating_sub(1));
    let worst = draw(n.saturating_sub(2));
    (best, worst)
}
