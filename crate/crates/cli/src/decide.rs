use std::fmt::Write;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sigma2::decider::{decide, Caps, Truth, Verdict};
use sigma2::formula::{normalize_body, parse_sentence, Sigma2Sentence};
use sigma2::usl::{enumerate_generated, UslFile};

use crate::args::{DecideArgs, UslCommand};
use crate::output::{covers, model_line, Outcome, FALSE, TRUE, UNDECIDED};

#[derive(Serialize)]
struct Report<'a> {
    sentence: String,
    structure: &'a str,
    verdict: &'a Verdict,
}

pub fn run_decide(a: &DecideArgs) -> Result<Outcome> {
    let s = parse_sentence(&a.sentence).with_context(|| format!("cannot parse {:?}", a.sentence))?;
    let caps = Caps { max_vars: a.max_vars as usize, max_size: a.max_size as usize };
    let v = decide(&s, caps)?;
    let report = Report { sentence: s.to_string(), structure: a.structure.name(), verdict: &v };
    if let Some(path) = &a.report {
        let text = serde_json::to_string_pretty(&report)?;
        fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    }

    let mut h = String::new();
    let used = &v.caps_used;
    let code = match v.truth {
        Truth::True => {
            let w = v.witness.as_ref().expect("true verdicts carry a witness");
            writeln!(h, "true in the {} degrees: {s}", a.structure.name())?;
            writeln!(h, "witness M: {}", model_line(w))?;
            writeln!(h, "every end extension of M satisfies the body")?;
            writeln!(h, "witness file: {}", serde_json::to_string(&UslFile::from(w.clone()))?)?;
            TRUE
        }
        Truth::False => {
            writeln!(h, "false in the {} degrees: {s}", a.structure.name())?;
            writeln!(h, "every candidate M has an end extension N where the body fails:")?;
            let rows: Vec<(String, String)> =
                v.counterexamples.iter().map(|c| (model_line(&c.candidate), model_line(&c.extension))).collect();
            let width = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0).max("candidate M".len());
            writeln!(h, "  {:<width$}  failing N", "candidate M")?;
            for (m, n) in rows {
                writeln!(h, "  {m:<width$}  {n}")?;
            }
            FALSE
        }
        Truth::UndecidedAtCap => {
            writeln!(h, "undecided at caps (max vars {}, max size {}): {s}", used.max_vars, used.max_size)?;
            UNDECIDED
        }
    };
    writeln!(h, "candidates examined: {}", used.candidates)?;
    Ok(Outcome::new(code, h, report))
}

#[derive(Serialize)]
struct Parsed<'a> {
    sentence: String,
    normalized_body: String,
    ast: &'a Sigma2Sentence,
}

pub fn run_parse(text: &str) -> Result<Outcome> {
    let s = parse_sentence(text).with_context(|| format!("cannot parse {text:?}"))?;
    let normal = normalize_body(&s.body);
    let h = format!("sentence: {s}\nnormalized body: {normal}\nast: {}\n", serde_json::to_string(&s)?);
    Ok(Outcome::new(TRUE, h, Parsed { sentence: s.to_string(), normalized_body: normal.to_string(), ast: &s }))
}

#[derive(Serialize)]
struct Listing {
    generators: usize,
    max_size: usize,
    truncated: bool,
    diagrams: Vec<UslFile>,
}

#[derive(Serialize)]
struct Checked {
    valid: bool,
    size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn run_usl(cmd: &UslCommand) -> Result<Outcome> {
    match cmd {
        UslCommand::Enum { generators, max_size } => {
            let k = *generators;
            let e = enumerate_generated(k, *max_size as usize)?;
            let names: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
            let mut h = String::new();
            let mut diagrams = Vec::new();
            for (i, d) in e.items.iter().enumerate() {
                let (u, v) = d.to_usl(&names)?;
                let vals: Vec<String> = v.entries().iter().map(|(n, t)| format!("{n}={t}")).collect();
                writeln!(h, "#{:<3} size {}; covers {}; {}", i + 1, u.size(), covers(&u), vals.join(" "))?;
                diagrams.push(UslFile::from_usl(&u, Some(&v)));
            }
            write!(h, "{} labeled diagrams on {k} generators", e.items.len())?;
            if e.truncated {
                write!(h, " (truncated: some exceed size {max_size})")?;
            }
            h.push('\n');
            let code = if e.truncated { UNDECIDED } else { TRUE };
            Ok(Outcome::new(
                code,
                h,
                Listing { generators: k, max_size: *max_size as usize, truncated: e.truncated, diagrams },
            ))
        }
        UslCommand::Check { file } => {
            let f: UslFile = read_json(file)?;
            match f.to_usl() {
                Ok((u, _)) => {
                    let h = format!("valid USL of size {}; covers {}\n", u.size(), covers(&u));
                    Ok(Outcome::new(TRUE, h, Checked { valid: true, size: u.size(), error: None }))
                }
                Err(e) => {
                    let h = format!("invalid: {e}\n");
                    Ok(Outcome::new(FALSE, h, Checked { valid: false, size: f.size, error: Some(e.to_string()) }))
                }
            }
        }
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} does not match the expected format", path.display()))
}
