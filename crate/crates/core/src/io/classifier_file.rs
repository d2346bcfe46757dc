//! Line-based classifier files.
//!
//! ```text
//! kind naive_bayes
//! threshold 0.5
//! prior 0.3                    # Pr(class = +)
//! feature W rates 0.1 0.04     # binary shorthand: fp, fn
//! feature C labels r g b
//! pos 0.2 0.3 0.5              # Pr(C | +)
//! neg 0.4 0.4 0.2              # Pr(C | -)
//! ```
//!
//! ```text
//! kind latent_tree
//! threshold 0.5
//! node C root labels - +
//! cpt 0.6 0.4
//! node H parent C labels 0 1
//! cpt 0.8 0.2                  # one row per parent value
//! cpt 0.3 0.7
//! ```
//!
//! Dumps always use the expanded form, so they reload byte-identically.

use std::fmt::Write as _;
use std::path::Path;

use crate::classifier::{Classifier, Feature, LatentTree, NaiveBayes, TreeNode};
use crate::error::{Error, Result};

use super::{format_prob, tokenize, Token};

fn number(tok: &Token<'_>, line: usize) -> Result<f64> {
    match tok.text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(
            line,
            tok.column,
            format!("expected a number, found {:?}", tok.text),
        )),
    }
}

fn expect_len(toks: &[Token<'_>], line: usize, n: usize) -> Result<()> {
    if toks.len() != n {
        let col = toks.get(n).or(toks.last()).map_or(1, |t| t.column);
        return Err(Error::parse(
            line,
            col,
            format!(
                "{} takes {} arguments, found {}",
                toks[0].text,
                n - 1,
                toks.len() - 1
            ),
        ));
    }
    Ok(())
}

fn numbers(toks: &[Token<'_>], line: usize) -> Result<Vec<f64>> {
    toks.iter().map(|t| number(t, line)).collect()
}

/// Load-time errors from the classifier constructors, tagged with the line
/// they most likely stem from.
fn at_line(e: Error, line: usize) -> Error {
    match e {
        Error::Parse(_) | Error::Normalization { .. } => e,
        other => Error::parse(line, 1, other.to_string()),
    }
}

struct PendingFeature {
    line: usize,
    name: String,
    labels: Vec<String>,
    pos: Option<Vec<f64>>,
    neg: Option<Vec<f64>>,
}

struct PendingNode {
    line: usize,
    name: String,
    parent: Option<(String, usize, usize)>,
    labels: Vec<String>,
    rows: Vec<Vec<f64>>,
}

pub fn parse_classifier(text: &str) -> Result<Classifier> {
    let lines = tokenize(text);
    let Some((first_line, first)) = lines.first() else {
        return Err(Error::parse(1, 1, "empty classifier file"));
    };
    if first[0].text != "kind" {
        return Err(Error::parse(
            *first_line,
            first[0].column,
            "file must start with `kind`",
        ));
    }
    expect_len(first, *first_line, 2)?;
    match first[1].text {
        "naive_bayes" => parse_nb(&lines[1..]),
        "latent_tree" => parse_lt(&lines[1..]),
        other => Err(Error::parse(
            *first_line,
            first[1].column,
            format!("unknown classifier kind {other:?}"),
        )),
    }
}

fn parse_threshold(toks: &[Token<'_>], line: usize, slot: &mut Option<f64>) -> Result<()> {
    expect_len(toks, line, 2)?;
    if slot.is_some() {
        return Err(Error::parse(line, toks[0].column, "duplicate threshold"));
    }
    *slot = Some(number(&toks[1], line)?);
    Ok(())
}

fn parse_nb(lines: &[(usize, Vec<Token<'_>>)]) -> Result<Classifier> {
    let mut threshold = None;
    let mut prior = None;
    let mut accuracy = None;
    let mut features: Vec<PendingFeature> = Vec::new();
    let mut last_line = 1;
    for (line, toks) in lines {
        let line = *line;
        last_line = line;
        match toks[0].text {
            "threshold" => parse_threshold(toks, line, &mut threshold)?,
            "prior" => {
                expect_len(toks, line, 2)?;
                prior = Some(number(&toks[1], line)?);
            }
            "training_accuracy" => {
                expect_len(toks, line, 2)?;
                accuracy = Some(number(&toks[1], line)?);
            }
            "feature" => {
                if toks.len() < 3 {
                    return Err(Error::parse(
                        line,
                        toks[0].column,
                        "feature needs a name and a body",
                    ));
                }
                let name = toks[1].text.to_string();
                match toks[2].text {
                    "rates" => {
                        expect_len(toks, line, 5)?;
                        let (fp, fn_) = (number(&toks[3], line)?, number(&toks[4], line)?);
                        for (t, v) in [(&toks[3], fp), (&toks[4], fn_)] {
                            if !(0.0..=1.0).contains(&v) {
                                return Err(Error::parse(
                                    line,
                                    t.column,
                                    format!("rate {v} not in [0, 1]"),
                                ));
                            }
                        }
                        let f = Feature::from_rates(name, fp, fn_);
                        features.push(PendingFeature {
                            line,
                            name: f.name,
                            labels: f.labels,
                            pos: Some(f.given_pos),
                            neg: Some(f.given_neg),
                        });
                    }
                    "labels" => features.push(PendingFeature {
                        line,
                        name,
                        labels: toks[3..].iter().map(|t| t.text.to_string()).collect(),
                        pos: None,
                        neg: None,
                    }),
                    other => {
                        return Err(Error::parse(
                            line,
                            toks[2].column,
                            format!("expected `rates` or `labels`, found {other:?}"),
                        ))
                    }
                }
            }
            kw @ ("pos" | "neg") => {
                let Some(f) = features.last_mut() else {
                    return Err(Error::parse(
                        line,
                        toks[0].column,
                        format!("`{kw}` before any feature"),
                    ));
                };
                let slot = if kw == "pos" { &mut f.pos } else { &mut f.neg };
                if slot.is_some() {
                    return Err(Error::parse(
                        line,
                        toks[0].column,
                        format!("duplicate `{kw}` row for {}", f.name),
                    ));
                }
                if toks.len() - 1 != f.labels.len() {
                    return Err(Error::parse(
                        line,
                        toks[0].column,
                        format!(
                            "{} has {} values but the row has {} entries",
                            f.name,
                            f.labels.len(),
                            toks.len() - 1
                        ),
                    ));
                }
                *slot = Some(numbers(&toks[1..], line)?);
            }
            other => {
                return Err(Error::parse(
                    line,
                    toks[0].column,
                    format!("unknown keyword {other:?}"),
                ));
            }
        }
    }
    let threshold = threshold.ok_or_else(|| Error::parse(last_line, 1, "missing `threshold`"))?;
    let prior = prior.ok_or_else(|| Error::parse(last_line, 1, "missing `prior`"))?;
    let mut done = Vec::with_capacity(features.len());
    for f in features {
        let (Some(pos), Some(neg)) = (f.pos, f.neg) else {
            return Err(Error::parse(
                f.line,
                1,
                format!("feature {} lacks a `pos` or `neg` row", f.name),
            ));
        };
        done.push(Feature {
            name: f.name,
            labels: f.labels,
            given_pos: pos,
            given_neg: neg,
        });
    }
    let mut nb = NaiveBayes::new(prior, threshold, done).map_err(|e| at_line(e, 1))?;
    if let Some(a) = accuracy {
        nb.set_training_accuracy(a);
    }
    Ok(nb.into())
}

fn parse_lt(lines: &[(usize, Vec<Token<'_>>)]) -> Result<Classifier> {
    let mut threshold = None;
    let mut nodes: Vec<PendingNode> = Vec::new();
    let mut last_line = 1;
    for (line, toks) in lines {
        let line = *line;
        last_line = line;
        match toks[0].text {
            "threshold" => parse_threshold(toks, line, &mut threshold)?,
            "node" => {
                if toks.len() < 4 {
                    return Err(Error::parse(
                        line,
                        toks[0].column,
                        "node needs a name, a parent and labels",
                    ));
                }
                let name = toks[1].text.to_string();
                let (parent, rest) = match toks[2].text {
                    "root" => (None, 3),
                    "parent" if toks.len() >= 5 => {
                        (Some((toks[3].text.to_string(), line, toks[3].column)), 4)
                    }
                    _ => {
                        return Err(Error::parse(
                            line,
                            toks[2].column,
                            "expected `root` or `parent <name>`",
                        ));
                    }
                };
                if toks[rest].text != "labels" {
                    return Err(Error::parse(line, toks[rest].column, "expected `labels`"));
                }
                nodes.push(PendingNode {
                    line,
                    name,
                    parent,
                    labels: toks[rest + 1..]
                        .iter()
                        .map(|t| t.text.to_string())
                        .collect(),
                    rows: Vec::new(),
                });
            }
            "cpt" => {
                let Some(n) = nodes.last_mut() else {
                    return Err(Error::parse(line, toks[0].column, "`cpt` before any node"));
                };
                if toks.len() - 1 != n.labels.len() {
                    return Err(Error::parse(
                        line,
                        toks[0].column,
                        format!(
                            "{} has {} values but the row has {} entries",
                            n.name,
                            n.labels.len(),
                            toks.len() - 1
                        ),
                    ));
                }
                n.rows.push(numbers(&toks[1..], line)?);
            }
            other => {
                return Err(Error::parse(
                    line,
                    toks[0].column,
                    format!("unknown keyword {other:?}"),
                ));
            }
        }
    }
    let threshold = threshold.ok_or_else(|| Error::parse(last_line, 1, "missing `threshold`"))?;
    let index = |name: &str| nodes.iter().position(|n| n.name == name);
    let mut built = Vec::with_capacity(nodes.len());
    for (i, n) in nodes.iter().enumerate() {
        if index(&n.name) != Some(i) {
            return Err(Error::parse(
                n.line,
                1,
                format!("duplicate node {}", n.name),
            ));
        }
        let parent = match &n.parent {
            None => None,
            Some((p, line, col)) => Some(
                index(p)
                    .ok_or_else(|| Error::parse(*line, *col, format!("unknown parent {p:?}")))?,
            ),
        };
        let expected = parent.map_or(1, |p| nodes[p].labels.len());
        if n.rows.len() != expected {
            return Err(Error::parse(
                n.line,
                1,
                format!(
                    "node {} needs {expected} cpt rows, found {}",
                    n.name,
                    n.rows.len()
                ),
            ));
        }
        built.push(TreeNode {
            name: n.name.clone(),
            labels: n.labels.clone(),
            parent,
            cpt: n.rows.clone(),
        });
    }
    let lt = LatentTree::new(built, threshold).map_err(|e| at_line(e, 1))?;
    Ok(lt.into())
}

fn row(out: &mut String, keyword: &str, values: &[f64]) {
    out.push_str(keyword);
    for &v in values {
        out.push(' ');
        out.push_str(&format_prob(v));
    }
    out.push('\n');
}

/// Canonical text of a classifier.
pub fn format_classifier(c: &Classifier) -> String {
    let mut out = String::new();
    match c {
        Classifier::NaiveBayes(nb) => {
            out.push_str("kind naive_bayes\n");
            let _ = writeln!(out, "threshold {}", format_prob(nb.threshold()));
            let _ = writeln!(out, "prior {}", format_prob(nb.prior()));
            if let Some(a) = nb.training_accuracy() {
                let _ = writeln!(out, "training_accuracy {}", format_prob(a));
            }
            for f in nb.features() {
                let _ = writeln!(out, "feature {} labels {}", f.name, f.labels.join(" "));
                row(&mut out, "pos", &f.given_pos);
                row(&mut out, "neg", &f.given_neg);
            }
        }
        Classifier::LatentTree(lt) => {
            out.push_str("kind latent_tree\n");
            let _ = writeln!(out, "threshold {}", format_prob(lt.threshold()));
            for n in lt.nodes() {
                match n.parent {
                    None => {
                        let _ = write!(out, "node {} root", n.name);
                    }
                    Some(p) => {
                        let _ = write!(out, "node {} parent {}", n.name, lt.nodes()[p].name);
                    }
                }
                let _ = writeln!(out, " labels {}", n.labels.join(" "));
                for r in &n.cpt {
                    row(&mut out, "cpt", r);
                }
            }
        }
    }
    out
}

pub fn load_classifier(path: impl AsRef<Path>) -> Result<Classifier> {
    parse_classifier(&std::fs::read_to_string(path)?)
}

pub fn dump_classifier(c: &Classifier, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_classifier(c))?;
    Ok(())
}
