//! Command-line front end. [`run`] is the whole program minus process exit,
//! so it can be driven in-process.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::SeedableRng;

use crate::classifier::{
    capacity_from_env, train_naive_bayes, Classifier, DecisionTable, MissingPolicy,
};
use crate::compiler::{compile_classifier, CompiledOdd};
use crate::dd::{Dd, Instance, Manager};
use crate::error::{Error, Result};
use crate::explain::{brute_mc_oracle, brute_pi_oracle, explain_pi, mc_explanations};
use crate::io::{
    dump_classifier, format_prob, load_classifier, load_dataset, load_odd, save_odd, to_dot,
    DatasetOptions,
};
use crate::monotone::is_monotone_with;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_CAPACITY: i32 = 4;
pub const EXIT_MISMATCH: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "bnx",
    version,
    about = "Compile Bayesian network classifiers to decision diagrams and explain their decisions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Mc,
    Pi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Missing {
    Skip,
    Value,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile a classifier file into a diagram file.
    Compile {
        #[arg(long)]
        model: PathBuf,
        /// Feature names (or indices) in diagram order; naive Bayes only.
        #[arg(long)]
        order: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Also write a Graphviz rendering.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Explain the decision of a compiled classifier on one instance.
    Explain {
        #[arg(long)]
        odd: PathBuf,
        /// Whitespace-separated value labels in diagram variable order.
        #[arg(long, allow_hyphen_values = true)]
        instance: String,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Print only the shortest PI-explanations.
        #[arg(long)]
        shortest: bool,
        /// Print the number of PI-explanations per length.
        #[arg(long)]
        histogram: bool,
    },
    /// Decide whether a compiled decision function is monotone.
    CheckMonotone {
        #[arg(long)]
        odd: PathBuf,
        /// Variables whose value order is reversed.
        #[arg(long, value_delimiter = ',')]
        flip: Vec<String>,
    },
    /// Size statistics of a diagram, or frontier sizes of a compilation.
    Stats {
        #[arg(long, conflicts_with = "model", required_unless_present = "model")]
        odd: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        order: Option<String>,
    },
    /// Train a naive Bayes classifier from a CSV file.
    Train {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        smoothing: f64,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long)]
        out: PathBuf,
        /// Class column; defaults to the last one.
        #[arg(long)]
        class_column: Option<String>,
        /// Class value treated as positive.
        #[arg(long)]
        positive: Option<String>,
        /// Cell value map, e.g. `y=+,n=-`.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "y=+,n=-",
            allow_hyphen_values = true
        )]
        map: Vec<String>,
        #[arg(long, value_enum, default_value_t = Missing::Skip)]
        missing: Missing,
    },
    /// Compile and check the result against brute force.
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        order: Option<String>,
        /// Check this diagram file instead of a fresh compilation.
        #[arg(long)]
        odd: Option<PathBuf>,
        /// Instances sampled for the explanation oracles.
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Parse(_) | Error::Normalization { .. } | Error::Structure(_) | Error::Range(_) => {
            EXIT_PARSE
        }
        Error::Capacity { .. } => EXIT_CAPACITY,
        Error::Verification(_) => EXIT_MISMATCH,
        _ => EXIT_USAGE,
    }
}

/// Run with `args` (program name first); output goes to `out`, diagnostics
/// to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn parse_order(c: &Classifier, order: Option<&str>) -> Result<Vec<usize>> {
    let vars = c.variables();
    let Some(text) = order else {
        return Ok((0..vars.len()).collect());
    };
    text.split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            vars.index_of(t)
                .or_else(|| t.parse::<usize>().ok().filter(|&i| i < vars.len()))
                .ok_or_else(|| Error::Argument(format!("unknown feature {t:?} in order")))
        })
        .collect()
}

fn compile(c: &Classifier, order: Option<&str>) -> Result<CompiledOdd> {
    let order = order.map(|o| parse_order(c, Some(o))).transpose()?;
    compile_classifier(c, order.as_deref())
}

fn execute(cmd: Command, out: &mut impl Write, err: &mut impl Write) -> Result<i32> {
    match cmd {
        Command::Compile {
            model,
            order,
            out: path,
            dot,
        } => {
            let c = load_classifier(&model)?;
            let odd = compile(&c, order.as_deref())?;
            save_odd(&odd.manager, odd.root, &path)?;
            if let Some(dot) = dot {
                std::fs::write(dot, to_dot(&odd.manager, odd.root)?)?;
            }
            writeln!(out, "size {}", odd.manager.size(odd.root)?)?;
            writeln!(out, "models {}", odd.manager.model_count(odd.root)?)?;
            if odd.impossible_leaves > 0 {
                writeln!(
                    err,
                    "warning: {} zero-probability leaves closed as negative",
                    odd.impossible_leaves
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::Explain {
            odd,
            instance,
            kind,
            shortest,
            histogram,
        } => {
            let (mut m, f) = load_odd(&odd)?;
            let x = m.vars().parse_instance(&instance)?;
            explain(&mut m, f, &x, kind, shortest, histogram, out)?;
            Ok(EXIT_OK)
        }
        Command::CheckMonotone { odd, flip } => {
            let (mut m, f) = load_odd(&odd)?;
            let mut mask = vec![false; m.num_vars()];
            for name in &flip {
                let i = m
                    .vars()
                    .index_of(name)
                    .ok_or_else(|| Error::Argument(format!("unknown variable {name:?}")))?;
                mask[i] = true;
            }
            let r = is_monotone_with(&mut m, f, &mask)?;
            writeln!(
                out,
                "{}",
                if r.monotone {
                    "monotone"
                } else {
                    "not monotone"
                }
            )?;
            for (v, ok) in m.vars().iter().zip(&r.per_variable) {
                writeln!(
                    out,
                    "{} {}",
                    v.name,
                    if *ok { "monotone" } else { "violated" }
                )?;
            }
            if let Some((lo, hi)) = &r.witness {
                writeln!(
                    out,
                    "witness {} | {}",
                    m.vars().format_instance(lo),
                    m.vars().format_instance(hi)
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::Stats { odd, model, order } => {
            if let Some(path) = odd {
                let (m, f) = load_odd(&path)?;
                diagram_stats(&m, f, out)?;
            } else {
                let c = load_classifier(model.expect("clap requires one of odd/model"))?;
                let compiled = compile(&c, order.as_deref())?;
                let vars = c.variables();
                writeln!(out, "depth feature expanded open")?;
                for s in &compiled.stats {
                    let name = &vars.get(s.feature).expect("feature").name;
                    writeln!(out, "{} {} {} {}", s.depth, name, s.expanded, s.open)?;
                }
                diagram_stats(&compiled.manager, compiled.root, out)?;
            }
            Ok(EXIT_OK)
        }
        Command::Train {
            csv,
            smoothing,
            threshold,
            out: path,
            class_column,
            positive,
            map,
            missing,
        } => {
            let mut opts = DatasetOptions {
                class_column,
                positive,
                missing_policy: match missing {
                    Missing::Skip => MissingPolicy::Skip,
                    Missing::Value => MissingPolicy::AsValue,
                },
                ..DatasetOptions::default()
            };
            for pair in map.iter().filter(|p| !p.is_empty()) {
                let (from, to) = pair.split_once('=').ok_or_else(|| {
                    Error::Argument(format!("bad map entry {pair:?}, expected from=to"))
                })?;
                opts.value_map.insert(from.to_string(), to.to_string());
            }
            let data = load_dataset(&csv, &opts)?;
            let nb = train_naive_bayes(&data, smoothing, threshold)?;
            let acc = nb.training_accuracy().unwrap_or(f64::NAN);
            dump_classifier(&nb.into(), &path)?;
            writeln!(out, "rows {}", data.rows.len())?;
            writeln!(out, "training accuracy {}", format_prob(acc))?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            model,
            order,
            odd,
            samples,
            seed,
        } => verify(&model, order.as_deref(), odd, samples, seed, out),
    }
}

fn diagram_stats(m: &Manager, f: Dd, out: &mut impl Write) -> Result<()> {
    writeln!(out, "mode {}", m.mode().as_str())?;
    writeln!(out, "variables {}", m.num_vars())?;
    writeln!(out, "size {}", m.size(f)?)?;
    writeln!(out, "models {}", m.model_count(f)?)?;
    let mut per_var = vec![0usize; m.num_vars()];
    for (_, var, _) in m.topological(f)? {
        per_var[var] += 1;
    }
    for (v, count) in m.vars().iter().zip(per_var) {
        writeln!(out, "level {} {}", v.name, count)?;
    }
    Ok(())
}

fn explain(
    m: &mut Manager,
    f: Dd,
    x: &Instance,
    kind: Kind,
    shortest: bool,
    histogram: bool,
    out: &mut impl Write,
) -> Result<()> {
    let vars = m.vars().clone();
    match kind {
        Kind::Mc => {
            let s = mc_explanations(m, f, x)?;
            writeln!(out, "decision {}", if s.decision { "+" } else { "-" })?;
            for e in s.explanations(m)? {
                writeln!(out, "{}", vars.format_instance(&e))?;
            }
            writeln!(out, "count {}", s.count(m)?)?;
        }
        Kind::Pi => {
            let mut s = explain_pi(m, f, x)?;
            writeln!(out, "decision {}", if s.decision { "+" } else { "-" })?;
            let list = if shortest { s.shortest() } else { s.decode() };
            for z in &list {
                writeln!(out, "{}", vars.format_partial(z))?;
            }
            writeln!(
                out,
                "count {}",
                if shortest {
                    list.len().into()
                } else {
                    s.count()
                }
            )?;
            if histogram {
                writeln!(out, "length count")?;
                for (len, count) in s.length_histogram() {
                    writeln!(out, "{len} {count}")?;
                }
            }
        }
    }
    Ok(())
}

fn verify(
    model: &std::path::Path,
    order: Option<&str>,
    odd: Option<PathBuf>,
    samples: usize,
    seed: u64,
    out: &mut impl Write,
) -> Result<i32> {
    let cap = capacity_from_env();
    let c = load_classifier(model)?;
    let compiled = compile(&c, order)?;
    let (mut m, f) = match odd {
        Some(p) => load_odd(p)?,
        None => (compiled.manager, compiled.root),
    };
    let order = compiled.order;
    if m.vars() != &crate::compiler::permuted_vars(&c.variables(), &order) {
        return Err(Error::Verification(
            "diagram variables do not match the classifier".into(),
        ));
    }
    let oracle = DecisionTable::from_classifier_total(&c, cap, false)?;
    let to_diagram = |x: &Instance| Instance(order.iter().map(|&i| x[i]).collect());
    let mut mismatches = 0usize;
    for (x, d) in oracle.iter() {
        if m.evaluate(f, &to_diagram(&x))? != d {
            mismatches += 1;
        }
    }
    writeln!(out, "instances {}", oracle.len())?;
    writeln!(out, "table mismatches {mismatches}")?;
    if mismatches > 0 {
        return Err(Error::Verification(format!(
            "{mismatches} instances disagree with the classifier"
        )));
    }
    // explanation oracles on a sample, over the diagram's own variable order
    let table = DecisionTable::from_diagram(&m, f, cap)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let k = samples.min(table.len());
    let picks: Vec<usize> = sample(&mut rng, table.len(), k).into_vec();
    let binary = m.vars().is_binary();
    let mut mc_checked = 0;
    let mut pi_checked = 0;
    let mut pi_skipped = false;
    for rank in picks {
        let x = m.vars().unrank(rank);
        if binary {
            let s = mc_explanations(&mut m, f, &x)?;
            if s.explanations(&m)? != brute_mc_oracle(&table, &x)? {
                return Err(Error::Verification(format!(
                    "MC-explanations differ on {}",
                    m.vars().format_instance(&x)
                )));
            }
            mc_checked += 1;
        }
        match brute_pi_oracle(&table, &x, cap) {
            Ok(expected) => {
                let mut got = explain_pi(&mut m, f, &x)?.decode();
                got.sort();
                if got != expected {
                    return Err(Error::Verification(format!(
                        "PI-explanations differ on {}",
                        m.vars().format_instance(&x)
                    )));
                }
                pi_checked += 1;
            }
            Err(Error::Capacity { .. }) => pi_skipped = true,
            Err(e) => return Err(e),
        }
    }
    writeln!(out, "mc oracle checks {mc_checked}")?;
    writeln!(
        out,
        "pi oracle checks {pi_checked}{}",
        if pi_skipped { " (capacity-capped)" } else { "" }
    )?;
    writeln!(out, "ok")?;
    Ok(EXIT_OK)
}
