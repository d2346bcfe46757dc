//! Diagram files.
//!
//! ```text
//! mode reduced
//! var W - +
//! var G - +
//! root 2
//! 0 1 F T
//! 1 1 T F
//! 2 0 0 1
//! ```
//!
//! One line per internal node, children first, ids renumbered from 0;
//! sinks are `T` and `F`. A constant diagram has the single body line `T`
//! or `F`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::dd::{Dd, Manager, Mode, Variable, VariableTable};
use crate::error::{Error, Result};

use super::tokenize;

pub fn serialize_odd(m: &Manager, f: Dd) -> Result<String> {
    let nodes = m.topological(f)?;
    let mut ids: HashMap<Dd, usize> = HashMap::new();
    let name = |ids: &HashMap<Dd, usize>, d: Dd| match m.sink_value(d) {
        Some(true) => "T".to_string(),
        Some(false) => "F".to_string(),
        None => ids[&d].to_string(),
    };
    let mut out = String::new();
    let _ = writeln!(out, "mode {}", m.mode().as_str());
    for v in m.vars().iter() {
        let _ = writeln!(out, "var {} {}", v.name, v.labels.join(" "));
    }
    let mut body = String::new();
    for (i, (d, var, children)) in nodes.iter().enumerate() {
        ids.insert(*d, i);
        let _ = write!(body, "{i} {var}");
        for &c in children {
            let _ = write!(body, " {}", name(&ids, c));
        }
        body.push('\n');
    }
    let root = name(&ids, f);
    let _ = writeln!(out, "root {root}");
    if nodes.is_empty() {
        let _ = writeln!(out, "{root}");
    } else {
        out.push_str(&body);
    }
    Ok(out)
}

/// `(line, id, var, children)` with children as raw tokens and columns.
type NodeLine = (usize, usize, usize, Vec<(String, usize)>);

struct Parsed {
    mode: Mode,
    vars: VariableTable,
    root: (usize, String, usize),
    nodes: Vec<NodeLine>,
}

fn parse(text: &str) -> Result<Parsed> {
    let lines = tokenize(text);
    let mut mode = None;
    let mut vars = Vec::new();
    let mut root = None;
    let mut nodes = Vec::new();
    let mut sink_body = false;
    for (line, toks) in &lines {
        let line = *line;
        let head = &toks[0];
        match head.text {
            "mode" if root.is_none() => {
                mode = Some(match toks.get(1).map(|t| t.text) {
                    Some("reduced") => Mode::Reduced,
                    Some("complete") => Mode::Complete,
                    _ => {
                        return Err(Error::parse(
                            line,
                            head.column,
                            "mode must be `reduced` or `complete`",
                        ))
                    }
                });
            }
            "var" if root.is_none() => {
                if toks.len() < 4 {
                    return Err(Error::parse(
                        line,
                        head.column,
                        "var needs a name and at least two labels",
                    ));
                }
                vars.push(Variable::new(
                    toks[1].text,
                    toks[2..].iter().map(|t| t.text.to_string()).collect(),
                ));
            }
            "root" if root.is_none() => {
                let Some(t) = toks.get(1) else {
                    return Err(Error::parse(line, head.column, "root needs a node"));
                };
                root = Some((line, t.text.to_string(), t.column));
            }
            "T" | "F" if root.is_some() && toks.len() == 1 => sink_body = true,
            _ if root.is_some() => {
                let id = head.text.parse::<usize>().map_err(|_| {
                    Error::parse(line, head.column, format!("bad node id {:?}", head.text))
                })?;
                let Some(v) = toks.get(1) else {
                    return Err(Error::parse(
                        line,
                        head.column,
                        "node line needs a variable",
                    ));
                };
                let var = v.text.parse::<usize>().map_err(|_| {
                    Error::parse(line, v.column, format!("bad variable index {:?}", v.text))
                })?;
                let children = toks[2..]
                    .iter()
                    .map(|t| (t.text.to_string(), t.column))
                    .collect();
                nodes.push((line, id, var, children));
            }
            other => {
                return Err(Error::parse(
                    line,
                    head.column,
                    format!("unexpected {other:?}"),
                ))
            }
        }
    }
    let mode = mode.ok_or_else(|| Error::parse(1, 1, "missing `mode`"))?;
    let root = root.ok_or_else(|| Error::parse(1, 1, "missing `root`"))?;
    if sink_body && !nodes.is_empty() {
        return Err(Error::parse(root.0, 1, "sink line mixed with node lines"));
    }
    let vars = VariableTable::new(vars).map_err(|e| Error::parse(1, 1, e.to_string()))?;
    Ok(Parsed {
        mode,
        vars,
        root,
        nodes,
    })
}

fn build(m: &mut Manager, p: &Parsed) -> Result<Dd> {
    let mut ids: HashMap<usize, Dd> = HashMap::new();
    let resolve =
        |ids: &HashMap<usize, Dd>, m: &Manager, tok: &str, line: usize, col: usize| -> Result<Dd> {
            match tok {
                "T" => Ok(m.constant(true)),
                "F" => Ok(m.constant(false)),
                _ => tok
                    .parse::<usize>()
                    .ok()
                    .and_then(|i| ids.get(&i).copied())
                    .ok_or_else(|| {
                        Error::parse(line, col, format!("dangling child reference {tok:?}"))
                    }),
            }
        };
    for (line, id, var, children) in &p.nodes {
        if ids.contains_key(id) {
            return Err(Error::parse(*line, 1, format!("duplicate node id {id}")));
        }
        let kids = children
            .iter()
            .map(|(t, c)| resolve(&ids, m, t, *line, *c))
            .collect::<Result<Vec<_>>>()?;
        let d = m
            .intern_node(*var, &kids)
            .map_err(|e| Error::parse(*line, 1, e.to_string()))?;
        ids.insert(*id, d);
    }
    let (line, tok, col) = &p.root;
    resolve(&ids, m, tok, *line, *col)
}

/// Read a diagram into a fresh manager.
pub fn deserialize_odd(text: &str) -> Result<(Manager, Dd)> {
    let p = parse(text)?;
    let mut m = Manager::new(p.vars.clone(), p.mode);
    let root = build(&mut m, &p)?;
    Ok((m, root))
}

/// Read a diagram into an existing manager with the same variables and
/// mode; the result is the canonical node of that manager.
pub fn deserialize_odd_into(m: &mut Manager, text: &str) -> Result<Dd> {
    let p = parse(text)?;
    if p.mode != m.mode() || &p.vars != m.vars() {
        return Err(Error::Argument(
            "diagram file does not match the manager's variables or mode".into(),
        ));
    }
    build(m, &p)
}

pub fn load_odd(path: impl AsRef<Path>) -> Result<(Manager, Dd)> {
    deserialize_odd(&std::fs::read_to_string(path)?)
}

pub fn save_odd(m: &Manager, f: Dd, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, serialize_odd(m, f)?)?;
    Ok(())
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering with value-labelled edges and `yes`/`no` sinks.
pub fn to_dot(m: &Manager, f: Dd) -> Result<String> {
    let nodes = m.topological(f)?;
    let id = |d: Dd| match m.sink_value(d) {
        Some(true) => "yes".to_string(),
        Some(false) => "no".to_string(),
        None => format!("n{}", d.index()),
    };
    let mut out = String::from("digraph odd {\n");
    out.push_str("  yes [label=\"yes\", shape=box];\n  no [label=\"no\", shape=box];\n");
    for (d, var, _) in nodes.iter().rev() {
        let name = &m.vars().get(*var).expect("declared variable").name;
        let _ = writeln!(out, "  {} [label=\"{}\"];", id(*d), dot_escape(name));
    }
    for (d, var, children) in nodes.iter().rev() {
        let labels = &m.vars().get(*var).expect("declared variable").labels;
        for (v, &c) in children.iter().enumerate() {
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"{}\"];",
                id(*d),
                id(c),
                dot_escape(&labels[v])
            );
        }
    }
    if nodes.is_empty() {
        let _ = writeln!(out, "  root [shape=point];\n  root -> {};", id(f));
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::BoolOp;

    #[test]
    fn sink_round_trip() {
        let m = Manager::new(VariableTable::binary(2), Mode::Reduced);
        let text = serialize_odd(&m, m.constant(true)).unwrap();
        assert_eq!(text, "mode reduced\nvar X1 - +\nvar X2 - +\nroot T\nT\n");
        let (m2, r) = deserialize_odd(&text).unwrap();
        assert_eq!(m2.sink_value(r), Some(true));
    }

    #[test]
    fn round_trip_is_canonical() {
        let mut m = Manager::new(VariableTable::binary(3), Mode::Reduced);
        let a = m.literal(0, 1).unwrap();
        let b = m.literal(2, 0).unwrap();
        let f = m.combine(a, b, BoolOp::Or).unwrap();
        let text = serialize_odd(&m, f).unwrap();
        assert_eq!(deserialize_odd_into(&mut m, &text).unwrap(), f);
        let (m2, g) = deserialize_odd(&text).unwrap();
        assert_eq!(serialize_odd(&m2, g).unwrap(), text);
    }

    #[test]
    fn complete_mode_round_trip() {
        let mut m = Manager::new(VariableTable::binary(2).with_wildcards(), Mode::Complete);
        let f = m.literal(1, 2).unwrap();
        let text = serialize_odd(&m, f).unwrap();
        assert!(text.starts_with("mode complete\n"));
        assert_eq!(deserialize_odd_into(&mut m, &text).unwrap(), f);
    }

    #[test]
    fn broken_files() {
        let dangling = "mode reduced\nvar A - +\nroot 0\n0 0 F 7\n";
        assert!(
            matches!(deserialize_odd(dangling), Err(Error::Parse(e)) if e.line == 4 && e.column == 7)
        );
        let order = "mode reduced\nvar A - +\nvar B - +\n0 1 F T\nroot 1\n";
        assert!(deserialize_odd(order).is_err());
        let order = "mode reduced\nvar A - +\nvar B - +\nroot 1\n0 0 F T\n1 1 0 T\n";
        assert!(
            matches!(deserialize_odd(order), Err(Error::Parse(e)) if e.message.contains("ordering"))
        );
    }

    #[test]
    fn dot_has_both_sinks() {
        let mut m = Manager::new(VariableTable::binary(2), Mode::Reduced);
        let f = m.literal(0, 1).unwrap();
        let dot = to_dot(&m, f).unwrap();
        assert!(dot.contains("yes [label=\"yes\"") && dot.contains("no [label=\"no\""));
        assert!(dot.contains("-> yes [label=\"+\"]"));
    }
}
