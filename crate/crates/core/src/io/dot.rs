//! GraphViz export.
//!
//! Facts are ellipses, rules are boxes labelled with their weights, and
//! every rule has edges from both inputs and one edge to its output.
//! Suspended rules are drawn dashed.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::network::RuleFactNetwork;
use crate::scalar::Scalar;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn to_dot<T: Scalar>(network: &RuleFactNetwork<T>) -> String {
    let mut out = String::from("digraph rulenet {\n  rankdir=LR;\n");
    for f in &network.facts {
        let mut label = f.id.to_string();
        if let Some(l) = &f.label {
            label.push('\n');
            label.push_str(l);
        }
        let _ = write!(label, "\n{:.3}", f.value.as_f64());
        let _ = writeln!(out, "  {} [shape=ellipse, label={}];", f.id, quote(&label));
    }
    for r in &network.rules {
        let mut label = format!("{}\n({:.3}, {:.3})", r.id, r.w1.as_f64(), r.w2.as_f64());
        if let Some(l) = &r.label {
            label.push('\n');
            label.push_str(l);
        }
        let style = if r.suspended { ", style=dashed" } else { "" };
        let _ = writeln!(out, "  {} [shape=box, label={}{}];", r.id, quote(&label), style);
        let edge_style = if r.suspended { " [style=dashed]" } else { "" };
        let _ = writeln!(out, "  {} -> {}{};", r.input1, r.id, edge_style);
        let _ = writeln!(out, "  {} -> {}{};", r.input2, r.id, edge_style);
        let _ = writeln!(out, "  {} -> {}{};", r.id, r.output, edge_style);
    }
    out.push_str("}\n");
    out
}

pub fn export_dot<T: Scalar>(network: &RuleFactNetwork<T>, path: &Path) -> std::io::Result<()> {
    fs::write(path, to_dot(network))
}
