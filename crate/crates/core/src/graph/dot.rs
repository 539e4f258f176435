use super::CoherencyNetwork;
use std::collections::HashMap;
use std::fmt::Write;

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

/// Graphviz text for `g`. Nodes are written as `n<index>` in node order,
/// labelled with `labels[passage id]` when present and the passage id
/// otherwise; edges follow in `(source, target)` order.
pub fn export_dot(g: &CoherencyNetwork, labels: Option<&HashMap<String, String>>) -> String {
    let mut out = String::from("digraph coherency {\n");
    for (i, id) in g.nodes().iter().enumerate() {
        let label = labels.and_then(|l| l.get(id)).unwrap_or(id);
        writeln!(out, "  n{i} [label={}];", quote(label)).unwrap();
    }
    for (a, b) in g.edges() {
        writeln!(out, "  n{a} -> n{b};").unwrap();
    }
    out.push_str("}\n");
    out
}
