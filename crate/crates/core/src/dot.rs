//! Graphviz export of Hasse diagrams.

use std::fmt::Write as _;

use crate::order::FinitePoset;

/// The covering relation of `p` as a bottom-to-top `digraph`.
pub fn hasse_dot(p: &FinitePoset, title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(title));
    let _ = writeln!(out, "  rankdir=BT;");
    for x in p.ids() {
        let _ = writeln!(out, "  n{} [label={}];", x.0, quote(p.name(x)));
    }
    for (x, y) in p.covers() {
        let _ = writeln!(out, "  n{} -> n{};", x.0, y.0);
    }
    out.push_str("}\n");
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_has_two_edges() {
        let dot = hasse_dot(&FinitePoset::chain(3), "c3");
        assert_eq!(dot.matches("->").count(), 2);
        assert!(dot.contains("n0 -> n1;") && dot.contains("n1 -> n2;"));
    }
}
