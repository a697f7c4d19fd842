//! Graphviz export. Nodes follow state order, edges follow transition order.

use std::fmt::Write;

use crate::pda::Pda;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Edge label `input,pop/push` with the push word top-first and `ε` for
/// empty parts.
pub fn edge_label(pda: &Pda, tid: usize) -> String {
    let t = pda.transition(tid);
    let input = t.input.map_or("ε".to_string(), |c| c.to_string());
    let push = if t.push.is_empty() {
        "ε".to_string()
    } else {
        t.push.iter().map(|&x| pda.symbol_name(x)).collect::<Vec<_>>().join(" ")
    };
    format!("{input},{}/{push}", pda.symbol_name(t.pop))
}

pub fn export_dot(pda: &Pda) -> String {
    let mut out = String::from("digraph pda {\n  rankdir=LR;\n");
    for (q, name) in pda.states().iter().enumerate() {
        let shape = if pda.is_accepting(q) { "doublecircle" } else { "circle" };
        let style = if q == pda.initial_state() { ", style=bold" } else { "" };
        writeln!(out, "  {} [shape={shape}{style}];", quote(name)).expect("writing to a string");
    }
    for (tid, t) in pda.transitions().iter().enumerate() {
        writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(pda.state_name(t.from)),
            quote(pda.state_name(t.to)),
            quote(&edge_label(pda, tid))
        )
        .expect("writing to a string");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::multiple_dpda;
    use crate::pda::PdaBuilder;

    #[test]
    fn no_transitions_gives_nodes_only() {
        let mut b = PdaBuilder::new(&['a'], "q", "Z");
        b.accept("f");
        let d = export_dot(&b.build());
        assert_eq!(d.matches("->").count(), 0);
        assert!(d.contains("\"f\" [shape=doublecircle]"));
        assert!(d.contains("\"q\" [shape=circle, style=bold]"));
    }

    #[test]
    fn one_edge_per_transition() {
        let p = multiple_dpda(1).unwrap();
        let d = export_dot(&p);
        assert_eq!(d.matches("->").count(), p.transitions().len());
        assert_eq!(d, export_dot(&p));
    }
}
