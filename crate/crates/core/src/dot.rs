//! Graphviz export of a relation's strict order quotient.

use std::fmt::Write;

use crate::closure::RelationState;
use crate::model::{ElementId, Scenario};

/// Indifference classes of the weak layer, ordered by smallest member.
pub fn indifference_classes(state: &RelationState) -> Vec<Vec<ElementId>> {
    let n = state.len();
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<ElementId>> = Vec::new();
    for x in 0..n {
        if class_of[x] != usize::MAX {
            continue;
        }
        let members: Vec<_> = (x..n)
            .filter(|&y| state.weak(x, y) && state.weak(y, x))
            .collect();
        for &m in &members {
            class_of[m] = classes.len();
        }
        classes.push(members);
    }
    classes
}

/// One node per indifference class, one edge per covering pair of the
/// strict order between classes (better class points to worse).
pub fn hasse_dot(s: &Scenario, state: &RelationState) -> String {
    let classes = indifference_classes(state);
    let k = classes.len();
    let above = |a: usize, b: usize| {
        let (x, y) = (classes[a][0], classes[b][0]);
        state.weak(x, y) && !state.weak(y, x)
    };

    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(s.name())).unwrap();
    writeln!(out, "  rankdir=TB;").unwrap();
    writeln!(out, "  node [shape=box];").unwrap();
    for (i, members) in classes.iter().enumerate() {
        let label = members
            .iter()
            .map(|&m| escape(s.label(m)))
            .collect::<Vec<_>>()
            .join(", ");
        writeln!(out, "  c{i} [label=\"{label}\"];").unwrap();
    }
    for a in 0..k {
        for b in 0..k {
            if a == b || !above(a, b) {
                continue;
            }
            let covered = (0..k).any(|c| c != a && c != b && above(a, c) && above(c, b));
            if !covered {
                writeln!(out, "  c{a} -> c{b};").unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::WeakOrder;
    use crate::scenarios::gen_dated_rewards;

    #[test]
    fn chain_of_classes() {
        let s = gen_dated_rewards(&["y"], 2).unwrap();
        let e = WeakOrder::from_levels(vec![1, 0, 1]).unwrap().to_state();
        assert_eq!(indifference_classes(&e), vec![vec![0, 2], vec![1]]);
        let dot = hasse_dot(&s, &e);
        assert!(dot.contains("c0 [label=\"(y,0), (y,2)\"]"));
        assert!(dot.contains("c1 -> c0;"));
        assert_eq!(dot.matches("->").count(), 1);
    }
}
