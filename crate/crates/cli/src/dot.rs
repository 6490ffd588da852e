//! Graphviz DOT rendering of a solved entanglement graph.

use qnu_core::{NetworkSpec, UtilityResult};

/// Renders the consumed-entanglement graph as DOT text. Nodes appear in id
/// order on a circular layout; edge darkness is the consumed rate relative
/// to the strongest edge, so the per-graph maximum is drawn black.
pub fn render(net: &NetworkSpec, result: &UtilityResult, threshold: f64) -> String {
    let edges: Vec<(usize, usize, f64)> = result
        .entanglement
        .iter()
        .filter(|&(_, r)| r > threshold)
        .map(|(p, r)| (p.lo().0, p.hi().0, r))
        .collect();
    let max = edges.iter().map(|e| e.2).fold(0.0f64, f64::max);

    let mut out = String::from("graph entanglement {\n");
    out.push_str("  layout=circo;\n");
    out.push_str("  node [shape=circle];\n");
    for id in 0..net.node_count() {
        out.push_str(&format!("  {id};\n"));
    }
    for (a, b, r) in edges {
        let norm = r / max;
        // gray0 is black; cap at gray85 so the faintest edge stays visible.
        let level = ((1.0 - norm) * 85.0).round() as u32;
        out.push_str(&format!(
            "  {a} -- {b} [color=gray{level}, penwidth={:.2}, label=\"{r:.4}\"];\n",
            0.5 + 2.5 * norm
        ));
    }
    out.push_str("}\n");
    out
}
