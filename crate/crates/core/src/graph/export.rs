use std::fmt::Write;

use super::{BipartiteGraph, InvestorNetwork};

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// GraphML with `investor_id`, `keiretsu` node data and `shared_count`,
/// `weight` edge data.
pub fn network_to_graphml(net: &InvestorNetwork) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    s.push_str(
        "  <key id=\"investor_id\" for=\"node\" attr.name=\"investor_id\" attr.type=\"string\"/>\n",
    );
    s.push_str(
        "  <key id=\"keiretsu\" for=\"node\" attr.name=\"keiretsu\" attr.type=\"string\"/>\n",
    );
    s.push_str(
        "  <key id=\"shared_count\" for=\"edge\" attr.name=\"shared_count\" attr.type=\"int\"/>\n",
    );
    s.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    s.push_str("  <graph id=\"investors\" edgedefault=\"undirected\">\n");
    for (i, n) in net.nodes().iter().enumerate() {
        let _ = writeln!(
            s,
            "    <node id=\"n{i}\"><data key=\"investor_id\">{}</data><data key=\"keiretsu\">{}</data></node>",
            xml_escape(&n.id),
            xml_escape(&n.label())
        );
    }
    for (i, e) in net.edges().iter().enumerate() {
        let _ = writeln!(
            s,
            "    <edge id=\"e{i}\" source=\"n{}\" target=\"n{}\"><data key=\"shared_count\">{}</data><data key=\"weight\">{}</data></edge>",
            e.a, e.b, e.shared_count, e.weight
        );
    }
    s.push_str("  </graph>\n</graphml>\n");
    s
}

pub fn network_to_dot(net: &InvestorNetwork) -> String {
    let mut s = String::from("graph investors {\n");
    for n in net.nodes() {
        let _ = writeln!(
            s,
            "  {} [investor_id={}, keiretsu={}];",
            dot_quote(&n.id),
            dot_quote(&n.id),
            dot_quote(&n.label())
        );
    }
    for e in net.edges() {
        let _ = writeln!(
            s,
            "  {} -- {} [shared_count={}, weight={}];",
            dot_quote(&net.nodes()[e.a].id),
            dot_quote(&net.nodes()[e.b].id),
            e.shared_count,
            e.weight
        );
    }
    s.push_str("}\n");
    s
}

/// DOT with a `class` attribute separating investors from subsidiaries.
/// Node names are prefixed (`i:`/`s:`) since the two id spaces may overlap.
pub fn bipartite_to_dot(bg: &BipartiteGraph) -> String {
    let mut s = String::from("graph ownership {\n");
    for id in bg.investors() {
        let _ = writeln!(
            s,
            "  {} [label={}, class=investor];",
            dot_quote(&format!("i:{id}")),
            dot_quote(id)
        );
    }
    for id in bg.subsidiaries() {
        let _ = writeln!(
            s,
            "  {} [label={}, class=subsidiary];",
            dot_quote(&format!("s:{id}")),
            dot_quote(id)
        );
    }
    for e in bg.edges() {
        let cap = e.capital.map(|k| k.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "  {} -- {} [capital={}];",
            dot_quote(&format!("i:{}", bg.investors()[e.investor])),
            dot_quote(&format!("s:{}", bg.subsidiaries()[e.subsidiary])),
            dot_quote(&cap)
        );
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bipartite::tests::sub;
    use crate::graph::{build_bipartite, InvestorEdge, InvestorNode};
    use crate::ingest::KeiretsuGroup;

    fn net() -> InvestorNetwork {
        let mut a = InvestorNode::new("A&Co");
        a.groups = vec![KeiretsuGroup::Mitsui, KeiretsuGroup::Fuyo];
        InvestorNetwork::new(
            vec![a, InvestorNode::new("B")],
            vec![InvestorEdge::new(0, 1, 3, 0.5)],
        )
        .unwrap()
    }

    #[test]
    fn graphml_escapes_and_carries_attributes() {
        let g = network_to_graphml(&net());
        assert!(g.contains("<data key=\"investor_id\">A&amp;Co</data>"));
        assert!(g.contains("<data key=\"keiretsu\">Mitsui;Fuyo</data>"));
        assert!(g.contains("source=\"n0\" target=\"n1\""));
        assert!(g.contains("<data key=\"shared_count\">3</data><data key=\"weight\">0.5</data>"));
        assert_eq!(g.matches("<node ").count(), 2);
    }

    #[test]
    fn dot_lists_edges() {
        let d = network_to_dot(&net());
        assert!(d.starts_with("graph investors {"));
        assert!(d.contains("\"A&Co\" -- \"B\" [shared_count=3, weight=0.5];"));
    }

    #[test]
    fn bipartite_dot_has_two_classes() {
        let bg = build_bipartite(&[sub("s1", Some(10.0), &[("A", 0.5), ("B", 0.5)])]);
        let d = bipartite_to_dot(&bg);
        assert_eq!(d.matches("class=investor").count(), 2);
        assert_eq!(d.matches("class=subsidiary").count(), 1);
        assert!(d.contains("\"i:A\" -- \"s:s1\" [capital=\"5\"];"));
    }
}
