//! DOT and GraphML exporters for the weighted sentiment lattice.

use std::fmt::Write as _;

use crate::error::Result;
use crate::sentiment::{SentimentContext, SentimentConcept, WeightedSentimentLattice};

/// Visual mapping: node width grows with log(1 + population), color
/// interpolates red (−1) through neutral gray (0) to green (+1) in RGB, and
/// labels show the first `label_words` extent words.
#[derive(Debug, Clone)]
pub struct RenderSpec {
    pub base_width: f64,
    pub width_scale: f64,
    pub label_words: usize,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            base_width: 0.3,
            width_scale: 0.35,
            label_words: 3,
        }
    }
}

impl RenderSpec {
    pub fn node_width(&self, population: u64) -> f64 {
        self.base_width + self.width_scale * (1.0 + population as f64).ln()
    }

    /// 24-bit RGB hex for a polarity in [-1, 1].
    pub fn polarity_color(&self, polarity: f64) -> String {
        let p = polarity.clamp(-1.0, 1.0);
        let lerp = |from: u8, to: u8, t: f64| -> u8 {
            (from as f64 + (to as f64 - from as f64) * t).round() as u8
        };
        let (red, gray, green) = ((0xFF, 0x00, 0x00), (0x80, 0x80, 0x80), (0x00, 0xFF, 0x00));
        let (r, g, b) = if p < 0.0 {
            let t = p + 1.0; // 0 at -1, 1 at 0
            (
                lerp(red.0, gray.0, t),
                lerp(red.1, gray.1, t),
                lerp(red.2, gray.2, t),
            )
        } else {
            (
                lerp(gray.0, green.0, p),
                lerp(gray.1, green.1, p),
                lerp(gray.2, green.2, p),
            )
        };
        format!("#{r:02X}{g:02X}{b:02X}")
    }

    fn label(&self, sctx: &SentimentContext, concept: &SentimentConcept) -> String {
        let words: Vec<&str> = concept
            .extent
            .iter()
            .take(self.label_words)
            .map(|o| sctx.context().objects()[o].as_str())
            .collect();
        let extra = concept.extent.len().saturating_sub(self.label_words);
        let mut label = words.join(" ");
        if extra > 0 {
            let _ = write!(label, " +{extra}");
        }
        if label.is_empty() {
            label.push('-');
        }
        label
    }
}

fn escape_dot(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// A DOT digraph: one node per materialized concept, one edge per Hasse
/// cover, child pointing at parent. Node order is concept order, so output is
/// deterministic.
pub fn export_dot(
    lattice: &WeightedSentimentLattice,
    sctx: &SentimentContext,
    spec: &RenderSpec,
) -> Result<String> {
    lattice.check_context(sctx)?;
    let mut out = String::new();
    out.push_str("digraph sentiment_lattice {\n");
    out.push_str("  rankdir=BT;\n");
    out.push_str("  node [shape=ellipse, style=filled, fixedsize=false];\n");
    for (i, c) in lattice.concepts().iter().enumerate() {
        let _ = writeln!(
            out,
            "  n{i} [label=\"{}\", width={:.4}, fillcolor=\"{}\", population={}, polarity=\"{:.6}\"];",
            escape_dot(&spec.label(sctx, c)),
            spec.node_width(c.population),
            spec.polarity_color(if c.neutral { 0.0 } else { c.polarity }),
            c.population,
            if c.neutral { 0.0 } else { c.polarity },
        );
    }
    for (child, parent) in lattice.covers() {
        let _ = writeln!(out, "  n{child} -> n{parent};");
    }
    out.push_str("}\n");
    Ok(out)
}

fn escape_xml(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

/// GraphML with typed node attributes: population (long), polarity (double),
/// provenance and label (string). The key schema is declared once in the
/// header.
pub fn export_graphml(
    lattice: &WeightedSentimentLattice,
    sctx: &SentimentContext,
    spec: &RenderSpec,
) -> Result<String> {
    lattice.check_context(sctx)?;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"d0\" for=\"node\" attr.name=\"population\" attr.type=\"long\"/>\n");
    out.push_str("  <key id=\"d1\" for=\"node\" attr.name=\"polarity\" attr.type=\"double\"/>\n");
    out.push_str("  <key id=\"d2\" for=\"node\" attr.name=\"provenance\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"d3\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    out.push_str("  <graph id=\"sentiment_lattice\" edgedefault=\"directed\">\n");
    for (i, c) in lattice.concepts().iter().enumerate() {
        let _ = writeln!(out, "    <node id=\"n{i}\">");
        let _ = writeln!(out, "      <data key=\"d0\">{}</data>", c.population);
        let _ = writeln!(
            out,
            "      <data key=\"d1\">{:.6}</data>",
            if c.neutral { 0.0 } else { c.polarity }
        );
        let _ = writeln!(
            out,
            "      <data key=\"d2\">{}</data>",
            match c.provenance {
                crate::sentiment::Provenance::Base => "base",
                crate::sentiment::Provenance::Emergent => "emergent",
            }
        );
        let _ = writeln!(
            out,
            "      <data key=\"d3\">{}</data>",
            escape_xml(&spec.label(sctx, c))
        );
        out.push_str("    </node>\n");
    }
    for (idx, (child, parent)) in lattice.covers().enumerate() {
        let _ = writeln!(
            out,
            "    <edge id=\"e{idx}\" source=\"n{child}\" target=\"n{parent}\"/>"
        );
    }
    out.push_str("  </graph>\n");
    out.push_str("</graphml>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{fish_fixture, FormalContext};
    use crate::sentiment::materialize_base;

    fn fixture() -> (SentimentContext, WeightedSentimentLattice) {
        let sctx =
            SentimentContext::from_parts(fish_fixture(), vec![0.2, -0.6, 1.0, 0.4, -1.0]).unwrap();
        let lattice = materialize_base(&sctx).unwrap();
        (sctx, lattice)
    }

    #[test]
    fn full_positive_polarity_is_pure_green() {
        let spec = RenderSpec::default();
        assert_eq!(spec.polarity_color(1.0), "#00FF00");
        assert_eq!(spec.polarity_color(-1.0), "#FF0000");
        assert_eq!(spec.polarity_color(0.0), "#808080");
    }

    #[test]
    fn zero_population_gets_minimal_positive_width() {
        let spec = RenderSpec::default();
        assert_eq!(spec.node_width(0), spec.base_width);
        assert!(spec.node_width(10) > spec.node_width(0));
        assert!(spec.node_width(0) > 0.0);
    }

    #[test]
    fn dot_output_lists_every_node_and_cover() {
        let (sctx, lattice) = fixture();
        let dot = export_dot(&lattice, &sctx, &RenderSpec::default()).unwrap();
        assert_eq!(
            dot.matches("label=").count(),
            lattice.len(),
            "one node statement per concept"
        );
        assert_eq!(dot.matches(" -> ").count(), lattice.cover_count());
        assert!(dot.starts_with("digraph"));
    }

    #[test]
    fn dot_output_is_deterministic() {
        let (sctx, lattice) = fixture();
        let a = export_dot(&lattice, &sctx, &RenderSpec::default()).unwrap();
        let b = export_dot(&lattice, &sctx, &RenderSpec::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn graphml_declares_schema_once_and_counts_match() {
        let (sctx, lattice) = fixture();
        let xml = export_graphml(&lattice, &sctx, &RenderSpec::default()).unwrap();
        assert_eq!(xml.matches("<key ").count(), 4);
        assert_eq!(xml.matches("<node ").count(), lattice.len());
        assert_eq!(xml.matches("<edge ").count(), lattice.cover_count());
        // fresh lattice: every population is zero
        assert_eq!(
            xml.matches("<data key=\"d0\">0</data>").count(),
            lattice.len()
        );
    }

    #[test]
    fn labels_escape_quotes_and_xml() {
        let ctx = FormalContext::from_rows(&["a\"b", "c&d"], &["x<y"], &[&[0], &[0]]).unwrap();
        let sctx = SentimentContext::from_parts(ctx, vec![0.1, 0.2]).unwrap();
        let lattice = materialize_base(&sctx).unwrap();
        let dot = export_dot(&lattice, &sctx, &RenderSpec::default()).unwrap();
        assert!(dot.contains("a\\\"b"));
        let xml = export_graphml(&lattice, &sctx, &RenderSpec::default()).unwrap();
        assert!(xml.contains("c&amp;d"));
    }
}
