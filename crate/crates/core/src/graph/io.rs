use std::collections::HashMap;
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

/// Read a whitespace-separated edge list: `src dst [weight]` per line, `#`
/// starting a comment line. External ids are remapped to `0..n` in order of
/// first appearance and kept as node labels. With `weighted = false` any third
/// column is ignored and every edge has weight 1.
pub fn load_edge_list(path: impl AsRef<Path>, weighted: bool) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, weighted, &path.display().to_string())
}

pub fn parse_edge_list(text: &str, weighted: bool, origin: &str) -> Result<Graph> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let parse_err = |line: usize, msg: String| Error::Parse { path: origin.to_string(), line, msg };

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(parse_err(
                lineno,
                format!("expected `src dst [weight]`, found {} fields", fields.len()),
            ));
        }
        let w = if weighted && fields.len() == 3 {
            let w: f64 = fields[2]
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad weight `{}`", fields[2])))?;
            if !w.is_finite() {
                return Err(parse_err(lineno, format!("non-finite weight `{}`", fields[2])));
            }
            if w < 0.0 {
                return Err(Error::Validation(format!(
                    "{origin}:{lineno}: negative weight {w}"
                )));
            }
            w
        } else {
            1.0
        };
        let mut intern = |s: &str| -> usize {
            if let Some(&i) = ids.get(s) {
                return i;
            }
            let i = labels.len();
            ids.insert(s.to_string(), i);
            labels.push(s.to_string());
            i
        };
        let u = intern(fields[0]);
        let v = intern(fields[1]);
        edges.push((u, v, w));
    }
    Graph::from_edges(labels.len(), edges)?.with_labels(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_line_path() {
        let g = parse_edge_list("# path\n0 1\n1 2\n", false, "mem").unwrap();
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.degrees(), &[1.0, 2.0, 1.0]);
        assert_eq!(g.volume(), 4.0);
    }

    #[test]
    fn empty_input() {
        let g = parse_edge_list("", false, "mem").unwrap();
        assert_eq!(g.num_nodes(), 0);
        assert_eq!(g.volume(), 0.0);
    }

    #[test]
    fn first_appearance_remap() {
        let g = parse_edge_list("b a\nc b\n", false, "mem").unwrap();
        assert_eq!(g.labels().unwrap(), &["b", "a", "c"]);
        assert_eq!(g.node_index("c"), Some(2));
    }

    #[test]
    fn weights_and_duplicates() {
        let g = parse_edge_list("x y 2.5\ny x 0.5\nx x 1\n", true, "mem").unwrap();
        assert_eq!(g.weight(0, 1), 3.0);
        assert_eq!(g.degree(0), 4.0);
        let unweighted = parse_edge_list("x y 2.5\n", false, "mem").unwrap();
        assert_eq!(unweighted.weight(0, 1), 1.0);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_edge_list("0 1\n0\n", false, "f.txt").unwrap_err();
        match err {
            Error::Parse { line, path, .. } => {
                assert_eq!(line, 2);
                assert_eq!(path, "f.txt");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_edge_list("0 1 abc\n", true, "f.txt").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn negative_weight_is_validation_error() {
        let err = parse_edge_list("0 1 -2\n", true, "f.txt").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }
}
