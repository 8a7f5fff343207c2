//! Line-oriented text formats for trees and vertex functions.
//!
//! Tree files: a header `tree <n>` followed by one line per non-root
//! vertex, `vertex <id> parent <pid> up <rate> down <rate>`. Lines whose
//! first non-blank character is `#` are comments; blank lines are skipped.
//! Vertex 0 is never listed. Parsing is locale-independent (dot decimal
//! separator), and serialization uses the shortest round-tripping decimal
//! form, so parse-then-serialize is byte-stable.
//!
//! Vertex function files: one `<id> <value>` line per vertex, with `inf`
//! accepted as a value token. Every vertex of the target tree must appear.

use crate::error::{Error, Result};
use crate::func::VertexFunction;
use crate::tree::{EdgeSpec, RootedTree};

fn parse_err(line: usize, detail: impl Into<String>) -> Error {
    Error::ParseError { line, detail: detail.into() }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("{what} must be a nonnegative integer, got {tok:?}")))
}

fn parse_rate(tok: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("{what} must be a decimal real, got {tok:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{what} must be finite, got {tok:?}")));
    }
    Ok(v)
}

/// Parse a tree file.
pub fn parse_tree(text: &str) -> Result<RootedTree> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file, expected header `tree <n>`"))?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("tree") {
        return Err(parse_err(header_line, "expected header `tree <n>`"));
    }
    let n = parse_usize(
        toks.next().ok_or_else(|| parse_err(header_line, "missing vertex count"))?,
        header_line,
        "vertex count",
    )?;
    if toks.next().is_some() {
        return Err(parse_err(header_line, "trailing tokens after header"));
    }
    if n < 2 {
        return Err(parse_err(header_line, format!("vertex count must be at least 2, got {n}")));
    }

    let mut edges = Vec::with_capacity(n - 1);
    for (line_no, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 8
            || toks[0] != "vertex"
            || toks[2] != "parent"
            || toks[4] != "up"
            || toks[6] != "down"
        {
            return Err(parse_err(
                line_no,
                "expected `vertex <id> parent <pid> up <rate> down <rate>`",
            ));
        }
        let child = parse_usize(toks[1], line_no, "vertex id")?;
        if child == 0 {
            return Err(parse_err(line_no, "vertex 0 is the root and is never listed"));
        }
        let parent = parse_usize(toks[3], line_no, "parent id")?;
        let rate_up = parse_rate(toks[5], line_no, "up rate")?;
        let rate_down = parse_rate(toks[7], line_no, "down rate")?;
        edges.push(EdgeSpec { child, parent, rate_up, rate_down });
    }
    if edges.len() != n - 1 {
        return Err(parse_err(
            text.lines().count(),
            format!("header announced {n} vertices but {} were listed", edges.len() + 1),
        ));
    }
    RootedTree::from_edges(&edges)
}

/// Serialize a tree; the inverse of [`parse_tree`], byte for byte.
pub fn serialize_tree(tree: &RootedTree) -> String {
    let mut out = format!("tree {}\n", tree.vertex_count());
    for e in tree.to_edges() {
        out.push_str(&format!(
            "vertex {} parent {} up {} down {}\n",
            e.child, e.parent, e.rate_up, e.rate_down
        ));
    }
    out
}

/// Parse a vertex function file against a tree of `vertex_count` vertices.
pub fn parse_function(text: &str, vertex_count: usize) -> Result<VertexFunction> {
    let mut values = vec![f64::NAN; vertex_count];
    let mut seen = vec![false; vertex_count];
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(line_no, "expected `<vertex-id> <value>`"));
        }
        let v = parse_usize(toks[0], line_no, "vertex id")?;
        if v >= vertex_count {
            return Err(parse_err(
                line_no,
                format!("vertex {v} outside the tree (0..{vertex_count})"),
            ));
        }
        if seen[v] {
            return Err(parse_err(line_no, format!("vertex {v} listed twice")));
        }
        let value: f64 = toks[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("value must be a real or `inf`, got {:?}", toks[1])))?;
        if value.is_nan() {
            return Err(parse_err(line_no, "NaN is not a value"));
        }
        if value == f64::NEG_INFINITY {
            return Err(parse_err(line_no, "-inf is not a value"));
        }
        seen[v] = true;
        values[v] = value;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(parse_err(
            text.lines().count().max(1),
            format!("vertex {missing} has no value"),
        ));
    }
    Ok(VertexFunction::new(values))
}

/// Serialize a vertex function; `inf` is written for infinite entries.
pub fn serialize_function(f: &VertexFunction) -> String {
    let mut out = String::new();
    for (v, &x) in f.values().iter().enumerate() {
        out.push_str(&format!("{v} {x}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{random_tree, Branching};

    const STAR: &str = "\
# a three-leaf example
tree 4
vertex 1 parent 0 up 1 down 1
vertex 2 parent 1 up 1 down 1
vertex 3 parent 1 up 1 down 1
";

    #[test]
    fn parse_star() {
        let t = parse_tree(STAR).unwrap();
        assert_eq!(t.vertex_count(), 4);
        assert_eq!(t.children(1), &[2, 3]);
    }

    #[test]
    fn parse_rejects_malformed_line_with_number() {
        let bad = "tree 3\nvertex 1 parent 0 up 1 down 1\nvertex 2 parent 1 up x down 1\n";
        match parse_tree(bad).unwrap_err() {
            Error::ParseError { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn parse_rejects_vertex_count_mismatch() {
        let bad = "tree 4\nvertex 1 parent 0 up 1 down 1\n";
        assert!(matches!(parse_tree(bad), Err(Error::ParseError { .. })));
    }

    #[test]
    fn parse_rejects_listed_root() {
        let bad = "tree 2\nvertex 0 parent 0 up 1 down 1\n";
        assert!(matches!(parse_tree(bad), Err(Error::ParseError { line: 2, .. })));
    }

    #[test]
    fn tree_round_trip_is_byte_stable() {
        for seed in [1, 7, 23] {
            let t = random_tree(seed, 40, (0.1, 10.0), Branching::UniformAttachment).unwrap();
            let text = serialize_tree(&t);
            let back = parse_tree(&text).unwrap();
            assert_eq!(back, t, "seed {seed}");
            assert_eq!(serialize_tree(&back), text, "seed {seed}");
        }
    }

    #[test]
    fn function_round_trip_with_inf() {
        let f = VertexFunction::new(vec![f64::INFINITY, f64::INFINITY, 1.5, 1.25]);
        let text = serialize_function(&f);
        assert!(text.starts_with("0 inf\n"));
        let back = parse_function(&text, 4).unwrap();
        assert_eq!(back.values(), f.values());
    }

    #[test]
    fn function_missing_vertex_rejected() {
        let err = parse_function("0 0\n1 1\n", 3).unwrap_err();
        match err {
            Error::ParseError { detail, .. } => assert!(detail.contains("vertex 2")),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn function_rejects_nan_and_duplicates() {
        assert!(parse_function("0 NaN\n1 1\n", 2).is_err());
        assert!(parse_function("0 0\n0 1\n1 1\n", 2).is_err());
        assert!(parse_function("0 0\n5 1\n", 2).is_err());
    }
}
