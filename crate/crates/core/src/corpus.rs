//! Built-in test graphs and the keyword syntax used to name them.

use crate::error::{Error, Result};
use crate::graph::{Graph, NamedGraph};

#[derive(Clone, Debug)]
pub struct CorpusGraph {
    pub name: String,
    pub graph: Graph,
}

/// Two triangles sharing a vertex.
pub fn bowtie() -> Graph {
    let t = Graph::cycle(3).expect("triangle");
    t.glue_at_vertex(2, &t, 0).expect("bowtie")
}

/// A 4-cycle and a triangle sharing a vertex.
pub fn square_with_triangle() -> Graph {
    let sq = Graph::cycle(4).expect("square");
    sq.glue_at_vertex(3, &Graph::cycle(3).expect("triangle"), 0)
        .expect("glued")
}

/// The 25 reference graphs: paths, cycles, complete and complete
/// bipartite graphs, Petersen, grids up to 4×4 and two block-glued graphs.
pub fn corpus() -> Vec<CorpusGraph> {
    let mut out = Vec::new();
    let mut push = |name: String, graph: Graph| out.push(CorpusGraph { name, graph });
    for n in 2..=5 {
        push(format!("path:{n}"), Graph::path(n).expect("path"));
    }
    for n in 3..=8 {
        push(format!("cycle:{n}"), Graph::cycle(n).expect("cycle"));
    }
    for n in [4, 5] {
        push(format!("complete:{n}"), Graph::complete(n).expect("complete"));
    }
    for (a, b) in [(1, 3), (2, 3), (2, 4), (3, 3)] {
        push(format!("kab:{a},{b}"), Graph::complete_bipartite(a, b).expect("bipartite"));
    }
    push("petersen".into(), Graph::petersen());
    for (r, c) in [(2, 3), (2, 4), (2, 5), (3, 3), (3, 4), (4, 4)] {
        push(format!("grid:{r},{c}"), Graph::grid(r, c).expect("grid"));
    }
    push("bowtie".into(), bowtie());
    push("square-triangle".into(), square_with_triangle());
    out
}

fn numbers(text: &str, count: usize, keyword: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != count {
        return Err(Error::Parameter(format!(
            "graph keyword '{keyword}' expects {count} comma-separated size(s)"
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("bad size '{p}' in graph keyword '{keyword}'")))
        })
        .collect()
}

/// Parse a graph keyword: `path:n`, `cycle:n`, `complete:n`, `kab:a,b`,
/// `star:n`, `grid:r,c`, `petersen`, `bowtie`, `square-triangle`, and the
/// short forms `pN`, `cN`, `kN`, `kAB` (single-digit parts, e.g. `k23`).
/// Returns `None` when the text is not a keyword.
pub fn parse_keyword(keyword: &str) -> Option<Result<Graph>> {
    let lower = keyword.trim().to_ascii_lowercase();
    if let Some((family, args)) = lower.split_once(':') {
        let named = match family {
            "path" => numbers(args, 1, keyword).map(|v| NamedGraph::Path(v[0])),
            "cycle" => numbers(args, 1, keyword).map(|v| NamedGraph::Cycle(v[0])),
            "complete" => numbers(args, 1, keyword).map(|v| NamedGraph::Complete(v[0])),
            "star" => numbers(args, 1, keyword).map(|v| NamedGraph::Star(v[0])),
            "kab" => numbers(args, 2, keyword).map(|v| NamedGraph::CompleteBipartite(v[0], v[1])),
            "grid" => numbers(args, 2, keyword).map(|v| NamedGraph::Grid(v[0], v[1])),
            _ => return None,
        };
        return Some(named.and_then(Graph::named));
    }
    match lower.as_str() {
        "petersen" => return Some(Ok(Graph::petersen())),
        "bowtie" => return Some(Ok(bowtie())),
        "square-triangle" => return Some(Ok(square_with_triangle())),
        _ => {}
    }
    let (head, digits) = lower.split_at(1.min(lower.len()));
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let value: usize = digits.parse().ok()?;
    let named = match head {
        "p" => NamedGraph::Path(value),
        "c" => NamedGraph::Cycle(value),
        "k" if digits.len() == 2 => {
            let d = digits.as_bytes();
            NamedGraph::CompleteBipartite((d[0] - b'0') as usize, (d[1] - b'0') as usize)
        }
        "k" => NamedGraph::Complete(value),
        _ => return None,
    };
    Some(Graph::named(named))
}
