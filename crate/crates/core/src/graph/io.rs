//! Graph file formats: JSON and a plain edge list (`n m` header, then `m`
//! lines `u v`).

use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartsJson {
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "B")]
    pub b: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub n: usize,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bipartition: Option<PartsJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub roots: Vec<usize>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = GraphError;

    fn try_from(j: GraphJson) -> Result<Graph, GraphError> {
        let edges: Vec<_> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::new(j.n, &edges, j.bipartition.map(|p| (p.a, p.b)), j.roots)
    }
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> GraphJson {
        GraphJson {
            n: g.order(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
            bipartition: g.bipartition().map(|p| PartsJson {
                a: p.a().to_vec(),
                b: p.b().to_vec(),
            }),
            roots: g.roots().to_vec(),
        }
    }
}

impl Graph {
    pub fn from_json(text: &str) -> Result<Graph, GraphError> {
        let j: GraphJson =
            serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        j.try_into()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GraphJson::from(self)).expect("graph serializes")
    }

    pub fn from_edge_list(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| GraphError::Parse("missing 'n m' header".into()))?;
        let [n, m] = parse_pair(header)?;
        let edges = lines
            .map(|l| parse_pair(l).map(|[u, v]| (u, v)))
            .collect::<Result<Vec<_>, _>>()?;
        if edges.len() != m {
            return Err(GraphError::Parse(format!(
                "header announces {m} edges, found {}",
                edges.len()
            )));
        }
        Graph::new(n, &edges, None, Vec::new())
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.order(), self.edge_count());
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// JSON when the text starts with `{`, edge list otherwise.
    pub fn parse_auto(text: &str) -> Result<Graph, GraphError> {
        if text.trim_start().starts_with('{') {
            Graph::from_json(text)
        } else {
            Graph::from_edge_list(text)
        }
    }
}

fn parse_pair(line: &str) -> Result<[usize; 2], GraphError> {
    let nums = line
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| GraphError::Parse(format!("bad number {t:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    <[usize; 2]>::try_from(nums)
        .map_err(|_| GraphError::Parse(format!("expected two numbers in line {line:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_hn;

    #[test]
    fn json_round_trip() {
        let g = generate_hn(2, 20).unwrap().with_roots(vec![8]).unwrap();
        let text = g.to_json().to_string();
        assert_eq!(Graph::from_json(&text).unwrap(), g);
    }

    #[test]
    fn json_shape() {
        let g = Graph::from_json(r#"{"n":3,"edges":[[0,2]],"bipartition":{"A":[0,1],"B":[2]},"roots":[2]}"#)
            .unwrap();
        assert!(g.adjacent(2, 0));
        assert_eq!(g.roots(), &[2]);
        assert!(Graph::from_json(r#"{"n":2,"edges":[[0,0]]}"#).is_err());
        assert!(Graph::from_json(r#"{"n":2,"colour":1}"#).is_err());
    }

    #[test]
    fn edge_list() {
        let g = Graph::from_edge_list("3 2\n0 1\n1 2\n").unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(Graph::from_edge_list(&g.to_edge_list()).unwrap(), g);
        assert!(Graph::from_edge_list("3 2\n0 1\n").is_err());
        assert!(Graph::from_edge_list("3 1\n0 x\n").is_err());
        assert_eq!(Graph::parse_auto("2 1\n0 1").unwrap().edge_count(), 1);
    }
}
