//! Multigraphs with stable edge labels, minors, spanning trees and the
//! structural predicates used by the reduction theorems.

pub mod corpus;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type EdgeId = u16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub a: u32,
    pub b: u32,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }

    pub fn other(&self, v: u32) -> u32 {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }
}

/// An undirected multigraph; loops and parallel edges are allowed. Edge ids
/// survive minor operations unchanged.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Multigraph {
    vertex_count: u32,
    edges: Vec<Edge>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MinorSpec {
    pub deleted: BTreeSet<EdgeId>,
    pub contracted: BTreeSet<EdgeId>,
}

impl MinorSpec {
    pub fn new(deleted: &[EdgeId], contracted: &[EdgeId]) -> Self {
        MinorSpec {
            deleted: deleted.iter().copied().collect(),
            contracted: contracted.iter().copied().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructuralProbe {
    pub is_simple: bool,
    pub vertex_connectivity_ge_2: bool,
    /// Each 3-valent vertex with its three incident edges.
    pub three_valent_vertices: Vec<(u32, [EdgeId; 3])>,
    /// `(v, [e1, e2, e3, e4])`: `e1, e2, e3` meet at the 3-valent vertex `v`
    /// and `e2, e3, e4` form a triangle.
    pub triangles_at_3valent: Vec<(u32, [EdgeId; 4])>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: u32,
    edges: Vec<[u32; 2]>,
}

impl Multigraph {
    /// Builds a graph whose edge ids are `1..=edges.len()` in list order.
    pub fn new(vertex_count: u32, edges: &[(u32, u32)]) -> Result<Self> {
        let edges = edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| Edge {
                id: (i + 1) as EdgeId,
                a,
                b,
            })
            .collect();
        Self::with_edges(vertex_count, edges)
    }

    /// Builds a graph from labelled edges.
    pub fn with_edges(vertex_count: u32, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for e in &edges {
            if e.a >= vertex_count || e.b >= vertex_count {
                return Err(Error::GraphParse(format!(
                    "edge {} has an endpoint outside 0..{}",
                    e.id, vertex_count
                )));
            }
            if e.id == 0 || !seen.insert(e.id) {
                return Err(Error::GraphParse(format!("edge id {} is zero or repeated", e.id)));
            }
        }
        Ok(Multigraph { vertex_count, edges })
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|e| e.id).collect()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// Degree of `v`, counting a loop twice.
    pub fn degree(&self, v: u32) -> usize {
        self.edges
            .iter()
            .map(|e| (e.a == v) as usize + (e.b == v) as usize)
            .sum()
    }

    pub fn incident_edges(&self, v: u32) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|e| e.a == v || e.b == v)
            .map(|e| e.id)
            .collect()
    }

    fn component_labels(&self, skip_vertex: Option<u32>) -> Vec<u32> {
        let mut uf = UnionFind::new(self.vertex_count as usize);
        for e in &self.edges {
            if Some(e.a) == skip_vertex || Some(e.b) == skip_vertex {
                continue;
            }
            uf.union(e.a as usize, e.b as usize);
        }
        (0..self.vertex_count).map(|v| uf.find(v as usize) as u32).collect()
    }

    /// Number of connected components, isolated vertices included.
    pub fn component_count(&self) -> usize {
        let labels = self.component_labels(None);
        let set: BTreeSet<u32> = labels.into_iter().collect();
        set.len()
    }

    /// Number of components that contain at least one edge.
    pub fn edge_component_count(&self) -> usize {
        let labels = self.component_labels(None);
        let set: BTreeSet<u32> = self.edges.iter().map(|e| labels[e.a as usize]).collect();
        set.len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Connected after discarding isolated vertices.
    pub fn is_connected_ignoring_isolated(&self) -> bool {
        self.edge_component_count() <= 1
    }

    /// h₁ = n − v + #components.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + self.component_count() - self.vertex_count as usize
    }

    pub fn is_simple(&self) -> bool {
        let mut pairs = BTreeSet::new();
        for e in &self.edges {
            if e.is_loop() || !pairs.insert((e.a.min(e.b), e.a.max(e.b))) {
                return false;
            }
        }
        true
    }

    /// Vertex connectivity at least two: connected, at least three vertices
    /// and no cut vertex.
    pub fn is_two_connected(&self) -> bool {
        if self.vertex_count < 3 || !self.is_connected() {
            return false;
        }
        (0..self.vertex_count).all(|v| {
            let labels = self.component_labels(Some(v));
            let set: BTreeSet<u32> = (0..self.vertex_count)
                .filter(|&w| w != v)
                .map(|w| labels[w as usize])
                .collect();
            set.len() == 1
        })
    }

    pub fn minor(&self, spec: &MinorSpec) -> Result<Multigraph> {
        for &id in spec.deleted.iter().chain(&spec.contracted) {
            if self.edge(id).is_none() {
                return Err(Error::UnknownEdge(id));
            }
        }
        if let Some(&id) = spec.deleted.intersection(&spec.contracted).next() {
            return Err(Error::OverlappingMinor(id));
        }
        let mut uf = UnionFind::new(self.vertex_count as usize);
        for &id in &spec.contracted {
            let e = self.edge(id).unwrap();
            if !uf.union(e.a as usize, e.b as usize) {
                return Err(Error::LoopContraction(id));
            }
        }
        let mut new_index = vec![u32::MAX; self.vertex_count as usize];
        let mut count = 0u32;
        for v in 0..self.vertex_count as usize {
            let r = uf.find(v);
            if new_index[r] == u32::MAX {
                new_index[r] = count;
                count += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| !spec.deleted.contains(&e.id) && !spec.contracted.contains(&e.id))
            .map(|e| Edge {
                id: e.id,
                a: new_index[uf.find(e.a as usize)],
                b: new_index[uf.find(e.b as usize)],
            })
            .collect();
        Ok(Multigraph {
            vertex_count: count,
            edges,
        })
    }

    pub fn delete(&self, ids: &[EdgeId]) -> Result<Multigraph> {
        self.minor(&MinorSpec::new(ids, &[]))
    }

    pub fn contract(&self, ids: &[EdgeId]) -> Result<Multigraph> {
        self.minor(&MinorSpec::new(&[], ids))
    }

    /// All spanning forests of the non-isolated part, as sorted edge-id
    /// lists. Loops never belong to a tree.
    pub(crate) fn spanning_forests(&self) -> Vec<Vec<EdgeId>> {
        let edges: Vec<Edge> = self.edges.iter().filter(|e| !e.is_loop()).copied().collect();
        let target = self.vertex_count as usize - self.component_count();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        let uf = UnionFind::new(self.vertex_count as usize);
        enumerate_trees(&edges, 0, target, &uf, &mut chosen, &mut out);
        for t in &mut out {
            t.sort_unstable();
        }
        out.sort();
        out
    }

    /// Every spanning tree as a sorted list of edge ids.
    pub fn spanning_trees(&self) -> Result<Vec<Vec<EdgeId>>> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(self.spanning_forests())
    }

    /// Some spanning forest, picked greedily in edge order.
    pub fn greedy_spanning_forest(&self, order: &[EdgeId]) -> Vec<EdgeId> {
        let mut uf = UnionFind::new(self.vertex_count as usize);
        let mut out = Vec::new();
        for &id in order {
            if let Some(e) = self.edge(id) {
                if uf.union(e.a as usize, e.b as usize) {
                    out.push(id);
                }
            }
        }
        out
    }

    pub fn structural_probe(&self) -> StructuralProbe {
        let mut three = Vec::new();
        let mut tri = Vec::new();
        for v in 0..self.vertex_count {
            if self.degree(v) != 3 {
                continue;
            }
            let inc = self.incident_edges(v);
            if inc.len() != 3 {
                continue;
            }
            let es = [inc[0], inc[1], inc[2]];
            three.push((v, es));
            for i in 0..3 {
                let e1 = es[i];
                let (e2, e3) = (es[(i + 1) % 3], es[(i + 2) % 3]);
                let (e2, e3) = (e2.min(e3), e2.max(e3));
                let u2 = self.edge(e2).unwrap().other(v);
                let u3 = self.edge(e3).unwrap().other(v);
                if u2 == u3 || u2 == v || u3 == v {
                    continue;
                }
                for e in &self.edges {
                    if (e.a == u2 && e.b == u3) || (e.a == u3 && e.b == u2) {
                        tri.push((v, [e1, e2, e3, e.id]));
                    }
                }
            }
        }
        StructuralProbe {
            is_simple: self.is_simple(),
            vertex_connectivity_ge_2: self.is_two_connected(),
            three_valent_vertices: three,
            triangles_at_3valent: tri,
        }
    }

    /// Determinant of the reduced Laplacian, computed with exact rational
    /// elimination; equals the number of spanning trees.
    pub fn matrix_tree_count(&self) -> num_bigint::BigInt {
        use num_rational::BigRational;
        use num_traits::{One, Zero};
        let n = self.vertex_count as usize;
        if n <= 1 {
            return num_bigint::BigInt::one();
        }
        let m = n - 1;
        let mut a = vec![vec![BigRational::zero(); m]; m];
        for e in &self.edges {
            if e.is_loop() {
                continue;
            }
            let (u, w) = (e.a as usize, e.b as usize);
            for &(x, y) in &[(u, w), (w, u)] {
                if x < m {
                    a[x][x] += BigRational::one();
                    if y < m {
                        a[x][y] -= BigRational::one();
                    }
                }
            }
        }
        let mut det = BigRational::one();
        for col in 0..m {
            let Some(piv) = (col..m).find(|&r| !a[r][col].is_zero()) else {
                return num_bigint::BigInt::zero();
            };
            if piv != col {
                a.swap(piv, col);
                det = -det;
            }
            det *= a[col][col].clone();
            for r in col + 1..m {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone() / a[col][col].clone();
                let (top, rest) = a.split_at_mut(r);
                for (x, y) in rest[0][col..].iter_mut().zip(&top[col][col..]) {
                    *x -= y.clone() * f.clone();
                }
            }
        }
        det.to_integer()
    }

    /// Parses the text format: `v <count>` followed by one `u w` line per
    /// edge; blank lines and `#` comments are ignored. JSON input
    /// `{"vertices": n, "edges": [[u, w], ...]}` is also accepted.
    pub fn parse(text: &str) -> Result<Multigraph> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            let g: GraphJson = serde_json::from_str(trimmed).map_err(|e| Error::GraphParse(e.to_string()))?;
            let edges: Vec<(u32, u32)> = g.edges.iter().map(|e| (e[0], e[1])).collect();
            return Multigraph::new(g.vertices, &edges);
        }
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap().trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::GraphParse("empty input".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("v") {
            return Err(Error::GraphParse(format!("expected 'v <count>', got '{header}'")));
        }
        let vertex_count: u32 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::GraphParse(format!("bad vertex count in '{header}'")))?;
        let mut edges = Vec::new();
        for line in lines {
            let nums: Vec<u32> = line
                .split_whitespace()
                .map(|s| s.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::GraphParse(format!("bad edge line '{line}'")))?;
            if nums.len() != 2 {
                return Err(Error::GraphParse(format!("bad edge line '{line}'")));
            }
            edges.push((nums[0], nums[1]));
        }
        Multigraph::new(vertex_count, &edges)
    }

    pub fn to_json(&self) -> String {
        let g = GraphJson {
            vertices: self.vertex_count,
            edges: self.edges.iter().map(|e| [e.a, e.b]).collect(),
        };
        serde_json::to_string(&g).unwrap()
    }

    pub fn cycle(n: u32) -> Multigraph {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Multigraph::new(n, &edges).unwrap()
    }

    pub fn complete(n: u32) -> Multigraph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Multigraph::new(n, &edges).unwrap()
    }

    /// Wheel with `n` spokes: hub 0 joined to the rim cycle `1..=n`.
    pub fn wheel(n: u32) -> Multigraph {
        let mut edges = Vec::new();
        for i in 1..=n {
            edges.push((0, i));
        }
        for i in 1..=n {
            edges.push((i, i % n + 1));
        }
        Multigraph::new(n + 1, &edges).unwrap()
    }

    pub fn complete_bipartite(a: u32, b: u32) -> Multigraph {
        let mut edges = Vec::new();
        for i in 0..a {
            for j in 0..b {
                edges.push((i, a + j));
            }
        }
        Multigraph::new(a + b, &edges).unwrap()
    }

    /// `k` parallel edges between two vertices.
    pub fn banana(k: u32) -> Multigraph {
        let edges: Vec<(u32, u32)> = (0..k).map(|_| (0, 1)).collect();
        Multigraph::new(2, &edges).unwrap()
    }
}

impl fmt::Display for Multigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "v {}", self.vertex_count)?;
        for e in &self.edges {
            writeln!(f, "{} {}", e.a, e.b)?;
        }
        Ok(())
    }
}

fn enumerate_trees(
    edges: &[Edge],
    idx: usize,
    target: usize,
    uf: &UnionFind,
    chosen: &mut Vec<EdgeId>,
    out: &mut Vec<Vec<EdgeId>>,
) {
    if chosen.len() == target {
        out.push(chosen.clone());
        return;
    }
    if idx == edges.len() || edges.len() - idx < target - chosen.len() {
        return;
    }
    let e = edges[idx];
    let mut with = uf.clone();
    if with.union(e.a as usize, e.b as usize) {
        chosen.push(e.id);
        enumerate_trees(edges, idx + 1, target, &with, chosen, out);
        chosen.pop();
    }
    // Skipping e is only useful if the remaining edges can still finish a
    // spanning forest.
    let mut rest = uf.clone();
    let mut merged = chosen.len();
    for f in &edges[idx + 1..] {
        if rest.union(f.a as usize, f.b as usize) {
            merged += 1;
        }
    }
    if merged == target {
        enumerate_trees(edges, idx + 1, target, uf, chosen, out);
    }
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the classes of `a` and `b`; `false` if already merged.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_rank_examples() {
        assert_eq!(Multigraph::cycle(3).cycle_rank(), 1);
        let path = Multigraph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        assert_eq!(path.cycle_rank(), 0);
        assert_eq!(Multigraph::complete(4).cycle_rank(), 3);
    }

    #[test]
    fn minor_examples() {
        let c3 = Multigraph::cycle(3);
        let d = c3.delete(&[1]).unwrap();
        assert_eq!((d.vertex_count(), d.edge_count(), d.cycle_rank()), (3, 2, 0));
        let c = c3.contract(&[1]).unwrap();
        assert_eq!((c.vertex_count(), c.edge_count()), (2, 2));
        assert!(!c.is_simple());
        let k4 = Multigraph::complete(4).contract(&[1]).unwrap();
        assert_eq!((k4.vertex_count(), k4.edge_count()), (3, 5));
        assert!(!k4.is_simple());
        let loop_graph = c3.contract(&[1, 2]).unwrap();
        assert!(matches!(loop_graph.contract(&[3]), Err(Error::LoopContraction(3))));
        assert!(matches!(c3.delete(&[9]), Err(Error::UnknownEdge(9))));
        assert!(matches!(
            c3.minor(&MinorSpec::new(&[1], &[1])),
            Err(Error::OverlappingMinor(1))
        ));
    }

    #[test]
    fn spanning_tree_examples() {
        let trees = Multigraph::cycle(3).spanning_trees().unwrap();
        assert_eq!(trees, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        let path = Multigraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.spanning_trees().unwrap(), vec![vec![1, 2]]);
        let k4 = Multigraph::complete(4);
        assert_eq!(k4.spanning_trees().unwrap().len(), 16);
        assert_eq!(k4.matrix_tree_count(), 16.into());
        let disconnected = Multigraph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(disconnected.spanning_trees(), Err(Error::Disconnected)));
    }

    #[test]
    fn probe_examples() {
        let p = Multigraph::complete(4).structural_probe();
        assert!(p.is_simple && p.vertex_connectivity_ge_2);
        assert_eq!(p.three_valent_vertices.len(), 4);
        assert!(!p.triangles_at_3valent.is_empty());
        assert!(!Multigraph::banana(2).structural_probe().is_simple);
        let bowtie = Multigraph::new(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]).unwrap();
        assert!(!bowtie.structural_probe().vertex_connectivity_ge_2);
    }

    #[test]
    fn parse_formats() {
        let g = Multigraph::parse("v 3\n0 1\n1 2\n# comment\n2 0\n").unwrap();
        assert_eq!(g, Multigraph::cycle(3));
        let j = Multigraph::parse(&g.to_json()).unwrap();
        assert_eq!(j, g);
        assert!(Multigraph::parse("v 2\n0 5\n").is_err());
        assert!(Multigraph::parse("3\n").is_err());
    }
}
