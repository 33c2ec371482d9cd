//! Deterministic graph corpora: every connected simple graph up to a given
//! edge count (up to isomorphism), a seeded random sample, and named
//! families.

use std::collections::BTreeMap;

use petgraph::graph::UnGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Multigraph;

/// Connected simple graphs without isolated vertices and with
/// `1..=max_edges` edges, one per isomorphism class, ordered by edge count
/// and then by generation order.
pub fn connected_simple_graphs(max_edges: usize) -> Vec<Multigraph> {
    let mut all: Vec<Multigraph> = Vec::new();
    let mut level = vec![Multigraph::new(2, &[(0, 1)]).unwrap()];
    for m in 1..=max_edges {
        all.extend(level.iter().cloned());
        if m == max_edges {
            break;
        }
        let mut next = IsoSet::default();
        for g in &level {
            for child in one_edge_extensions(g) {
                next.insert(child);
            }
        }
        level = next.into_vec();
    }
    all
}

fn one_edge_extensions(g: &Multigraph) -> Vec<Multigraph> {
    let n = g.vertex_count();
    let pairs: Vec<(u32, u32)> = g.edges().iter().map(|e| (e.a, e.b)).collect();
    let mut out = Vec::new();
    for u in 0..n {
        for w in u + 1..n {
            if !pairs.iter().any(|&(a, b)| (a == u && b == w) || (a == w && b == u)) {
                let mut p = pairs.clone();
                p.push((u, w));
                out.push(Multigraph::new(n, &p).unwrap());
            }
        }
        let mut p = pairs.clone();
        p.push((u, n));
        out.push(Multigraph::new(n + 1, &p).unwrap());
    }
    out
}

/// Collects graphs up to isomorphism, bucketed by a refinement invariant.
#[derive(Default)]
pub struct IsoSet {
    buckets: BTreeMap<Vec<u64>, Vec<usize>>,
    graphs: Vec<Multigraph>,
    pet: Vec<UnGraph<(), ()>>,
}

impl IsoSet {
    /// Inserts `g` unless an isomorphic graph is present; returns whether it
    /// was new.
    pub fn insert(&mut self, g: Multigraph) -> bool {
        let key = invariant(&g);
        let pg = to_petgraph(&g);
        let bucket = self.buckets.entry(key).or_default();
        if bucket.iter().any(|&i| petgraph::algo::is_isomorphic(&self.pet[i], &pg)) {
            return false;
        }
        bucket.push(self.graphs.len());
        self.graphs.push(g);
        self.pet.push(pg);
        true
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn into_vec(self) -> Vec<Multigraph> {
        self.graphs
    }
}

fn to_petgraph(g: &Multigraph) -> UnGraph<(), ()> {
    let mut pg = UnGraph::<(), ()>::with_capacity(g.vertex_count() as usize, g.edge_count());
    let nodes: Vec<_> = (0..g.vertex_count()).map(|_| pg.add_node(())).collect();
    for e in g.edges() {
        pg.add_edge(nodes[e.a as usize], nodes[e.b as usize], ());
    }
    pg
}

/// Sorted multiset of colors after three rounds of Weisfeiler–Lehman
/// refinement, prefixed by the vertex and edge counts.
fn invariant(g: &Multigraph) -> Vec<u64> {
    let n = g.vertex_count() as usize;
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e.a as usize].push(e.b as usize);
        adj[e.b as usize].push(e.a as usize);
    }
    let mut color: Vec<u64> = adj.iter().map(|a| a.len() as u64).collect();
    for _ in 0..3 {
        color = (0..n)
            .map(|v| {
                let mut ns: Vec<u64> = adj[v].iter().map(|&w| color[w]).collect();
                ns.sort_unstable();
                let mut h = color[v].wrapping_mul(0x100_0000_01b3) ^ 0xcbf2_9ce4_8422_2325;
                for c in ns {
                    h = (h ^ c).wrapping_mul(0x100_0000_01b3).rotate_left(17);
                }
                h
            })
            .collect();
    }
    color.sort_unstable();
    let mut key = vec![n as u64, g.edge_count() as u64];
    key.extend(color);
    key
}

/// Seeded sample of pairwise non-isomorphic connected simple graphs with
/// `min_edges..=max_edges` edges and at least one cycle.
pub fn random_corpus(count: usize, min_edges: usize, max_edges: usize, seed: u64) -> Vec<Multigraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = IsoSet::default();
    let mut attempts = 0usize;
    while set.len() < count {
        attempts += 1;
        assert!(attempts < count * 1000, "random corpus generation stalled");
        let m = rng.gen_range(min_edges..=max_edges);
        let vmin = (2..).find(|&v: &usize| v * (v - 1) / 2 >= m).unwrap();
        let vmax = m;
        if vmin > vmax {
            continue;
        }
        let v = rng.gen_range(vmin..=vmax);
        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(m);
        for w in 1..v {
            edges.push((rng.gen_range(0..w) as u32, w as u32));
        }
        while edges.len() < m {
            let a = rng.gen_range(0..v) as u32;
            let b = rng.gen_range(0..v) as u32;
            let e = (a.min(b), a.max(b));
            if a == b || edges.contains(&e) {
                continue;
            }
            edges.push(e);
        }
        set.insert(Multigraph::new(v as u32, &edges).unwrap());
    }
    set.into_vec()
}

/// The random corpus used by the certification and resolution suites:
/// 500 graphs with 3 to 12 edges.
pub fn standard_random_corpus() -> Vec<Multigraph> {
    random_corpus(500, 3, 12, 0x5eed_2010)
}

/// `C_k(1,2)` with vertex 0 removed: a 4-regular circulant minus a vertex,
/// which has `2h₁ = n` and four 3-valent vertices.
pub fn circulant_minus_vertex(k: u32) -> Multigraph {
    let mut edges = Vec::new();
    for i in 0..k {
        for s in [1, 2] {
            let j = (i + s) % k;
            if i != 0 && j != 0 {
                edges.push((i - 1, j - 1));
            }
        }
    }
    Multigraph::new(k - 1, &edges).unwrap()
}

/// Named families with their display names.
pub fn named_families() -> Vec<(String, Multigraph)> {
    let mut out = Vec::new();
    for n in 3..=8 {
        out.push((format!("C{n}"), Multigraph::cycle(n)));
    }
    out.push(("K4".into(), Multigraph::complete(4)));
    out.push(("K5".into(), Multigraph::complete(5)));
    for n in 3..=6 {
        out.push((format!("W{n}"), Multigraph::wheel(n)));
    }
    out.push(("K33".into(), Multigraph::complete_bipartite(3, 3)));
    out.push(("K34".into(), Multigraph::complete_bipartite(3, 4)));
    for k in 5..=8 {
        out.push((format!("C{k}(1,2)-v"), circulant_minus_vertex(k)));
    }
    out
}
