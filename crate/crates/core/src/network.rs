//! Class co-occurrence graphs and whole-network cohesion measures.
//!
//! The cohesion measures are computed on the binary undirected graph
//! whose nodes are the occupied classes and whose edges are class pairs
//! with any positive co-occurrence. That construction is the only one
//! under which the reported density, average degree and component-ratio
//! arithmetic closes, and it is locked in by tests.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::Error;
use crate::ingest::PatentRecord;
use crate::portfolio::ClassMode;
use crate::scalar::{CompensatedSum, Real};
use crate::taxonomy::{normalize_class, Level};
use crate::Result;

/// Symmetric co-occurrence counts among the occupied classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CooccurrenceMatrix {
    codes: Vec<String>,
    // row-major n*n, symmetric, zero diagonal
    w: Vec<u64>,
}

impl CooccurrenceMatrix {
    pub fn codes(&self) -> &[String] {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn weight(&self, i: usize, j: usize) -> u64 {
        self.w[i * self.codes.len() + j]
    }

    /// Binary edge list (i < j) of pairs with positive co-occurrence.
    pub fn binary_edges(&self) -> Vec<(usize, usize)> {
        let n = self.codes.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.w[i * n + j] > 0 {
                    edges.push((i, j));
                }
            }
        }
        edges
    }
}

/// Build the co-occurrence matrix of a record set.
///
/// Each patent contributes one count to every unordered pair of distinct
/// normalized classes it carries. Nodes are the classes occurring on at
/// least one patent, in lexicographic (canonical) order. `known`
/// restricts the node universe (lenient mode drops outsiders; strict
/// mode turns them into errors).
pub fn cooccurrence(
    records: &[PatentRecord],
    level: Level,
    mode: ClassMode,
    known: Option<&HashSet<String>>,
) -> Result<CooccurrenceMatrix> {
    let mut per_patent: Vec<Vec<String>> = Vec::with_capacity(records.len());
    let mut occupied: HashSet<String> = HashSet::new();
    for record in records {
        let mut classes: HashSet<String> = HashSet::new();
        for raw in &record.class_symbols {
            match normalize_class(raw) {
                Ok(ipc4) => {
                    let code = ipc4.at_level(level);
                    if known.map_or(true, |k| k.contains(&code)) {
                        classes.insert(code);
                    } else if mode == ClassMode::Strict {
                        return Err(Error::UnknownClass(code));
                    }
                }
                Err(e) => {
                    if mode == ClassMode::Strict {
                        return Err(e);
                    }
                }
            }
        }
        occupied.extend(classes.iter().cloned());
        let mut sorted: Vec<String> = classes.into_iter().collect();
        sorted.sort();
        per_patent.push(sorted);
    }

    let mut codes: Vec<String> = occupied.into_iter().collect();
    codes.sort();
    let index: HashMap<&str, usize> =
        codes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let n = codes.len();
    let mut w = vec![0u64; n * n];
    for classes in &per_patent {
        for a in 0..classes.len() {
            for b in (a + 1)..classes.len() {
                let i = index[classes[a].as_str()];
                let j = index[classes[b].as_str()];
                w[i * n + j] += 1;
                w[j * n + i] += 1;
            }
        }
    }
    Ok(CooccurrenceMatrix { codes, w })
}

/// An undirected weighted graph over class (or set) labels. Edges are
/// stored once with `i < j`; no self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph<R: Real> {
    pub nodes: Vec<String>,
    pub edges: Vec<(usize, usize, R)>,
}

impl<R: Real> SimilarityGraph<R> {
    pub fn new(nodes: Vec<String>, mut edges: Vec<(usize, usize, R)>) -> Self {
        for e in &mut edges {
            if e.0 > e.1 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
        }
        edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        Self { nodes, edges }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(i, j, _) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }
}

/// Cosine-normalize a co-occurrence matrix: the edge weight between two
/// classes is the cosine of their co-occurrence rows. Rows with zero
/// norm get weight zero to every partner; zero-weight edges are not
/// materialized.
pub fn cosine_rows<R: Real>(m: &CooccurrenceMatrix) -> SimilarityGraph<R> {
    let n = m.len();
    let norms: Vec<R> = (0..n)
        .map(|i| {
            let mut s = CompensatedSum::new();
            for k in 0..n {
                let v = R::from_count(m.weight(i, k));
                s.add(v * v);
            }
            s.total().sqrt()
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if norms[i] == R::zero() || norms[j] == R::zero() {
                continue;
            }
            let mut dot = CompensatedSum::new();
            for k in 0..n {
                dot.add(R::from_count(m.weight(i, k)) * R::from_count(m.weight(j, k)));
            }
            let cos = dot.total() / (norms[i] * norms[j]);
            if cos > R::zero() {
                edges.push((i, j, cos));
            }
        }
    }
    SimilarityGraph::new(m.codes().to_vec(), edges)
}

/// Keep edges with weight strictly greater than `t`; the node set is
/// unchanged.
pub fn threshold_graph<R: Real>(g: &SimilarityGraph<R>, t: R) -> SimilarityGraph<R> {
    SimilarityGraph {
        nodes: g.nodes.clone(),
        edges: g.edges.iter().copied().filter(|&(_, _, w)| w > t).collect(),
    }
}

fn components_of(n: usize, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            comp.push(u);
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Induced subgraph on the largest connected node set. Ties are broken
/// by the smallest node label among the members.
pub fn largest_component<R: Real>(g: &SimilarityGraph<R>) -> SimilarityGraph<R> {
    if g.nodes.is_empty() {
        return g.clone();
    }
    let comps = components_of(g.node_count(), &g.adjacency());
    let min_label = |c: &Vec<usize>| c.iter().map(|&i| g.nodes[i].as_str()).min().unwrap();
    let best = comps
        .iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then_with(|| min_label(b).cmp(min_label(a))))
        .expect("non-empty graph has a component");
    let keep: Vec<usize> = best.clone();
    let remap: HashMap<usize, usize> = keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let nodes = keep.iter().map(|&i| g.nodes[i].clone()).collect();
    let edges = g
        .edges
        .iter()
        .filter_map(|&(i, j, w)| Some((*remap.get(&i)?, *remap.get(&j)?, w)))
        .collect();
    SimilarityGraph::new(nodes, edges)
}

/// The sixteen whole-network cohesion measures, in report order.
///
/// Measures that are undefined for the graph at hand (centralization and
/// closure below three nodes, distance statistics below two) are `None`.
/// `out_central` and `in_central` equal `deg_centralization` on these
/// undirected graphs; the directed labels are kept for output fidelity.
#[derive(Debug, Clone, PartialEq)]
pub struct CohesionReport<R: Real> {
    pub node_count: usize,
    pub edge_count: usize,
    pub avg_degree: R,
    pub indeg_h_index: usize,
    pub deg_centralization: Option<R>,
    pub out_central: Option<R>,
    pub in_central: Option<R>,
    pub density: Option<R>,
    pub components: usize,
    pub component_ratio: Option<R>,
    pub connectedness: Option<R>,
    pub fragmentation: Option<R>,
    pub closure: Option<R>,
    pub avg_distance: Option<R>,
    pub sd_distance: Option<R>,
    pub diameter: Option<usize>,
    pub breadth: Option<R>,
    pub compactness: Option<R>,
}

/// Cohesion report of a co-occurrence matrix: binary graph over the
/// occupied classes, edge wherever the count is positive.
pub fn cohesion_report<R: Real>(m: &CooccurrenceMatrix) -> CohesionReport<R> {
    cohesion_from_edges(m.len(), &m.binary_edges())
}

/// Cohesion measures of an arbitrary simple undirected graph given as an
/// edge list over `0..n`.
pub fn cohesion_from_edges<R: Real>(n: usize, edges: &[(usize, usize)]) -> CohesionReport<R> {
    let edges: Vec<(usize, usize)> =
        edges.iter().map(|&(i, j)| if i <= j { (i, j) } else { (j, i) }).collect();
    let e = edges.len();
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in &edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let degrees: Vec<usize> = adj.iter().map(|a| a.len()).collect();

    let avg_degree =
        if n > 0 { R::from_count(2 * e as u64) / R::from_count(n as u64) } else { R::zero() };

    // largest h with at least h nodes of degree >= h
    let mut sorted_deg = degrees.clone();
    sorted_deg.sort_unstable_by(|a, b| b.cmp(a));
    let mut h_index = 0;
    for (rank, &d) in sorted_deg.iter().enumerate() {
        if d >= rank + 1 {
            h_index = rank + 1;
        } else {
            break;
        }
    }

    let centralization = if n >= 3 {
        let d_max = *degrees.iter().max().unwrap_or(&0);
        let spread: u64 = degrees.iter().map(|&d| (d_max - d) as u64).sum();
        Some(R::from_count(spread) / (R::from_count((n - 1) as u64) * R::from_count((n - 2) as u64)))
    } else {
        None
    };

    let density = if n > 1 { Some(avg_degree / R::from_count((n - 1) as u64)) } else { None };

    let comps = components_of(n, &adj);
    let components = comps.len();
    let component_ratio = if n > 1 {
        Some(R::from_count((components - 1) as u64) / R::from_count((n - 1) as u64))
    } else {
        None
    };

    // reachable ordered pairs: within each component every ordered pair
    let reachable: u64 = comps.iter().map(|c| (c.len() * (c.len() - 1)) as u64).sum();
    let (connectedness, fragmentation) = if n > 1 {
        let conn = R::from_count(reachable) / R::from_count((n * (n - 1)) as u64);
        (Some(conn), Some(R::one() - conn))
    } else {
        (None, None)
    };

    // global transitivity: 3 * triangles / connected triples
    let closure = if n >= 3 {
        let adj_sets: Vec<HashSet<usize>> =
            adj.iter().map(|a| a.iter().copied().collect()).collect();
        let mut triangles = 0u64;
        for &(i, j) in &edges {
            for &k in &adj[i] {
                if k > j && adj_sets[j].contains(&k) {
                    triangles += 1;
                }
            }
        }
        let triples: u64 = degrees.iter().map(|&d| (d * d.saturating_sub(1) / 2) as u64).sum();
        if triples > 0 {
            Some(R::from_count(3 * triangles) / R::from_count(triples))
        } else {
            None
        }
    } else {
        None
    };

    // geodesic statistics via BFS from every node
    let mut finite: Vec<u64> = Vec::new();
    let mut inv_sum = CompensatedSum::<R>::new();
    for src in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (t, &d) in dist.iter().enumerate() {
            if t != src && d != usize::MAX {
                finite.push(d as u64);
                inv_sum.add(R::one() / R::from_count(d as u64));
            }
        }
    }

    let (avg_distance, sd_distance, diameter) = if finite.is_empty() {
        (None, None, None)
    } else {
        let count = R::from_count(finite.len() as u64);
        let mut sum = CompensatedSum::<R>::new();
        for &d in &finite {
            sum.add(R::from_count(d));
        }
        let mean = sum.total() / count;
        let mut var = CompensatedSum::<R>::new();
        for &d in &finite {
            let diff = R::from_count(d) - mean;
            var.add(diff * diff);
        }
        // population standard deviation
        let sd = (var.total() / count).sqrt();
        let diam = finite.iter().copied().max().map(|d| d as usize);
        (Some(mean), Some(sd), diam)
    };

    let (compactness, breadth) = if n > 1 {
        let comp = inv_sum.total() / R::from_count((n * (n - 1)) as u64);
        (Some(comp), Some(R::one() - comp))
    } else {
        (None, None)
    };

    CohesionReport {
        node_count: n,
        edge_count: e,
        avg_degree,
        indeg_h_index: h_index,
        deg_centralization: centralization,
        out_central: centralization,
        in_central: centralization,
        density,
        components,
        component_ratio,
        connectedness,
        fragmentation,
        closure,
        avg_distance,
        sd_distance,
        diameter,
        breadth,
        compactness,
    }
}
