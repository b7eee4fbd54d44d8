//! Finite simple graphs: representation, metric, named builders, automorphisms
//! and isomorphism.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{check_cap, Error, Result};

/// Largest cube dimension accepted by the hypercube-based builders.
pub const HYPERCUBE_CAP: usize = 12;
/// Largest vertex count for full automorphism-group enumeration.
pub const AUTOMORPHISM_VERTEX_CAP: usize = 16;
/// Largest automorphism group that will be enumerated element by element.
pub const AUTOMORPHISM_ORDER_CAP: usize = 2_000_000;
/// Largest combined vertex count for an isomorphism test.
pub const ISOMORPHISM_VERTEX_CAP: usize = 8192;
/// Largest vertex count for a Cartesian power.
pub const POWER_VERTEX_CAP: usize = 1 << 16;

/// Marker for "no path" in distance tables.
pub const UNREACHABLE: u32 = u32::MAX;

/// A simple undirected graph on vertices `0..n`.
///
/// Neighbour lists are kept sorted so that every iteration order is
/// deterministic. All-pairs distances are computed on first use and cached.
#[derive(Clone)]
pub struct FiniteGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    dist: OnceLock<Vec<Vec<u32>>>,
}

impl PartialEq for FiniteGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.adj == other.adj
    }
}
impl Eq for FiniteGraph {}

impl fmt::Debug for FiniteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGraph")
            .field("n", &self.n)
            .field("edges", &self.edges())
            .finish()
    }
}

impl FiniteGraph {
    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range endpoints.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!("edge ({u},{v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidInput(format!("duplicate edge ({u},{v})")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }
        Ok(FiniteGraph {
            n,
            adj,
            dist: OnceLock::new(),
        })
    }

    /// Like [`FiniteGraph::new`] but silently merges duplicate edges.
    pub(crate) fn from_edge_set(n: usize, edges: BTreeSet<(usize, usize)>) -> Self {
        FiniteGraph::new(n, edges).expect("edge set is valid by construction")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn bfs_distances(&self, source: usize) -> Vec<u32> {
        let mut d = vec![UNREACHABLE; self.n];
        let mut queue = VecDeque::from([source]);
        d[source] = 0;
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if d[w] == UNREACHABLE {
                    d[w] = d[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        d
    }

    /// All-pairs distance table (cached).
    pub fn distances(&self) -> &Vec<Vec<u32>> {
        self.dist.get_or_init(|| (0..self.n).map(|s| self.bfs_distances(s)).collect())
    }

    pub fn distance(&self, u: usize, v: usize) -> u32 {
        self.distances()[u][v]
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.bfs_distances(0).iter().all(|&d| d != UNREACHABLE)
    }

    /// `None` for disconnected or empty graphs.
    pub fn diameter(&self) -> Option<u32> {
        if self.n == 0 || !self.is_connected() {
            return None;
        }
        self.distances().iter().flatten().copied().max()
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        components_avoiding(self, |_, _| false)
    }

    /// Subgraph induced on `vertices` (renumbered in the given order).
    pub fn induced_subgraph(&self, vertices: &[usize]) -> FiniteGraph {
        let pos: std::collections::HashMap<usize, usize> =
            vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = BTreeSet::new();
        for (i, &v) in vertices.iter().enumerate() {
            for w in &self.adj[v] {
                if let Some(&j) = pos.get(w) {
                    if i < j {
                        edges.insert((i, j));
                    }
                }
            }
        }
        FiniteGraph::from_edge_set(vertices.len(), edges)
    }

    /// Maximal cliques (Bron–Kerbosch with pivoting), each sorted, the list sorted.
    pub fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let all: BTreeSet<usize> = (0..self.n).collect();
        self.bron_kerbosch(Vec::new(), all, BTreeSet::new(), &mut out);
        for c in out.iter_mut() {
            c.sort_unstable();
        }
        out.sort();
        out
    }

    fn bron_kerbosch(
        &self,
        r: Vec<usize>,
        mut p: BTreeSet<usize>,
        mut x: BTreeSet<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            out.push(r);
            return;
        }
        let pivot = p
            .iter()
            .chain(x.iter())
            .copied()
            .max_by_key(|&u| self.adj[u].iter().filter(|w| p.contains(w)).count())
            .expect("p or x non-empty");
        let candidates: Vec<usize> = p.iter().copied().filter(|v| !self.has_edge(pivot, *v)).collect();
        for v in candidates {
            let nbrs: BTreeSet<usize> = self.adj[v].iter().copied().collect();
            let mut r2 = r.clone();
            r2.push(v);
            self.bron_kerbosch(
                r2,
                p.intersection(&nbrs).copied().collect(),
                x.intersection(&nbrs).copied().collect(),
                out,
            );
            p.remove(&v);
            x.insert(v);
        }
    }

    pub fn clique_number(&self) -> usize {
        self.maximal_cliques().iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![u8::MAX; self.n];
        for s in 0..self.n {
            if color[s] != u8::MAX {
                continue;
            }
            color[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if color[w] == u8::MAX {
                        color[w] = 1 - color[u];
                        queue.push_back(w);
                    } else if color[w] == color[u] {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn from_json(json: &GraphJson) -> Result<Self> {
        FiniteGraph::new(json.n, json.edges.iter().map(|e| (e[0], e[1])))
    }
}

/// Components of the graph after deleting the edges for which `removed` is true.
pub(crate) fn components_avoiding(g: &FiniteGraph, removed: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; g.n];
    let mut out = Vec::new();
    for s in 0..g.n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        let mut members = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in &g.adj[u] {
                if comp[w] == usize::MAX && !removed(u, w) {
                    comp[w] = id;
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Graph interchange format: `{"n": <int>, "edges": [[i,j], ...]}`, 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

// ---------------------------------------------------------------------------
// Builders

pub fn empty_graph(n: usize) -> FiniteGraph {
    FiniteGraph::from_edge_set(n, BTreeSet::new())
}

pub fn complete_graph(n: usize) -> FiniteGraph {
    FiniteGraph::from_edge_set(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect())
}

/// Path on `n` vertices.
pub fn path_graph(n: usize) -> FiniteGraph {
    FiniteGraph::from_edge_set(n, (1..n).map(|v| (v - 1, v)).collect())
}

pub fn cycle_graph(n: usize) -> FiniteGraph {
    assert!(n >= 3, "cycles need at least 3 vertices");
    let mut e: BTreeSet<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
    e.insert((0, n - 1));
    FiniteGraph::from_edge_set(n, e)
}

/// `rows x cols` grid; vertex `(i, j)` is `i * cols + j`.
pub fn grid_graph(rows: usize, cols: usize) -> FiniteGraph {
    let mut e = BTreeSet::new();
    for i in 0..rows {
        for j in 0..cols {
            let v = i * cols + j;
            if j + 1 < cols {
                e.insert((v, v + 1));
            }
            if i + 1 < rows {
                e.insert((v, v + cols));
            }
        }
    }
    FiniteGraph::from_edge_set(rows * cols, e)
}

/// The `r`-cube: vertex `x` is the bit string of `x`, edges at Hamming distance 1.
pub fn build_hypercube(r: usize) -> Result<FiniteGraph> {
    build_gamma_rs_unchecked(r, 1)
}

/// The `r`-cube with extra edges between vertices at Hamming distance at most `s`.
pub fn build_gamma_rs(r: usize, s: usize) -> Result<FiniteGraph> {
    if s == 0 || s > r {
        return Err(Error::InvalidInput(format!("need 1 <= s <= r, got r={r}, s={s}")));
    }
    build_gamma_rs_unchecked(r, s)
}

fn build_gamma_rs_unchecked(r: usize, s: usize) -> Result<FiniteGraph> {
    check_cap("cube dimension", r, HYPERCUBE_CAP)?;
    let n = 1usize << r;
    let mut e = BTreeSet::new();
    for u in 0..n {
        for v in u + 1..n {
            let h = (u ^ v).count_ones() as usize;
            if h >= 1 && h <= s {
                e.insert((u, v));
            }
        }
    }
    Ok(FiniteGraph::from_edge_set(n, e))
}

/// Disjoint union of the parts plus every edge between distinct parts.
pub fn build_join(parts: &[FiniteGraph]) -> Result<FiniteGraph> {
    if parts.is_empty() {
        return Err(Error::InvalidInput("join needs at least one part".into()));
    }
    let mut offset = Vec::with_capacity(parts.len());
    let mut n = 0;
    for p in parts {
        offset.push(n);
        n += p.vertex_count();
    }
    let mut e = BTreeSet::new();
    for (k, p) in parts.iter().enumerate() {
        for (u, v) in p.edges() {
            e.insert((u + offset[k], v + offset[k]));
        }
        for (l, q) in parts.iter().enumerate().skip(k + 1) {
            for u in 0..p.vertex_count() {
                for v in 0..q.vertex_count() {
                    e.insert((u + offset[k], v + offset[l]));
                }
            }
        }
    }
    Ok(FiniteGraph::from_edge_set(n, e))
}

/// The join of `n` copies of the two-vertex edgeless graph (the octahedral graphs).
pub fn join_of_empty_pairs(n: usize) -> Result<FiniteGraph> {
    build_join(&vec![empty_graph(2); n])
}

/// Cartesian product; vertex `(a, b)` is `a * |H| + b`.
pub fn cartesian_product(g: &FiniteGraph, h: &FiniteGraph) -> FiniteGraph {
    let m = h.vertex_count();
    let mut e = BTreeSet::new();
    for a in 0..g.vertex_count() {
        for (b1, b2) in h.edges() {
            e.insert((a * m + b1, a * m + b2));
        }
    }
    for (a1, a2) in g.edges() {
        for b in 0..m {
            e.insert((a1 * m + b, a2 * m + b));
        }
    }
    FiniteGraph::from_edge_set(g.vertex_count() * m, e)
}

/// `k`-th Cartesian power. Coordinate 0 is the most significant digit.
pub fn cartesian_power(g: &FiniteGraph, k: usize) -> Result<FiniteGraph> {
    let n = g.vertex_count();
    let total = (0..k).try_fold(1usize, |acc, _| acc.checked_mul(n)).unwrap_or(usize::MAX);
    check_cap("Cartesian power vertices", total, POWER_VERTEX_CAP)?;
    let mut out = empty_graph(1);
    for _ in 0..k {
        out = cartesian_product(&out, g);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Permutations, automorphisms, isomorphism

/// A bijection on `0..len`, stored as the image list.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::InvalidInput(format!("not a permutation: {images:?}")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, v: usize) -> usize {
        self.0[v]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn pow(&self, e: i64) -> Permutation {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Permutation::identity(self.len());
        for _ in 0..e.unsigned_abs() {
            out = base.compose(&out);
        }
        out
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = self.compose(&p);
            k += 1;
        }
        k
    }

    pub fn is_automorphism_of(&self, g: &FiniteGraph) -> bool {
        self.len() == g.vertex_count() && g.edges().iter().all(|&(u, v)| g.has_edge(self.0[u], self.0[v]))
    }
}

/// Vertex invariant used to prune the backtracking: degree plus the histogram of
/// distances to all other vertices.
fn vertex_profiles(g: &FiniteGraph) -> Vec<(usize, Vec<usize>)> {
    let d = g.distances();
    (0..g.vertex_count())
        .map(|v| {
            let mut hist = vec![0usize; g.vertex_count() + 1];
            for &x in &d[v] {
                let idx = if x == UNREACHABLE { g.vertex_count() } else { x as usize };
                hist[idx] += 1;
            }
            (g.degree(v), hist)
        })
        .collect()
}

/// Assignment order for backtracking: BFS from rarest-profile vertices so each new
/// vertex is tied by distance constraints to those already placed.
fn search_order(g: &FiniteGraph, profiles: &[(usize, Vec<usize>)]) -> Vec<usize> {
    let n = g.vertex_count();
    let mut freq = std::collections::HashMap::new();
    for p in profiles {
        *freq.entry(p).or_insert(0usize) += 1;
    }
    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_by_key(|&v| (freq[&profiles[v]], v));
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for s in starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

/// Enumerates distance-preserving bijections `g1 -> g2`, calling `visit` on each;
/// `visit` returns `false` to stop.
fn search_isomorphisms(g1: &FiniteGraph, g2: &FiniteGraph, mut visit: impl FnMut(&[usize]) -> bool) {
    let n = g1.vertex_count();
    if n != g2.vertex_count() || g1.edge_count() != g2.edge_count() {
        return;
    }
    let p1 = vertex_profiles(g1);
    let p2 = vertex_profiles(g2);
    let mut s1 = p1.clone();
    let mut s2 = p2.clone();
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return;
    }
    let order = search_order(g1, &p1);
    let d1 = g1.distances();
    let d2 = g2.distances();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn rec(
        depth: usize,
        order: &[usize],
        p1: &[(usize, Vec<usize>)],
        p2: &[(usize, Vec<usize>)],
        d1: &[Vec<u32>],
        d2: &[Vec<u32>],
        map: &mut [usize],
        used: &mut [bool],
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if depth == order.len() {
            return visit(map);
        }
        let v = order[depth];
        for w in 0..map.len() {
            if used[w] || p1[v] != p2[w] {
                continue;
            }
            let ok = order[..depth].iter().all(|&u| d1[v][u] == d2[w][map[u]]);
            if !ok {
                continue;
            }
            map[v] = w;
            used[w] = true;
            let keep_going = rec(depth + 1, order, p1, p2, d1, d2, map, used, visit);
            used[w] = false;
            map[v] = usize::MAX;
            if !keep_going {
                return false;
            }
        }
        true
    }

    rec(0, &order, &p1, &p2, d1, d2, &mut map, &mut used, &mut visit);
}

/// An adjacency-preserving bijection from `g1` onto `g2`, if one exists.
/// Deterministic for fixed inputs.
pub fn graph_isomorphic(g1: &FiniteGraph, g2: &FiniteGraph) -> Result<Option<Vec<usize>>> {
    check_cap(
        "isomorphism vertices",
        g1.vertex_count() + g2.vertex_count(),
        ISOMORPHISM_VERTEX_CAP,
    )?;
    let mut found = None;
    search_isomorphisms(g1, g2, |m| {
        found = Some(m.to_vec());
        false
    });
    Ok(found)
}

/// The full automorphism group, enumerated and sorted.
pub fn automorphism_group(g: &FiniteGraph) -> Result<Vec<Permutation>> {
    check_cap("automorphism vertices", g.vertex_count(), AUTOMORPHISM_VERTEX_CAP)?;
    let mut out = Vec::new();
    let mut overflow = false;
    search_isomorphisms(g, g, |m| {
        if out.len() >= AUTOMORPHISM_ORDER_CAP {
            overflow = true;
            return false;
        }
        out.push(Permutation(m.to_vec()));
        true
    });
    if overflow {
        return Err(Error::CapExceeded {
            what: "automorphism group order",
            limit: AUTOMORPHISM_ORDER_CAP,
            needed: AUTOMORPHISM_ORDER_CAP + 1,
        });
    }
    out.sort();
    Ok(out)
}

/// Outcome of the distance-2 pair transitivity test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairTransitivity {
    pub transitive: bool,
    /// Number of unordered pairs at distance exactly two.
    pub pair_count: usize,
    /// Two distance-2 pairs lying in different orbits, when not transitive.
    pub counterexample: Option<((usize, usize), (usize, usize))>,
}

/// Whether the group generated by `generators` is transitive on unordered
/// vertex pairs at distance exactly 2. Vacuously true when there are none.
pub fn check_distance2_transitivity(g: &FiniteGraph, generators: &[Permutation]) -> Result<PairTransitivity> {
    for p in generators {
        if !p.is_automorphism_of(g) {
            return Err(Error::ContractViolation("generator is not an automorphism".into()));
        }
    }
    let n = g.vertex_count();
    let d = g.distances();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| d[u][v] == 2)
        .collect();
    let Some(&first) = pairs.first() else {
        return Ok(PairTransitivity {
            transitive: true,
            pair_count: 0,
            counterexample: None,
        });
    };
    let mut orbit = BTreeSet::from([first]);
    let mut queue = VecDeque::from([first]);
    while let Some((a, b)) = queue.pop_front() {
        for p in generators {
            let (x, y) = (p.apply(a), p.apply(b));
            let img = (x.min(y), x.max(y));
            if orbit.insert(img) {
                queue.push_back(img);
            }
        }
    }
    let missing = pairs.iter().find(|p| !orbit.contains(p)).copied();
    Ok(PairTransitivity {
        transitive: missing.is_none(),
        pair_count: pairs.len(),
        counterexample: missing.map(|m| (first, m)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypercube_examples() {
        let q0 = build_hypercube(0).unwrap();
        assert_eq!((q0.vertex_count(), q0.edge_count()), (1, 0));
        let q2 = build_hypercube(2).unwrap();
        assert!(graph_isomorphic(&q2, &cycle_graph(4)).unwrap().is_some());
        let q3 = build_hypercube(3).unwrap();
        assert_eq!((q3.vertex_count(), q3.edge_count()), (8, 12));
        assert!(matches!(build_hypercube(13), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn join_examples() {
        let c4 = join_of_empty_pairs(2).unwrap();
        assert!(graph_isomorphic(&c4, &cycle_graph(4)).unwrap().is_some());
        let oct = join_of_empty_pairs(3).unwrap();
        assert_eq!((oct.vertex_count(), oct.edge_count()), (6, 12));
        let p = path_graph(4);
        assert_eq!(build_join(std::slice::from_ref(&p)).unwrap(), p);
        assert!(build_join(&[]).is_err());
    }

    #[test]
    fn gamma_rs_examples() {
        assert_eq!(build_gamma_rs(2, 1).unwrap(), build_hypercube(2).unwrap());
        assert_eq!(build_gamma_rs(2, 2).unwrap(), complete_graph(4));
        let g = build_gamma_rs(3, 2).unwrap();
        assert_eq!(g.edge_count(), 28 - 4);
        for u in 0..8 {
            assert!(!g.has_edge(u, 7 - u));
        }
        assert!(build_gamma_rs(2, 3).is_err());
        assert!(build_gamma_rs(2, 0).is_err());
    }

    #[test]
    fn gamma_rs_complete_and_diameter() {
        for r in 1..=4 {
            assert_eq!(build_gamma_rs(r, r).unwrap(), complete_graph(1 << r));
        }
        for r in 1..=5usize {
            for s in 1..=r {
                let g = build_gamma_rs(r, s).unwrap();
                assert_eq!(g.diameter(), Some(r.div_ceil(s) as u32), "r={r} s={s}");
            }
        }
    }

    #[test]
    fn automorphism_examples() {
        assert_eq!(automorphism_group(&cycle_graph(4)).unwrap().len(), 8);
        assert_eq!(automorphism_group(&empty_graph(2)).unwrap().len(), 2);
        assert_eq!(automorphism_group(&path_graph(3)).unwrap().len(), 2);
        assert_eq!(automorphism_group(&join_of_empty_pairs(3).unwrap()).unwrap().len(), 48);
        assert!(automorphism_group(&empty_graph(17)).is_err());
    }

    #[test]
    fn automorphism_group_is_closed() {
        for g in [cycle_graph(5), build_hypercube(3).unwrap(), grid_graph(2, 3)] {
            let group = automorphism_group(&g).unwrap();
            let set: BTreeSet<_> = group.iter().cloned().collect();
            assert!(set.contains(&Permutation::identity(g.vertex_count())));
            for a in &group {
                assert!(set.contains(&a.inverse()));
                for b in &group {
                    assert!(set.contains(&a.compose(b)));
                }
            }
        }
    }

    /// Orbit of a distance-2 pair by applying every group element directly.
    fn brute_pair_orbits(g: &FiniteGraph, group: &[Permutation]) -> usize {
        let n = g.vertex_count();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| g.distance(u, v) == 2)
            .collect();
        let mut orbits: Vec<BTreeSet<(usize, usize)>> = Vec::new();
        for &(a, b) in &pairs {
            if orbits.iter().any(|o| o.contains(&(a, b))) {
                continue;
            }
            orbits.push(
                group
                    .iter()
                    .map(|p| {
                        let (x, y) = (p.apply(a), p.apply(b));
                        (x.min(y), x.max(y))
                    })
                    .collect(),
            );
        }
        orbits.len()
    }

    #[test]
    fn distance2_transitivity_examples() {
        let c4 = cycle_graph(4);
        let full = automorphism_group(&c4).unwrap();
        assert_eq!(brute_pair_orbits(&c4, &full), 1);
        assert!(check_distance2_transitivity(&c4, &full).unwrap().transitive);

        let id = vec![Permutation::identity(4)];
        assert_eq!(brute_pair_orbits(&c4, &id), 2);
        let r = check_distance2_transitivity(&c4, &id).unwrap();
        assert!(!r.transitive);
        assert_eq!(r.counterexample, Some(((0, 2), (1, 3))));

        let oct = join_of_empty_pairs(3).unwrap();
        let aut = automorphism_group(&oct).unwrap();
        assert_eq!(brute_pair_orbits(&oct, &aut), 1);
        assert!(check_distance2_transitivity(&oct, &aut).unwrap().transitive);
    }

    #[test]
    fn isomorphism_examples() {
        assert!(graph_isomorphic(&path_graph(3), &complete_graph(3)).unwrap().is_none());
        let g = grid_graph(3, 3);
        let m = graph_isomorphic(&g, &g).unwrap().unwrap();
        assert!(Permutation::new(m).unwrap().is_automorphism_of(&g));
    }

    #[test]
    fn maximal_cliques_and_components() {
        let g = FiniteGraph::new(5, [(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        assert_eq!(g.maximal_cliques(), vec![vec![0, 1, 2], vec![3, 4]]);
        assert_eq!(g.components(), vec![vec![0, 1, 2], vec![3, 4]]);
        assert_eq!(g.clique_number(), 3);
        assert_eq!(g.diameter(), None);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = grid_graph(2, 2);
        let text = serde_json::to_string(&g.to_json()).unwrap();
        assert_eq!(text, r#"{"n":4,"edges":[[0,1],[0,2],[1,3],[2,3]]}"#);
        let back = FiniteGraph::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, g);
        assert!(FiniteGraph::new(2, [(0, 0)]).is_err());
        assert!(FiniteGraph::new(2, [(0, 1), (1, 0)]).is_err());
        assert!(FiniteGraph::new(2, [(0, 2)]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_graph() -> impl Strategy<Value = FiniteGraph> {
            (1usize..8).prop_flat_map(|n| {
                proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
                    let mut e = BTreeSet::new();
                    let mut k = 0;
                    for u in 0..n {
                        for v in u + 1..n {
                            if bits[k] {
                                e.insert((u, v));
                            }
                            k += 1;
                        }
                    }
                    FiniteGraph::from_edge_set(n, e)
                })
            })
        }

        proptest! {
            #[test]
            fn isomorphism_reflexive_and_symmetric(g in small_graph(), seed in any::<u64>()) {
                prop_assert!(graph_isomorphic(&g, &g).unwrap().is_some());
                // relabel by a pseudo-random permutation
                let n = g.vertex_count();
                let mut images: Vec<usize> = (0..n).collect();
                let mut s = seed;
                for i in (1..n).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    images.swap(i, (s >> 33) as usize % (i + 1));
                }
                let h = FiniteGraph::new(n, g.edges().into_iter().map(|(u, v)| (images[u], images[v]))).unwrap();
                let f = graph_isomorphic(&g, &h).unwrap();
                let b = graph_isomorphic(&h, &g).unwrap();
                prop_assert!(f.is_some() && b.is_some());
                let f = f.unwrap();
                for (u, v) in g.edges() {
                    prop_assert!(h.has_edge(f[u], f[v]));
                }
            }

            #[test]
            fn isomorphism_agrees_in_both_directions(g in small_graph(), h in small_graph()) {
                let a = graph_isomorphic(&g, &h).unwrap().is_some();
                let b = graph_isomorphic(&h, &g).unwrap().is_some();
                prop_assert_eq!(a, b);
            }
        }
    }
}
