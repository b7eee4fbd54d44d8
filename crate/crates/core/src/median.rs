//! Median graphs: certification, hyperplanes and halfspaces, convexity, gates,
//! Helly points, cubes, cubical subdivision, orientations and fixed sets.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{check_cap, Error, Result};
use crate::graphs::{components_avoiding, FiniteGraph, Permutation, UNREACHABLE};

pub const MEDIAN_VERTEX_CAP: usize = 4096;
pub const ORIENTATION_HYPERPLANE_CAP: usize = 20;
pub const SUBDIVISION_CUBE_CAP: usize = 20_000;

/// One side of a hyperplane. `Minus` is the side containing vertex 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hyperplane {
    /// Edges `(u, v)` with `u < v`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub minus: Vec<usize>,
    pub plus: Vec<usize>,
}

impl Hyperplane {
    pub fn halfspace(&self, side: Side) -> &[usize] {
        match side {
            Side::Minus => &self.minus,
            Side::Plus => &self.plus,
        }
    }
}

/// Why a graph is not median.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MedianFailure {
    /// `unreachable` has no path to vertex 0.
    Disconnected { unreachable: usize },
    /// A triple whose three pairwise intervals meet in zero or several vertices.
    Triple { triple: [usize; 3], medians: Vec<usize> },
}

#[derive(Clone, Debug)]
pub enum Certification {
    Median(Box<MedianGraph>),
    NotMedian(MedianFailure),
}

impl Certification {
    pub fn is_median(&self) -> bool {
        matches!(self, Certification::Median(_))
    }

    pub fn median(self) -> Option<MedianGraph> {
        match self {
            Certification::Median(m) => Some(*m),
            Certification::NotMedian(_) => None,
        }
    }

    pub fn failure(&self) -> Option<&MedianFailure> {
        match self {
            Certification::Median(_) => None,
            Certification::NotMedian(f) => Some(f),
        }
    }
}

/// A graph certified median, with its hyperplane decomposition.
#[derive(Clone, Debug)]
pub struct MedianGraph {
    graph: FiniteGraph,
    hyperplanes: Vec<Hyperplane>,
    /// `sides[v]` has bit `h` set iff `v` is on the plus side of hyperplane `h`.
    sides: Vec<FixedBitSet>,
    /// `(hyperplane, neighbour)` pairs per vertex, sorted by hyperplane.
    crossings: Vec<Vec<(usize, usize)>>,
}

fn interval_row(d: &[Vec<u32>], u: usize) -> Vec<FixedBitSet> {
    let n = d.len();
    (0..n)
        .map(|v| {
            let mut b = FixedBitSet::with_capacity(n);
            for x in 0..n {
                if d[u][x] + d[x][v] == d[u][v] {
                    b.insert(x);
                }
            }
            b
        })
        .collect()
}

/// Decides whether `g` is median by checking every vertex triple.
pub fn certify_median(g: &FiniteGraph) -> Result<Certification> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::InvalidInput("the empty graph is not a median graph".into()));
    }
    check_cap("median certification vertices", n, MEDIAN_VERTEX_CAP)?;
    let d0 = g.bfs_distances(0);
    if let Some(v) = d0.iter().position(|&x| x == UNREACHABLE) {
        return Ok(Certification::NotMedian(MedianFailure::Disconnected { unreachable: v }));
    }
    let d = g.distances();
    for u in 0..n {
        let row = interval_row(d, u);
        for v in u + 1..n {
            for w in v + 1..n {
                let mut common = row[v].clone();
                common.intersect_with(&row[w]);
                let medians: Vec<usize> = common
                    .ones()
                    .filter(|&x| d[v][x] + d[x][w] == d[v][w])
                    .collect();
                if medians.len() != 1 {
                    return Ok(Certification::NotMedian(MedianFailure::Triple {
                        triple: [u, v, w],
                        medians,
                    }));
                }
            }
        }
    }
    Ok(Certification::Median(Box::new(MedianGraph::from_certified(g.clone())?)))
}

/// Certifies, turning a negative answer into an error. For internal
/// constructions that are median by theory.
pub(crate) fn expect_median(g: &FiniteGraph, what: &str) -> Result<MedianGraph> {
    match certify_median(g)? {
        Certification::Median(m) => Ok(*m),
        Certification::NotMedian(f) => Err(Error::CrossCheck(format!("{what} is not median: {f:?}"))),
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub(crate) fn edge_key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Edge classes under the closure of "opposite in a 4-cycle" and, when
/// `with_triangles`, "in a common 3-cycle". Classes come sorted by minimal edge.
pub(crate) fn edge_classes(g: &FiniteGraph, with_triangles: bool) -> Vec<Vec<(usize, usize)>> {
    let edges = g.edges();
    let index: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut uf = UnionFind::new(edges.len());
    let n = g.vertex_count();
    for u in 0..n {
        let nu = g.neighbors(u);
        // squares u-a-w-b with u < w, a < b
        let mut via: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &a in nu {
            for &w in g.neighbors(a) {
                if w > u && !g.has_edge(u, w) {
                    via.entry(w).or_default().push(a);
                }
            }
        }
        for (w, mids) in via {
            for i in 0..mids.len() {
                for j in i + 1..mids.len() {
                    let (a, b) = (mids[i], mids[j]);
                    if g.has_edge(a, b) {
                        continue;
                    }
                    uf.union(index[&edge_key(u, a)], index[&edge_key(b, w)]);
                    uf.union(index[&edge_key(u, b)], index[&edge_key(a, w)]);
                }
            }
        }
        if with_triangles {
            for (i, &a) in nu.iter().enumerate() {
                for &b in &nu[i + 1..] {
                    if g.has_edge(a, b) {
                        uf.union(index[&edge_key(u, a)], index[&edge_key(u, b)]);
                        uf.union(index[&edge_key(u, a)], index[&edge_key(a, b)]);
                    }
                }
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (i, &e) in edges.iter().enumerate() {
        classes.entry(uf.find(i)).or_default().push(e);
    }
    let mut out: Vec<Vec<(usize, usize)>> = classes.into_values().collect();
    out.sort();
    out
}

impl MedianGraph {
    fn from_certified(graph: FiniteGraph) -> Result<Self> {
        let n = graph.vertex_count();
        let mut hyperplanes = Vec::new();
        for class in edge_classes(&graph, false) {
            let set: BTreeSet<(usize, usize)> = class.iter().copied().collect();
            let comps = components_avoiding(&graph, |u, v| set.contains(&edge_key(u, v)));
            if comps.len() != 2 {
                return Err(Error::CrossCheck(format!(
                    "hyperplane through {:?} splits the graph into {} parts",
                    class[0],
                    comps.len()
                )));
            }
            let (mut minus, mut plus) = (comps[0].clone(), comps[1].clone());
            if !minus.contains(&0) {
                std::mem::swap(&mut minus, &mut plus);
            }
            hyperplanes.push(Hyperplane {
                edges: class,
                minus,
                plus,
            });
        }
        let h = hyperplanes.len();
        let mut sides = vec![FixedBitSet::with_capacity(h); n];
        for (i, hp) in hyperplanes.iter().enumerate() {
            for &v in &hp.plus {
                sides[v].insert(i);
            }
        }
        let mut crossings = vec![Vec::new(); n];
        for (i, hp) in hyperplanes.iter().enumerate() {
            for &(u, v) in &hp.edges {
                crossings[u].push((i, v));
                crossings[v].push((i, u));
            }
        }
        for c in crossings.iter_mut() {
            c.sort_unstable();
            if c.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::CrossCheck("two edges of one hyperplane share a vertex".into()));
            }
        }
        let mg = MedianGraph {
            graph,
            hyperplanes,
            sides,
            crossings,
        };
        let d = mg.graph.distances();
        for u in 0..n {
            for v in u + 1..n {
                if d[u][v] as usize != mg.separation(u, v) {
                    return Err(Error::CrossCheck(format!(
                        "distance between {u} and {v} differs from the separating hyperplane count"
                    )));
                }
            }
        }
        Ok(mg)
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Hyperplanes ordered by their minimal edge.
    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    pub fn side_of(&self, v: usize, h: usize) -> Side {
        if self.sides[v].contains(h) {
            Side::Plus
        } else {
            Side::Minus
        }
    }

    /// Number of hyperplanes separating `u` from `v`.
    pub fn separation(&self, u: usize, v: usize) -> usize {
        self.sides[u].symmetric_difference(&self.sides[v]).count()
    }

    /// Hyperplanes separating `u` from `v`, ascending.
    pub fn separating(&self, u: usize, v: usize) -> Vec<usize> {
        self.sides[u].symmetric_difference(&self.sides[v]).collect()
    }

    /// The neighbour of `v` across hyperplane `h`, if `h` is incident to `v`.
    pub fn across(&self, v: usize, h: usize) -> Option<usize> {
        self.crossings[v]
            .binary_search_by_key(&h, |&(k, _)| k)
            .ok()
            .map(|i| self.crossings[v][i].1)
    }

    pub fn incident_hyperplanes(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.crossings[v].iter().map(|&(h, _)| h)
    }

    pub fn hyperplane_of_edge(&self, u: usize, v: usize) -> Option<usize> {
        if !self.graph.has_edge(u, v) {
            return None;
        }
        self.separating(u, v).first().copied()
    }

    /// The unique median of three vertices.
    pub fn median(&self, u: usize, v: usize, w: usize) -> usize {
        // majority vote on each hyperplane picks out the median's side pattern
        (0..self.vertex_count())
            .find(|&x| {
                (0..self.hyperplanes.len()).all(|h| {
                    let votes = [u, v, w].iter().filter(|&&y| self.sides[y].contains(h)).count();
                    self.sides[x].contains(h) == (votes >= 2)
                })
            })
            .expect("median graphs have medians")
    }

    /// Hyperplane report: per hyperplane its edge list and the two halfspaces.
    pub fn hyperplane_report(&self) -> serde_json::Value {
        serde_json::to_value(&self.hyperplanes).expect("serializable")
    }

    fn mask(&self, set: &[usize]) -> Result<FixedBitSet> {
        let mut b = FixedBitSet::with_capacity(self.vertex_count());
        for &v in set {
            if v >= self.vertex_count() {
                return Err(Error::InvalidInput(format!("vertex {v} out of range")));
            }
            b.insert(v);
        }
        Ok(b)
    }
}

/// Result of [`convex_hull`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvexHull {
    pub hull: Vec<usize>,
    pub seed_is_convex: bool,
}

fn hull_mask(mg: &MedianGraph, seed: &FixedBitSet) -> FixedBitSet {
    let n = mg.vertex_count();
    let first = seed.ones().next().expect("non-empty seed");
    let mut fixed = Vec::new();
    for h in 0..mg.hyperplanes.len() {
        let s = mg.sides[first].contains(h);
        if seed.ones().all(|v| mg.sides[v].contains(h) == s) {
            fixed.push((h, s));
        }
    }
    let mut out = FixedBitSet::with_capacity(n);
    for v in 0..n {
        if fixed.iter().all(|&(h, s)| mg.sides[v].contains(h) == s) {
            out.insert(v);
        }
    }
    out
}

/// Connected and locally convex: every path `a-b-c` inside the set that spans a
/// square has the square's fourth vertex inside too.
pub fn is_connected_locally_convex(g: &FiniteGraph, set: &[usize]) -> bool {
    if set.is_empty() {
        return false;
    }
    let inside: BTreeSet<usize> = set.iter().copied().collect();
    let members: Vec<usize> = inside.iter().copied().collect();
    let sub = g.induced_subgraph(&members);
    if !sub.is_connected() {
        return false;
    }
    for &b in &members {
        let nb: Vec<usize> = g.neighbors(b).iter().copied().filter(|x| inside.contains(x)).collect();
        for (i, &a) in nb.iter().enumerate() {
            for &c in &nb[i + 1..] {
                if g.has_edge(a, c) {
                    continue;
                }
                for &dd in g.neighbors(a) {
                    if dd != b && g.has_edge(dd, c) && !inside.contains(&dd) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// The smallest convex set containing `seed`, computed as the intersection of all
/// halfspaces containing it, cross-checked against the local criterion.
pub fn convex_hull(mg: &MedianGraph, seed: &[usize]) -> Result<ConvexHull> {
    if seed.is_empty() {
        return Err(Error::InvalidInput("convex hull of an empty seed".into()));
    }
    let seed_mask = mg.mask(seed)?;
    let hull = hull_mask(mg, &seed_mask);
    let hull_list: Vec<usize> = hull.ones().collect();
    let seed_is_convex = hull == seed_mask;
    let seed_list: Vec<usize> = seed_mask.ones().collect();
    if is_connected_locally_convex(&mg.graph, &seed_list) != seed_is_convex {
        return Err(Error::CrossCheck(format!(
            "convexity of {seed_list:?}: halfspace test says {seed_is_convex}, local test disagrees"
        )));
    }
    if !is_connected_locally_convex(&mg.graph, &hull_list) {
        return Err(Error::CrossCheck(format!("hull {hull_list:?} fails the local convexity test")));
    }
    Ok(ConvexHull {
        hull: hull_list,
        seed_is_convex,
    })
}

pub fn is_convex(mg: &MedianGraph, set: &[usize]) -> Result<bool> {
    if set.is_empty() {
        return Ok(false);
    }
    Ok(convex_hull(mg, set)?.seed_is_convex)
}

fn require_convex(mg: &MedianGraph, set: &[usize]) -> Result<()> {
    if !is_convex(mg, set)? {
        return Err(Error::ContractViolation(format!("set {set:?} is not convex")));
    }
    Ok(())
}

/// The gate of `x` in the convex set: the vertex through which `x` reaches every
/// member along a geodesic.
pub fn gate_projection(mg: &MedianGraph, convex_set: &[usize], x: usize) -> Result<usize> {
    require_convex(mg, convex_set)?;
    gate_unchecked(mg.graph(), convex_set, x)
}

/// Gate computation without the convexity precondition; fails if no gate exists.
pub(crate) fn gate_unchecked(g: &FiniteGraph, set: &[usize], x: usize) -> Result<usize> {
    let d = g.distances();
    let y = *set.iter().min_by_key(|&&y| (d[x][y], y)).expect("non-empty set");
    if set.iter().all(|&z| d[x][z] == d[x][y] + d[y][z]) {
        Ok(y)
    } else {
        Err(Error::CrossCheck(format!("no gate for vertex {x} in {set:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HellyOutcome {
    /// A vertex in every member (the smallest such).
    Common { vertex: usize },
    /// Indices of the first disjoint pair of members.
    Disjoint { first: usize, second: usize },
}

/// Helly test for a family of convex sets.
pub fn helly_intersection(mg: &MedianGraph, family: &[Vec<usize>]) -> Result<HellyOutcome> {
    if family.is_empty() {
        return Err(Error::InvalidInput("empty family".into()));
    }
    let mut masks = Vec::with_capacity(family.len());
    for s in family {
        require_convex(mg, s)?;
        masks.push(mg.mask(s)?);
    }
    for i in 0..masks.len() {
        for j in i + 1..masks.len() {
            if masks[i].is_disjoint(&masks[j]) {
                return Ok(HellyOutcome::Disjoint { first: i, second: j });
            }
        }
    }
    let mut all = masks[0].clone();
    for m in &masks[1..] {
        all.intersect_with(m);
    }
    match all.ones().next() {
        Some(vertex) => Ok(HellyOutcome::Common { vertex }),
        None => Err(Error::CrossCheck("pairwise-intersecting convex sets with empty intersection".into())),
    }
}

/// A cube subgraph spanned at `base` by pairwise-transverse hyperplanes.
/// `corners[mask]` is the vertex reached by crossing the hyperplanes selected by `mask`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cube {
    pub base: usize,
    pub hyperplanes: Vec<usize>,
    pub corners: Vec<usize>,
}

impl Cube {
    pub fn dimension(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn vertex_set(&self) -> Vec<usize> {
        let mut v = self.corners.clone();
        v.sort_unstable();
        v
    }
}

/// Tries to extend `cube` by hyperplane `h`, checking every new edge explicitly.
fn extend_cube(mg: &MedianGraph, cube: &Cube, h: usize) -> Option<Cube> {
    let k = cube.hyperplanes.len();
    let mut corners = cube.corners.clone();
    for mask in 0..(1usize << k) {
        corners.push(mg.across(cube.corners[mask], h)?);
    }
    for mask in 0..(1usize << k) {
        for (t, &ht) in cube.hyperplanes.iter().enumerate() {
            if mask & (1 << t) == 0 {
                let a = corners[(1 << k) | mask];
                let b = corners[(1 << k) | mask | (1 << t)];
                if mg.across(a, ht) != Some(b) {
                    return None;
                }
            }
        }
    }
    let mut hyperplanes = cube.hyperplanes.clone();
    hyperplanes.push(h);
    Some(Cube {
        base: cube.base,
        hyperplanes,
        corners,
    })
}

/// Every cube based at `v` whose hyperplanes are listed in increasing order.
fn cubes_at(mg: &MedianGraph, v: usize, visit: &mut dyn FnMut(&Cube)) {
    fn rec(mg: &MedianGraph, cube: &Cube, incident: &[usize], visit: &mut dyn FnMut(&Cube)) {
        visit(cube);
        let last = cube.hyperplanes.last().copied();
        for &h in incident {
            if last.is_some_and(|l| h <= l) {
                continue;
            }
            if let Some(bigger) = extend_cube(mg, cube, h) {
                rec(mg, &bigger, incident, visit);
            }
        }
    }
    let incident: Vec<usize> = mg.incident_hyperplanes(v).collect();
    let start = Cube {
        base: v,
        hyperplanes: Vec::new(),
        corners: vec![v],
    };
    rec(mg, &start, &incident, visit);
}

/// A largest cube subgraph, exhibited explicitly.
pub fn largest_cube(mg: &MedianGraph) -> Cube {
    let mut best = Cube {
        base: 0,
        hyperplanes: Vec::new(),
        corners: vec![0],
    };
    for v in 0..mg.vertex_count() {
        cubes_at(mg, v, &mut |c| {
            if c.dimension() > best.dimension() {
                best = c.clone();
            }
        });
    }
    best
}

pub fn cubical_dimension(mg: &MedianGraph) -> usize {
    largest_cube(mg).dimension()
}

/// All cubes (including vertices and edges), each once, sorted by dimension then
/// vertex list; vertex `i` of the graph is cube `i`.
pub fn all_cubes(mg: &MedianGraph) -> Result<Vec<Cube>> {
    let mut seen: BTreeMap<(usize, Vec<usize>), Cube> = BTreeMap::new();
    let mut over = false;
    for v in 0..mg.vertex_count() {
        cubes_at(mg, v, &mut |c| {
            if over {
                return;
            }
            let key = (c.dimension(), c.vertex_set());
            seen.entry(key).or_insert_with(|| c.clone());
            if seen.len() > SUBDIVISION_CUBE_CAP {
                over = true;
            }
        });
    }
    if over {
        return Err(Error::CapExceeded {
            what: "cube count",
            limit: SUBDIVISION_CUBE_CAP,
            needed: SUBDIVISION_CUBE_CAP + 1,
        });
    }
    Ok(seen.into_values().collect())
}

/// Cubical subdivision: one vertex per cube, edges for codimension-one faces.
/// Original vertex `i` keeps index `i`.
pub fn cubical_subdivision(mg: &MedianGraph) -> Result<MedianGraph> {
    let cubes = all_cubes(mg)?;
    let index: HashMap<Vec<usize>, usize> = cubes.iter().enumerate().map(|(i, c)| (c.vertex_set(), i)).collect();
    let mut edges = BTreeSet::new();
    for (i, c) in cubes.iter().enumerate() {
        let k = c.dimension();
        for t in 0..k {
            for bit in [0, 1usize << t] {
                let mut face: Vec<usize> = (0..(1usize << k))
                    .filter(|m| m & (1 << t) == bit)
                    .map(|m| c.corners[m])
                    .collect();
                face.sort_unstable();
                let j = *index
                    .get(&face)
                    .ok_or_else(|| Error::CrossCheck("face of a cube is missing".into()))?;
                edges.insert(edge_key(i, j));
            }
        }
    }
    let g = FiniteGraph::from_edge_set(cubes.len(), edges);
    expect_median(&g, "cubical subdivision")
}

/// A choice of halfspace per hyperplane, pairwise intersecting.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Orientation {
    pub choice: Vec<Side>,
    /// The vertex inducing this orientation, when principal.
    pub principal: Option<usize>,
}

/// All consistent orientations, in lexicographic order of their choices.
pub fn consistent_orientations(mg: &MedianGraph) -> Result<Vec<Orientation>> {
    let h = mg.hyperplanes.len();
    check_cap("orientation hyperplanes", h, ORIENTATION_HYPERPLANE_CAP)?;
    let n = mg.vertex_count();
    let half = |i: usize, s: Side| -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        for &v in mg.hyperplanes[i].halfspace(s) {
            b.insert(v);
        }
        b
    };
    let halves: Vec<[FixedBitSet; 2]> = (0..h).map(|i| [half(i, Side::Minus), half(i, Side::Plus)]).collect();
    let meets = |i: usize, si: Side, j: usize, sj: Side| -> bool {
        !halves[i][si as usize].is_disjoint(&halves[j][sj as usize])
    };
    let pattern: HashMap<Vec<Side>, usize> = (0..n)
        .map(|v| ((0..h).map(|i| mg.side_of(v, i)).collect(), v))
        .collect();
    let mut out = Vec::new();
    let mut choice = Vec::with_capacity(h);
    fn rec(
        i: usize,
        h: usize,
        choice: &mut Vec<Side>,
        meets: &dyn Fn(usize, Side, usize, Side) -> bool,
        out: &mut Vec<Vec<Side>>,
    ) {
        if i == h {
            out.push(choice.clone());
            return;
        }
        for s in [Side::Minus, Side::Plus] {
            if (0..i).all(|j| meets(j, choice[j], i, s)) {
                choice.push(s);
                rec(i + 1, h, choice, meets, out);
                choice.pop();
            }
        }
    }
    let mut raw = Vec::new();
    rec(0, h, &mut choice, &meets, &mut raw);
    for c in raw {
        let principal = pattern.get(&c).copied();
        out.push(Orientation { choice: c, principal });
    }
    Ok(out)
}

/// A word in the generators of an action: `(label, exponent)` pairs, read as a
/// product left to right (the rightmost factor acts first).
pub type ActionWord = Vec<(String, i64)>;

/// A group acting on a graph by automorphisms, given on labelled generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphAction {
    generators: BTreeMap<String, Permutation>,
}

impl GraphAction {
    pub fn new(g: &FiniteGraph, generators: BTreeMap<String, Permutation>) -> Result<Self> {
        for (label, p) in &generators {
            if !p.is_automorphism_of(g) {
                return Err(Error::ContractViolation(format!("generator {label} is not an automorphism")));
            }
        }
        Ok(GraphAction { generators })
    }

    pub fn generators(&self) -> &BTreeMap<String, Permutation> {
        &self.generators
    }

    pub fn generator(&self, label: &str) -> Option<&Permutation> {
        self.generators.get(label)
    }

    pub fn degree(&self) -> Option<usize> {
        self.generators.values().next().map(Permutation::len)
    }

    pub fn evaluate(&self, word: &[(String, i64)], n: usize) -> Result<Permutation> {
        let mut out = Permutation::identity(n);
        for (label, e) in word {
            let p = self
                .generators
                .get(label)
                .ok_or_else(|| Error::InvalidInput(format!("unknown generator {label}")))?;
            out = out.compose(&p.pow(*e));
        }
        Ok(out)
    }

    /// Orbits of the generated group on vertices, sorted.
    pub fn orbits(&self, n: usize) -> Vec<Vec<usize>> {
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut orbit = vec![s];
            let mut i = 0;
            while i < orbit.len() {
                let x = orbit[i];
                for p in self.generators.values() {
                    let y = p.apply(x);
                    if !seen[y] {
                        seen[y] = true;
                        orbit.push(y);
                    }
                }
                i += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }
}

/// Vertices fixed by every listed group element.
pub fn fixed_set(mg: &MedianGraph, action: &GraphAction, words: &[ActionWord]) -> Result<Vec<usize>> {
    let n = mg.vertex_count();
    let perms: Vec<Permutation> = words.iter().map(|w| action.evaluate(w, n)).collect::<Result<_>>()?;
    Ok((0..n).filter(|&v| perms.iter().all(|p| p.apply(v) == v)).collect())
}

/// Words consisting of each generator once.
pub fn generator_words(action: &GraphAction) -> Vec<ActionWord> {
    action.generators.keys().map(|k| vec![(k.clone(), 1)]).collect()
}
