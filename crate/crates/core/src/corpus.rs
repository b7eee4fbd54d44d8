//! Generated test corpora and brute-force oracles for the duality checks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_cap, Error, Result};
use crate::graphs::{build_hypercube, grid_graph, FiniteGraph};
use crate::median::{certify_median, convex_hull};
use crate::wallspace::Wallspace;

/// Walls handled by the brute-force orientation oracle.
pub const BRUTE_FORCE_WALL_CAP: usize = 16;
pub const DEFAULT_SEED: u64 = 0x6d65_6474_6b00;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusSize {
    Small,
    Full,
}

impl std::str::FromStr for CorpusSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(CorpusSize::Small),
            "full" => Ok(CorpusSize::Full),
            _ => Err(Error::InvalidInput(format!("unknown corpus {s:?} (expected small or full)"))),
        }
    }
}

/// AHU encoding of a tree rooted at `root`.
fn rooted_code(adj: &[Vec<usize>], root: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[root]
        .iter()
        .filter(|&&c| c != parent)
        .map(|&c| rooted_code(adj, c, root))
        .collect();
    kids.sort();
    format!("({})", kids.concat())
}

/// Canonical code of a tree: the least encoding rooted at a centre.
fn tree_code(g: &FiniteGraph) -> String {
    let n = g.vertex_count();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut alive = n;
    let mut leaves: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    let mut removed = vec![false; n];
    while alive > 2 {
        let mut next = Vec::new();
        for &l in &leaves {
            removed[l] = true;
            alive -= 1;
            for &w in &adj[l] {
                if !removed[w] {
                    degree[w] -= 1;
                    if degree[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        leaves = next;
    }
    (0..n)
        .filter(|&v| !removed[v])
        .map(|c| rooted_code(&adj, c, usize::MAX))
        .min()
        .expect("non-empty tree")
}

/// One representative of every isomorphism class of trees on `1..=max_n`
/// vertices, grown leaf by leaf and deduplicated by canonical code.
pub fn trees_up_to(max_n: usize) -> Vec<FiniteGraph> {
    let mut out = Vec::new();
    if max_n == 0 {
        return out;
    }
    let mut layer = vec![FiniteGraph::new(1, []).expect("valid")];
    out.extend(layer.iter().cloned());
    for n in 2..=max_n {
        let mut seen = BTreeMap::new();
        for t in &layer {
            for v in 0..n - 1 {
                let mut e = t.edges();
                e.push((v, n - 1));
                let g = FiniteGraph::new(n, e).expect("valid");
                seen.entry(tree_code(&g)).or_insert(g);
            }
        }
        layer = seen.into_values().collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Convex hulls in `Q_d` of random sets of two to four vertices.
pub fn random_convex_subgraphs(d: usize, count: usize, seed: u64) -> Result<Vec<FiniteGraph>> {
    let q = build_hypercube(d)?;
    let mg = certify_median(&q)?
        .median()
        .ok_or_else(|| Error::CrossCheck("hypercube is not median".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let k = rng.gen_range(2..=4);
        let seed_set: Vec<usize> = sample(&mut rng, 1 << d, k).into_vec();
        let hull = convex_hull(&mg, &seed_set)?.hull;
        out.push(q.induced_subgraph(&hull));
    }
    Ok(out)
}

/// The median graphs of the duality round-trip corpus, with names.
pub fn duality_corpus(size: CorpusSize) -> Result<Vec<(String, FiniteGraph)>> {
    let (tree_max, grid_max, cube_max, random) = match size {
        CorpusSize::Small => (7, 3, 3, 10),
        CorpusSize::Full => (10, 5, 4, 50),
    };
    let mut out = Vec::new();
    for (i, t) in trees_up_to(tree_max).into_iter().enumerate() {
        out.push((format!("tree-{}-{i}", t.vertex_count()), t));
    }
    for a in 1..=grid_max {
        for b in a..=grid_max {
            out.push((format!("grid-{a}x{b}"), grid_graph(a, b)));
        }
    }
    for d in 0..=cube_max {
        out.push((format!("cube-{d}"), build_hypercube(d)?));
    }
    for (i, g) in random_convex_subgraphs(6, random, DEFAULT_SEED)?.into_iter().enumerate() {
        out.push((format!("convex-q6-{i}"), g));
    }
    Ok(out)
}

/// Images of the walls of a wallspace on `p` points under a point permutation,
/// as sorted masks of the side containing point 0.
fn canonical_masks(p: usize, masks: &[u32], perm: &[usize]) -> Vec<u32> {
    let full = (1u32 << p) - 1;
    let mut out: Vec<u32> = masks
        .iter()
        .map(|&m| {
            let img = (0..p).filter(|&i| m >> i & 1 == 1).fold(0u32, |acc, i| acc | 1 << perm[i]);
            if img & 1 == 1 {
                img
            } else {
                full & !img
            }
        })
        .collect();
    out.sort_unstable();
    out
}

fn permutations(p: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for k in 0..p {
        out = out
            .into_iter()
            .flat_map(|perm: Vec<usize>| {
                (0..=k).map(move |pos| {
                    let mut q = perm.clone();
                    q.insert(pos, k);
                    q
                })
            })
            .collect();
    }
    out
}

/// Every wallspace on `1..=max_points` points with at most `max_walls` walls,
/// one per orbit of the symmetric group on points, in a fixed order. Fails
/// with a resource error beyond `cap` instances.
pub fn small_wallspaces(max_points: usize, max_walls: usize, cap: usize) -> Result<Vec<Wallspace>> {
    check_cap("wallspace enumeration points", max_points, 6)?;
    let mut out = Vec::new();
    for p in 1..=max_points {
        // walls on p points: sides containing point 0, excluding the whole set
        let candidates: Vec<u32> = (0u32..(1 << p)).filter(|m| m & 1 == 1 && *m != (1 << p) - 1).collect();
        let perms = permutations(p);
        let mut seen = BTreeSet::new();
        for subset in 0u64..(1u64 << candidates.len()) {
            if subset.count_ones() as usize > max_walls {
                continue;
            }
            let masks: Vec<u32> = (0..candidates.len()).filter(|&i| subset >> i & 1 == 1).map(|i| candidates[i]).collect();
            let canon = perms.iter().map(|q| canonical_masks(p, &masks, q)).min().expect("non-empty");
            if canon != masks || !seen.insert(canon) {
                continue;
            }
            check_cap("small wallspace instances", out.len() + 1, cap)?;
            let sides = masks.iter().map(|&m| (0..p).filter(|&i| m >> i & 1 == 1).collect()).collect();
            out.push(Wallspace::new(p, sides)?);
        }
    }
    Ok(out)
}

/// Independent cubulation oracle: all `2^k` choices of sides, keep the
/// pairwise-intersecting ones, join those differing on one wall, and return
/// the component containing the principal orientations.
pub fn brute_force_cubulation(ws: &Wallspace) -> Result<FiniteGraph> {
    let k = ws.wall_count();
    check_cap("brute-force orientation walls", k, BRUTE_FORCE_WALL_CAP)?;
    let sides: Vec<[BTreeSet<usize>; 2]> = (0..k)
        .map(|i| {
            let stored: BTreeSet<usize> = ws.walls()[i].iter().copied().collect();
            let other = (0..ws.point_count()).filter(|p| !stored.contains(p)).collect();
            [stored, other]
        })
        .collect();
    let consistent = |o: u32| {
        (0..k).all(|i| {
            (i + 1..k).all(|j| {
                let a = &sides[i][(o >> i & 1) as usize];
                let b = &sides[j][(o >> j & 1) as usize];
                !a.is_disjoint(b)
            })
        })
    };
    let all: Vec<u32> = (0u32..(1 << k)).filter(|&o| consistent(o)).collect();
    let index: BTreeMap<u32, usize> = all.iter().enumerate().map(|(i, &o)| (o, i)).collect();
    let principal: BTreeSet<usize> = (0..ws.point_count())
        .map(|p| (0..k).fold(0u32, |o, i| if ws.on_stored_side(i, p) { o } else { o | 1 << i }))
        .map(|o| index[&o])
        .collect();
    let mut seen = vec![false; all.len()];
    let mut queue: VecDeque<usize> = principal.iter().copied().collect();
    for &p in &principal {
        seen[p] = true;
    }
    while let Some(v) = queue.pop_front() {
        for i in 0..k {
            if let Some(&w) = index.get(&(all[v] ^ 1 << i)) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let keep: Vec<u32> = all.iter().zip(&seen).filter(|(_, s)| **s).map(|(o, _)| *o).collect();
    let pos: BTreeMap<u32, usize> = keep.iter().enumerate().map(|(i, &o)| (o, i)).collect();
    let mut edges = Vec::new();
    for (a, &o) in keep.iter().enumerate() {
        for i in 0..k {
            if let Some(&b) = pos.get(&(o ^ 1 << i)) {
                if a < b {
                    edges.push((a, b));
                }
            }
        }
    }
    FiniteGraph::new(keep.len(), edges)
}
