//! Finite spaces with walls and their cubulation into median graphs.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{check_cap, Error, Result};
use crate::graphs::FiniteGraph;
use crate::median::{expect_median, MedianGraph};

pub const CUBULATION_WALL_CAP: usize = 20;

/// A finite point set with walls. Each wall is stored by the side containing
/// point 0, which is also the lexicographically smaller side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wallspace {
    point_count: usize,
    walls: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallspaceJson {
    pub points: usize,
    pub walls: Vec<Vec<usize>>,
}

impl Wallspace {
    /// Each entry of `sides` is one side of a wall (either side is accepted).
    pub fn new(point_count: usize, sides: Vec<Vec<usize>>) -> Result<Self> {
        if point_count == 0 {
            return Err(Error::InvalidInput("a wallspace needs at least one point".into()));
        }
        let mut walls = Vec::with_capacity(sides.len());
        let mut seen = BTreeSet::new();
        for side in sides {
            let set: BTreeSet<usize> = side.into_iter().collect();
            if let Some(&p) = set.iter().find(|&&p| p >= point_count) {
                return Err(Error::InvalidInput(format!("point {p} out of range")));
            }
            if set.is_empty() || set.len() == point_count {
                return Err(Error::InvalidInput("wall with an empty side".into()));
            }
            let normal: Vec<usize> = if set.contains(&0) {
                set.into_iter().collect()
            } else {
                (0..point_count).filter(|p| !set.contains(p)).collect()
            };
            if !seen.insert(normal.clone()) {
                return Err(Error::InvalidInput(format!("duplicate wall {normal:?}")));
            }
            walls.push(normal);
        }
        Ok(Wallspace { point_count, walls })
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn wall_count(&self) -> usize {
        self.walls.len()
    }

    /// Normalized walls: the side containing point 0.
    pub fn walls(&self) -> &[Vec<usize>] {
        &self.walls
    }

    /// Whether point `p` lies on the stored side of wall `i`.
    pub fn on_stored_side(&self, i: usize, p: usize) -> bool {
        self.walls[i].binary_search(&p).is_ok()
    }

    pub fn side_mask(&self, i: usize, complement: bool) -> Vec<bool> {
        (0..self.point_count).map(|p| self.on_stored_side(i, p) != complement).collect()
    }

    /// Walls cross when all four quarter-intersections are non-empty.
    pub fn crosses(&self, i: usize, j: usize) -> bool {
        [false, true]
            .iter()
            .all(|&a| [false, true].iter().all(|&b| self.sides_meet(i, a, j, b)))
    }

    fn sides_meet(&self, i: usize, ci: bool, j: usize, cj: bool) -> bool {
        (0..self.point_count).any(|p| self.on_stored_side(i, p) != ci && self.on_stored_side(j, p) != cj)
    }

    /// Whether every pair of distinct points is separated by some wall.
    pub fn separates_points(&self) -> bool {
        (0..self.point_count).all(|p| {
            (p + 1..self.point_count)
                .all(|q| (0..self.walls.len()).any(|i| self.on_stored_side(i, p) != self.on_stored_side(i, q)))
        })
    }

    pub fn to_json(&self) -> WallspaceJson {
        WallspaceJson {
            points: self.point_count,
            walls: self.walls.clone(),
        }
    }

    pub fn from_json(json: &WallspaceJson) -> Result<Self> {
        Wallspace::new(json.points, json.walls.clone())
    }
}

/// Singleton walls `{g} | rest` on a group of the given order, plus one extra
/// hub point on the "rest" side of every wall. Points `0..order` are the
/// group elements. The hub keeps the two walls distinct when `order == 2`.
pub fn singleton_walls(order: usize) -> Result<Wallspace> {
    if order < 2 {
        return Err(Error::InvalidInput("singleton walls need at least two elements".into()));
    }
    Wallspace::new(order + 1, (0..order).map(|g| vec![g]).collect())
}

/// One wall per hyperplane, with the halfspaces as sides.
pub fn walls_of_median(mg: &MedianGraph) -> Wallspace {
    let sides = mg.hyperplanes().iter().map(|h| h.minus.clone()).collect();
    Wallspace::new(mg.vertex_count(), sides).expect("halfspaces of distinct hyperplanes are distinct walls")
}

/// Output of [`cubulate`].
#[derive(Clone, Debug)]
pub struct Cubulation {
    pub median: MedianGraph,
    /// Vertex of the principal orientation of each point.
    pub point_vertex: Vec<usize>,
    /// Orientation of each vertex: bit `i` set iff it picks the complement of
    /// the stored side of wall `i`.
    pub orientations: Vec<u64>,
}

impl Cubulation {
    /// Orientation of vertex `v` as a bit string over the wall sequence.
    pub fn bit_string(&self, v: usize, walls: usize) -> String {
        (0..walls)
            .map(|i| if self.orientations[v] >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Sageev cubulation: consistent orientations reachable from principal ones by
/// single-wall flips, adjacent when they differ on one wall.
pub fn cubulate(ws: &Wallspace) -> Result<Cubulation> {
    let k = ws.wall_count();
    check_cap("cubulation walls", k, CUBULATION_WALL_CAP)?;
    // meet[i][ci][j][cj]: side ci of wall i meets side cj of wall j
    let mut meet = vec![[[false; 2]; 2]; k * k];
    for i in 0..k {
        for j in 0..k {
            for ci in 0..2 {
                for cj in 0..2 {
                    meet[i * k + j][ci][cj] = ws.sides_meet(i, ci == 1, j, cj == 1);
                }
            }
        }
    }
    let bit = |o: u64, i: usize| (o >> i & 1) as usize;
    let consistent = |o: u64| -> bool {
        (0..k).all(|i| (i + 1..k).all(|j| meet[i * k + j][bit(o, i)][bit(o, j)]))
    };
    let principal = |p: usize| -> u64 {
        (0..k).filter(|&i| !ws.on_stored_side(i, p)).map(|i| 1u64 << i).sum()
    };
    let mut found: BTreeSet<u64> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for p in 0..ws.point_count() {
        let o = principal(p);
        if found.insert(o) {
            queue.push_back(o);
        }
    }
    while let Some(o) = queue.pop_front() {
        for i in 0..k {
            let f = o ^ (1u64 << i);
            if !found.contains(&f) && consistent(f) {
                found.insert(f);
                queue.push_back(f);
            }
        }
    }
    // order vertices by bit string (wall 0 is the leading character)
    let key = |o: u64| if k == 0 { 0 } else { o.reverse_bits() >> (64 - k) };
    let mut orientations: Vec<u64> = found.into_iter().collect();
    orientations.sort_by_key(|&o| key(o));
    let index: HashMap<u64, usize> = orientations.iter().enumerate().map(|(v, &o)| (o, v)).collect();
    let mut edges = BTreeSet::new();
    for (v, &o) in orientations.iter().enumerate() {
        for i in 0..k {
            if let Some(&w) = index.get(&(o ^ (1u64 << i))) {
                if v < w {
                    edges.insert((v, w));
                }
            }
        }
    }
    let g = FiniteGraph::new(orientations.len(), edges)?;
    let median = expect_median(&g, "cubulation")?;
    let point_vertex = (0..ws.point_count()).map(|p| index[&principal(p)]).collect();
    Ok(Cubulation {
        median,
        point_vertex,
        orientations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::*;
    use crate::median::{certify_median, cubical_dimension};

    fn med(g: &FiniteGraph) -> MedianGraph {
        certify_median(g).unwrap().median().unwrap()
    }

    /// Counts consistent orientations over all 2^k sign patterns.
    fn brute_consistent(ws: &Wallspace) -> usize {
        let k = ws.wall_count();
        (0..(1u64 << k))
            .filter(|&o| {
                (0..k).all(|i| {
                    (0..k).all(|j| {
                        let a = ws.side_mask(i, o >> i & 1 == 1);
                        let b = ws.side_mask(j, o >> j & 1 == 1);
                        a.iter().zip(&b).any(|(x, y)| *x && *y)
                    })
                })
            })
            .count()
    }

    #[test]
    fn walls_of_median_examples() {
        assert_eq!(walls_of_median(&med(&build_hypercube(2).unwrap())).wall_count(), 2);
        let p = walls_of_median(&med(&path_graph(5)));
        assert_eq!(p.wall_count(), 4);
        assert!((0..4).all(|i| (0..4).all(|j| !p.crosses(i, j))));
        assert_eq!(walls_of_median(&med(&empty_graph(1))).wall_count(), 0);
    }

    #[test]
    fn crossing_walls_give_cubes() {
        for k in 1..=4usize {
            // points are the corners of the k-cube, walls are the coordinates
            let sides = (0..k).map(|i| (0..(1usize << k)).filter(|x| x >> i & 1 == 0).collect()).collect();
            let ws = Wallspace::new(1 << k, sides).unwrap();
            assert_eq!(brute_consistent(&ws), 1 << k);
            let c = cubulate(&ws).unwrap();
            assert!(graph_isomorphic(c.median.graph(), &build_hypercube(k).unwrap()).unwrap().is_some());
        }
    }

    #[test]
    fn nested_walls_give_paths() {
        for n in 1..=6usize {
            let sides = (1..=n).map(|c| (0..c).collect()).collect();
            let ws = Wallspace::new(n + 1, sides).unwrap();
            assert_eq!(brute_consistent(&ws), n + 1);
            let c = cubulate(&ws).unwrap();
            assert!(graph_isomorphic(c.median.graph(), &path_graph(n + 1)).unwrap().is_some());
            assert_eq!(c.point_vertex, (0..=n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn no_walls_single_vertex() {
        let c = cubulate(&Wallspace::new(3, vec![]).unwrap()).unwrap();
        assert_eq!(c.median.vertex_count(), 1);
        assert_eq!(c.point_vertex, vec![0, 0, 0]);
    }

    #[test]
    fn validation_and_json() {
        assert!(Wallspace::new(3, vec![vec![]]).is_err());
        assert!(Wallspace::new(3, vec![vec![0, 1, 2]]).is_err());
        assert!(Wallspace::new(3, vec![vec![0], vec![1, 2]]).is_err());
        assert!(Wallspace::new(3, vec![vec![3]]).is_err());
        let ws = Wallspace::new(3, vec![vec![2], vec![1]]).unwrap();
        let text = serde_json::to_string(&ws.to_json()).unwrap();
        assert_eq!(text, r#"{"points":3,"walls":[[0,1],[0,2]]}"#);
        assert_eq!(Wallspace::from_json(&serde_json::from_str(&text).unwrap()).unwrap(), ws);
    }

    #[test]
    fn singleton_walls_examples() {
        let two = singleton_walls(2).unwrap();
        assert!(graph_isomorphic(cubulate(&two).unwrap().median.graph(), &path_graph(3)).unwrap().is_some());
        let three = cubulate(&singleton_walls(3).unwrap()).unwrap();
        // a tripod: centre plus the three principal leaves
        assert_eq!(three.median.vertex_count(), 4);
        assert_eq!(cubical_dimension(&three.median), 1);
    }

    #[test]
    fn bit_strings_sorted() {
        let ws = Wallspace::new(3, vec![vec![0], vec![0, 1]]).unwrap();
        let c = cubulate(&ws).unwrap();
        let s: Vec<String> = (0..3).map(|v| c.bit_string(v, 2)).collect();
        assert_eq!(s, vec!["00", "10", "11"]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn wallspace() -> impl Strategy<Value = Wallspace> {
            (2usize..=6).prop_flat_map(|n| {
                proptest::collection::btree_set(1u64..(1u64 << (n - 1)), 0..8).prop_map(move |masks| {
                    // masks over points 1..n; stored side = {0} ∪ complement-of-mask
                    let sides = masks
                        .into_iter()
                        .map(|m| (1..n).filter(|p| m >> (p - 1) & 1 == 1).collect())
                        .collect();
                    Wallspace::new(n, sides).unwrap()
                })
            })
        }

        fn max_crossing_family(ws: &Wallspace) -> usize {
            let k = ws.wall_count();
            (0..(1u32 << k))
                .filter(|s| {
                    let idx: Vec<usize> = (0..k).filter(|i| s >> i & 1 == 1).collect();
                    idx.iter().all(|&i| idx.iter().all(|&j| i == j || ws.crosses(i, j)))
                })
                .map(|s| s.count_ones() as usize)
                .max()
                .unwrap_or(0)
        }

        proptest! {
            #[test]
            fn vertex_count_matches_brute_force(ws in wallspace()) {
                let c = cubulate(&ws).unwrap();
                prop_assert_eq!(c.median.vertex_count(), brute_consistent(&ws));
            }

            #[test]
            fn dimension_is_max_crossing(ws in wallspace()) {
                let c = cubulate(&ws).unwrap();
                prop_assert_eq!(cubical_dimension(&c.median), max_crossing_family(&ws));
            }
        }
    }
}
