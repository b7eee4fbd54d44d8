//! Simplicial complexes, flag completions, nerves and integral homology.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{check_cap, Error, Result};
use crate::exact::{invariant_factors, SparseMatrix};
use crate::graphs::FiniteGraph;

pub const SIMPLEX_CAP: usize = 100_000;
pub const NERVE_FAMILY_CAP: usize = 64;

/// A simplicial complex given by its facets (maximal simplices, sorted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertex_count: usize,
    facets: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub n: usize,
    pub facets: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// Builds the downward closure of `simplices`, keeping only the maximal ones.
    pub fn new(vertex_count: usize, simplices: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
        for s in simplices {
            let set: BTreeSet<usize> = s.into_iter().collect();
            if set.is_empty() {
                continue;
            }
            if let Some(&v) = set.iter().find(|&&v| v >= vertex_count) {
                return Err(Error::InvalidInput(format!("vertex {v} out of range")));
            }
            all.insert(set.into_iter().collect());
        }
        let list: Vec<Vec<usize>> = all.into_iter().collect();
        let facets = list
            .iter()
            .filter(|s| !list.iter().any(|t| t.len() > s.len() && is_subset(s, t)))
            .cloned()
            .collect();
        Ok(SimplicialComplex { vertex_count, facets })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    /// `-1` for the empty complex.
    pub fn dimension(&self) -> isize {
        self.facets.iter().map(|f| f.len() as isize - 1).max().unwrap_or(-1)
    }

    /// All simplices of each dimension, lexicographically sorted.
    pub fn simplices_by_dimension(&self) -> Result<Vec<Vec<Vec<usize>>>> {
        let top = self.dimension();
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); (top + 1) as usize];
        let mut total = 0usize;
        for f in &self.facets {
            let k = f.len();
            // 2^k - 1 faces per facet
            for mask in 1usize..(1 << k) {
                let face: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                if by_dim[face.len() - 1].insert(face) {
                    total += 1;
                    check_cap("simplex count", total, SIMPLEX_CAP)?;
                }
            }
        }
        Ok(by_dim.into_iter().map(|s| s.into_iter().collect()).collect())
    }

    pub fn euler_characteristic(&self) -> Result<i64> {
        Ok(self
            .simplices_by_dimension()?
            .iter()
            .enumerate()
            .map(|(d, s)| if d % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) })
            .sum())
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            n: self.vertex_count,
            facets: self.facets.clone(),
        }
    }

    pub fn from_json(json: &ComplexJson) -> Result<Self> {
        SimplicialComplex::new(json.n, json.facets.clone())
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

/// The clique complex of `g`.
pub fn flag_completion(g: &FiniteGraph) -> Result<SimplicialComplex> {
    let cliques = g.maximal_cliques();
    let faces: usize = cliques
        .iter()
        .map(|c| if c.len() >= usize::BITS as usize - 1 { usize::MAX } else { (1usize << c.len()) - 1 })
        .fold(0usize, |a, b| a.saturating_add(b));
    check_cap("flag completion faces", faces.min(SIMPLEX_CAP + 1), SIMPLEX_CAP)?;
    SimplicialComplex::new(g.vertex_count(), cliques)
}

/// One vertex per member; a simplex for each subfamily with a common point.
/// Empty members contribute no simplex.
pub fn nerve(family: &[Vec<usize>]) -> Result<SimplicialComplex> {
    check_cap("nerve family size", family.len(), NERVE_FAMILY_CAP)?;
    let mut holders: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, set) in family.iter().enumerate() {
        for &x in set {
            holders.entry(x).or_default().push(i);
        }
    }
    SimplicialComplex::new(family.len(), holders.into_values())
}

/// Integral homology of a complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyProfile {
    /// Unreduced Betti numbers, dimensions `0..=dim`.
    pub betti: Vec<usize>,
    /// Reduced Betti numbers (differ from `betti` only in dimension 0).
    pub reduced_betti: Vec<usize>,
    /// Torsion coefficients (invariant factors > 1) per dimension.
    #[serde(serialize_with = "crate::exact::serialize_nested_bigints")]
    pub torsion: Vec<Vec<BigInt>>,
}

impl HomologyProfile {
    pub fn is_torsion_free(&self) -> bool {
        self.torsion.iter().all(Vec::is_empty)
    }

    /// Whether reduced homology in dimension `n` is non-zero.
    pub fn reduced_nonzero(&self, n: usize) -> bool {
        self.reduced_betti.get(n).is_some_and(|&b| b > 0) || self.torsion.get(n).is_some_and(|t| !t.is_empty())
    }

    /// Reduced homology of the `d`-sphere: free of rank one in dimension `d`, zero elsewhere.
    pub fn is_homology_sphere_of_dim(&self, d: usize) -> bool {
        self.is_torsion_free()
            && self.reduced_betti.len() == d + 1
            && self.reduced_betti.iter().enumerate().all(|(i, &b)| b == usize::from(i == d))
    }
}

/// Boundary matrix from `k`-simplices to `(k-1)`-simplices; removing the
/// vertex in position `i` carries the sign `(-1)^i`.
fn boundary(faces: &[Vec<usize>], simplices: &[Vec<usize>]) -> SparseMatrix<i64> {
    let index: BTreeMap<&[usize], usize> = faces.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect();
    let mut m = SparseMatrix::new(faces.len(), simplices.len());
    for (c, s) in simplices.iter().enumerate() {
        for i in 0..s.len() {
            let mut face = s.clone();
            face.remove(i);
            let r = index[face.as_slice()];
            m.add_entry(r, c, if i % 2 == 0 { 1 } else { -1 });
        }
    }
    m
}

/// Integral homology via Smith normal form of every boundary matrix, with the
/// identity `∂∘∂ = 0` checked on each consecutive pair.
pub fn homology(sc: &SimplicialComplex) -> Result<HomologyProfile> {
    let simplices = sc.simplices_by_dimension()?;
    let top = simplices.len();
    if top == 0 {
        return Ok(HomologyProfile {
            betti: vec![],
            reduced_betti: vec![],
            torsion: vec![],
        });
    }
    // boundaries[k] : C_k -> C_{k-1}, for k = 1..top-1
    let mut boundaries: Vec<Option<SparseMatrix<i64>>> = vec![None];
    for k in 1..top {
        boundaries.push(Some(boundary(&simplices[k - 1], &simplices[k])));
    }
    for k in 2..top {
        let (a, b) = (boundaries[k - 1].as_ref().unwrap(), boundaries[k].as_ref().unwrap());
        let prod = a.checked_mul(b).ok_or(Error::Overflow)?;
        if !prod.is_zero() {
            return Err(Error::CrossCheck(format!("boundary of boundary is non-zero in dimension {k}")));
        }
    }
    let invariants: Vec<Vec<BigInt>> = boundaries
        .iter()
        .map(|b| b.as_ref().map(invariant_factors).unwrap_or_default())
        .collect();
    let rank = |k: usize| invariants.get(k).map_or(0, Vec::len);
    let mut betti = Vec::with_capacity(top);
    let mut torsion = Vec::with_capacity(top);
    for k in 0..top {
        betti.push(simplices[k].len() - rank(k) - rank(k + 1));
        torsion.push(
            invariants
                .get(k + 1)
                .map(|inv| inv.iter().filter(|d| !d.is_one()).cloned().collect())
                .unwrap_or_default(),
        );
    }
    let mut reduced_betti = betti.clone();
    reduced_betti[0] -= 1;
    let profile = HomologyProfile {
        betti,
        reduced_betti,
        torsion,
    };
    let chi: i64 = profile
        .betti
        .iter()
        .enumerate()
        .map(|(d, &b)| if d % 2 == 0 { b as i64 } else { -(b as i64) })
        .sum();
    if chi != sc.euler_characteristic()? {
        return Err(Error::CrossCheck("Euler characteristic disagrees with Betti numbers".into()));
    }
    Ok(profile)
}

/// Whether the complex has non-zero reduced integral homology in dimension `n`.
pub fn nontrivial_in_dim(sc: &SimplicialComplex, n: usize) -> Result<bool> {
    Ok(homology(sc)?.reduced_nonzero(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::*;

    fn boundary_of_simplex(k: usize) -> SimplicialComplex {
        let all: Vec<usize> = (0..=k).collect();
        SimplicialComplex::new(k + 1, (0..=k).map(|i| all.iter().copied().filter(|&v| v != i).collect())).unwrap()
    }

    #[test]
    fn flag_completion_examples() {
        let c4 = flag_completion(&cycle_graph(4)).unwrap();
        assert_eq!(c4.dimension(), 1);
        assert_eq!(c4.facets().len(), 4);
        let k3 = flag_completion(&complete_graph(3)).unwrap();
        assert_eq!(k3.facets(), &[vec![0, 1, 2]]);
        let oct = flag_completion(&join_of_empty_pairs(3).unwrap()).unwrap();
        assert_eq!((oct.dimension(), oct.facets().len()), (2, 8));
        assert!(homology(&oct).unwrap().is_homology_sphere_of_dim(2));
    }

    #[test]
    fn nerve_examples() {
        let tri = nerve(&[vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        assert_eq!(tri, boundary_of_simplex(2));
        let full = nerve(&[vec![0, 1], vec![0, 2], vec![0, 3]]).unwrap();
        assert_eq!(full.facets(), &[vec![0, 1, 2]]);
        let pts = nerve(&[vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(pts.facets(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn homology_examples() {
        let s2 = homology(&boundary_of_simplex(3)).unwrap();
        assert_eq!(s2.betti, vec![1, 0, 1]);
        assert!(s2.is_torsion_free());
        let ball = homology(&SimplicialComplex::new(4, [vec![0, 1, 2, 3]]).unwrap()).unwrap();
        assert_eq!(ball.betti, vec![1, 0, 0, 0]);
        for n in 2..=4 {
            let h = homology(&flag_completion(&join_of_empty_pairs(n).unwrap()).unwrap()).unwrap();
            assert!(h.is_homology_sphere_of_dim(n - 1), "n={n}: {h:?}");
        }
    }

    #[test]
    fn projective_plane_has_torsion() {
        // six-vertex triangulation of the real projective plane
        let rp2 = SimplicialComplex::new(
            6,
            [
                [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1],
                [1, 2, 4], [2, 3, 5], [3, 4, 1], [4, 5, 2], [5, 1, 3],
            ]
            .map(|f| f.to_vec()),
        )
        .unwrap();
        let h = homology(&rp2).unwrap();
        assert_eq!(h.betti, vec![1, 0, 0]);
        assert_eq!(h.torsion[1], vec![BigInt::from(2)]);
        assert!(nontrivial_in_dim(&rp2, 1).unwrap());
        assert!(!nontrivial_in_dim(&rp2, 2).unwrap());
    }

    #[test]
    fn nontrivial_examples() {
        let oct = flag_completion(&join_of_empty_pairs(3).unwrap()).unwrap();
        assert!(nontrivial_in_dim(&oct, 2).unwrap());
        assert!(nontrivial_in_dim(&flag_completion(&cycle_graph(4)).unwrap(), 1).unwrap());
        assert!(!nontrivial_in_dim(&flag_completion(&complete_graph(3)).unwrap(), 1).unwrap());
    }

    #[test]
    fn antipodal_free_cube_graph_is_a_join() {
        // 2^d vertices in 2^(d-1) antipodal pairs, so the join has 2^(d-1) factors
        for d in 2..=4 {
            let g = build_gamma_rs(d, d - 1).unwrap();
            let pairs = 1 << (d - 1);
            assert!(graph_isomorphic(&g, &join_of_empty_pairs(pairs).unwrap()).unwrap().is_some());
            let h = homology(&flag_completion(&g).unwrap()).unwrap();
            assert!(h.is_homology_sphere_of_dim(pairs - 1));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn homology_is_consistent(n in 1usize..8, bits in proptest::collection::vec(any::<bool>(), 28)) {
                let mut e = BTreeSet::new();
                let mut k = 0;
                for u in 0..n { for v in u + 1..n { if bits[k] { e.insert((u, v)); } k += 1; } }
                let g = FiniteGraph::new(n, e).unwrap();
                let sc = flag_completion(&g).unwrap();
                let h = homology(&sc).unwrap();
                prop_assert_eq!(h.betti[0], g.components().len());
            }

            #[test]
            fn helly_families_have_simplex_nerves(sets in proptest::collection::vec(proptest::collection::btree_set(0usize..6, 1..4), 1..5)) {
                // subtrees of a star through the centre pairwise meet, so their nerve is one simplex
                let family: Vec<Vec<usize>> = sets.into_iter().map(|s| { let mut v: Vec<usize> = s.into_iter().collect(); v.push(100); v }).collect();
                let sc = nerve(&family).unwrap();
                prop_assert_eq!(sc.facets().len(), 1);
            }
        }
    }
}
