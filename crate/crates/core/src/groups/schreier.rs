//! Reidemeister–Schreier rewriting for finite-index subgroups.

use std::collections::HashMap;

use super::presentation::{free_reduce, inverse_word, Presentation, Word};
use super::todd_coxeter::{transversal, CosetTable};
use crate::error::{Error, Result};

/// A presentation of the subgroup stabilizing coset 0, together with each new
/// generator written in the original generators.
#[derive(Clone, Debug)]
pub struct SubgroupPresentation {
    pub presentation: Presentation,
    pub generator_words: Vec<Word>,
}

impl SubgroupPresentation {
    /// Rewrites a word in the subgroup generators into the original generators.
    pub fn expand(&self, w: &[i32]) -> Word {
        let mut out = Vec::new();
        for &x in w {
            let g = &self.generator_words[x.unsigned_abs() as usize - 1];
            if x > 0 {
                out.extend_from_slice(g);
            } else {
                out.extend(inverse_word(g));
            }
        }
        free_reduce(&out)
    }
}

/// Schreier generators `t_c · x · t_{cx}⁻¹` that are not freely trivial,
/// keyed by `(coset, generator)` in scan order.
pub(crate) fn schreier_edges(table: &CosetTable) -> Vec<((usize, usize), Word)> {
    let t = transversal(table);
    let mut gens = Vec::new();
    for c in 0..table.coset_count() {
        for g in 1..=table.generator_count() as i32 {
            let d = table.act(c, g);
            let mut w = t[c].clone();
            w.push(g);
            w.extend(inverse_word(&t[d]));
            let w = free_reduce(&w);
            if !w.is_empty() {
                gens.push(((c, g as usize), w));
            }
        }
    }
    gens
}

/// Words in the original generators generating the stabilizer of coset 0.
pub fn schreier_generator_words(table: &CosetTable) -> Vec<Word> {
    schreier_edges(table).into_iter().map(|(_, w)| w).collect()
}

/// Presentation of the subgroup on its Schreier generators, with one rewritten
/// relator per (coset, relator) pair.
pub fn reidemeister_schreier(pres: &Presentation, table: &CosetTable) -> Result<SubgroupPresentation> {
    if table.generator_count() != pres.generator_count() || !table.is_closed_under(pres.relators()) {
        return Err(Error::ContractViolation("coset table does not belong to this presentation".into()));
    }
    let gens = schreier_edges(table);
    let index: HashMap<(usize, usize), i32> = gens.iter().enumerate().map(|(i, (k, _))| (*k, i as i32 + 1)).collect();
    let rewrite = |c0: usize, w: &[i32]| -> Word {
        let mut c = c0;
        let mut out = Vec::new();
        for &x in w {
            if x > 0 {
                if let Some(&s) = index.get(&(c, x as usize)) {
                    out.push(s);
                }
                c = table.act(c, x);
            } else {
                let prev = table.act(c, x);
                if let Some(&s) = index.get(&(prev, (-x) as usize)) {
                    out.push(-s);
                }
                c = prev;
            }
        }
        out
    };
    let mut relators = Vec::new();
    for c in 0..table.coset_count() {
        for r in pres.relators() {
            relators.push(rewrite(c, r));
        }
    }
    let m = gens.len();
    let names = (1..=m).map(|i| format!("s{i}")).collect();
    let presentation = Presentation::with_names(m, relators, names)?;
    Ok(SubgroupPresentation {
        presentation,
        generator_words: gens.into_iter().map(|(_, w)| w).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::abelian_invariants;
    use crate::groups::low_index::low_index_subgroups;
    use crate::groups::todd_coxeter::todd_coxeter;
    use num_bigint::BigInt;

    fn inv(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn index_one_keeps_abelianization() {
        let s3 = Presentation::new(2, vec![vec![1, 1], vec![2, 2], [1, 2].repeat(3)]).unwrap();
        let t = todd_coxeter(&s3, &[vec![1], vec![2]], 10).unwrap();
        let sub = reidemeister_schreier(&s3, &t).unwrap();
        assert_eq!(abelian_invariants(&sub.presentation), abelian_invariants(&s3));
    }

    #[test]
    fn translations_of_infinite_dihedral() {
        let d = Presentation::new(2, vec![vec![1, 1], vec![2, 2]]).unwrap();
        let t = todd_coxeter(&d, &[vec![1, 2]], 100).unwrap();
        assert_eq!(t.coset_count(), 2);
        let sub = reidemeister_schreier(&d, &t).unwrap();
        assert_eq!(abelian_invariants(&sub.presentation), inv(&[0]));
    }

    #[test]
    fn index_three_in_z2() {
        let z2 = Presentation::new(2, vec![vec![1, 2, -1, -2]]).unwrap();
        for t in low_index_subgroups(&z2, 3).unwrap().iter().filter(|t| t.coset_count() == 3) {
            let sub = reidemeister_schreier(&z2, t).unwrap();
            assert_eq!(abelian_invariants(&sub.presentation), inv(&[0, 0]));
        }
    }

    /// First homology of the cover: cycles of the coset graph modulo lifted
    /// relator loops, computed as a cellular chain complex.
    fn cover_homology(pres: &Presentation, t: &CosetTable) -> Vec<BigInt> {
        use crate::exact::{invariant_factors, SparseMatrix};
        let n = t.coset_count();
        let k = pres.generator_count();
        let edges = n * k;
        let rels = pres.relators().len() * n;
        // d2: 2-cells (lifted relators) -> edges
        let mut d2 = SparseMatrix::new(edges, rels);
        for (ri, r) in pres.relators().iter().enumerate() {
            for c0 in 0..n {
                let mut c = c0;
                for &x in r {
                    if x > 0 {
                        d2.add_entry(c * k + (x as usize - 1), ri * n + c0, 1);
                        c = t.act(c, x);
                    } else {
                        let p = t.act(c, x);
                        d2.add_entry(p * k + ((-x) as usize - 1), ri * n + c0, -1);
                        c = p;
                    }
                }
            }
        }
        // d1: edges -> vertices
        let mut d1 = SparseMatrix::new(n, edges);
        for c in 0..n {
            for g in 1..=k {
                let d = t.act(c, g as i32);
                d1.add_entry(d, c * k + g - 1, 1);
                d1.add_entry(c, c * k + g - 1, -1);
            }
        }
        let r1 = invariant_factors(&d1).len();
        let inv2 = invariant_factors(&d2);
        let free = edges - r1 - inv2.len();
        let mut out: Vec<BigInt> = inv2.into_iter().filter(|d| *d != BigInt::from(1)).collect();
        out.extend(std::iter::repeat_n(BigInt::from(0), free));
        out
    }

    #[test]
    fn abelianization_matches_cover_homology() {
        let cases = [
            Presentation::new(2, vec![vec![1, 1], vec![2, 2], [1, 2].repeat(3)]).unwrap(),
            Presentation::new(2, vec![vec![1, 2, -1, -2]]).unwrap(),
            Presentation::new(2, vec![vec![1, 1], vec![2, 2]]).unwrap(),
            Presentation::new(2, vec![vec![1, 1], vec![2, 2, 2], [1, 2].repeat(5)]).unwrap(),
            crate::groups::build_affine_coxeter(2).unwrap(),
        ];
        for p in cases {
            for t in low_index_subgroups(&p, 4).unwrap() {
                let sub = reidemeister_schreier(&p, &t).unwrap();
                assert_eq!(abelian_invariants(&sub.presentation), cover_homology(&p, &t));
                for w in &sub.generator_words {
                    assert_eq!(t.trace(0, w), 0);
                }
            }
        }
    }
}
