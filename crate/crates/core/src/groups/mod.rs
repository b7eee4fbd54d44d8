//! Finitely presented groups: coset enumeration, low-index subgroups,
//! Reidemeister–Schreier rewriting, abelianization and morphisms onto `D∞`.

pub mod affine;
pub mod dinfty;
pub mod low_index;
pub mod presentation;
pub mod schreier;
pub mod todd_coxeter;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

pub use affine::{build_affine_coxeter, d4_presentation, fw_plus_cyclic, verify_d4_quotients, QuotientOutcome, QuotientReport};
pub use dinfty::{dinfty_witness, verify_witness, DinftyElement, DinftyWitness};
pub use low_index::low_index_subgroups;
pub use presentation::{Presentation, PresentationJson, Word};
pub use schreier::{reidemeister_schreier, SubgroupPresentation};
pub use todd_coxeter::{group_order, todd_coxeter, CosetTable};

use crate::error::Result;
use crate::exact::{invariant_factors, SparseMatrix};

/// Invariant factors of the abelianization, torsion ascending then one `0` per
/// free factor.
pub fn abelian_invariants(pres: &Presentation) -> Vec<BigInt> {
    let k = pres.generator_count();
    let m = SparseMatrix::from_dense(&pres.exponent_matrix(), k);
    let factors = invariant_factors(&m);
    let rank = factors.len();
    let mut out: Vec<BigInt> = factors.into_iter().filter(|d| !d.is_one()).collect();
    out.extend(std::iter::repeat_n(BigInt::zero(), k - rank));
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct FwFailure {
    pub index: usize,
    pub table: CosetTable,
    /// Subgroup generators written in the original generators.
    pub subgroup_generators: Vec<Word>,
    /// Witness on the subgroup's own generators.
    pub witness: DinftyWitness,
    /// The certificate rewritten in the original generators.
    pub certificate_in_group: Word,
}

#[derive(Clone, Debug, Serialize)]
pub struct FwVerdict {
    pub n: usize,
    pub holds: bool,
    /// Index of every subgroup class examined, in search order.
    pub subgroup_indices: Vec<usize>,
    pub failure: Option<FwFailure>,
    /// The virtually-abelian hypothesis is asserted by the caller, never verified.
    pub hypothesis_machine_checked: bool,
}

/// The fixed-point criterion for virtually abelian groups: holds iff no
/// subgroup of index at most `n` maps onto an infinite subgroup of `D∞`.
/// Stops at the first failing subgroup.
pub fn fwn_virtually_abelian(pres: &Presentation, n: usize) -> Result<FwVerdict> {
    let mut indices = Vec::new();
    for table in low_index_subgroups(pres, n)? {
        indices.push(table.coset_count());
        let sub = reidemeister_schreier(pres, &table)?;
        if let Some(witness) = dinfty_witness(&sub.presentation)? {
            let certificate_in_group = sub.expand(&witness.certificate);
            if table.trace(0, &certificate_in_group) != 0 {
                return Err(crate::Error::CrossCheck("certificate leaves the subgroup".into()));
            }
            return Ok(FwVerdict {
                n,
                holds: false,
                subgroup_indices: indices,
                failure: Some(FwFailure {
                    index: table.coset_count(),
                    table,
                    subgroup_generators: sub.generator_words,
                    witness,
                    certificate_in_group,
                }),
                hypothesis_machine_checked: false,
            });
        }
    }
    Ok(FwVerdict {
        n,
        holds: true,
        subgroup_indices: indices,
        failure: None,
        hypothesis_machine_checked: false,
    })
}
