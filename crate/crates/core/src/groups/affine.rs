//! The affine Coxeter groups as `Λ₀ ⋊ S_{n+1}`, the `Λ₀ ⋊ D₄` quotients, and
//! the arithmetic condition for cyclic groups.

use serde::Serialize;

use super::dinfty::{dinfty_witness, DinftyWitness};
use super::presentation::{commutator, concat, inverse_word, power, Presentation, Word};
use super::todd_coxeter::todd_coxeter;
use crate::error::{check_cap, Error, Result};

pub const AFFINE_RANK_CAP: usize = 5;

/// `Λ₀ ⋊ S_{n+1}` where `Λ₀` is the sum-zero sublattice of `Z^{n+1}`.
///
/// Generators `1..=n` are the lattice basis `a_i = e_i − e_{i+1}`, generators
/// `n+1..=2n` the adjacent transpositions `s_j = (j j+1)`.
pub fn build_affine_coxeter(n: usize) -> Result<Presentation> {
    check_cap("affine Coxeter rank", n, AFFINE_RANK_CAP)?;
    if n == 0 {
        return Err(Error::InvalidInput("rank must be positive".into()));
    }
    let a = |i: usize| i as i32;
    let s = |j: usize| (n + j) as i32;
    let mut rels: Vec<Word> = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            rels.push(commutator(&[a(i)], &[a(j)]));
        }
    }
    for j in 1..=n {
        rels.push(power(s(j), 2));
        for k in j + 1..=n {
            let m = if k == j + 1 { 3 } else { 2 };
            rels.push([s(j), s(k)].repeat(m));
        }
    }
    for j in 1..=n {
        for i in 1..=n {
            // coordinates of a_i with entries j, j+1 swapped
            let mut v = vec![0i32; n + 1];
            v[i - 1] = 1;
            v[i] = -1;
            v.swap(j - 1, j);
            let mut image = Vec::new();
            let mut partial = 0;
            for (k, x) in v.iter().take(n).enumerate() {
                partial += x;
                image.extend(power(a(k + 1), partial));
            }
            rels.push(concat(&[&[s(j), a(i), -s(j)], &inverse_word(&image)]));
        }
    }
    let names = (1..=n).map(|i| format!("a{i}")).chain((1..=n).map(|j| format!("s{j}"))).collect();
    Presentation::with_names(2 * n, rels, names)
}

/// `Λ₀ ⋊ D₄` for `Λ₀ ≤ Z⁴`, on generators `a, b, c, x, y, z` (1–6).
pub fn d4_presentation() -> Presentation {
    let (a, b, c, x, y, z) = (1, 2, 3, 4, 5, 6);
    let conj = |g: i32, h: i32, image: &[i32]| concat(&[&[g, h, -g], &inverse_word(image)]);
    let rels = vec![
        commutator(&[a], &[b]),
        commutator(&[b], &[c]),
        commutator(&[a], &[c]),
        power(x, 2),
        power(y, 2),
        power(z, 2),
        commutator(&[x], &[y]),
        conj(z, x, &[y]),
        conj(z, y, &[x]),
        conj(x, a, &[-a]),
        conj(y, a, &[-a]),
        conj(z, a, &[a]),
        conj(x, b, &[-b]),
        conj(y, b, &[-a, b]),
        conj(z, b, &[c]),
        conj(x, c, &[-a, c]),
        conj(y, c, &[-c]),
        conj(z, c, &[b]),
    ];
    let names = ["a", "b", "c", "x", "y", "z"].iter().map(|s| s.to_string()).collect();
    Presentation::with_names(6, rels, names).expect("fixed presentation is valid")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum QuotientOutcome {
    Finite { order: usize },
    /// The coset limit was hit and no morphism onto `D∞` was found.
    Inconclusive { limit: usize },
    /// The coset limit was hit and the quotient maps onto `D∞`, so it is infinite.
    Infinite { witness: DinftyWitness },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientReport {
    pub case: String,
    pub added_relators: Vec<Word>,
    pub outcome: QuotientOutcome,
}

/// Enumerates the three quotients of `Λ₀ ⋊ D₄` obtained by killing `x` and
/// `y`, killing `z`, or imposing `x = yz`.
pub fn verify_d4_quotients(coset_limit: usize) -> Result<Vec<QuotientReport>> {
    let base = d4_presentation();
    let cases: [(&str, Vec<Word>); 3] = [
        ("x=y=1", vec![vec![4], vec![5]]),
        ("z=1", vec![vec![6]]),
        ("x=yz", vec![vec![-4, 5, 6]]),
    ];
    let mut out = Vec::new();
    for (name, extra) in cases {
        let q = base.with_relators(&extra)?;
        let outcome = match todd_coxeter(&q, &[], coset_limit) {
            Ok(t) => QuotientOutcome::Finite { order: t.coset_count() },
            Err(Error::CosetLimit { limit }) => match dinfty_witness(&q)? {
                Some(witness) => QuotientOutcome::Infinite { witness },
                None => QuotientOutcome::Inconclusive { limit },
            },
            Err(e) => return Err(e),
        };
        out.push(QuotientReport {
            case: name.into(),
            added_relators: extra,
            outcome,
        });
    }
    Ok(out)
}

/// Whether no integer in `[2, n]` divides `q`.
pub fn fw_plus_cyclic(q: u64, n: u64) -> bool {
    (2..=n).all(|d| !q.is_multiple_of(d))
}
