//! Morphisms onto the infinite dihedral group, found as twisted cocycles.
//!
//! A map `g ↦ (λ(g), σ(g))` into `D∞ = Z ⋊ Z/2` is a homomorphism iff `σ` is a
//! sign character and `λ(gh) = λ(g) + σ(g)λ(h)`. Its image is infinite iff `λ`
//! is not identically zero on `ker σ`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::presentation::{Presentation, Word};
use super::schreier::schreier_generator_words;
use super::todd_coxeter::{column, CosetTable};
use crate::error::{check_cap, Error, Result};
use crate::exact::{nullspace_mod2, primitive_integer_vector, rational_nullspace};

/// Largest mod-2 rank whose sign characters are enumerated.
pub const SIGMA_RANK_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DinftyWitness {
    /// `±1` per generator.
    pub sigma: Vec<i8>,
    /// Translation part per generator, scaled to a primitive integer vector.
    #[serde(serialize_with = "crate::exact::serialize_bigints")]
    pub lambda: Vec<BigInt>,
    /// A word in `ker σ` with non-zero translation.
    pub certificate: Word,
    #[serde(serialize_with = "crate::exact::serialize_bigint")]
    pub certificate_value: BigInt,
}

/// An element `t ↦ s·t + λ` of `D∞`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DinftyElement {
    #[serde(serialize_with = "crate::exact::serialize_bigint")]
    pub translation: BigInt,
    pub sign: i8,
}

impl DinftyElement {
    pub fn identity() -> Self {
        DinftyElement {
            translation: BigInt::zero(),
            sign: 1,
        }
    }

    pub fn mul(&self, other: &DinftyElement) -> DinftyElement {
        DinftyElement {
            translation: &self.translation + BigInt::from(self.sign) * &other.translation,
            sign: self.sign * other.sign,
        }
    }

    pub fn inverse(&self) -> DinftyElement {
        DinftyElement {
            translation: -(BigInt::from(self.sign) * &self.translation),
            sign: self.sign,
        }
    }
}

/// Image of a word under the generator images, multiplied out in `D∞`.
pub fn evaluate(sigma: &[i8], lambda: &[BigInt], w: &[i32]) -> DinftyElement {
    w.iter().fold(DinftyElement::identity(), |acc, &x| {
        let g = x.unsigned_abs() as usize - 1;
        let e = DinftyElement {
            translation: lambda[g].clone(),
            sign: sigma[g],
        };
        acc.mul(&if x > 0 { e } else { e.inverse() })
    })
}

/// Coefficients of `λ(w)` as a linear form in the generator values, expanding
/// the cocycle rule along the word.
fn cocycle_row(sigma: &[i8], w: &[i32]) -> Vec<i64> {
    let mut row = vec![0i64; sigma.len()];
    let mut s = 1i64;
    for &x in w {
        let g = x.unsigned_abs() as usize - 1;
        if x > 0 {
            row[g] += s;
        } else {
            row[g] -= s * sigma[g] as i64;
        }
        s *= sigma[g] as i64;
    }
    row
}

fn sign_of_word(sigma: &[i8], w: &[i32]) -> i8 {
    w.iter().fold(1, |s, &x| s * sigma[x.unsigned_abs() as usize - 1])
}

/// Generators of `ker σ` as words: the generators themselves when `σ` is trivial,
/// otherwise Schreier generators of the two-coset table of `σ`.
pub fn kernel_generators(sigma: &[i8]) -> Result<Vec<Word>> {
    let k = sigma.len();
    if sigma.iter().all(|&s| s == 1) {
        return Ok((1..=k as i32).map(|g| vec![g]).collect());
    }
    let mut rows = vec![vec![0usize; 2 * k]; 2];
    for (c, row) in rows.iter_mut().enumerate() {
        for g in 1..=k as i32 {
            let d = if sigma[g as usize - 1] == 1 { c } else { 1 - c };
            row[column(g)] = d;
            row[column(-g)] = d;
        }
    }
    let table = CosetTable::from_rows(k, rows)?;
    Ok(schreier_generator_words(&table))
}

fn dot(row: &[i64], v: &[BigRational]) -> BigRational {
    row.iter()
        .zip(v)
        .filter(|(c, _)| **c != 0)
        .fold(BigRational::zero(), |acc, (c, x)| acc + BigRational::from_integer(BigInt::from(*c)) * x)
}

/// Searches every sign character for a cocycle with infinite image. Sign
/// characters are enumerated from the trivial one upward, in binary order of
/// their coordinates in the mod-2 solution basis.
pub fn dinfty_witness(pres: &Presentation) -> Result<Option<DinftyWitness>> {
    let k = pres.generator_count();
    let mod2: Vec<Vec<u8>> = pres
        .exponent_matrix()
        .iter()
        .map(|r| r.iter().map(|x| x.rem_euclid(2) as u8).collect())
        .collect();
    let basis = nullspace_mod2(&mod2, k);
    check_cap("sign-character rank", basis.len(), SIGMA_RANK_CAP)?;
    for mask in 0u64..(1u64 << basis.len()) {
        let mut bits = vec![0u8; k];
        for (i, b) in basis.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for j in 0..k {
                    bits[j] ^= b[j];
                }
            }
        }
        let sigma: Vec<i8> = bits.iter().map(|&b| if b == 1 { -1 } else { 1 }).collect();
        let rows: Vec<Vec<BigRational>> = pres
            .relators()
            .iter()
            .map(|r| {
                cocycle_row(&sigma, r)
                    .into_iter()
                    .map(|c| BigRational::from_integer(BigInt::from(c)))
                    .collect()
            })
            .collect();
        let solutions = rational_nullspace(&rows, k);
        if solutions.is_empty() {
            continue;
        }
        let kernel = kernel_generators(&sigma)?;
        for sol in &solutions {
            for w in &kernel {
                if dot(&cocycle_row(&sigma, w), sol).is_zero() {
                    continue;
                }
                let lambda = primitive_integer_vector(sol);
                let witness = DinftyWitness {
                    certificate_value: evaluate(&sigma, &lambda, w).translation,
                    sigma,
                    lambda,
                    certificate: w.clone(),
                };
                verify_witness(pres, &witness)?;
                return Ok(Some(witness));
            }
        }
    }
    Ok(None)
}

/// Checks a witness by multiplying out in `D∞` and comparing with the
/// linear cocycle expansion: every relator maps to the identity, the images of
/// all products of two signed generators multiply correctly, and the
/// certificate lies in `ker σ` with non-zero translation.
pub fn verify_witness(pres: &Presentation, w: &DinftyWitness) -> Result<()> {
    let k = pres.generator_count();
    let fail = |m: String| Err(Error::CrossCheck(m));
    if w.sigma.len() != k || w.lambda.len() != k || w.sigma.iter().any(|&s| s != 1 && s != -1) {
        return fail("witness has the wrong shape".into());
    }
    let linear = |word: &[i32]| -> BigInt {
        cocycle_row(&w.sigma, word)
            .iter()
            .zip(&w.lambda)
            .map(|(c, l)| BigInt::from(*c) * l)
            .sum()
    };
    for r in pres.relators() {
        let e = evaluate(&w.sigma, &w.lambda, r);
        if e != DinftyElement::identity() || !linear(r).is_zero() {
            return fail(format!("relator {} is not killed", pres.format_word(r)));
        }
    }
    let letters: Vec<i32> = (1..=k as i32).flat_map(|g| [g, -g]).collect();
    for &u in &letters {
        for &v in &letters {
            let prod = evaluate(&w.sigma, &w.lambda, &[u]).mul(&evaluate(&w.sigma, &w.lambda, &[v]));
            let whole = evaluate(&w.sigma, &w.lambda, &[u, v]);
            if prod != whole || whole.translation != linear(&[u, v]) || whole.sign != sign_of_word(&w.sigma, &[u, v]) {
                return fail(format!("law fails on the pair ({u}, {v})"));
            }
        }
    }
    let c = evaluate(&w.sigma, &w.lambda, &w.certificate);
    if c.sign != 1 || c.translation.is_zero() || c.translation != w.certificate_value {
        return fail("certificate is not a non-trivial translation".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let d = Presentation::new(2, vec![vec![1, 1], vec![2, 2]]).unwrap();
        let w = dinfty_witness(&d).unwrap().unwrap();
        assert_eq!(w.sigma, vec![-1, -1]);
        assert!(!evaluate(&w.sigma, &w.lambda, &[1, 2]).translation.is_zero());

        let z = Presentation::new(1, vec![]).unwrap();
        let w = dinfty_witness(&z).unwrap().unwrap();
        assert_eq!(w.sigma, vec![1]);
        assert_eq!(w.lambda, vec![BigInt::from(1)]);

        let s3 = Presentation::new(2, vec![vec![1, 1], vec![2, 2], [1, 2].repeat(3)]).unwrap();
        assert_eq!(dinfty_witness(&s3).unwrap(), None);
    }

    #[test]
    fn finite_groups_have_none() {
        let cases = [
            Presentation::new(2, vec![vec![1, 1], vec![2, 2, 2], [1, 2].repeat(5)]).unwrap(),
            Presentation::new(2, vec![vec![1, 1], vec![2, 2], [1, 2].repeat(4)]).unwrap(),
            Presentation::new(1, vec![vec![1; 6]]).unwrap(),
        ];
        for p in cases {
            assert_eq!(dinfty_witness(&p).unwrap(), None);
        }
    }

    #[test]
    fn klein_bottle_group_maps_onto_dinfty() {
        // <a, b | a b a^-1 b> : b ↦ translation, a ↦ reflection-like sign
        let k = Presentation::new(2, vec![vec![1, 2, -1, 2]]).unwrap();
        let w = dinfty_witness(&k).unwrap().unwrap();
        verify_witness(&k, &w).unwrap();
    }

    #[test]
    fn tampered_witness_is_rejected() {
        let d = Presentation::new(2, vec![vec![1, 1], vec![2, 2]]).unwrap();
        let mut w = dinfty_witness(&d).unwrap().unwrap();
        w.sigma[0] = 1;
        assert!(verify_witness(&d, &w).is_err());
    }

    #[test]
    fn brute_force_small_images() {
        // oracle: search generator images with translations in [-2, 2]
        let cases = [
            (Presentation::new(2, vec![vec![1, 1], vec![2, 2]]).unwrap(), true),
            (Presentation::new(2, vec![vec![1, 2, -1, -2]]).unwrap(), true),
            (Presentation::new(2, vec![vec![1, 1], vec![2, 2], [1, 2].repeat(3)]).unwrap(), false),
            (Presentation::new(2, vec![vec![1, 1, 1], vec![2, 2]]).unwrap(), false),
            (Presentation::new(2, vec![vec![1, 1, 1]]).unwrap(), true),
            (Presentation::new(2, vec![vec![1, 1, 1], vec![2, 2], vec![1, 2, -1, -2]]).unwrap(), false),
        ];
        for (p, expected) in cases {
            let mut found = false;
            let vals: Vec<(i64, i8)> = (-2..=2).flat_map(|t| [(t, 1), (t, -1)]).collect();
            for a in &vals {
                for b in &vals {
                    let sigma = [a.1, b.1];
                    let lambda = [BigInt::from(a.0), BigInt::from(b.0)];
                    let ok = p.relators().iter().all(|r| evaluate(&sigma, &lambda, r) == DinftyElement::identity());
                    let infinite = kernel_generators(&sigma)
                        .unwrap()
                        .iter()
                        .any(|w| !evaluate(&sigma, &lambda, w).translation.is_zero());
                    found |= ok && infinite;
                }
            }
            assert_eq!(found, expected);
            assert_eq!(dinfty_witness(&p).unwrap().is_some(), expected);
        }
    }
}
