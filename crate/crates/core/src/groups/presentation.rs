use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A word in the generators: `+i` is generator `i` (1-based), `-i` its inverse.
pub type Word = Vec<i32>;

pub fn free_reduce(word: &[i32]) -> Word {
    let mut out: Word = Vec::with_capacity(word.len());
    for &x in word {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn inverse_word(word: &[i32]) -> Word {
    word.iter().rev().map(|&x| -x).collect()
}

/// `x^e` for a single generator.
pub fn power(x: i32, e: i32) -> Word {
    let letter = if e < 0 { -x } else { x };
    vec![letter; e.unsigned_abs() as usize]
}

pub fn concat(parts: &[&[i32]]) -> Word {
    free_reduce(&parts.concat())
}

/// `[u, v] = u v u⁻¹ v⁻¹`.
pub fn commutator(u: &[i32], v: &[i32]) -> Word {
    concat(&[u, v, &inverse_word(u), &inverse_word(v)])
}

/// A finitely presented group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generators: usize,
    relators: Vec<Word>,
    names: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationJson {
    pub generators: usize,
    pub relators: Vec<Word>,
}

impl Presentation {
    /// Relators are freely reduced; those reducing to the empty word are dropped.
    pub fn new(generators: usize, relators: Vec<Word>) -> Result<Self> {
        let names = (1..=generators).map(|i| format!("g{i}")).collect();
        Presentation::with_names(generators, relators, names)
    }

    pub fn with_names(generators: usize, relators: Vec<Word>, names: Vec<String>) -> Result<Self> {
        if names.len() != generators {
            return Err(Error::InvalidInput("one name per generator".into()));
        }
        let mut reduced = Vec::with_capacity(relators.len());
        for r in relators {
            for &x in &r {
                if x == 0 || x.unsigned_abs() as usize > generators {
                    return Err(Error::InvalidInput(format!("letter {x} out of range for {generators} generators")));
                }
            }
            let w = free_reduce(&r);
            if !w.is_empty() {
                reduced.push(w);
            }
        }
        Ok(Presentation {
            generators,
            relators: reduced,
            names,
        })
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// The same group with extra relators.
    pub fn with_relators(&self, extra: &[Word]) -> Result<Self> {
        let mut all = self.relators.clone();
        all.extend(extra.iter().cloned());
        Presentation::with_names(self.generators, all, self.names.clone())
    }

    /// Relabels generators: old generator `i` becomes `perm[i-1]`.
    pub fn permute_generators(&self, perm: &[usize]) -> Result<Self> {
        let map = |x: i32| -> i32 {
            let g = perm[x.unsigned_abs() as usize - 1] as i32;
            if x > 0 {
                g
            } else {
                -g
            }
        };
        let mut names = vec![String::new(); self.generators];
        for (i, n) in self.names.iter().enumerate() {
            names[perm[i] - 1] = n.clone();
        }
        Presentation::with_names(
            self.generators,
            self.relators.iter().map(|r| r.iter().map(|&x| map(x)).collect()).collect(),
            names,
        )
    }

    pub fn format_word(&self, w: &[i32]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .map(|&x| {
                let n = &self.names[x.unsigned_abs() as usize - 1];
                if x > 0 {
                    n.clone()
                } else {
                    format!("{n}^-1")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson {
            generators: self.generators,
            relators: self.relators.clone(),
        }
    }

    pub fn from_json(json: &PresentationJson) -> Result<Self> {
        if json.generators == 0 {
            return Err(Error::InvalidInput("need at least one generator".into()));
        }
        Presentation::new(json.generators, json.relators.clone())
    }

    /// Exponent-sum matrix: one row per relator, one column per generator.
    pub fn exponent_matrix(&self) -> Vec<Vec<i64>> {
        self.relators
            .iter()
            .map(|r| {
                let mut row = vec![0i64; self.generators];
                for &x in r {
                    row[x.unsigned_abs() as usize - 1] += x.signum() as i64;
                }
                row
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_validation() {
        assert_eq!(free_reduce(&[1, 2, -2, -1, 3]), vec![3]);
        assert_eq!(inverse_word(&[1, -2]), vec![2, -1]);
        assert_eq!(commutator(&[1], &[2]), vec![1, 2, -1, -2]);
        let p = Presentation::new(2, vec![vec![1, -1], vec![1, 1]]).unwrap();
        assert_eq!(p.relators(), &[vec![1, 1]]);
        assert!(Presentation::new(1, vec![vec![2]]).is_err());
        assert!(Presentation::new(1, vec![vec![0]]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"generators":2,"relators":[[1,1],[2,2],[1,2,1,2,1,2]]}"#;
        let p = Presentation::from_json(&serde_json::from_str(text).unwrap()).unwrap();
        assert_eq!(serde_json::to_string(&p.to_json()).unwrap(), text);
    }
}
