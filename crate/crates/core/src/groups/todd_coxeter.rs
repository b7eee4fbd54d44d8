//! Coset tables and HLT-style coset enumeration.

use std::collections::VecDeque;

use serde::Serialize;

use super::presentation::{Presentation, Word};
use crate::error::{Error, Result};

const UNDEF: usize = usize::MAX;

/// Column of a signed generator: `+i -> 2(i-1)`, `-i -> 2(i-1)+1`.
pub(crate) fn column(x: i32) -> usize {
    let g = x.unsigned_abs() as usize - 1;
    if x > 0 {
        2 * g
    } else {
        2 * g + 1
    }
}

pub(crate) fn inverse_column(c: usize) -> usize {
    c ^ 1
}

pub(crate) fn letter_of_column(c: usize) -> i32 {
    let g = (c / 2 + 1) as i32;
    if c.is_multiple_of(2) {
        g
    } else {
        -g
    }
}

/// A complete coset table; coset 0 is the subgroup itself.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CosetTable {
    generators: usize,
    /// `rows[c][column(x)]` is the coset `c·x`.
    rows: Vec<Vec<usize>>,
}

impl CosetTable {
    /// Validates completeness and that each generator acts bijectively.
    pub fn from_rows(generators: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("a coset table needs at least one coset".into()));
        }
        for (c, row) in rows.iter().enumerate() {
            if row.len() != 2 * generators {
                return Err(Error::InvalidInput("row width must be twice the generator count".into()));
            }
            for (col, &d) in row.iter().enumerate() {
                if d >= n || rows[d][inverse_column(col)] != c {
                    return Err(Error::InvalidInput(format!("entry ({c},{col}) is not invertible")));
                }
            }
        }
        Ok(CosetTable { generators, rows })
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    /// Index of the subgroup.
    pub fn coset_count(&self) -> usize {
        self.rows.len()
    }

    pub fn act(&self, coset: usize, x: i32) -> usize {
        self.rows[coset][column(x)]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn trace(&self, coset: usize, word: &[i32]) -> usize {
        word.iter().fold(coset, |c, &x| self.act(c, x))
    }

    /// Whether every relator traced from every coset returns to it.
    pub fn is_closed_under(&self, relators: &[Word]) -> bool {
        (0..self.coset_count()).all(|c| relators.iter().all(|r| self.trace(c, r) == c))
    }

    /// Renumbers cosets in order of first appearance in a breadth-first scan
    /// from `base`, scanning columns in order.
    pub fn standardized_from(&self, base: usize) -> CosetTable {
        let n = self.coset_count();
        let mut new_of = vec![UNDEF; n];
        let mut order = Vec::with_capacity(n);
        new_of[base] = 0;
        order.push(base);
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            for &d in &self.rows[c] {
                if new_of[d] == UNDEF {
                    new_of[d] = order.len();
                    order.push(d);
                }
            }
            i += 1;
        }
        let rows = order
            .iter()
            .map(|&c| self.rows[c].iter().map(|&d| new_of[d]).collect())
            .collect();
        CosetTable {
            generators: self.generators,
            rows,
        }
    }

    pub fn is_standard(&self) -> bool {
        self.standardized_from(0) == *self
    }

    /// Permutation induced on cosets by each generator.
    pub fn generator_permutations(&self) -> Vec<Vec<usize>> {
        (1..=self.generators as i32)
            .map(|g| (0..self.coset_count()).map(|c| self.act(c, g)).collect())
            .collect()
    }
}

struct Enumerator<'a> {
    pres: &'a Presentation,
    table: Vec<Vec<usize>>,
    parent: Vec<usize>,
    live: usize,
    limit: usize,
    hard_limit: usize,
}

impl<'a> Enumerator<'a> {
    fn new(pres: &'a Presentation, limit: usize) -> Self {
        Enumerator {
            pres,
            table: vec![vec![UNDEF; 2 * pres.generator_count()]],
            parent: vec![0],
            live: 1,
            limit,
            hard_limit: limit.saturating_mul(64),
        }
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = c;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, col: usize) -> Result<()> {
        if self.live >= self.limit || self.table.len() >= self.hard_limit {
            return Err(Error::CosetLimit { limit: self.limit });
        }
        let d = self.table.len();
        self.table.push(vec![UNDEF; 2 * self.pres.generator_count()]);
        self.parent.push(d);
        self.table[c][col] = d;
        self.table[d][inverse_column(col)] = c;
        self.live += 1;
        Ok(())
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut Vec<usize>) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (keep, drop) = (a.min(b), a.max(b));
        self.parent[drop] = keep;
        self.live -= 1;
        queue.push(drop);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for col in 0..self.table[e].len() {
                let f = self.table[e][col];
                if f == UNDEF {
                    continue;
                }
                let icol = inverse_column(col);
                if self.table[f][icol] == e {
                    self.table[f][icol] = UNDEF;
                }
                let (e1, f1) = (self.rep(e), self.rep(f));
                if self.table[e1][col] != UNDEF {
                    let t = self.table[e1][col];
                    self.merge(f1, t, &mut queue);
                } else if self.table[f1][icol] != UNDEF {
                    let t = self.table[f1][icol];
                    self.merge(e1, t, &mut queue);
                } else {
                    self.table[e1][col] = f1;
                    self.table[f1][icol] = e1;
                }
            }
        }
    }

    /// Scans `word` from coset `c`, defining new cosets to complete the scan.
    fn scan_and_fill(&mut self, c: usize, word: &[i32]) -> Result<()> {
        if word.is_empty() {
            return Ok(());
        }
        let cols: Vec<usize> = word.iter().map(|&x| column(x)).collect();
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0isize, cols.len() as isize - 1);
        loop {
            while i <= j && self.table[f][cols[i as usize]] != UNDEF {
                f = self.table[f][cols[i as usize]];
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i && self.table[b][inverse_column(cols[j as usize])] != UNDEF {
                b = self.table[b][inverse_column(cols[j as usize])];
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            if i == j {
                let col = cols[i as usize];
                self.table[f][col] = b;
                self.table[b][inverse_column(col)] = f;
                return Ok(());
            }
            self.define(f, cols[i as usize])?;
        }
    }

    fn run(mut self, subgroup: &[Word]) -> Result<CosetTable> {
        for w in subgroup {
            self.scan_and_fill(0, w)?;
        }
        let relators: Vec<Word> = self.pres.relators().to_vec();
        let mut c = 0;
        while c < self.table.len() {
            for r in &relators {
                if !self.is_live(c) {
                    break;
                }
                self.scan_and_fill(c, r)?;
            }
            if self.is_live(c) {
                for col in 0..self.table[c].len() {
                    if self.table[c][col] == UNDEF {
                        self.define(c, col)?;
                    }
                }
            }
            c += 1;
        }
        // compact the live cosets, then standardize
        let live: Vec<usize> = (0..self.table.len()).filter(|&c| self.is_live(c)).collect();
        let mut new_of = vec![UNDEF; self.table.len()];
        for (i, &c) in live.iter().enumerate() {
            new_of[c] = i;
        }
        let mut rows = Vec::with_capacity(live.len());
        for &c in &live {
            let row: Vec<usize> = (0..self.table[c].len())
                .map(|col| {
                    let d = self.table[c][col];
                    new_of[self.rep(d)]
                })
                .collect();
            rows.push(row);
        }
        let table = CosetTable::from_rows(self.pres.generator_count(), rows)
            .map_err(|e| Error::CrossCheck(format!("enumeration produced an invalid table: {e}")))?;
        Ok(table.standardized_from(0))
    }
}

/// Enumerates the cosets of the subgroup generated by `subgroup_gens`. Exceeding
/// `coset_limit` live cosets is reported as [`Error::CosetLimit`], which says
/// nothing about whether the index is finite.
pub fn todd_coxeter(pres: &Presentation, subgroup_gens: &[Word], coset_limit: usize) -> Result<CosetTable> {
    let table = Enumerator::new(pres, coset_limit.max(1)).run(subgroup_gens)?;
    if !table.is_closed_under(pres.relators()) {
        return Err(Error::CrossCheck("enumerated table is not closed under the relators".into()));
    }
    for w in subgroup_gens {
        if table.trace(0, w) != 0 {
            return Err(Error::CrossCheck("subgroup generator does not fix the base coset".into()));
        }
    }
    Ok(table)
}

/// Order of the presented group when it is finite within the limit.
pub fn group_order(pres: &Presentation, coset_limit: usize) -> Result<usize> {
    Ok(todd_coxeter(pres, &[], coset_limit)?.coset_count())
}

/// Spanning tree of the coset graph from coset 0: for each coset, a shortest word
/// reaching it (breadth-first, columns in order).
pub fn transversal(table: &CosetTable) -> Vec<Word> {
    let n = table.coset_count();
    let mut words: Vec<Option<Word>> = vec![None; n];
    words[0] = Some(Vec::new());
    let mut queue = VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for col in 0..2 * table.generator_count() {
            let d = table.rows()[c][col];
            if words[d].is_none() {
                let mut w = words[c].clone().unwrap();
                w.push(letter_of_column(col));
                words[d] = Some(w);
                queue.push_back(d);
            }
        }
    }
    words.into_iter().map(|w| w.expect("coset graph is connected")).collect()
}
