//! Periodic median quasi-lines, their isometries, the horomorphism as signed
//! translation length, and the induced morphism onto `D∞`.
//!
//! A quasi-line is `Z` copies of a period graph; vertex `r` of copy `k` is
//! joined to vertex `l` of copy `k+1` for each gluing pair `(r, l)`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{check_cap, Error, Result};
use crate::graphs::{FiniteGraph, GraphJson, Permutation, UNREACHABLE};
use crate::groups::DinftyElement;
use crate::median::certify_median;

pub const PERIOD_VERTEX_CAP: usize = 64;
pub const WINDOW_VERTEX_CAP: usize = 1 << 16;
/// Default word length for the exhaustive checks.
pub const DEFAULT_WORD_LENGTH: usize = 4;

#[derive(Clone, Debug)]
pub struct PeriodicQuasiLine {
    period: FiniteGraph,
    gluing: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiLineJson {
    pub period_graph: GraphJson,
    pub gluing: Vec<[usize; 2]>,
}

impl PeriodicQuasiLine {
    /// Validates the gluing and certifies windows of 3 to 5 periods as median
    /// graphs lying near a geodesic between their ends.
    pub fn new(period: FiniteGraph, gluing: Vec<(usize, usize)>) -> Result<Self> {
        let p = period.vertex_count();
        check_cap("period graph vertices", p, PERIOD_VERTEX_CAP)?;
        if gluing.is_empty() {
            return Err(Error::InvalidInput("gluing must be non-empty".into()));
        }
        let rights: BTreeSet<usize> = gluing.iter().map(|g| g.0).collect();
        let lefts: BTreeSet<usize> = gluing.iter().map(|g| g.1).collect();
        if rights.len() != gluing.len() || lefts.len() != gluing.len() || gluing.iter().any(|&(r, l)| r >= p || l >= p) {
            return Err(Error::InvalidInput("gluing must be a bijection between boundary sets".into()));
        }
        let ql = PeriodicQuasiLine { period, gluing };
        for copies in 3..=5 {
            let w = ql.window(0, copies as i64 - 1)?;
            if !w.is_connected() {
                return Err(Error::Precondition(format!("window of {copies} periods is disconnected")));
            }
            if !certify_median(&w)?.is_median() {
                return Err(Error::Precondition(format!("window of {copies} periods is not median")));
            }
            let far = w.bfs_distances(0);
            let end = (copies - 1) * p;
            let back = w.bfs_distances(end);
            let geodesic: Vec<usize> = (0..w.vertex_count()).filter(|&v| far[v] + back[v] == far[end]).collect();
            let reach = geodesic.iter().fold(vec![UNREACHABLE; w.vertex_count()], |mut acc, &v| {
                for (a, d) in acc.iter_mut().zip(w.bfs_distances(v)) {
                    *a = (*a).min(d);
                }
                acc
            });
            if reach.iter().any(|&d| d as usize > p) {
                return Err(Error::Precondition("window strays from its geodesics".into()));
            }
        }
        Ok(ql)
    }

    /// The line `Z` with unit period.
    pub fn unit_line() -> Self {
        PeriodicQuasiLine::new(FiniteGraph::new(1, []).expect("valid"), vec![(0, 0)]).expect("valid")
    }

    pub fn period_graph(&self) -> &FiniteGraph {
        &self.period
    }

    pub fn gluing(&self) -> &[(usize, usize)] {
        &self.gluing
    }

    /// Copies `lo..=hi`; vertex `v` of copy `k` has index `(k − lo)·p + v`.
    pub fn window(&self, lo: i64, hi: i64) -> Result<FiniteGraph> {
        let p = self.period.vertex_count();
        let copies = (hi - lo + 1).max(0) as usize;
        check_cap("quasi-line window vertices", copies * p, WINDOW_VERTEX_CAP)?;
        let mut edges = Vec::new();
        for c in 0..copies {
            for (u, v) in self.period.edges() {
                edges.push((c * p + u, c * p + v));
            }
            if c + 1 < copies {
                for &(r, l) in &self.gluing {
                    edges.push((c * p + r, (c + 1) * p + l));
                }
            }
        }
        FiniteGraph::new(copies * p, edges)
    }

    pub fn from_json(json: &QuasiLineJson) -> Result<Self> {
        PeriodicQuasiLine::new(FiniteGraph::from_json(&json.period_graph)?, json.gluing.iter().map(|g| (g[0], g[1])).collect())
    }

    pub fn to_json(&self) -> QuasiLineJson {
        QuasiLineJson {
            period_graph: self.period.to_json(),
            gluing: self.gluing.iter().map(|&(r, l)| [r, l]).collect(),
        }
    }
}

/// `(k, v) ↦ (±k + shift, internal(v))`, with `−` iff `reverses`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QLIsometry {
    pub shift: i64,
    pub reverses: bool,
    pub internal: Permutation,
}

impl QLIsometry {
    pub fn identity(period_len: usize) -> Self {
        QLIsometry {
            shift: 0,
            reverses: false,
            internal: Permutation::identity(period_len),
        }
    }

    pub fn apply(&self, (k, v): (i64, usize)) -> (i64, usize) {
        let k = if self.reverses { -k } else { k };
        (k + self.shift, self.internal.apply(v))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &QLIsometry) -> QLIsometry {
        let s = if self.reverses { -other.shift } else { other.shift };
        QLIsometry {
            shift: s + self.shift,
            reverses: self.reverses != other.reverses,
            internal: self.internal.compose(&other.internal),
        }
    }

    pub fn inverse(&self) -> QLIsometry {
        QLIsometry {
            shift: if self.reverses { self.shift } else { -self.shift },
            reverses: self.reverses,
            internal: self.internal.inverse(),
        }
    }

    /// Whether this is an automorphism of the quasi-line: the internal map
    /// preserves the period graph and carries gluing pairs to gluing pairs,
    /// swapped when the ends are exchanged.
    pub fn is_isometry_of(&self, ql: &PeriodicQuasiLine) -> bool {
        let pairs: BTreeSet<(usize, usize)> = ql.gluing.iter().copied().collect();
        self.internal.is_automorphism_of(&ql.period)
            && ql.gluing.iter().all(|&(r, l)| {
                let (a, b) = (self.internal.apply(r), self.internal.apply(l));
                pairs.contains(&if self.reverses { (b, a) } else { (a, b) })
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TranslationData {
    pub sigma: i8,
    /// Signed translation length towards the `+` end; zero when `sigma = −1`.
    pub h: i64,
}

/// `σ` and the horomorphism of an isometry. For `σ = +1` the translation
/// length is the per-iterate displacement `d(x, gᵐ⁺ᵒx) − d(x, gᵐx)` divided by
/// `o`, the order of the internal map, read off once it has stabilized.
pub fn translation_data(ql: &PeriodicQuasiLine, g: &QLIsometry) -> Result<TranslationData> {
    if !g.is_isometry_of(ql) {
        return Err(Error::InvalidInput("not an isometry of the quasi-line".into()));
    }
    if g.reverses {
        return Ok(TranslationData { sigma: -1, h: 0 });
    }
    if g.shift == 0 {
        return Ok(TranslationData { sigma: 1, h: 0 });
    }
    let p = ql.period.vertex_count() as i64;
    let o = g.internal.order() as i64;
    let m = o * (p + 1);
    let far = (m + 2 * o) * g.shift;
    let (lo, hi) = (far.min(0) - p - 1, far.max(0) + p + 1);
    let w = ql.window(lo, hi)?;
    let index = |(k, v): (i64, usize)| ((k - lo) * p) as usize + v;
    let dist = w.bfs_distances(index((0, 0)));
    let iterate = |n: i64| {
        let pt = (n * g.shift, g.internal.pow(n).apply(0));
        dist[index(pt)] as i64
    };
    let (d0, d1, d2) = (iterate(m), iterate(m + o), iterate(m + 2 * o));
    if d1 - d0 != d2 - d1 || (d1 - d0) % o != 0 || d1 == d0 {
        return Err(Error::CrossCheck(format!(
            "displacement of shift {} did not stabilize to a positive multiple of {o}",
            g.shift
        )));
    }
    Ok(TranslationData {
        sigma: 1,
        h: g.shift.signum() * (d1 - d0) / o,
    })
}

/// Words over the sorted generator labels: letter `i` (1-based) or `−i`.
pub type QLWord = Vec<i32>;

/// Freely reduced words of length at most `max_len`, shortest first, then by
/// letter order `1, −1, 2, −2, …`.
pub fn words_up_to(generators: usize, max_len: usize) -> Vec<QLWord> {
    let letters: Vec<i32> = (1..=generators as i32).flat_map(|g| [g, -g]).collect();
    let mut out = vec![Vec::new()];
    let mut layer: Vec<QLWord> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &x in &letters {
                if w.last() == Some(&-x) {
                    continue;
                }
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiLineMorphismReport {
    pub max_length: usize,
    pub words: usize,
    /// The chosen end-swapper, if any word of length `≤ max_length` swaps the ends.
    pub end_swapper: Option<String>,
    pub pairs_checked: usize,
    pub homomorphism_failures: usize,
    pub cocycle_failures: usize,
    pub conjugations_checked: usize,
    pub conjugation_failures: usize,
    pub additivity_failures: usize,
    pub h_end_swapper_squared: Option<i64>,
    pub image_infinite: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiLineMorphism {
    pub images: BTreeMap<String, DinftyElement>,
    pub report: QuasiLineMorphismReport,
}

struct WordEvaluator<'a> {
    ql: &'a PeriodicQuasiLine,
    gens: Vec<QLIsometry>,
    cache: BTreeMap<QLIsometry, TranslationData>,
}

impl WordEvaluator<'_> {
    fn isometry(&self, w: &[i32]) -> QLIsometry {
        w.iter()
            .fold(QLIsometry::identity(self.ql.period.vertex_count()), |acc, &x| {
                let g = &self.gens[x.unsigned_abs() as usize - 1];
                acc.compose(&if x > 0 { g.clone() } else { g.inverse() })
            })
    }

    fn data(&mut self, g: &QLIsometry) -> Result<TranslationData> {
        if let Some(d) = self.cache.get(g) {
            return Ok(*d);
        }
        let d = translation_data(self.ql, g)?;
        self.cache.insert(g.clone(), d);
        Ok(d)
    }

    /// `(λ(g), σ(g))` with `λ(g) = 𝔥(g g₀)` when `σ(g) = −1`.
    fn phi(&mut self, g: &QLIsometry, g0: Option<&QLIsometry>) -> Result<(i64, i8)> {
        let d = self.data(g)?;
        if d.sigma == 1 {
            return Ok((d.h, 1));
        }
        let g0 = g0.ok_or_else(|| Error::CrossCheck("end-swapper missing".into()))?;
        Ok((self.data(&g.compose(g0))?.h, -1))
    }
}

fn format_word(labels: &[&String], w: &[i32]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter()
        .map(|&x| {
            let l = labels[x.unsigned_abs() as usize - 1];
            if x > 0 {
                l.to_string()
            } else {
                format!("{l}^-1")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// The morphism `g ↦ (λ(g), σ(g))` onto `D∞` induced by an action on a
/// quasi-line, checked exhaustively on words of length at most `max_len`.
pub fn dinfty_from_quasiline_action(
    ql: &PeriodicQuasiLine,
    gens: &BTreeMap<String, QLIsometry>,
    max_len: usize,
) -> Result<QuasiLineMorphism> {
    for (label, g) in gens {
        if !g.is_isometry_of(ql) {
            return Err(Error::InvalidInput(format!("generator {label} is not an isometry")));
        }
    }
    let labels: Vec<&String> = gens.keys().collect();
    let mut ev = WordEvaluator {
        ql,
        gens: gens.values().cloned().collect(),
        cache: BTreeMap::new(),
    };
    let words = words_up_to(labels.len(), max_len);
    let isos: Vec<QLIsometry> = words.iter().map(|w| ev.isometry(w)).collect();
    let mut unbounded = false;
    for g in &isos {
        unbounded |= ev.data(g)?.h != 0;
    }
    if !unbounded {
        return Err(Error::Precondition(format!(
            "no word of length at most {max_len} translates, so orbits look bounded"
        )));
    }
    let swapper = isos.iter().position(|g| g.reverses);
    let g0 = swapper.map(|i| isos[i].clone());
    let g0 = g0.as_ref();

    let mut phis = Vec::with_capacity(isos.len());
    for g in &isos {
        phis.push(ev.phi(g, g0)?);
    }
    let mut report = QuasiLineMorphismReport {
        max_length: max_len,
        words: words.len(),
        end_swapper: swapper.map(|i| format_word(&labels, &words[i])),
        pairs_checked: 0,
        homomorphism_failures: 0,
        cocycle_failures: 0,
        conjugations_checked: 0,
        conjugation_failures: 0,
        additivity_failures: 0,
        h_end_swapper_squared: None,
        image_infinite: phis.iter().any(|p| p.0 != 0),
        holds: false,
    };
    for (i, g) in isos.iter().enumerate() {
        for (j, h) in isos.iter().enumerate() {
            report.pairs_checked += 1;
            let gh = g.compose(h);
            let (l, s) = ev.phi(&gh, g0)?;
            let (lg, sg) = phis[i];
            let (lh, sh) = phis[j];
            let prod = DinftyElement {
                translation: BigInt::from(lg),
                sign: sg,
            }
            .mul(&DinftyElement {
                translation: BigInt::from(lh),
                sign: sh,
            });
            if prod.translation != BigInt::from(l) || prod.sign != s {
                report.homomorphism_failures += 1;
            }
            if l != lg + sg as i64 * lh {
                report.cocycle_failures += 1;
            }
            if sg == 1 && sh == 1 && ev.data(&gh)?.h != ev.data(g)?.h + ev.data(h)?.h {
                report.additivity_failures += 1;
            }
        }
    }
    if let Some(g0) = g0 {
        report.h_end_swapper_squared = Some(ev.data(&g0.compose(g0))?.h);
        let g0inv = g0.inverse();
        for g in &isos {
            let d = ev.data(g)?;
            if d.sigma != 1 {
                continue;
            }
            report.conjugations_checked += 1;
            if ev.data(&g0.compose(g).compose(&g0inv))?.h != -d.h {
                report.conjugation_failures += 1;
            }
        }
    }
    report.holds = report.image_infinite
        && report.homomorphism_failures == 0
        && report.cocycle_failures == 0
        && report.conjugation_failures == 0
        && report.additivity_failures == 0
        && report.h_end_swapper_squared.unwrap_or(0) == 0;
    let mut images = BTreeMap::new();
    for (i, label) in labels.iter().enumerate() {
        let (l, s) = ev.phi(&isos[words.iter().position(|w| w == &vec![i as i32 + 1]).expect("generator word")], g0)?;
        images.insert(
            (*label).clone(),
            DinftyElement {
                translation: BigInt::from(l),
                sign: s,
            },
        );
    }
    Ok(QuasiLineMorphism { images, report })
}

/// The line with its two standard reflections `k ↦ −k` and `k ↦ 1 − k`.
pub fn standard_dinfty_action() -> (PeriodicQuasiLine, BTreeMap<String, QLIsometry>) {
    let reflection = |shift| QLIsometry {
        shift,
        reverses: true,
        internal: Permutation::identity(1),
    };
    let gens = BTreeMap::from([("r0".to_string(), reflection(0)), ("r1".to_string(), reflection(1))]);
    (PeriodicQuasiLine::unit_line(), gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift(s: i64) -> QLIsometry {
        QLIsometry {
            shift: s,
            reverses: false,
            internal: Permutation::identity(1),
        }
    }

    /// `Z × K₂`: copies of an edge glued straight across.
    fn ladder() -> PeriodicQuasiLine {
        PeriodicQuasiLine::new(FiniteGraph::new(2, [(0, 1)]).unwrap(), vec![(0, 0), (1, 1)]).unwrap()
    }

    #[test]
    fn translation_examples() {
        let line = PeriodicQuasiLine::unit_line();
        assert_eq!(translation_data(&line, &shift(0)).unwrap(), TranslationData { sigma: 1, h: 0 });
        assert_eq!(translation_data(&line, &shift(1)).unwrap(), TranslationData { sigma: 1, h: 1 });
        assert_eq!(translation_data(&line, &shift(-3)).unwrap(), TranslationData { sigma: 1, h: -3 });
        let (_, gens) = standard_dinfty_action();
        assert_eq!(translation_data(&line, &gens["r0"]).unwrap(), TranslationData { sigma: -1, h: 0 });
    }

    #[test]
    fn glide_on_the_ladder() {
        // swap the rails while advancing one period: displacement stabilizes at 1 per step
        let l = ladder();
        let glide = QLIsometry {
            shift: 1,
            reverses: false,
            internal: Permutation::new(vec![1, 0]).unwrap(),
        };
        assert_eq!(translation_data(&l, &glide).unwrap().h, 1);
        assert_eq!(translation_data(&l, &glide.compose(&glide)).unwrap().h, 2);
    }

    #[test]
    fn composition_matches_pointwise() {
        let a = QLIsometry {
            shift: 3,
            reverses: true,
            internal: Permutation::new(vec![1, 0]).unwrap(),
        };
        let b = QLIsometry {
            shift: -2,
            reverses: false,
            internal: Permutation::new(vec![1, 0]).unwrap(),
        };
        for k in -3..=3 {
            for v in 0..2 {
                assert_eq!(a.compose(&b).apply((k, v)), a.apply(b.apply((k, v))));
                assert_eq!(a.inverse().apply(a.apply((k, v))), (k, v));
            }
        }
    }

    #[test]
    fn standard_action_is_faithful_on_short_words() {
        let (line, gens) = standard_dinfty_action();
        let m = dinfty_from_quasiline_action(&line, &gens, 4).unwrap();
        assert!(m.report.holds, "{:?}", m.report);
        assert_eq!(m.report.end_swapper.as_deref(), Some("r0"));
        assert!(m.report.conjugations_checked > 0);
        assert_eq!(m.images["r0"], DinftyElement { translation: 0.into(), sign: -1 });
        assert_eq!(m.images["r1"], DinftyElement { translation: 1.into(), sign: -1 });
        // distinct isometries have distinct images
        let words = words_up_to(2, 4);
        let mut ev = WordEvaluator {
            ql: &line,
            gens: gens.values().cloned().collect(),
            cache: BTreeMap::new(),
        };
        let g0 = gens["r0"].clone();
        let mut seen: BTreeMap<(i64, i8), QLIsometry> = BTreeMap::new();
        for w in &words {
            let g = ev.isometry(w);
            let phi = ev.phi(&g, Some(&g0)).unwrap();
            if let Some(prev) = seen.insert(phi, g.clone()) {
                assert_eq!(prev, g);
            }
        }
    }

    #[test]
    fn pure_shift_lands_in_translations() {
        let line = PeriodicQuasiLine::unit_line();
        let gens = BTreeMap::from([("t".to_string(), shift(1))]);
        let m = dinfty_from_quasiline_action(&line, &gens, 4).unwrap();
        assert!(m.report.holds);
        assert_eq!(m.report.end_swapper, None);
        assert_eq!(m.images["t"], DinftyElement { translation: 1.into(), sign: 1 });
    }

    #[test]
    fn bounded_orbits_are_rejected() {
        let l = ladder();
        let flip = QLIsometry {
            shift: 0,
            reverses: false,
            internal: Permutation::new(vec![1, 0]).unwrap(),
        };
        let gens = BTreeMap::from([("f".to_string(), flip)]);
        assert!(matches!(dinfty_from_quasiline_action(&l, &gens, 4), Err(Error::Precondition(_))));
    }

    #[test]
    fn non_isometries_and_bad_lines_are_rejected() {
        let l = ladder();
        let skew = QLIsometry {
            shift: 0,
            reverses: true,
            internal: Permutation::new(vec![0, 1]).unwrap(),
        };
        assert!(skew.is_isometry_of(&l));
        let line = PeriodicQuasiLine::unit_line();
        assert!(translation_data(&line, &QLIsometry::identity(2)).is_err());
        // a chain of triangles is not median
        let tri = FiniteGraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(PeriodicQuasiLine::new(tri, vec![(2, 0)]).is_err());
        assert!(PeriodicQuasiLine::new(FiniteGraph::new(2, [(0, 1)]).unwrap(), vec![(0, 0), (1, 0)]).is_err());
    }

    #[test]
    fn mixed_action_on_ladder() {
        // a reflection and a glide on Z × K₂
        let l = ladder();
        let gens = BTreeMap::from([
            (
                "a".to_string(),
                QLIsometry {
                    shift: 1,
                    reverses: false,
                    internal: Permutation::new(vec![1, 0]).unwrap(),
                },
            ),
            (
                "b".to_string(),
                QLIsometry {
                    shift: 0,
                    reverses: true,
                    internal: Permutation::identity(2),
                },
            ),
        ]);
        let m = dinfty_from_quasiline_action(&l, &gens, 3).unwrap();
        assert!(m.report.holds, "{:?}", m.report);
        assert_eq!(m.report.h_end_swapper_squared, Some(0));
    }

    #[test]
    fn json_round_trip() {
        let l = ladder();
        let back = PeriodicQuasiLine::from_json(&l.to_json()).unwrap();
        assert_eq!(back.period_graph(), l.period_graph());
        assert_eq!(back.gluing(), l.gluing());
    }
}
