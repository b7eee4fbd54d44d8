//! Graph products of finite groups: normal forms, the complex of cosets of
//! clique subgroups, actions of virtual graph products and induced actions on
//! Cartesian powers.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_cap, Error, Result};
use crate::graphs::{cartesian_power, FiniteGraph, GraphJson, Permutation};
use crate::groups::schreier::{reidemeister_schreier, schreier_edges};
use crate::groups::{CosetTable, Presentation};
use crate::median::{expect_median, is_convex, ActionWord, GraphAction};

pub const GROUP_TABLE_CAP: usize = 64;
pub const BALL_CAP: usize = 50_000;
pub const COSET_COMPLEX_CAP: usize = 50_000;
pub const GROUP_ELEMENT_CAP: usize = 200_000;

/// A finite group on `0..order` with `0` the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    generators: Vec<usize>,
}

impl FiniteGroup {
    pub fn cyclic(q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidInput("vertex groups need order at least 2".into()));
        }
        check_cap("vertex group order", q, GROUP_TABLE_CAP)?;
        let table = (0..q).map(|a| (0..q).map(|b| (a + b) % q).collect()).collect();
        FiniteGroup::from_table(table)
    }

    /// Validates the identity, bijective rows and associativity.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n < 2 {
            return Err(Error::InvalidInput("vertex groups need order at least 2".into()));
        }
        check_cap("vertex group order", n, GROUP_TABLE_CAP)?;
        let bad = |m: &str| Err(Error::InvalidInput(format!("not a group table: {m}")));
        for (a, row) in table.iter().enumerate() {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return bad("rows must be permutations of 0..n");
            }
            if row[0] != a || table[0][a] != a {
                return bad("0 must be the identity");
            }
            if row.iter().collect::<BTreeSet<_>>().len() != n {
                return bad("rows must be permutations of 0..n");
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad("multiplication is not associative");
                    }
                }
            }
        }
        let inverse = (0..n).map(|a| (0..n).find(|&b| table[a][b] == 0).expect("Latin row has the identity")).collect();
        // greedy generating set, in element order
        let mut generators = Vec::new();
        let mut span: BTreeSet<usize> = BTreeSet::from([0]);
        for a in 1..n {
            if span.contains(&a) {
                continue;
            }
            generators.push(a);
            let mut queue: Vec<usize> = span.iter().copied().collect();
            while let Some(x) = queue.pop() {
                for &g in &generators {
                    let y = table[x][g];
                    if span.insert(y) {
                        queue.push(y);
                    }
                }
            }
        }
        Ok(FiniteGroup {
            table,
            inverse,
            generators,
        })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// Order of an element.
    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }
}

/// A graph `Γ` with a finite group on each vertex.
#[derive(Clone, Debug)]
pub struct GraphProductSpec {
    gamma: FiniteGraph,
    groups: Vec<FiniteGroup>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphProductJson {
    pub gamma: GraphJson,
    /// Cyclic order per vertex, keyed by the vertex index as a string.
    #[serde(default)]
    pub orders: BTreeMap<String, usize>,
    /// Explicit multiplication tables, overriding `orders`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tables: BTreeMap<String, Vec<Vec<usize>>>,
}

/// `(vertex, non-identity element)`.
pub type Syllable = (usize, usize);

/// A graphically reduced word in the lexicographically least shuffle order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NormalForm(pub Vec<Syllable>);

impl NormalForm {
    pub fn identity() -> Self {
        NormalForm(Vec::new())
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|(v, e)| format!("{v}:{e}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl GraphProductSpec {
    pub fn new(gamma: FiniteGraph, groups: Vec<FiniteGroup>) -> Result<Self> {
        if groups.len() != gamma.vertex_count() {
            return Err(Error::InvalidInput("one vertex group per vertex of the graph".into()));
        }
        Ok(GraphProductSpec { gamma, groups })
    }

    pub fn cyclic(gamma: FiniteGraph, orders: &[usize]) -> Result<Self> {
        let groups = orders.iter().map(|&q| FiniteGroup::cyclic(q)).collect::<Result<_>>()?;
        GraphProductSpec::new(gamma, groups)
    }

    /// Every vertex carries `Z/q`.
    pub fn uniform_cyclic(gamma: FiniteGraph, q: usize) -> Result<Self> {
        let n = gamma.vertex_count();
        GraphProductSpec::cyclic(gamma, &vec![q; n])
    }

    pub fn gamma(&self) -> &FiniteGraph {
        &self.gamma
    }

    pub fn group(&self, v: usize) -> &FiniteGroup {
        &self.groups[v]
    }

    pub fn is_complete(&self) -> bool {
        let n = self.gamma.vertex_count();
        self.gamma.edge_count() == n * n.saturating_sub(1) / 2
    }

    pub fn from_json(json: &GraphProductJson) -> Result<Self> {
        let gamma = FiniteGraph::from_json(&json.gamma)?;
        let mut groups = Vec::with_capacity(gamma.vertex_count());
        for v in 0..gamma.vertex_count() {
            let key = v.to_string();
            if let Some(t) = json.tables.get(&key) {
                groups.push(FiniteGroup::from_table(t.clone())?);
            } else if let Some(&q) = json.orders.get(&key) {
                groups.push(FiniteGroup::cyclic(q)?);
            } else {
                return Err(Error::InvalidInput(format!("no vertex group for vertex {v}")));
            }
        }
        GraphProductSpec::new(gamma, groups)
    }

    pub fn to_json(&self) -> GraphProductJson {
        let mut orders = BTreeMap::new();
        let mut tables = BTreeMap::new();
        for (v, g) in self.groups.iter().enumerate() {
            if FiniteGroup::cyclic(g.order()).map(|c| c == *g).unwrap_or(false) {
                orders.insert(v.to_string(), g.order());
            } else {
                tables.insert(v.to_string(), g.table.clone());
            }
        }
        GraphProductJson {
            gamma: self.gamma.to_json(),
            orders,
            tables,
        }
    }

    fn commute(&self, u: usize, v: usize) -> bool {
        self.gamma.has_edge(u, v)
    }

    /// Appends one syllable to a reduced word, merging with the last syllable
    /// on the same vertex that can be shuffled next to it.
    fn push(&self, word: &mut Vec<Syllable>, (v, e): Syllable) {
        if e == 0 {
            return;
        }
        let mut i = word.len();
        while i > 0 {
            i -= 1;
            let (w, f) = word[i];
            if w == v {
                let p = self.groups[v].mul(f, e);
                if p == 0 {
                    word.remove(i);
                } else {
                    word[i].1 = p;
                }
                return;
            }
            if !self.commute(w, v) {
                break;
            }
        }
        word.push((v, e));
    }

    /// Least shuffle of a reduced word: repeatedly take the smallest vertex
    /// among syllables with no non-commuting syllable before them.
    fn canonical(&self, word: &[Syllable]) -> NormalForm {
        let mut rest: Vec<Syllable> = word.to_vec();
        let mut out = Vec::with_capacity(rest.len());
        while !rest.is_empty() {
            let mut best: Option<usize> = None;
            for i in 0..rest.len() {
                let free = rest[..i].iter().all(|&(w, _)| self.commute(w, rest[i].0));
                if free && best.is_none_or(|b| rest[i].0 < rest[b].0) {
                    best = Some(i);
                }
            }
            out.push(rest.remove(best.expect("some syllable is always available")));
        }
        NormalForm(out)
    }

    pub fn normal_form(&self, word: &[Syllable]) -> Result<NormalForm> {
        let mut reduced = Vec::with_capacity(word.len());
        for &(v, e) in word {
            if v >= self.gamma.vertex_count() || e >= self.groups[v].order() {
                return Err(Error::InvalidInput(format!("syllable ({v}, {e}) out of range")));
            }
            self.push(&mut reduced, (v, e));
        }
        Ok(self.canonical(&reduced))
    }

    pub fn multiply(&self, a: &NormalForm, b: &NormalForm) -> NormalForm {
        let mut w = a.0.clone();
        for &s in &b.0 {
            self.push(&mut w, s);
        }
        self.canonical(&w)
    }

    pub fn inverse(&self, a: &NormalForm) -> NormalForm {
        let w: Vec<Syllable> = a.0.iter().rev().map(|&(v, e)| (v, self.groups[v].inverse(e))).collect();
        self.canonical(&w)
    }

    /// Canonical representative of `g⟨Λ⟩`: strip syllables on `Λ` that can be
    /// shuffled to the end, until none remain.
    pub fn coset_representative(&self, g: &NormalForm, lambda: &[usize]) -> NormalForm {
        let mut w = g.0.clone();
        loop {
            let pos = (0..w.len())
                .rev()
                .find(|&i| lambda.contains(&w[i].0) && w[i + 1..].iter().all(|&(x, _)| self.commute(x, w[i].0)));
            match pos {
                Some(i) => {
                    w.remove(i);
                }
                None => break,
            }
        }
        self.canonical(&w)
    }

    /// Elements of syllable length at most `radius`, sorted by length then form.
    pub fn ball(&self, radius: usize) -> Result<Vec<NormalForm>> {
        let mut layers: Vec<Vec<NormalForm>> = vec![vec![NormalForm::identity()]];
        let mut total = 1;
        for len in 1..=radius {
            let mut next = BTreeSet::new();
            for g in &layers[len - 1] {
                for v in 0..self.gamma.vertex_count() {
                    for e in 1..self.groups[v].order() {
                        let h = self.multiply(g, &NormalForm(vec![(v, e)]));
                        if h.len() == len {
                            next.insert(h);
                        }
                    }
                }
            }
            total += next.len();
            check_cap("graph product ball", total, BALL_CAP)?;
            if next.is_empty() {
                break;
            }
            layers.push(next.into_iter().collect());
        }
        Ok(layers.into_iter().flatten().collect())
    }

    /// Complete subgraphs of `Γ`, including the empty one, each sorted; ordered
    /// by size then lexicographically.
    pub fn complete_subgraphs(&self) -> Vec<Vec<usize>> {
        let n = self.gamma.vertex_count();
        let mut out = vec![Vec::new()];
        let mut frontier = vec![Vec::new()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for c in &frontier {
                let start = c.last().map_or(0, |&l: &usize| l + 1);
                for v in start..n {
                    if c.iter().all(|&u| self.gamma.has_edge(u, v)) {
                        let mut d = c.clone();
                        d.push(v);
                        next.push(d);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// Relabels the syllables of `g` by a symmetry of `Γ`.
    fn relabel(&self, h: &Permutation, g: &NormalForm) -> NormalForm {
        let w: Vec<Syllable> = g.0.iter().map(|&(v, e)| (h.apply(v), e)).collect();
        self.canonical(&w)
    }
}

/// A vertex of the coset complex: the coset `representative · ⟨subgroup⟩`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CosetLabel {
    pub representative: NormalForm,
    pub subgroup: Vec<usize>,
}

impl fmt::Display for CosetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.subgroup.iter().map(|v| v.to_string()).collect();
        write!(f, "{}<{}>", self.representative, s.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexRegime {
    /// The whole (finite) graph product; requires a complete `Γ`.
    Full,
    /// Cosets of representatives of syllable length at most the radius.
    Radius(usize),
}

/// The graph whose vertices are cosets `g⟨Λ⟩`, `Λ` complete, with an edge from
/// `g⟨Λ⟩` to `g⟨Λ ∪ {v}⟩`.
#[derive(Clone, Debug)]
pub struct CosetComplex {
    pub graph: FiniteGraph,
    pub labels: Vec<CosetLabel>,
    pub regime: ComplexRegime,
    index: BTreeMap<CosetLabel, usize>,
}

impl CosetComplex {
    pub fn vertex_of(&self, label: &CosetLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    fn require(&self, label: &CosetLabel) -> Result<usize> {
        self.vertex_of(label)
            .ok_or_else(|| Error::Truncation(format!("coset {label} lies outside the truncated complex")))
    }
}

pub fn build_coset_complex(spec: &GraphProductSpec, regime: ComplexRegime) -> Result<CosetComplex> {
    let radius = match regime {
        ComplexRegime::Full => {
            if !spec.is_complete() {
                return Err(Error::Unsupported("the full coset complex needs a complete graph".into()));
            }
            spec.gamma.vertex_count()
        }
        ComplexRegime::Radius(r) => r,
    };
    let elements = spec.ball(radius)?;
    let cliques = spec.complete_subgraphs();
    let mut index: BTreeMap<CosetLabel, usize> = BTreeMap::new();
    let mut labels = Vec::new();
    let mut edges = BTreeSet::new();
    let mut id = |label: CosetLabel, labels: &mut Vec<CosetLabel>| -> Result<usize> {
        if let Some(&i) = index.get(&label) {
            return Ok(i);
        }
        let i = labels.len();
        check_cap("coset complex vertices", i + 1, COSET_COMPLEX_CAP)?;
        index.insert(label.clone(), i);
        labels.push(label);
        Ok(i)
    };
    for g in &elements {
        for lambda in &cliques {
            let a = id(
                CosetLabel {
                    representative: spec.coset_representative(g, lambda),
                    subgroup: lambda.clone(),
                },
                &mut labels,
            )?;
            for v in 0..spec.gamma.vertex_count() {
                if lambda.contains(&v) || !lambda.iter().all(|&u| spec.gamma.has_edge(u, v)) {
                    continue;
                }
                let mut bigger = lambda.clone();
                bigger.push(v);
                bigger.sort_unstable();
                let b = id(
                    CosetLabel {
                        representative: spec.coset_representative(g, &bigger),
                        subgroup: bigger,
                    },
                    &mut labels,
                )?;
                edges.insert((a.min(b), a.max(b)));
            }
        }
    }
    let graph = FiniteGraph::new(labels.len(), edges)?;
    let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
    Ok(CosetComplex {
        graph,
        labels,
        regime,
        index,
    })
}

fn vertex_generator_label(u: usize, t: usize) -> String {
    format!("x{u}_{t}")
}

fn symmetry_label(i: usize) -> String {
    format!("h{i}")
}

fn check_symmetries(spec: &GraphProductSpec, h_gens: &[Permutation]) -> Result<()> {
    for (i, h) in h_gens.iter().enumerate() {
        if h.len() != spec.gamma.vertex_count() || !h.is_automorphism_of(&spec.gamma) {
            return Err(Error::ContractViolation(format!("symmetry h{i} is not an automorphism of the graph")));
        }
        for v in 0..h.len() {
            if spec.groups[h.apply(v)] != spec.groups[v] {
                return Err(Error::ContractViolation(format!(
                    "symmetry h{i} maps vertex {v} to a vertex with a different group"
                )));
            }
        }
    }
    Ok(())
}

fn left_multiply(spec: &GraphProductSpec, s: Syllable, l: &CosetLabel) -> CosetLabel {
    let g = spec.multiply(&NormalForm(vec![s]), &l.representative);
    CosetLabel {
        representative: spec.coset_representative(&g, &l.subgroup),
        subgroup: l.subgroup.clone(),
    }
}

/// The virtual graph product acting on the coset complex: vertex-group
/// generators by left multiplication (labels `x{u}_{t}`), and each symmetry by
/// relabelling syllables and subgroups (labels `h{i}`).
pub fn vgp_action(spec: &GraphProductSpec, h_gens: &[Permutation], complex: &CosetComplex) -> Result<GraphAction> {
    check_symmetries(spec, h_gens)?;
    let mut gens = BTreeMap::new();
    for u in 0..spec.gamma.vertex_count() {
        for &t in spec.groups[u].generators() {
            let images = complex
                .labels
                .iter()
                .map(|l| complex.require(&left_multiply(spec, (u, t), l)))
                .collect::<Result<Vec<_>>>()?;
            gens.insert(vertex_generator_label(u, t), Permutation::new(images)?);
        }
    }
    for (i, h) in h_gens.iter().enumerate() {
        let images = complex
            .labels
            .iter()
            .map(|l| {
                let g = spec.relabel(h, &l.representative);
                let mut sub: Vec<usize> = l.subgroup.iter().map(|&v| h.apply(v)).collect();
                sub.sort_unstable();
                complex.require(&CosetLabel {
                    representative: spec.coset_representative(&g, &sub),
                    subgroup: sub,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        gens.insert(symmetry_label(i), Permutation::new(images)?);
    }
    GraphAction::new(&complex.graph, gens)
}

/// Defining relations of the virtual graph product on the generators of
/// [`vgp_action`]: generator orders, commutation across edges, and the
/// conjugation action of each symmetry.
pub fn vgp_relators(spec: &GraphProductSpec, h_gens: &[Permutation]) -> Result<Vec<ActionWord>> {
    check_symmetries(spec, h_gens)?;
    let n = spec.gamma.vertex_count();
    let mut out: Vec<ActionWord> = Vec::new();
    for u in 0..n {
        for &t in spec.groups[u].generators() {
            out.push(vec![(vertex_generator_label(u, t), spec.groups[u].element_order(t) as i64)]);
        }
    }
    for (u, v) in spec.gamma.edges() {
        for &t in spec.groups[u].generators() {
            for &s in spec.groups[v].generators() {
                let (a, b) = (vertex_generator_label(u, t), vertex_generator_label(v, s));
                out.push(vec![(a.clone(), 1), (b.clone(), 1), (a, -1), (b, -1)]);
            }
        }
    }
    for (i, h) in h_gens.iter().enumerate() {
        let hl = symmetry_label(i);
        out.push(vec![(hl.clone(), h.order() as i64)]);
        for u in 0..n {
            for &t in spec.groups[u].generators() {
                out.push(vec![
                    (hl.clone(), 1),
                    (vertex_generator_label(u, t), 1),
                    (hl.clone(), -1),
                    (vertex_generator_label(h.apply(u), t), -1),
                ]);
            }
        }
    }
    Ok(out)
}

/// All elements of the permutation group generated by an action, sorted.
pub fn action_group_elements(action: &GraphAction, n: usize) -> Result<Vec<Permutation>> {
    let gens: Vec<&Permutation> = action.generators().values().collect();
    let mut seen = BTreeSet::from([Permutation::identity(n)]);
    let mut queue = VecDeque::from([Permutation::identity(n)]);
    while let Some(p) = queue.pop_front() {
        for g in &gens {
            let q = g.compose(&p);
            if !seen.contains(&q) {
                check_cap("permutation group order", seen.len() + 1, GROUP_ELEMENT_CAP)?;
                seen.insert(q.clone());
                queue.push_back(q);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Order of the stabilizer of each vertex in the generated permutation group.
pub fn stabilizer_orders(action: &GraphAction, n: usize) -> Result<Vec<usize>> {
    let elements = action_group_elements(action, n)?;
    Ok((0..n).map(|v| elements.iter().filter(|p| p.apply(v) == v).count()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixedSetFamily {
    /// `Fix(G_u)` within the region, one per vertex of `Γ`.
    pub sets: Vec<Vec<usize>>,
    /// Convexity in the complex; empty sets count as not convex.
    pub convex: Vec<bool>,
    /// `intersections[u][v]` iff the two fixed sets meet.
    pub intersections: Vec<Vec<bool>>,
}

/// Fixed sets of the vertex groups acting on the coset complex, restricted to a
/// region, with convexity flags and the pairwise-intersection matrix.
pub fn vertex_group_fixed_sets(spec: &GraphProductSpec, complex: &CosetComplex, region: &[usize]) -> Result<FixedSetFamily> {
    let mg = expect_median(&complex.graph, "coset complex")?;
    let n = spec.gamma.vertex_count();
    let mut sets = Vec::with_capacity(n);
    for u in 0..n {
        let mut set: Vec<usize> = region
            .iter()
            .copied()
            .filter(|&x| {
                let l = &complex.labels[x];
                spec.groups[u].generators().iter().all(|&t| left_multiply(spec, (u, t), l) == *l)
            })
            .collect();
        set.sort_unstable();
        set.dedup();
        sets.push(set);
    }
    let convex = sets.iter().map(|s| is_convex(&mg, s)).collect::<Result<_>>()?;
    let intersections = sets
        .iter()
        .map(|a| sets.iter().map(|b| a.iter().any(|x| b.binary_search(x).is_ok())).collect())
        .collect();
    Ok(FixedSetFamily {
        sets,
        convex,
        intersections,
    })
}

/// The action of `G` on `X^{[G:H]}` induced from an action of `H ≤ G` on `X`.
///
/// `h_action` must label its generators `s1, s2, …` after the Schreier
/// generators of `table` (the order of [`reidemeister_schreier`]). A point
/// `f` of the power is a function from cosets to `X`, and
/// `(g·f)(c) = h(c, g) · f(c·g)` where `t_c g = h(c, g) t_{cg}`. Coordinate `c`
/// is the `c`-th most significant digit, matching [`cartesian_power`].
pub fn induced_power_action(
    pres: &Presentation,
    table: &CosetTable,
    x: &FiniteGraph,
    h_action: &GraphAction,
) -> Result<(FiniteGraph, GraphAction)> {
    let sub = reidemeister_schreier(pres, table)?;
    let m = x.vertex_count();
    let k = table.coset_count();
    let power = cartesian_power(x, k)?;
    let s_perms: Vec<Permutation> = (1..=sub.presentation.generator_count())
        .map(|i| {
            h_action
                .generator(&format!("s{i}"))
                .cloned()
                .ok_or_else(|| Error::InvalidInput(format!("subgroup action lacks generator s{i}")))
        })
        .collect::<Result<_>>()?;
    if s_perms.iter().any(|p| p.len() != m) {
        return Err(Error::InvalidInput("subgroup action has the wrong degree".into()));
    }
    for r in sub.presentation.relators() {
        let p = evaluate_signed(&s_perms, r, m);
        if !p.is_identity() {
            return Err(Error::ContractViolation(format!(
                "subgroup action violates relator {}",
                sub.presentation.format_word(r)
            )));
        }
    }
    // h(c, g) as a permutation of X, from the Schreier generator on that edge
    let schreier_index: BTreeMap<(usize, usize), usize> =
        schreier_edges(table).into_iter().enumerate().map(|(i, (edge, _))| (edge, i)).collect();
    let mut gens = BTreeMap::new();
    let n = power.vertex_count();
    for g in 1..=table.generator_count() {
        let mut images = vec![0usize; n];
        for (p, image) in images.iter_mut().enumerate() {
            let f = digits(p, m, k);
            let mut out = vec![0usize; k];
            for c in 0..k {
                let y = f[table.act(c, g as i32)];
                out[c] = match schreier_index.get(&(c, g)) {
                    Some(&i) => s_perms[i].apply(y),
                    None => y,
                };
            }
            *image = undigits(&out, m);
        }
        gens.insert(format!("g{g}"), Permutation::new(images)?);
    }
    let action = GraphAction::new(&power, gens)?;
    for r in pres.relators() {
        let word: ActionWord = r.iter().map(|&x| (format!("g{}", x.unsigned_abs()), x.signum() as i64)).collect();
        if !action.evaluate(&word, n)?.is_identity() {
            return Err(Error::CrossCheck(format!("induced action violates relator {}", pres.format_word(r))));
        }
    }
    Ok((power, action))
}

fn evaluate_signed(perms: &[Permutation], w: &[i32], n: usize) -> Permutation {
    w.iter().fold(Permutation::identity(n), |acc, &x| {
        let p = &perms[x.unsigned_abs() as usize - 1];
        acc.compose(&if x > 0 { p.clone() } else { p.inverse() })
    })
}

fn digits(mut p: usize, m: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for c in (0..k).rev() {
        out[c] = p % m;
        p /= m;
    }
    out
}

fn undigits(d: &[usize], m: usize) -> usize {
    d.iter().fold(0, |acc, &x| acc * m + x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::*;
    use crate::groups::todd_coxeter::todd_coxeter;
    use crate::median::{certify_median, cubical_dimension, fixed_set, generator_words};

    fn k2(q: usize) -> GraphProductSpec {
        GraphProductSpec::uniform_cyclic(complete_graph(2), q).unwrap()
    }

    fn nf(spec: &GraphProductSpec, w: &[Syllable]) -> NormalForm {
        spec.normal_form(w).unwrap()
    }

    #[test]
    fn normal_form_examples() {
        let s = k2(2);
        assert_eq!(nf(&s, &[(0, 1), (1, 1), (0, 1)]), NormalForm(vec![(1, 1)]));
        let free = GraphProductSpec::uniform_cyclic(empty_graph(2), 2).unwrap();
        assert_eq!(nf(&free, &[(0, 1), (1, 1), (0, 1)]).len(), 3);
        assert_eq!(nf(&s, &[]), NormalForm::identity());
        // shuffle to the least order
        assert_eq!(nf(&s, &[(1, 1), (0, 1)]), NormalForm(vec![(0, 1), (1, 1)]));
    }

    #[test]
    fn group_table_validation() {
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::cyclic(1).is_err());
        // Klein four group needs two generators
        let v4 = FiniteGroup::from_table(vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2], vec![2, 3, 0, 1], vec![3, 2, 1, 0]]).unwrap();
        assert_eq!(v4.generators(), &[1, 2]);
        assert_eq!(FiniteGroup::cyclic(6).unwrap().element_order(2), 3);
    }

    /// Brute-force model of the product for complete graphs: a tuple of
    /// coordinates multiplied componentwise.
    fn direct_product_value(spec: &GraphProductSpec, w: &[Syllable]) -> Vec<usize> {
        let mut t = vec![0usize; spec.gamma().vertex_count()];
        for &(v, e) in w {
            t[v] = spec.group(v).mul(t[v], e);
        }
        t
    }

    fn words(spec: &GraphProductSpec, len: usize) -> Vec<Vec<Syllable>> {
        let letters: Vec<Syllable> = (0..spec.gamma().vertex_count())
            .flat_map(|v| (1..spec.group(v).order()).map(move |e| (v, e)))
            .collect();
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .iter()
                .flat_map(|w| {
                    letters.iter().map(move |&l| {
                        let mut x = w.clone();
                        x.push(l);
                        x
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn normal_form_matches_direct_product() {
        for spec in [k2(2), k2(3), GraphProductSpec::uniform_cyclic(complete_graph(3), 2).unwrap()] {
            let all: Vec<Vec<Syllable>> = (0..=4).flat_map(|l| words(&spec, l)).collect();
            let mut by_value: BTreeMap<Vec<usize>, NormalForm> = BTreeMap::new();
            for w in &all {
                let f = nf(&spec, w);
                let v = direct_product_value(&spec, w);
                if let Some(prev) = by_value.get(&v) {
                    assert_eq!(*prev, f);
                } else {
                    by_value.insert(v, f);
                }
            }
            let forms: BTreeSet<&NormalForm> = by_value.values().collect();
            assert_eq!(forms.len(), by_value.len());
        }
    }

    /// Free products of Z/2: reduced words are those without repeated letters;
    /// distinct reduced words are distinct elements.
    #[test]
    fn normal_form_matches_free_product() {
        let spec = GraphProductSpec::uniform_cyclic(empty_graph(3), 2).unwrap();
        for l in 0..=4 {
            for w in words(&spec, l) {
                let mut stack: Vec<usize> = Vec::new();
                for &(v, _) in &w {
                    if stack.last() == Some(&v) {
                        stack.pop();
                    } else {
                        stack.push(v);
                    }
                }
                let f = nf(&spec, &w);
                assert_eq!(f.0, stack.iter().map(|&v| (v, 1)).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn confluence_and_idempotence() {
        let mut g = empty_graph(4);
        g = FiniteGraph::new(4, g.edges().into_iter().chain([(0, 1), (1, 2), (2, 3)])).unwrap();
        let spec = GraphProductSpec::cyclic(g, &[2, 3, 2, 2]).unwrap();
        let ws: Vec<Vec<Syllable>> = (0..=3).flat_map(|l| words(&spec, l)).collect();
        for u in ws.iter().step_by(7) {
            for v in ws.iter().step_by(5) {
                let uv: Vec<Syllable> = u.iter().chain(v).copied().collect();
                let direct = nf(&spec, &uv);
                let (a, b) = (nf(&spec, u), nf(&spec, v));
                assert_eq!(direct, spec.multiply(&a, &b));
                assert_eq!(nf(&spec, &direct.0), direct);
                assert_eq!(spec.multiply(&a, &spec.inverse(&a)), NormalForm::identity());
            }
        }
    }

    #[test]
    fn coset_representatives_agree_with_quotient_test() {
        let g = FiniteGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        let spec = GraphProductSpec::cyclic(g, &[2, 3, 2]).unwrap();
        let ball = spec.ball(3).unwrap();
        for lambda in spec.complete_subgraphs() {
            for a in ball.iter().step_by(3) {
                for b in ball.iter().step_by(2) {
                    let q = spec.multiply(&spec.inverse(a), b);
                    let same = q.0.iter().all(|(v, _)| lambda.contains(v));
                    let keys = spec.coset_representative(a, &lambda) == spec.coset_representative(b, &lambda);
                    assert_eq!(same, keys, "{a} {b} {lambda:?}");
                }
            }
        }
    }

    #[test]
    fn coset_complex_examples() {
        let single = GraphProductSpec::uniform_cyclic(empty_graph(1), 2).unwrap();
        let c = build_coset_complex(&single, ComplexRegime::Full).unwrap();
        assert!(graph_isomorphic(&c.graph, &path_graph(3)).unwrap().is_some());

        let c = build_coset_complex(&k2(2), ComplexRegime::Full).unwrap();
        assert_eq!(c.graph.vertex_count(), 9);
        assert!(graph_isomorphic(&c.graph, &grid_graph(3, 3)).unwrap().is_some());
        let mg = certify_median(&c.graph).unwrap().median().unwrap();
        assert_eq!(cubical_dimension(&mg), 2);

        let free = GraphProductSpec::uniform_cyclic(empty_graph(2), 2).unwrap();
        let c = build_coset_complex(&free, ComplexRegime::Radius(2)).unwrap();
        assert!(graph_isomorphic(&c.graph, &path_graph(11)).unwrap().is_some());
        assert!(build_coset_complex(&free, ComplexRegime::Full).is_err());
    }

    #[test]
    fn full_complex_counts_and_dimension() {
        // vertices = Σ_Λ ∏_{u∉Λ} q_u = ∏ (q_u + 1) for complete Γ
        for (n, q) in [(1, 3), (2, 3), (3, 2), (2, 4)] {
            let spec = GraphProductSpec::uniform_cyclic(complete_graph(n), q).unwrap();
            let c = build_coset_complex(&spec, ComplexRegime::Full).unwrap();
            assert_eq!(c.graph.vertex_count(), (q + 1).pow(n as u32));
            let mg = certify_median(&c.graph).unwrap().median().unwrap();
            assert_eq!(cubical_dimension(&mg), n);
        }
    }

    fn swap() -> Permutation {
        Permutation::new(vec![1, 0]).unwrap()
    }

    #[test]
    fn vgp_examples() {
        let spec = k2(2);
        let c = build_coset_complex(&spec, ComplexRegime::Full).unwrap();
        let action = vgp_action(&spec, &[swap()], &c).unwrap();
        let base = c
            .vertex_of(&CosetLabel {
                representative: NormalForm::identity(),
                subgroup: vec![],
            })
            .unwrap();
        assert_eq!(stabilizer_orders(&action, 9).unwrap()[base], 2);
        assert_eq!(action.orbits(9).len(), 3);
        for r in vgp_relators(&spec, &[swap()]).unwrap() {
            assert!(action.evaluate(&r, 9).unwrap().is_identity());
        }
        // trivial symmetry group: free on the cosets of the trivial subgroup
        let plain = vgp_action(&spec, &[], &c).unwrap();
        let elements = action_group_elements(&plain, 9).unwrap();
        assert_eq!(elements.len(), 4);
        for l in c.labels.iter().filter(|l| l.subgroup.is_empty()) {
            let v = c.vertex_of(l).unwrap();
            assert_eq!(elements.iter().filter(|p| p.apply(v) == v).count(), 1);
        }
    }

    #[test]
    fn stabilizer_orders_match_coset_structure() {
        // Stab(g⟨Λ⟩) is conjugate to ⟨Λ⟩ ⋊ Stab_H(Λ); on the cosets of the
        // trivial subgroup it is conjugate to the symmetry group itself
        for q in [2, 3] {
            let spec = k2(q);
            let c = build_coset_complex(&spec, ComplexRegime::Full).unwrap();
            let action = vgp_action(&spec, &[swap()], &c).unwrap();
            let n = c.graph.vertex_count();
            assert_eq!(action_group_elements(&action, n).unwrap().len(), 2 * q * q);
            let orders = stabilizer_orders(&action, n).unwrap();
            for (v, l) in c.labels.iter().enumerate() {
                let expected = match l.subgroup.len() {
                    0 => 2,
                    1 => q,
                    _ => 2 * q * q,
                };
                assert_eq!(orders[v], expected, "{l}");
            }
        }
    }

    #[test]
    fn truncation_is_explicit() {
        let free = GraphProductSpec::uniform_cyclic(empty_graph(2), 2).unwrap();
        let c = build_coset_complex(&free, ComplexRegime::Radius(1)).unwrap();
        assert!(matches!(vgp_action(&free, &[], &c), Err(Error::Truncation(_))));
    }

    #[test]
    fn fixed_set_examples() {
        let spec = k2(2);
        let c = build_coset_complex(&spec, ComplexRegime::Full).unwrap();
        let all: Vec<usize> = (0..9).collect();
        let fam = vertex_group_fixed_sets(&spec, &c, &all).unwrap();
        for u in 0..2 {
            assert_eq!(fam.sets[u].len(), 3);
            assert!(fam.convex[u]);
            for &v in &fam.sets[u] {
                assert!(c.labels[v].subgroup.contains(&u));
            }
        }
        assert!(fam.intersections[0][1]);
        // non-adjacent vertex groups fix disjoint sets in the free product
        let free = GraphProductSpec::uniform_cyclic(empty_graph(2), 2).unwrap();
        let c = build_coset_complex(&free, ComplexRegime::Radius(3)).unwrap();
        let fam = vertex_group_fixed_sets(&free, &c, &(0..c.graph.vertex_count()).collect::<Vec<_>>()).unwrap();
        assert!(!fam.intersections[0][1]);
    }

    #[test]
    fn induced_action_examples() {
        // Z/4 with H = <g²> acting on K₂ by the swap
        let z4 = Presentation::new(1, vec![vec![1, 1, 1, 1]]).unwrap();
        let table = todd_coxeter(&z4, &[vec![1, 1]], 100).unwrap();
        let k2g = complete_graph(2);
        let h = GraphAction::new(&k2g, BTreeMap::from([("s1".to_string(), swap())])).unwrap();
        let (q2, action) = induced_power_action(&z4, &table, &k2g, &h).unwrap();
        assert!(graph_isomorphic(&q2, &cycle_graph(4)).unwrap().is_some());
        let mg = certify_median(&q2).unwrap().median().unwrap();
        assert!(fixed_set(&mg, &action, &generator_words(&action)).unwrap().is_empty());
        assert_eq!(action.generator("g1").unwrap().order(), 4);

        // index one: the same action
        let whole = todd_coxeter(&z4, &[vec![1]], 100).unwrap();
        let s = crate::groups::schreier::reidemeister_schreier(&z4, &whole).unwrap();
        assert_eq!(s.presentation.generator_count(), 1);
        let r = GraphAction::new(&k2g, BTreeMap::from([("s1".to_string(), swap())])).unwrap();
        let (x, a) = induced_power_action(&z4, &whole, &k2g, &r).unwrap();
        assert_eq!(x.vertex_count(), 2);
        assert_eq!(a.generator("g1").unwrap(), &swap());
    }

    #[test]
    fn trivial_subgroup_action_permutes_coordinates() {
        let z3 = Presentation::new(1, vec![vec![1, 1, 1]]).unwrap();
        let table = todd_coxeter(&z3, &[], 100).unwrap();
        let x = path_graph(3);
        let s = crate::groups::schreier::reidemeister_schreier(&z3, &table).unwrap();
        let gens = (1..=s.presentation.generator_count())
            .map(|i| (format!("s{i}"), Permutation::identity(3)))
            .collect();
        let h = GraphAction::new(&x, gens).unwrap();
        let (_, a) = induced_power_action(&z3, &table, &x, &h).unwrap();
        let g = a.generator("g1").unwrap();
        for p in 0..27 {
            let d = digits(p, 3, 3);
            let e = digits(g.apply(p), 3, 3);
            let mut sorted_d = d.clone();
            let mut sorted_e = e.clone();
            sorted_d.sort_unstable();
            sorted_e.sort_unstable();
            assert_eq!(sorted_d, sorted_e);
        }
    }
}
