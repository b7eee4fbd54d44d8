//! Balls in the quasi-median Cayley graph of a graph product, their
//! clique/prism/hyperplane structure, and cubulation from a system of
//! wallspaces on the cliques.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{check_cap, Error, Result};
use crate::graphprod::{GraphProductSpec, NormalForm};
use crate::graphs::{components_avoiding, FiniteGraph};
use crate::median::{edge_classes, edge_key, gate_unchecked};
use crate::wallspace::{cubulate, Cubulation, Wallspace};

/// Largest `|V(Γ)|` for which prisms are enumerated.
pub const PRISM_GAMMA_CAP: usize = 12;

/// The ball of the given syllable radius around the identity.
#[derive(Clone, Debug)]
pub struct QMBall {
    pub graph: FiniteGraph,
    pub labels: Vec<NormalForm>,
    pub center: usize,
    pub radius: usize,
    index: BTreeMap<NormalForm, usize>,
}

impl QMBall {
    pub fn vertex_of(&self, g: &NormalForm) -> Option<usize> {
        self.index.get(g).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QMHyperplane {
    pub edges: Vec<(usize, usize)>,
    /// Maximal cliques whose edges lie in the class.
    pub cliques: Vec<Vec<usize>>,
    /// Components after deleting the class.
    pub sectors: Vec<Vec<usize>>,
}

/// Edge classes under "in a common 3-cycle" and "opposite in a 4-cycle".
pub fn qm_hyperplanes(g: &FiniteGraph) -> Result<Vec<QMHyperplane>> {
    check_cap("quasi-median graph vertices", g.vertex_count(), crate::median::MEDIAN_VERTEX_CAP)?;
    let cliques: Vec<Vec<usize>> = g.maximal_cliques().into_iter().filter(|c| c.len() >= 2).collect();
    let mut out = Vec::new();
    for class in edge_classes(g, true) {
        let set: BTreeSet<(usize, usize)> = class.iter().copied().collect();
        let mine = cliques
            .iter()
            .filter(|c| set.contains(&edge_key(c[0], c[1])))
            .cloned()
            .collect();
        let sectors = components_avoiding(g, |u, v| set.contains(&edge_key(u, v)));
        out.push(QMHyperplane {
            edges: class,
            cliques: mine,
            sectors,
        });
    }
    Ok(out)
}

/// Vertices are normal forms of syllable length at most `radius`; `g ~ g·s`
/// for every non-trivial vertex-group element `s` when both lie in the ball.
pub fn build_qm_ball(spec: &GraphProductSpec, radius: usize) -> Result<QMBall> {
    let labels = spec.ball(radius)?;
    let index: BTreeMap<NormalForm, usize> = labels.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
    let mut edges = BTreeSet::new();
    for (i, g) in labels.iter().enumerate() {
        for v in 0..spec.gamma().vertex_count() {
            for e in 1..spec.group(v).order() {
                let h = spec.multiply(g, &NormalForm(vec![(v, e)]));
                if let Some(&j) = index.get(&h) {
                    edges.insert(edge_key(i, j));
                }
            }
        }
    }
    Ok(QMBall {
        graph: FiniteGraph::new(labels.len(), edges)?,
        labels,
        center: 0,
        radius,
        index,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CosetStructureReport {
    /// Vertices whose cliques and prisms were examined.
    pub checked: usize,
    pub cliques_checked: usize,
    pub prisms_checked: usize,
    pub violations: Vec<String>,
    pub margin: usize,
}

/// The coset `g⟨Λ⟩` as ball vertices, or `None` if part of it leaves the ball.
fn coset_vertices(spec: &GraphProductSpec, ball: &QMBall, g: &NormalForm, lambda: &[usize]) -> Option<BTreeSet<usize>> {
    let mut elems = vec![NormalForm::identity()];
    for &u in lambda {
        let mut next = Vec::new();
        for h in &elems {
            for e in 0..spec.group(u).order() {
                next.push(spec.multiply(h, &NormalForm(vec![(u, e)])));
            }
        }
        elems = next;
    }
    elems.iter().map(|h| ball.vertex_of(&spec.multiply(g, h))).collect()
}

/// Closure of a set under completing squares: if `b, c ∈ P` are neighbours of
/// `a ∈ P` with `b ≁ c`, every common neighbour of `b, c` other than `a` joins.
fn square_closure(g: &FiniteGraph, seed: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut p = seed.clone();
    loop {
        let mut add = BTreeSet::new();
        for &a in &p {
            let nb: Vec<usize> = g.neighbors(a).iter().copied().filter(|x| p.contains(x)).collect();
            for (i, &b) in nb.iter().enumerate() {
                for &c in &nb[i + 1..] {
                    if g.has_edge(b, c) {
                        continue;
                    }
                    for &w in g.neighbors(b) {
                        if w != a && g.has_edge(w, c) && !p.contains(&w) {
                            add.insert(w);
                        }
                    }
                }
            }
        }
        if add.is_empty() {
            return p;
        }
        p.extend(add);
    }
}

/// Two cliques through `x` span a square.
fn transverse(g: &FiniteGraph, x: usize, c1: &[usize], c2: &[usize]) -> bool {
    c1.iter().filter(|&&b| b != x).any(|&b| {
        c2.iter()
            .filter(|&&c| c != x)
            .any(|&c| g.neighbors(b).iter().any(|&w| w != x && g.has_edge(w, c)))
    })
}

/// Checks, for every vertex within `radius − margin` of the centre, that each
/// maximal clique through it is a coset `gG_u` and that each prism spanned by
/// pairwise transverse cliques through it is a coset `g⟨Λ⟩` with `Λ` complete.
/// Such a vertex also lies in exactly one clique per vertex of `Γ`.
pub fn verify_coset_structure(spec: &GraphProductSpec, ball: &QMBall, margin: usize) -> Result<CosetStructureReport> {
    if margin > ball.radius {
        return Err(Error::Precondition(format!("margin {margin} exceeds the radius {}", ball.radius)));
    }
    let n = spec.gamma().vertex_count();
    check_cap("prism check graph size", n, PRISM_GAMMA_CAP)?;
    let g = &ball.graph;
    let cliques: Vec<Vec<usize>> = g.maximal_cliques().into_iter().filter(|c| c.len() >= 2).collect();
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for (i, c) in cliques.iter().enumerate() {
        for &v in c {
            through[v].push(i);
        }
    }
    let mut report = CosetStructureReport {
        checked: 0,
        cliques_checked: 0,
        prisms_checked: 0,
        violations: Vec::new(),
        margin,
    };
    if ball.radius == 0 {
        return Ok(report);
    }
    for x in 0..g.vertex_count() {
        let gx = &ball.labels[x];
        if gx.len() > ball.radius - margin {
            continue;
        }
        report.checked += 1;
        if through[x].len() != n {
            report
                .violations
                .push(format!("{} maximal cliques through {gx}, expected {n}", through[x].len()));
        }
        // the vertex of Γ each clique belongs to, if it is a coset
        let mut clique_vertex: Vec<Option<usize>> = Vec::new();
        for &ci in &through[x] {
            report.cliques_checked += 1;
            let members: BTreeSet<usize> = cliques[ci].iter().copied().collect();
            let found = (0..n).find(|&u| coset_vertices(spec, ball, gx, &[u]).as_ref() == Some(&members));
            if found.is_none() {
                report.violations.push(format!("clique {:?} through {gx} is not a coset of a vertex group", cliques[ci]));
            }
            clique_vertex.push(found);
        }
        let k = through[x].len();
        if k > PRISM_GAMMA_CAP {
            report.violations.push(format!("{k} cliques through {gx}"));
            continue;
        }
        for mask in 1u32..(1 << k) {
            let chosen: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
            if chosen.len() < 2 {
                continue;
            }
            let pairwise = chosen.iter().enumerate().all(|(a, &i)| {
                chosen[a + 1..]
                    .iter()
                    .all(|&j| transverse(g, x, &cliques[through[x][i]], &cliques[through[x][j]]))
            });
            if !pairwise {
                continue;
            }
            report.prisms_checked += 1;
            let seed: BTreeSet<usize> = chosen.iter().flat_map(|&i| cliques[through[x][i]].iter().copied()).collect();
            let prism = square_closure(g, &seed);
            let lambda: Option<Vec<usize>> = chosen.iter().map(|&i| clique_vertex[i]).collect();
            let ok = match lambda {
                Some(mut l) => {
                    l.sort_unstable();
                    let complete = l.iter().enumerate().all(|(a, &u)| l[a + 1..].iter().all(|&v| spec.gamma().has_edge(u, v)));
                    complete && coset_vertices(spec, ball, gx, &l).as_ref() == Some(&prism)
                }
                None => false,
            };
            if !ok {
                report
                    .violations
                    .push(format!("prism of {} cliques through {gx} is not a coset of a clique subgroup", chosen.len()));
            }
        }
    }
    Ok(report)
}

/// The wallspace on the quasi-median graph obtained by transporting the walls
/// of each vertex group to every clique and extending by gate projection.
#[derive(Clone, Debug)]
pub struct WallSystem {
    pub wallspace: Wallspace,
    /// Hyperplane and vertex-group wall behind each wall.
    pub origins: Vec<(usize, usize)>,
    /// Points beyond the graph vertices: `(clique, auxiliary point)`.
    pub auxiliary: Vec<(Vec<usize>, usize)>,
}

/// Position of `y` in its clique `gG_u` under the canonical identification
/// with `G_u`: the `u`-syllable of `r⁻¹y`, `r` the coset representative.
fn clique_coordinate(spec: &GraphProductSpec, y: &NormalForm, u: usize) -> usize {
    let r = spec.coset_representative(y, &[u]);
    let q = spec.multiply(&spec.inverse(&r), y);
    q.syllables().first().map_or(0, |&(_, e)| e)
}

pub fn build_wall_system(spec: &GraphProductSpec, ball: &QMBall, vertex_group_walls: &[Wallspace]) -> Result<WallSystem> {
    let n = spec.gamma().vertex_count();
    if !spec.is_complete() {
        return Err(Error::Unsupported("wall systems are cubulated only for complete graphs".into()));
    }
    let order: usize = (0..n).map(|u| spec.group(u).order()).product();
    if ball.labels.len() != order {
        return Err(Error::Precondition("the ball must contain the whole graph product".into()));
    }
    if vertex_group_walls.len() != n {
        return Err(Error::InvalidInput("one wallspace per vertex group".into()));
    }
    for (u, ws) in vertex_group_walls.iter().enumerate() {
        if ws.point_count() < spec.group(u).order() || !ws.separates_points() {
            return Err(Error::Precondition(format!(
                "wallspace of vertex {u} must contain the group elements and separate its points"
            )));
        }
    }
    let g = &ball.graph;
    let hyperplanes = qm_hyperplanes(g)?;
    // vertex of Γ of each clique
    let clique_label = |c: &[usize]| -> Result<usize> {
        let x = &ball.labels[c[0]];
        let y = &ball.labels[c[1]];
        let q = spec.multiply(&spec.inverse(x), y);
        match q.syllables() {
            [(u, _)] => Ok(*u),
            _ => Err(Error::CrossCheck("clique edge is not labelled by a vertex group".into())),
        }
    };
    let all_cliques: Vec<(usize, Vec<usize>)> = hyperplanes
        .iter()
        .enumerate()
        .flat_map(|(h, hp)| hp.cliques.iter().map(move |c| (h, c.clone())))
        .collect();
    let mut auxiliary = Vec::new();
    for (_, c) in &all_cliques {
        let u = clique_label(c)?;
        for e in spec.group(u).order()..vertex_group_walls[u].point_count() {
            auxiliary.push((c.clone(), e));
        }
    }
    let base = g.vertex_count();
    let mut sides = Vec::new();
    let mut origins = Vec::new();
    for (h, hp) in hyperplanes.iter().enumerate() {
        let u = clique_label(&hp.cliques[0])?;
        let coordinate = |c: &[usize], y: usize| -> Result<usize> {
            let gate = gate_unchecked(g, c, y)?;
            Ok(clique_coordinate(spec, &ball.labels[gate], u))
        };
        // transported walls must agree across the cliques of the hyperplane
        for c in &hp.cliques[1..] {
            for &y in &hp.cliques[0] {
                if coordinate(c, y)? != clique_coordinate(spec, &ball.labels[y], u) {
                    return Err(Error::CrossCheck("gate projection between cliques does not match coordinates".into()));
                }
            }
        }
        let ws = &vertex_group_walls[u];
        for w in 0..ws.wall_count() {
            let mut side = Vec::new();
            for y in 0..base {
                let a = coordinate(&hp.cliques[0], y)?;
                for c in &hp.cliques[1..] {
                    if ws.on_stored_side(w, coordinate(c, y)?) != ws.on_stored_side(w, a) {
                        return Err(Error::CrossCheck("extended wall depends on the reference clique".into()));
                    }
                }
                if ws.on_stored_side(w, a) {
                    side.push(y);
                }
            }
            for (i, (c, e)) in auxiliary.iter().enumerate() {
                let inside = if hp.cliques.contains(c) {
                    ws.on_stored_side(w, *e)
                } else {
                    ws.on_stored_side(w, coordinate(&hp.cliques[0], c[0])?)
                };
                if inside {
                    side.push(base + i);
                }
            }
            sides.push(side);
            origins.push((h, w));
        }
    }
    Ok(WallSystem {
        wallspace: Wallspace::new(base + auxiliary.len(), sides)?,
        origins,
        auxiliary,
    })
}

/// Cubulation of the quasi-median graph from per-clique wallspaces.
pub fn cubulate_with_wall_system(spec: &GraphProductSpec, ball: &QMBall, vertex_group_walls: &[Wallspace]) -> Result<Cubulation> {
    cubulate(&build_wall_system(spec, ball, vertex_group_walls)?.wallspace)
}
