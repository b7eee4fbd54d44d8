use std::collections::BTreeMap;

use serde_json::json;

use super::{Params, Recorder, Verdict};
use crate::error::{Error, Result};
use crate::graphprod::{
    build_coset_complex, stabilizer_orders, vertex_group_fixed_sets, vgp_action, vgp_relators, ComplexRegime,
    GraphProductSpec,
};
use crate::graphs::{
    automorphism_group, build_gamma_rs, build_hypercube, check_distance2_transitivity, complete_graph, cycle_graph,
    empty_graph, graph_isomorphic, join_of_empty_pairs, path_graph, FiniteGraph, Permutation,
};
use crate::groups::fw_plus_cyclic;
use crate::median::{
    certify_median, convex_hull, cubical_dimension, expect_median, fixed_set, generator_words, is_connected_locally_convex,
    is_convex, GraphAction,
};
use crate::quasimedian::{build_qm_ball, cubulate_with_wall_system, verify_coset_structure};
use crate::topology::{flag_completion, homology, nerve, HomologyProfile};
use crate::wallspace::singleton_walls;

fn betti_summary(h: &HomologyProfile) -> String {
    let torsion = if h.is_torsion_free() { "no torsion" } else { "torsion present" };
    format!("reduced Betti {:?}, {torsion}", h.reduced_betti)
}

pub(super) fn cubulable_fw(p: &Params, rec: &mut Recorder) -> Result<()> {
    let n: usize = p.get("n", 2)?;
    let q: u64 = p.get("q", 5)?;
    let radius: usize = p.get("radius", 1)?;
    if n < 2 || q < 2 {
        return Err(Error::InvalidInput("need n >= 2 and q >= 2".into()));
    }
    let gamma = join_of_empty_pairs(n)?;
    let anchor = "graph products over joins of pairs: cubulable in dimension n with (FW_{n-1})";

    rec.check("diameter two", anchor, |_| {
        let d = gamma.diameter();
        Ok((Verdict::from_bool(d == Some(2)), format!("diameter {d:?}"), json!(d)))
    })?;
    rec.check("distance-2 pair transitivity", anchor, |res| {
        let isom = automorphism_group(&gamma)?;
        res.insert("isom_order".into(), isom.len() as u64);
        let t = check_distance2_transitivity(&gamma, &isom)?;
        Ok((
            Verdict::from_bool(t.transitive),
            format!("{} pairs at distance 2, |Isom| = {}, transitive: {}", t.pair_count, isom.len(), t.transitive),
            serde_json::to_value(&t)?,
        ))
    })?;
    rec.check("cyclic vertex groups", "Z/q has (FW_n+) when q has no divisor in [2, n]", |_| {
        let strict = fw_plus_cyclic(q, n as u64);
        let needed = fw_plus_cyclic(q, n as u64 - 1);
        Ok((
            Verdict::from_bool(strict && needed),
            format!("no divisor of {q} in [2, {n}]: {strict}; in [2, {}]: {needed}", n - 1),
            json!({"range_n": strict, "range_n_minus_1": needed}),
        ))
    })?;
    rec.check("topology of the flag completion", "flag completion is a triangulated (n-1)-sphere", |_| {
        let h = homology(&flag_completion(&gamma)?)?;
        let ok = h.reduced_nonzero(n - 1) && h.is_homology_sphere_of_dim(n - 1);
        Ok((Verdict::from_bool(ok), betti_summary(&h), serde_json::to_value(&h)?))
    })?;
    rec.check("coset complex and vertex-group fixed sets", anchor, |res| {
        let spec = GraphProductSpec::uniform_cyclic(gamma.clone(), q as usize)?;
        let complex = build_coset_complex(&spec, ComplexRegime::Radius(radius))?;
        res.insert("complex_vertices".into(), complex.graph.vertex_count() as u64);
        let mg = expect_median(&complex.graph, "coset complex")?;
        let dim = cubical_dimension(&mg);
        let region: Vec<usize> = (0..complex.graph.vertex_count()).collect();
        let fam = vertex_group_fixed_sets(&spec, &complex, &region)?;
        let pattern_ok = (0..n * 2).all(|u| {
            (0..n * 2).all(|v| fam.intersections[u][v] == (u == v || gamma.has_edge(u, v)))
        });
        let nerve_h = homology(&nerve(&fam.sets)?)?;
        let ok = dim == gamma.clique_number() && pattern_ok && fam.convex.iter().all(|&c| c) && nerve_h.is_homology_sphere_of_dim(n - 1);
        Ok((
            Verdict::from_bool(ok),
            format!(
                "{} vertices, cubical dimension {dim}; fixed sets convex: {}; meet exactly along edges: {pattern_ok}; nerve {}",
                complex.graph.vertex_count(),
                fam.convex.iter().all(|&c| c),
                betti_summary(&nerve_h)
            ),
            json!({"dimension": dim, "convex": fam.convex, "intersections": fam.intersections}),
        ))
    })?;
    Ok(())
}

/// Graph on the vertices of `Q_d` joining every pair that is not antipodal.
pub(crate) fn non_antipodal_graph(d: usize) -> Result<FiniteGraph> {
    let n = 1usize << d;
    let mask = n - 1;
    FiniteGraph::new(n, (0..n).flat_map(|u| (u + 1..n).filter(move |&v| v != u ^ mask).map(move |v| (u, v))))
}

pub(super) fn gamma_rs(p: &Params, rec: &mut Recorder) -> Result<()> {
    let r: usize = p.get("r", 3)?;
    let s: usize = p.get("s", 1)?;
    let n: usize = p.get("n", 1)?;
    if !(1 <= n && n <= s && s <= r) {
        return Err(Error::InvalidInput("need 1 <= n <= s <= r".into()));
    }
    let anchor = "graphs from r-cubes joined up to distance s: (FW_n) via a sphere in the nerve";
    let gamma = build_gamma_rs(r, s)?;
    rec.resources.insert("gamma_vertices".into(), gamma.vertex_count() as u64);
    rec.check("cube-distance transitivity", anchor, |res| {
        let isom = automorphism_group(&gamma)?;
        res.insert("isom_order".into(), isom.len() as u64);
        let cube = build_hypercube(r)?;
        // orbits of pairs at each cube distance d > s
        let mut per_distance = BTreeMap::new();
        for d in s + 1..=r {
            let pairs: Vec<(usize, usize)> = (0..1usize << r)
                .flat_map(|u| (u + 1..1usize << r).map(move |v| (u, v)))
                .filter(|&(u, v)| cube.distance(u, v) as usize == d)
                .collect();
            let first = pairs[0];
            let reached: std::collections::BTreeSet<(usize, usize)> = isom
                .iter()
                .map(|g| {
                    let (a, b) = (g.apply(first.0), g.apply(first.1));
                    (a.min(b), a.max(b))
                })
                .collect();
            per_distance.insert(d, pairs.iter().all(|pr| reached.contains(pr)));
        }
        let ok = per_distance.values().all(|&b| b);
        Ok((Verdict::from_bool(ok), format!("|Isom| = {}, transitive per distance {per_distance:?}", isom.len()), json!(per_distance)))
    })?;
    for d in s + 1..=r {
        let model = non_antipodal_graph(d)?;
        rec.check(&format!("nerve model at d = {d} is the join of d pairs"), anchor, |_| {
            let join = join_of_empty_pairs(d)?;
            let iso = model.vertex_count() == join.vertex_count() && graph_isomorphic(&model, &join)?.is_some();
            let pairs = (1usize << d) / 2;
            Ok((
                Verdict::from_bool(iso),
                format!("non-antipodal graph on Q_{d} has {} vertices, the join of {d} pairs has {}; it is the join of {pairs} pairs", model.vertex_count(), join.vertex_count()),
                json!({"model_vertices": model.vertex_count(), "join_vertices": join.vertex_count(), "antipodal_pairs": pairs}),
            ))
        })?;
        rec.check(&format!("nerve model at d = {d} is a (d-1)-sphere"), anchor, |_| {
            let h = homology(&flag_completion(&model)?)?;
            Ok((Verdict::from_bool(h.is_homology_sphere_of_dim(d - 1)), betti_summary(&h), serde_json::to_value(&h)?))
        })?;
        rec.check(&format!("nerve model at d = {d} obstructs dimension n"), anchor, |_| {
            let h = homology(&flag_completion(&model)?)?;
            let top = h.reduced_betti.iter().rposition(|&b| b > 0);
            let ok = top.is_some_and(|t| t >= n) && h.is_homology_sphere_of_dim(top.unwrap_or(0));
            Ok((Verdict::from_bool(ok), format!("homology sphere of dimension {top:?} against n = {n}"), json!(top)))
        })?;
    }
    for d in 2..=r.min(4) {
        rec.check(&format!("join of {d} pairs is S^{}", d - 1), "flag completion of the join of pairs is a sphere", |_| {
            let h = homology(&flag_completion(&join_of_empty_pairs(d)?)?)?;
            Ok((Verdict::from_bool(h.is_homology_sphere_of_dim(d - 1)), betti_summary(&h), serde_json::to_value(&h)?))
        })?;
    }
    Ok(())
}

fn parse_gamma(s: &str) -> Result<FiniteGraph> {
    let bad = || Error::InvalidInput(format!("unknown graph {s:?} (kN, pN, cN or eN)"));
    let (kind, num) = s.split_at(1);
    let k: usize = num.parse().map_err(|_| bad())?;
    match kind {
        "k" => Ok(complete_graph(k)),
        "p" => Ok(path_graph(k)),
        "c" if k >= 3 => Ok(cycle_graph(k)),
        "e" => Ok(empty_graph(k)),
        _ => Err(bad()),
    }
}

pub(super) fn graph_product(p: &Params, rec: &mut Recorder) -> Result<()> {
    let gamma_name: String = p.get("gamma", "k2".to_string())?;
    let q: usize = p.get("q", 2)?;
    let radius: usize = p.get("radius", 2)?;
    let margin: usize = p.get("margin", 1)?;
    let gamma = parse_gamma(&gamma_name)?;
    let spec = GraphProductSpec::uniform_cyclic(gamma.clone(), q)?;
    let nv = gamma.vertex_count();
    let regime = if spec.is_complete() {
        ComplexRegime::Full
    } else {
        ComplexRegime::Radius(radius)
    };
    let anchor = "virtual graph products act geometrically on the coset complex";
    let complex = build_coset_complex(&spec, regime)?;
    rec.resources.insert("complex_vertices".into(), complex.graph.vertex_count() as u64);

    rec.check("coset complex is median of dimension clique(Gamma)", anchor, |_| {
        let cert = certify_median(&complex.graph)?;
        let dim = cert.clone().median().map(|m| cubical_dimension(&m));
        let mut ok = dim == Some(gamma.clique_number());
        let mut summary = format!("{} vertices, median: {}, dimension {dim:?}, clique number {}", complex.graph.vertex_count(), cert.is_median(), gamma.clique_number());
        if regime == ComplexRegime::Full {
            let expected = (q + 1).pow(nv as u32);
            ok &= complex.graph.vertex_count() == expected;
            summary.push_str(&format!(", expected (q+1)^|V| = {expected} cosets"));
        }
        Ok((Verdict::from_bool(ok), summary, json!({"vertices": complex.graph.vertex_count(), "dimension": dim})))
    })?;

    rec.check("wall-system cubulation matches the coset complex", "cubulating the quasi-median graph from clique wallspaces", |res| {
        let ball = build_qm_ball(&spec, nv)?;
        res.insert("qm_vertices_full".into(), ball.graph.vertex_count() as u64);
        let walls = (0..nv).map(|_| singleton_walls(q)).collect::<Result<Vec<_>>>()?;
        match cubulate_with_wall_system(&spec, &ball, &walls) {
            Ok(c) => {
                let iso = graph_isomorphic(c.median.graph(), &complex.graph)?.is_some();
                Ok((Verdict::from_bool(iso), format!("cubulation has {} vertices, isomorphic: {iso}", c.median.vertex_count()), json!(iso)))
            }
            Err(Error::Unsupported(m)) => Ok((Verdict::Inconclusive, format!("not applicable: {m}"), serde_json::Value::Null)),
            Err(e) => Err(e),
        }
    })?;

    let isom = automorphism_group(&gamma)?;
    rec.check("relators act trivially", anchor, |_| {
        let action = vgp_action(&spec, &isom, &complex)?;
        let n = complex.graph.vertex_count();
        let rels = vgp_relators(&spec, &isom)?;
        let bad = rels
            .iter()
            .map(|w| action.evaluate(w, n))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .filter(|p| !p.is_identity())
            .count();
        Ok((Verdict::from_bool(bad == 0), format!("{} relators, {bad} act non-trivially", rels.len()), json!({"relators": rels.len(), "nontrivial": bad})))
    })?;
    rec.check("stabilizers of group vertices divide |Isom(Gamma)|", anchor, |_| {
        let action = vgp_action(&spec, &isom, &complex)?;
        let orders = stabilizer_orders(&action, complex.graph.vertex_count())?;
        let trivial: Vec<usize> = complex
            .labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.subgroup.is_empty())
            .map(|(i, _)| orders[i])
            .collect();
        let ok = trivial.iter().all(|&o| isom.len() % o == 0);
        let mut all: BTreeMap<String, usize> = BTreeMap::new();
        for (l, o) in complex.labels.iter().zip(&orders) {
            all.insert(l.to_string(), *o);
        }
        Ok((
            Verdict::from_bool(ok),
            format!("{} group vertices, stabilizer orders {:?}, |Isom| = {}", trivial.len(), trivial.iter().collect::<std::collections::BTreeSet<_>>(), isom.len()),
            json!(all),
        ))
    })?;

    rec.check("quasi-median cliques and prisms are cosets", "quasi-median Cayley graph of a graph product", |res| {
        let ball = build_qm_ball(&spec, radius)?;
        res.insert("qm_vertices".into(), ball.graph.vertex_count() as u64);
        let report = verify_coset_structure(&spec, &ball, margin.min(radius))?;
        Ok((
            Verdict::from_bool(report.violations.is_empty()),
            format!(
                "{} interior vertices, {} cliques, {} prisms, {} violations",
                report.checked,
                report.cliques_checked,
                report.prisms_checked,
                report.violations.len()
            ),
            serde_json::to_value(&report)?,
        ))
    })?;
    Ok(())
}

/// Cyclic shift of the coordinates of `Q_k`.
fn coordinate_rotation(k: usize) -> Result<Permutation> {
    let n = 1usize << k;
    Permutation::new(
        (0..n)
            .map(|x| if k == 0 { x } else { ((x << 1) | (x >> (k - 1))) & (n - 1) })
            .collect(),
    )
}

pub(super) fn cube_fix(p: &Params, rec: &mut Recorder) -> Result<()> {
    let k: usize = p.get("k", 3)?;
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let q = build_hypercube(k)?;
    let mg = expect_median(&q, "hypercube")?;
    let action = GraphAction::new(&q, BTreeMap::from([("c".to_string(), coordinate_rotation(k)?)]))?;
    let fix = fixed_set(&mg, &action, &generator_words(&action))?;
    let hull = convex_hull(&mg, &fix)?;
    let anchor = "coordinate permutation of the cube [0,1]^{G/H}";
    let all = (1usize << k) - 1;
    rec.check("fixed set", anchor, |_| {
        let ok = fix == vec![0, all];
        Ok((Verdict::from_bool(ok), format!("Fix = {fix:?} (all-zeros and all-ones are 0 and {all})"), json!(fix)))
    })?;
    rec.check("convex hull of the fixed set", anchor, |_| {
        let ok = hull.hull.len() == 1 << k;
        Ok((Verdict::from_bool(ok), format!("hull has {} of {} vertices", hull.hull.len(), 1 << k), json!(hull.hull.len())))
    })?;
    rec.check("fixed set is not convex", anchor, |_| {
        let convex = is_convex(&mg, &fix)?;
        let lc = is_connected_locally_convex(&q, &fix);
        let ok = convex == (k == 1) && convex == lc;
        Ok((Verdict::from_bool(ok), format!("convex: {convex}, connected and locally convex: {lc}"), json!({"convex": convex, "connected_locally_convex": lc})))
    })?;
    Ok(())
}
