use std::collections::BTreeMap;

use serde_json::json;

use super::{Params, Recorder, Verdict};
use crate::corpus::{brute_force_cubulation, duality_corpus, small_wallspaces, CorpusSize};
use crate::error::Result;
use crate::graphs::graph_isomorphic;
use crate::median::expect_median;
use crate::wallspace::{cubulate, walls_of_median};

pub(super) fn duality(p: &Params, rec: &mut Recorder) -> Result<()> {
    let size: String = p.get("corpus", "small".to_string())?;
    let corpus_size: CorpusSize = size.parse()?;
    let corpus = duality_corpus(corpus_size)?;
    rec.resources.insert("corpus_graphs".into(), corpus.len() as u64);

    // group by family name prefix
    let mut families: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, (name, _)) in corpus.iter().enumerate() {
        let family = name.split('-').next().unwrap_or("other").to_string();
        families.entry(family).or_default().push(i);
    }
    for (family, members) in &families {
        rec.check(&format!("round trip: {family}"), "median graphs are the cubulations of their halfspace walls", |res| {
            let mut failures = Vec::new();
            for &i in members {
                let (name, g) = &corpus[i];
                let mg = expect_median(g, name)?;
                let ws = walls_of_median(&mg);
                let c = cubulate(&ws)?;
                *res.entry("walls".into()).or_default() += ws.wall_count() as u64;
                if graph_isomorphic(c.median.graph(), g)?.is_none() {
                    failures.push(name.clone());
                }
            }
            Ok((
                Verdict::from_bool(failures.is_empty()),
                format!("{} graphs, {} not isomorphic after the round trip", members.len(), failures.len()),
                json!({"graphs": members.len(), "failures": failures}),
            ))
        })?;
    }

    let (points, walls) = match corpus_size {
        CorpusSize::Small => (4, 6),
        CorpusSize::Full => (5, 10),
    };
    rec.check("cubulation against brute-force orientations", "cubulation of finite wallspaces", |res| {
        let spaces = small_wallspaces(points, walls, 10_000)?;
        res.insert("wallspaces".into(), spaces.len() as u64);
        let mut failures = 0;
        for ws in &spaces {
            let c = cubulate(ws)?;
            let b = brute_force_cubulation(ws)?;
            if c.median.vertex_count() != b.vertex_count() || graph_isomorphic(c.median.graph(), &b)?.is_none() {
                failures += 1;
            }
        }
        Ok((
            Verdict::from_bool(failures == 0),
            format!("{} wallspaces on <= {points} points with <= {walls} walls, {failures} mismatches", spaces.len()),
            json!({"instances": spaces.len(), "mismatches": failures}),
        ))
    })?;
    Ok(())
}
