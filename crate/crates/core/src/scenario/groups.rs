use std::collections::BTreeMap;

use serde_json::json;

use super::{Params, Recorder, Verdict};
use crate::error::{Error, Result};
use crate::graphs::{FiniteGraph, Permutation};
use crate::groups::{
    abelian_invariants, build_affine_coxeter, fwn_virtually_abelian, group_order, verify_d4_quotients, FwVerdict,
    Presentation, QuotientOutcome,
};
use crate::quasiline::{
    dinfty_from_quasiline_action, standard_dinfty_action, PeriodicQuasiLine, QLIsometry, DEFAULT_WORD_LENGTH,
};

const CRITERION: &str = "virtually abelian groups: (FW_n) iff no subgroup of index <= n maps onto an infinite subgroup of D_inf";

fn verdict_summary(v: &FwVerdict, indices: &mut u64) -> String {
    *indices += v.subgroup_indices.len() as u64;
    match &v.failure {
        None => format!("holds: {} subgroup classes of index <= {} admit no D_inf witness", v.subgroup_indices.len(), v.n),
        Some(f) => format!(
            "fails: index-{} subgroup maps onto D_inf, certificate value {}",
            f.index, f.witness.certificate_value
        ),
    }
}

pub(super) fn affine_coxeter(p: &Params, rec: &mut Recorder) -> Result<()> {
    let n: usize = p.get("n", 2)?;
    let limit: usize = p.get("limit", 10_000)?;
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let pres = build_affine_coxeter(n)?;

    rec.check("point group", "affine Coxeter group as sum-zero lattice by symmetric group", |res| {
        let kill: Vec<Vec<i32>> = (1..=n as i32).map(|i| vec![i]).collect();
        let order = group_order(&pres.with_relators(&kill)?, limit)?;
        res.insert("point_group_cosets".into(), order as u64);
        let expected: usize = (1..=n + 1).product();
        let inv: Vec<String> = abelian_invariants(&pres).iter().map(|d| d.to_string()).collect();
        Ok((
            Verdict::from_bool(order == expected),
            format!("lattice quotient has order {order} (expected {expected}); abelianization {inv:?}"),
            json!({"order": order, "expected": expected, "abelian_invariants": inv}),
        ))
    })?;

    rec.check(&format!("fixed points at n = {n}"), CRITERION, |res| {
        let v = fwn_virtually_abelian(&pres, n)?;
        let mut count = 0;
        let summary = verdict_summary(&v, &mut count);
        *res.entry("subgroup_classes".into()).or_default() += count;
        Ok((Verdict::from_bool(v.holds), summary, serde_json::to_value(&v)?))
    })?;

    rec.check(&format!("sharpness at n + 1 = {}", n + 1), "affine Coxeter group acts on the cubulated (n+1)-space", |res| {
        let v = fwn_virtually_abelian(&pres, n + 1)?;
        let mut count = 0;
        let summary = verdict_summary(&v, &mut count);
        *res.entry("subgroup_classes".into()).or_default() += count;
        Ok((Verdict::from_bool(!v.holds), summary, serde_json::to_value(&v)?))
    })?;

    if n == 3 {
        rec.check("point-group quotients", "quotients of the lattice by dihedral group used for n = 3", |res| {
            let reports = verify_d4_quotients(limit)?;
            let mut verdict = Verdict::Pass;
            let mut parts = Vec::new();
            for r in &reports {
                match &r.outcome {
                    QuotientOutcome::Finite { order } => {
                        *res.entry("d4_quotient_cosets".into()).or_default() += *order as u64;
                        parts.push(format!("{}: finite of order {order}", r.case));
                    }
                    QuotientOutcome::Infinite { witness } => {
                        verdict = Verdict::Fail;
                        parts.push(format!("{}: infinite, maps onto D_inf (certificate value {})", r.case, witness.certificate_value));
                    }
                    QuotientOutcome::Inconclusive { limit } => {
                        if verdict == Verdict::Pass {
                            verdict = Verdict::Inconclusive;
                        }
                        parts.push(format!("{}: inconclusive at {limit} cosets", r.case));
                    }
                }
            }
            Ok((verdict, parts.join("; "), serde_json::to_value(&reports)?))
        })?;
    }

    rec.check("negative controls", CRITERION, |_| {
        let dinf = build_affine_coxeter(1)?;
        let z2 = Presentation::with_names(2, vec![vec![1, 2, -1, -2]], vec!["a".into(), "b".into()])?;
        let a1 = fwn_virtually_abelian(&dinf, 1)?;
        let zz = fwn_virtually_abelian(&z2, 1)?;
        Ok((
            Verdict::from_bool(!a1.holds && !zz.holds),
            format!(
                "infinite dihedral group fails at 1: {}; Z^2 fails at 1: {}",
                !a1.holds, !zz.holds
            ),
            json!({"affine_1": a1, "z2": zz}),
        ))
    })?;
    Ok(())
}

fn ladder_action() -> Result<(PeriodicQuasiLine, BTreeMap<String, QLIsometry>)> {
    let ql = PeriodicQuasiLine::new(FiniteGraph::new(2, [(0, 1)])?, vec![(0, 0), (1, 1)])?;
    let glide = QLIsometry {
        shift: 1,
        reverses: false,
        internal: Permutation::new(vec![1, 0])?,
    };
    let flip = QLIsometry {
        shift: 0,
        reverses: true,
        internal: Permutation::identity(2),
    };
    Ok((ql, BTreeMap::from([("a".to_string(), glide), ("b".to_string(), flip)])))
}

pub(super) fn quasiline_dinfty(p: &Params, rec: &mut Recorder) -> Result<()> {
    let action: String = p.get("action", "standard".to_string())?;
    let length: usize = p.get("length", DEFAULT_WORD_LENGTH)?;
    let (ql, gens) = match action.as_str() {
        "standard" => standard_dinfty_action(),
        "shift" => (
            PeriodicQuasiLine::unit_line(),
            BTreeMap::from([(
                "t".to_string(),
                QLIsometry {
                    shift: 1,
                    reverses: false,
                    internal: Permutation::identity(1),
                },
            )]),
        ),
        "ladder" => ladder_action()?,
        _ => return Err(Error::InvalidInput(format!("unknown action {action:?} (standard, shift, ladder)"))),
    };
    let anchor = "actions on median quasi-lines with unbounded orbits give morphisms onto D_inf with infinite image";
    let m = dinfty_from_quasiline_action(&ql, &gens, length)?;
    rec.resources.insert("words".into(), m.report.words as u64);
    rec.resources.insert("pairs".into(), m.report.pairs_checked as u64);
    let r = &m.report;
    let images: BTreeMap<&String, String> = m
        .images
        .iter()
        .map(|(k, v)| (k, format!("({}, {:+})", v.translation, v.sign)))
        .collect();
    rec.check("homomorphism law", anchor, |_| {
        Ok((
            Verdict::from_bool(r.homomorphism_failures == 0 && r.cocycle_failures == 0),
            format!(
                "{} pairs of words of length <= {length}: {} product failures, {} cocycle failures; images {images:?}",
                r.pairs_checked, r.homomorphism_failures, r.cocycle_failures
            ),
            json!({"images": m.images, "end_swapper": r.end_swapper}),
        ))
    })?;
    rec.check("infinite image", anchor, |_| {
        Ok((
            Verdict::from_bool(r.image_infinite),
            format!("some word has non-zero translation part: {}", r.image_infinite),
            json!(r.image_infinite),
        ))
    })?;
    rec.check("conjugation by an end-swapper negates the horomorphism", anchor, |_| {
        let ok = r.conjugation_failures == 0 && r.h_end_swapper_squared.unwrap_or(0) == 0 && r.additivity_failures == 0;
        let summary = match &r.end_swapper {
            Some(g0) => format!(
                "g0 = {g0}: {} conjugations checked, {} failures; h(g0^2) = {}; {} additivity failures",
                r.conjugations_checked,
                r.conjugation_failures,
                r.h_end_swapper_squared.unwrap_or(0),
                r.additivity_failures
            ),
            None => format!("no end-swapper among words of length <= {length}; {} additivity failures", r.additivity_failures),
        };
        Ok((Verdict::from_bool(ok), summary, serde_json::to_value(r)?))
    })?;
    if action == "shift" {
        rec.check("pure translations", anchor, |_| {
            let t = &m.images["t"];
            let ok = r.end_swapper.is_none() && t.sign == 1 && t.translation == 1.into();
            Ok((Verdict::from_bool(ok), format!("phi(t) = ({}, {:+})", t.translation, t.sign), json!(t)))
        })?;
    }
    Ok(())
}
