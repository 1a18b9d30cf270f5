//! Checks on affine maps between two K-V charts.

use super::{fmt_matrix, residual_outcome, ArgType, Check, CheckContext, CheckError, CheckResult, Outcome, Registry, Status};
use crate::geometry::SymBivector;
use crate::oracle::{eval_matrix, flatten_matrix, kv_map_residual_at, OracleComparison};
use crate::structures::{
    graph_check, kv_map_residual, preimage_transversal, theorem1_equivalences, AffineMap, StructureError,
    Transversality,
};

pub(super) fn register(r: &mut Registry) {
    r.register(Box::new(KvMap));
    r.register(Box::new(Theorem1));
    r.register(Box::new(Graph));
    r.register(Box::new(Preimage));
}

const FHH: &[ArgType] = &[ArgType::Map, ArgType::Bivector, ArgType::Bivector];

fn map_oracle(ctx: &CheckContext, f: &AffineMap, h1: &SymBivector, h2: &SymBivector) -> Result<Option<OracleComparison>, CheckError> {
    let r = kv_map_residual(f, h1, h2)?;
    let pts = ctx.points(f.source().dim());
    ctx.cross_check(
        &pts,
        |p| eval_matrix(&r, f.source(), p),
        |p| Ok(flatten_matrix(&kv_map_residual_at(f, h1, h2, p)?)),
    )
}

fn map_residual_outcome(ctx: &CheckContext, f: &AffineMap, h1: &SymBivector, h2: &SymBivector) -> CheckResult {
    let r = kv_map_residual(f, h1, h2)?;
    let mut entries = Vec::new();
    for a in 0..r.rows() {
        for b in 0..r.cols() {
            entries.push((format!("K({},{})", a + 1, b + 1), r.get(a, b).clone()));
        }
    }
    let pts = ctx.points(f.source().dim());
    Ok(residual_outcome("F h1 F^T - h2(F)", &entries, f.source(), &pts))
}

struct KvMap;

impl Check for KvMap {
    fn kind(&self) -> &'static str {
        "kv_map"
    }

    fn summary(&self) -> &'static str {
        "h1(F*a, F*b) = h2(a, b) o F"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[FHH]
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        let (f, h1, h2) = (ctx.map(0), ctx.bivector(1), ctx.bivector(2));
        Ok(map_residual_outcome(ctx, f, h1, h2)?.with_oracle(map_oracle(ctx, f, h1, h2)?))
    }
}

struct Theorem1;

impl Check for Theorem1 {
    fn kind(&self) -> &'static str {
        "theorem1"
    }

    fn summary(&self) -> &'static str {
        "K-V map, Poisson tangent map, related sharps and related Hamiltonians agree"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[FHH]
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        let (f, h1, h2) = (ctx.map(0), ctx.bivector(1), ctx.bivector(2));
        let rep = theorem1_equivalences(f, h1, h2, &ctx.sampler)?;
        let summary = format!(
            "(i) K-V map: {}; (ii) TF Poisson: {}; (iii) sharps related: {}; (iv) Hamiltonians related: {}",
            rep.kv_map, rep.poisson, rep.forms_related, rep.hamiltonians_related
        );
        let o = map_oracle(ctx, f, h1, h2)?;
        if !rep.all_agree() {
            return Ok(Outcome::new(Status::Fail, format!("equivalence violated: {summary}")).with_oracle(o));
        }
        let mut out = map_residual_outcome(ctx, f, h1, h2)?;
        out.details = format!("{summary}; {}", out.details);
        Ok(out.with_oracle(o))
    }
}

struct Graph;

impl Check for Graph {
    fn kind(&self) -> &'static str {
        "graph"
    }

    fn summary(&self) -> &'static str {
        "Graph(F) is coisotropic in M1 x (-M2) exactly when F is a K-V map"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[FHH]
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        let (f, h1, h2) = (ctx.map(0), ctx.bivector(1), ctx.bivector(2));
        let rep = graph_check(f, h1, h2)?;
        let o = map_oracle(ctx, f, h1, h2)?;
        let details = format!("graph coisotropic: {}; K-V map: {}", rep.coisotropic, rep.kv_map);
        if !rep.agree() {
            return Ok(Outcome::new(Status::Fail, format!("characterization violated: {details}")).with_oracle(o));
        }
        let mut out = map_residual_outcome(ctx, f, h1, h2)?;
        out.details = format!("{details}; {}", out.details);
        Ok(out.with_oracle(o))
    }
}

struct Preimage;

impl Check for Preimage {
    fn kind(&self) -> &'static str {
        "preimage_transversal"
    }

    fn summary(&self) -> &'static str {
        "F^-1(N2) is a K-V transversal and F restricts to a K-V map of the induced structures"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[&[ArgType::Map, ArgType::Bivector, ArgType::Bivector, ArgType::Submanifold]]
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        let (f, h1, h2, n2) = (ctx.map(0), ctx.bivector(1), ctx.bivector(2), ctx.submanifold(3));
        let rep = match preimage_transversal(f, h1, h2, n2, &ctx.sampler) {
            Ok(r) => r,
            Err(StructureError::NotTransverse(n)) => {
                return Ok(Outcome::new(Status::Fail, format!("F is not transverse to `{n}`")))
            }
            Err(StructureError::EmptyPreimage) => {
                return Ok(Outcome::new(Status::Fail, "the preimage is empty"))
            }
            Err(e) => return Err(e.into()),
        };
        let verdict = |v: Transversality| match v {
            Transversality::SymbolicTrue => "symbolic-true",
            Transversality::PointwiseTrue => "pointwise-true",
            Transversality::False => "false",
        };
        let induced = |h: &Option<SymBivector>| h.as_ref().map_or("none".to_string(), |h| fmt_matrix(h.matrix()));
        let details = format!(
            "preimage of dimension {}; source transversal: {} (induced {}); target transversal: {} (induced {}); restriction is a K-V map: {}",
            rep.preimage.dim(),
            verdict(rep.source_verdict),
            induced(&rep.source_induced),
            verdict(rep.target_verdict),
            induced(&rep.target_induced),
            rep.restriction_kv_map
        );
        let o = match (&rep.restriction, &rep.source_induced, &rep.target_induced) {
            (Some(l), Some(s), Some(t)) => map_oracle(ctx, l, s, t)?,
            _ => None,
        };
        let status = if !rep.holds() {
            Status::Fail
        } else if rep.source_verdict == Transversality::SymbolicTrue && rep.target_verdict == Transversality::SymbolicTrue {
            Status::Pass
        } else {
            Status::PointwisePass
        };
        Ok(Outcome::new(status, details).with_oracle(o))
    }
}
