//! Checks on affine submanifolds of a K-V chart.

use num_traits::Zero;

use super::{fmt_matrix, fmt_point, residual_outcome, ArgType, Check, CheckContext, CheckResult, Outcome, Registry, Status, Witness};
use crate::dsl::{CheckDirective, Model};
use crate::geometry::SymBivector;
use crate::oracle::{adapted_at, conormal_gamma_at};
use crate::structures::{
    adapted_frame, conormal_algebroid, is_coisotropic, is_kv_submanifold, is_transversal, AffineSubmanifold,
    StructureError, Transversality,
};
use crate::symexpr::{Expr, Rational, SymError};

pub(super) fn register(r: &mut Registry) {
    r.register(Box::new(KvSubmanifold));
    r.register(Box::new(Transversal));
    r.register(Box::new(Coisotropic));
    r.register(Box::new(Conormal));
}

const NH: &[ArgType] = &[ArgType::Submanifold, ArgType::Bivector];

fn eval_all(entries: &[(String, Expr)], pt: &crate::symexpr::Point) -> Result<Vec<Rational>, SymError> {
    entries.iter().map(|(_, e)| e.eval_at(pt)).collect()
}

/// `h̃|_N` has no conormal-tangent or conormal-conormal part.
pub(super) fn kv_submanifold_outcome(ctx: &CheckContext, n: &AffineSubmanifold, h: &SymBivector) -> CheckResult {
    let rep = is_kv_submanifold(n, h)?;
    let fr = adapted_frame(n)?;
    let pts = ctx.points(n.dim());
    let (k, dim) = (fr.k(), fr.n());
    let o = ctx.cross_check(
        &pts,
        |t| eval_all(&rep.residuals, &fr.tangent_point(t)),
        |t| {
            let m = adapted_at(&fr, h, t)?;
            Ok((k..dim).flat_map(|a| (0..dim).map(move |i| (a, i))).map(|(a, i)| m.get(a, i).clone()).collect())
        },
    )?;
    let mut out = residual_outcome("conormal rows of h on N", &rep.residuals, fr.induced_chart(), &pts);
    if let Some(ind) = &rep.induced {
        out.details = format!(
            "{}; induced on ({}): {}",
            out.details,
            coords(ind),
            fmt_matrix(ind.matrix())
        );
    }
    Ok(out.with_oracle(o))
}

fn coords(h: &SymBivector) -> String {
    h.chart().coords().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

struct KvSubmanifold;

impl Check for KvSubmanifold {
    fn kind(&self) -> &'static str {
        "submanifold"
    }

    fn summary(&self) -> &'static str {
        "N is a K-V submanifold: Im h_# lies in TN along N"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[NH]
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        kv_submanifold_outcome(ctx, ctx.submanifold(0), ctx.bivector(1))
    }
}

struct Transversal;

impl Check for Transversal {
    fn kind(&self) -> &'static str {
        "transversal"
    }

    fn summary(&self) -> &'static str {
        "N is a K-V transversal: the conormal block D is invertible along N; induced structure is the Schur complement"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[NH]
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        let (n, h) = (ctx.submanifold(0), ctx.bivector(1));
        let rep = is_transversal(n, h, &ctx.sampler)?;
        let fr = adapted_frame(n)?;
        let (k, dim) = (fr.k(), fr.n());
        let pts = ctx.points(k);
        let induced: Vec<Expr> = rep
            .induced
            .as_ref()
            .map(|i| i.matrix().to_rows().into_iter().flatten().collect())
            .unwrap_or_default();
        let o = ctx.cross_check(
            &pts,
            |t| {
                let pt = fr.tangent_point(t);
                let mut v = vec![rep.det_d.eval_at(&pt)?];
                for e in &induced {
                    v.push(e.eval_at(&pt)?);
                }
                Ok(v)
            },
            |t| {
                let m = adapted_at(&fr, h, t)?;
                let c: Vec<usize> = (k..dim).collect();
                let tg: Vec<usize> = (0..k).collect();
                let d = m.select(&c, &c);
                let mut v = vec![d.det()];
                if !induced.is_empty() {
                    let dinv = d.inverse().ok_or(SymError::PoleAtPoint)?;
                    let b = m.select(&tg, &c);
                    let s = m.select(&tg, &tg).sub(&b.mul(&dinv).mul(&b.transpose()));
                    v.extend(s.to_rows().into_iter().flatten());
                }
                Ok(v)
            },
        )?;
        let sampled = if rep.sampled.is_empty() {
            String::new()
        } else {
            format!(
                "; sampled points: {}",
                rep.sampled.iter().map(|p| fmt_point(p)).collect::<Vec<_>>().join(" ")
            )
        };
        let induced_text = rep
            .induced
            .as_ref()
            .map(|i| format!("; induced on ({}): {}", coords(i), fmt_matrix(i.matrix())))
            .unwrap_or_default();
        let (status, verdict) = match rep.verdict {
            Transversality::SymbolicTrue => (Status::Pass, "symbolic-true"),
            Transversality::PointwiseTrue => (Status::PointwisePass, "pointwise-true"),
            Transversality::False => (Status::Fail, "false"),
        };
        let details = format!("{verdict}: det D|_N = {}{induced_text}{sampled}", rep.det_d);
        let mut out = Outcome::new(status, details).with_oracle(o);
        if status == Status::Fail {
            out.witness = Some(Witness {
                point: rep.failing_point.clone().or_else(|| pts.first().cloned()).unwrap_or_default(),
                residual: rep.det_d.clone(),
            });
        }
        Ok(out)
    }
}

pub(super) fn coisotropic_outcome(ctx: &CheckContext, n: &AffineSubmanifold, h: &SymBivector) -> CheckResult {
    let rep = is_coisotropic(n, h)?;
    let fr = adapted_frame(n)?;
    let (k, dim) = (fr.k(), fr.n());
    let pts = ctx.points(k);
    let o = ctx.cross_check(
        &pts,
        |t| eval_all(&rep.residuals, &fr.tangent_point(t)),
        |t| {
            let m = adapted_at(&fr, h, t)?;
            Ok((k..dim).flat_map(|a| (k..dim).map(move |b| (a, b))).map(|(a, b)| m.get(a, b).clone()).collect())
        },
    )?;
    Ok(residual_outcome("conormal block D on N", &rep.residuals, fr.induced_chart(), &pts).with_oracle(o))
}

struct Coisotropic;

impl Check for Coisotropic {
    fn kind(&self) -> &'static str {
        "coisotropic"
    }

    fn summary(&self) -> &'static str {
        "h_#(TN°) lies in TN"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[NH]
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        coisotropic_outcome(ctx, ctx.submanifold(0), ctx.bivector(1))
    }
}

/// Conormal algebroid of a coisotropic `N`: closure, left symmetry, and the
/// fiber algebra on `ker ρ` at `at` (tangent coordinates; default the origin).
pub(super) fn conormal_outcome(
    ctx: &CheckContext,
    n: &AffineSubmanifold,
    h: &SymBivector,
    at: Option<&[Rational]>,
) -> CheckResult {
    let alg = match conormal_algebroid(n, h) {
        Ok(a) => a,
        Err(StructureError::NotCoisotropic(_)) => {
            let mut out = coisotropic_outcome(ctx, n, h)?;
            out.details = format!("not coisotropic; {}", out.details);
            return Ok(out);
        }
        Err(StructureError::ClosureFailure(_)) => {
            return Ok(Outcome::new(Status::Fail, "conormal product does not close: tangent components on N"))
        }
        Err(e) => return Err(e.into()),
    };
    let fr = alg.frame();
    let r = alg.rank();
    let pts = ctx.points(fr.k());
    let mut gamma = Vec::new();
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                gamma.push(alg.gamma(a, b, c).clone());
            }
        }
    }
    let o = ctx.cross_check(
        &pts,
        |t| {
            let pt = fr.tangent_point(t);
            gamma.iter().map(|e| e.eval_at(&pt)).collect()
        },
        |t| conormal_gamma_at(fr, h, t),
    )?;
    let zero = vec![Rational::zero(); fr.k()];
    let t = at.unwrap_or(&zero);
    let fiber = alg.fiber_algebra(t)?;
    let mut out = residual_outcome("left-symmetry defect", &alg.left_symmetry_residuals, fr.induced_chart(), &pts);
    let product = (0..r)
        .flat_map(|a| (0..r).map(move |b| (a, b)))
        .filter_map(|(a, b)| {
            let terms: Vec<String> = (0..r)
                .filter(|&c| !alg.gamma(a, b, c).is_zero())
                .map(|c| format!("({})w{}", alg.gamma(a, b, c), c + 1))
                .collect();
            (!terms.is_empty() && a <= b).then(|| format!("w{}.w{} = {}", a + 1, b + 1, terms.join(" + ")))
        })
        .collect::<Vec<_>>();
    let fiber_text = format!(
        "fiber algebra at {}: dim ker rho = {}, closed {}, commutative {}, associative {}",
        fmt_point(t),
        fiber.kernel.len(),
        fiber.closed,
        fiber.commutative,
        fiber.associative
    );
    out.details = format!(
        "rank {r}; products: {}; anchor zero: {}; {}; {fiber_text}",
        if product.is_empty() { "all zero".into() } else { product.join(", ") },
        alg.anchor_is_zero(),
        out.details
    );
    if out.status == Status::Pass && !fiber.holds() {
        out.status = Status::Fail;
    }
    Ok(out.with_oracle(o))
}

struct Conormal;

impl Check for Conormal {
    fn kind(&self) -> &'static str {
        "conormal"
    }

    fn summary(&self) -> &'static str {
        "conormal bundle of a coisotropic N is a left-symmetric algebroid; ker rho is a commutative associative algebra"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[NH]
    }

    fn options(&self) -> &'static [&'static str] {
        &["at"]
    }

    fn validate_extra(&self, d: &CheckDirective, m: &Model) -> Result<(), String> {
        if let Some(at) = &d.options.at {
            let n = m.submanifold(&d.args[0]).expect("validated");
            if at.len() != n.dim() {
                return Err(format!("`at` needs {} tangent coordinates", n.dim()));
            }
        }
        Ok(())
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        conormal_outcome(ctx, ctx.submanifold(0), ctx.bivector(1), ctx.directive.options.at.as_deref())
    }
}
