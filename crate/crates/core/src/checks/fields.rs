//! Checks on a single bivector and functions on its chart.

use super::{
    fmt_matrix, fmt_point, residual_outcome, ArgType, Check, CheckContext, CheckError, CheckResult, Outcome, Registry,
    Status,
};
use crate::algebra::in_e_by_criterion;
use crate::dsl::{CheckDirective, LieForm, Model};
use crate::geometry::{
    codazzi_tensor, hessian_pairing, in_e, kv_bracket_form, lie_derivative_h, lie_derivative_residual, rank_at,
    LieIdentity, OneForm, ScalarField, SymBivector, TrilinearForm,
};
use crate::linalg::Matrix;
use crate::oracle::{
    codazzi_at, eval_matrix, eval_trilinear, flatten_matrix, hessian_pairing_at, jacobi_tangent_at, kv_bracket_at,
    kv_map_residual_at, lie_residual_at, lift_lie_pi_at,
};
use crate::structures::leaf_openness_check;
use crate::symexpr::{Expr, SymError};
use crate::tangent::{build_pi, lift_propositions_check, schouten_jacobi, TangentChart};

pub(super) fn register(r: &mut Registry) {
    r.register(Box::new(Codazzi));
    r.register(Box::new(KvBracket));
    r.register(Box::new(JacobiTangent));
    r.register(Box::new(InE));
    r.register(Box::new(SpecialClass));
    r.register(Box::new(LieDerivative));
    r.register(Box::new(LiftProps));
    r.register(Box::new(Rank));
}

const H: &[ArgType] = &[ArgType::Bivector];
const HF: &[ArgType] = &[ArgType::Bivector, ArgType::Scalar];

fn labeled(t: &TrilinearForm, tag: &str) -> Vec<(String, Expr)> {
    t.iter()
        .map(|((i, j, k), e)| (format!("{tag}({},{},{})", i + 1, j + 1, k + 1), e.clone()))
        .collect()
}

fn labeled_matrix(m: &Matrix<Expr>, tag: &str) -> Vec<(String, Expr)> {
    let mut out = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.push((format!("{tag}({},{})", i + 1, j + 1), m.get(i, j).clone()));
        }
    }
    out
}

struct Codazzi;

impl Check for Codazzi {
    fn kind(&self) -> &'static str {
        "codazzi"
    }

    fn summary(&self) -> &'static str {
        "contravariant Codazzi tensor vanishes (h is Koszul-Vinberg)"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[H]
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        let h = ctx.bivector(0);
        let t = codazzi_tensor(h);
        let pts = ctx.points(h.dim());
        let o = ctx.cross_check(&pts, |p| eval_trilinear(&t, p), |p| codazzi_at(h, p))?;
        Ok(residual_outcome("Codazzi tensor", &labeled(&t, "C"), h.chart(), &pts).with_oracle(o))
    }
}

struct KvBracket;

impl Check for KvBracket {
    fn kind(&self) -> &'static str {
        "kv_bracket"
    }

    fn summary(&self) -> &'static str {
        "five-term bracket [h,h] vanishes"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[H]
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        let h = ctx.bivector(0);
        let t = kv_bracket_form(h);
        let pts = ctx.points(h.dim());
        let o = ctx.cross_check(&pts, |p| eval_trilinear(&t, p), |p| kv_bracket_at(h, p))?;
        Ok(residual_outcome("[h,h]", &labeled(&t, "B"), h.chart(), &pts).with_oracle(o))
    }
}

struct JacobiTangent;

impl Check for JacobiTangent {
    fn kind(&self) -> &'static str {
        "jacobi_tangent"
    }

    fn summary(&self) -> &'static str {
        "the lift of h to the tangent bundle is Poisson"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[H]
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        let h = ctx.bivector(0);
        let tc = TangentChart::new(h.chart());
        let jac = schouten_jacobi(&build_pi(&tc, h)?);
        let pts = ctx.points(2 * h.dim());
        let o = ctx.cross_check(&pts, |p| eval_trilinear(&jac, p), |p| jacobi_tangent_at(h, p))?;
        let mut out = residual_outcome("Jacobiator of the tangent lift", &labeled(&jac, "J"), tc.total(), &pts);
        let kv = codazzi_tensor(h).is_zero();
        if kv != out.status.is_pass() {
            return Err(CheckError(format!(
                "Jacobi verdict disagrees with the Codazzi verdict (Codazzi zero: {kv})"
            )));
        }
        out.details.push_str(&format!("; Codazzi tensor zero: {kv}"));
        Ok(out.with_oracle(o))
    }
}

fn pairing_oracle(
    ctx: &CheckContext,
    h: &SymBivector,
    f: &ScalarField,
    sym: &Matrix<Expr>,
) -> Result<Option<crate::oracle::OracleComparison>, CheckError> {
    let pts = ctx.points(h.dim());
    ctx.cross_check(
        &pts,
        |p| eval_matrix(sym, h.chart(), p),
        |p| Ok(flatten_matrix(&hessian_pairing_at(h, f, p)?)),
    )
}

struct InE;

impl Check for InE {
    fn kind(&self) -> &'static str {
        "in_E"
    }

    fn summary(&self) -> &'static str {
        "f is affine along the leaves: <nabla_{a#} df, b#> = 0"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[HF]
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        let (h, f) = (ctx.bivector(0), ctx.scalar(1));
        let m = hessian_pairing(h, f)?;
        if m.is_zero() != in_e_by_criterion(h, f)? {
            return Err(CheckError("matrix and double-sum forms of the criterion disagree".into()));
        }
        let o = pairing_oracle(ctx, h, f, &m)?;
        let pts = ctx.points(h.dim());
        Ok(residual_outcome("H Hess(f) H", &labeled_matrix(&m, "P"), h.chart(), &pts).with_oracle(o))
    }
}

struct SpecialClass;

impl Check for SpecialClass {
    fn kind(&self) -> &'static str {
        "special_class"
    }

    fn summary(&self) -> &'static str {
        "for f1, f2 in E, h(df1, df2) is again in E"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[&[ArgType::Bivector, ArgType::Scalar, ArgType::Scalar]]
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        let (h, f1, f2) = (ctx.bivector(0), ctx.scalar(1), ctx.scalar(2));
        for (which, f) in [("first", f1), ("second", f2)] {
            if !in_e(h, f)? {
                return Ok(Outcome::new(
                    Status::Unsupported,
                    format!("precondition: {which} function {} is not in E", f.value()),
                ));
            }
        }
        let g = h.pair(&OneForm::differential(f1), &OneForm::differential(f2))?;
        let gf = ScalarField::new(h.chart(), g.clone())?;
        let m = hessian_pairing(h, &gf)?;
        let o = pairing_oracle(ctx, h, &gf, &m)?;
        let pts = ctx.points(h.dim());
        let mut out = residual_outcome("H Hess(g) H", &labeled_matrix(&m, "P"), h.chart(), &pts);
        out.details = format!("g = h(df1, df2) = {g}; {}", out.details);
        Ok(out.with_oracle(o))
    }
}

struct LieDerivative;

impl Check for LieDerivative {
    fn kind(&self) -> &'static str {
        "lie_derivative"
    }

    fn summary(&self) -> &'static str {
        "Lie derivative of h along X_f: a given value, or the identity with the pairing term"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[HF]
    }

    fn options(&self) -> &'static [&'static str] {
        &["form", "value"]
    }

    fn validate_extra(&self, d: &CheckDirective, m: &Model) -> Result<(), String> {
        let o = &d.options;
        if o.form.is_some() && o.value.is_some() {
            return Err("`form` and `value` are exclusive".into());
        }
        if let Some(v) = &o.value {
            let h = m.bivector(&d.args[0]).expect("validated");
            let n = h.dim();
            if v.len() != n || v.iter().any(|r| r.len() != n) {
                return Err(format!("value must be {n}x{n}"));
            }
            for e in v.iter().flatten() {
                h.chart().check_expr(e).map_err(|e| e.to_string())?;
            }
        }
        Ok(())
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        let (h, f) = (ctx.bivector(0), ctx.scalar(1));
        let pts = ctx.points(h.dim());
        let oracle_form = |form: LieIdentity| {
            let r = lie_derivative_residual(h, f, form)?;
            ctx.cross_check(
                &pts,
                |p| eval_matrix(&r, h.chart(), p),
                |p| Ok(flatten_matrix(&lie_residual_at(h, f, form, p)?)),
            )
        };
        if let Some(v) = &ctx.directive.options.value {
            let lie = lie_derivative_h(h, f)?;
            let diff = Matrix::from_fn(h.dim(), h.dim(), |i, j| lie.get(i, j) - &v[i][j]);
            let o = oracle_form(LieIdentity::Corrected)?;
            let mut out = residual_outcome("L_{X_f}h - value", &labeled_matrix(&diff, "L"), h.chart(), &pts);
            out.details = format!("L_{{X_f}}h = {}; {}", fmt_matrix(lie.matrix()), out.details);
            return Ok(out.with_oracle(o));
        }
        let (form, tag) = match ctx.directive.options.form.unwrap_or(LieForm::Stated) {
            LieForm::Stated => (LieIdentity::AsStated, "stated"),
            LieForm::Corrected => (LieIdentity::Corrected, "corrected"),
        };
        let r = lie_derivative_residual(h, f, form)?;
        let o = oracle_form(form)?;
        let what = format!("residual of the {tag} identity");
        Ok(residual_outcome(&what, &labeled_matrix(&r, "R"), h.chart(), &pts).with_oracle(o))
    }
}

struct LiftProps;

impl Check for LiftProps {
    fn kind(&self) -> &'static str {
        "lift_props"
    }

    fn summary(&self) -> &'static str {
        "tangent lifts of X_f: vertical lift is Hamiltonian, L_{X_f^h} Pi vanishes iff f in E"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[HF]
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        let (h, f) = (ctx.bivector(0), ctx.scalar(1));
        let rep = lift_propositions_check(h, f)?;
        let tc = TangentChart::new(h.chart());
        let pts = ctx.points(2 * h.dim());
        let o = ctx.cross_check(
            &pts,
            |p| eval_matrix(&rep.lie_pi, tc.total(), p),
            |p| Ok(flatten_matrix(&lift_lie_pi_at(h, f, p)?)),
        )?;
        let details = format!(
            "vertical lift Hamiltonian: {}; L_{{X_f^h}}Pi vanishes: {}; f in E: {}; block formula: {}",
            rep.vertical_is_hamiltonian, rep.lie_vanishes, rep.in_e, rep.block_formula_holds
        );
        Ok(Outcome::verdict(rep.consistent(), details).with_oracle(o))
    }
}

struct Rank;

impl Check for Rank {
    fn kind(&self) -> &'static str {
        "rank"
    }

    fn summary(&self) -> &'static str {
        "rank of h_# at points; with a map, rank h2(F x) <= rank h1(x); with a submanifold, Im h_# inside TN"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[
            H,
            &[ArgType::Map, ArgType::Bivector, ArgType::Bivector],
            &[ArgType::Submanifold, ArgType::Bivector],
        ]
    }

    fn options(&self) -> &'static [&'static str] {
        &["rank"]
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        let expected = ctx.directive.options.rank;
        match ctx.directive.args.len() {
            1 => {
                let h = ctx.bivector(0);
                let mut ranks = Vec::new();
                let mut bad = None;
                for p in ctx.points(h.dim()) {
                    match rank_at(h, &h.chart().point_at(&p)) {
                        Ok(r) => {
                            if bad.is_none() && expected.is_some_and(|e| e != r) {
                                bad = Some((p.clone(), r));
                            }
                            ranks.push(r);
                        }
                        Err(crate::geometry::GeometryError::Sym(SymError::PoleAtPoint)) => continue,
                        Err(e) => return Err(e.into()),
                    }
                }
                let list = ranks.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ");
                Ok(match bad {
                    None => Outcome::new(Status::Pass, format!("ranks at {} points: {list}", ranks.len())),
                    Some((p, r)) => Outcome::new(
                        Status::Fail,
                        format!("rank {r} at {} instead of {}; ranks: {list}", fmt_point(&p), expected.unwrap_or(0)),
                    ),
                })
            }
            3 => {
                let (f, h1, h2) = (ctx.map(0), ctx.bivector(1), ctx.bivector(2));
                let mut checked = 0;
                for p in ctx.points(f.source().dim()) {
                    let r1 = rank_at(h1, &h1.chart().point_at(&p));
                    let r2 = rank_at(h2, &h2.chart().point_at(&f.apply_point(&p)));
                    let (r1, r2) = match (r1, r2) {
                        (Ok(a), Ok(b)) => (a, b),
                        (Err(crate::geometry::GeometryError::Sym(SymError::PoleAtPoint)), _)
                        | (_, Err(crate::geometry::GeometryError::Sym(SymError::PoleAtPoint))) => continue,
                        (Err(e), _) | (_, Err(e)) => return Err(e.into()),
                    };
                    checked += 1;
                    if r2 > r1 {
                        let res = kv_map_residual_at(f, h1, h2, &p)?;
                        return Ok(Outcome::new(
                            Status::Fail,
                            format!(
                                "rank h2(F x) = {r2} exceeds rank h1(x) = {r1} at {}; F-residual there: {:?}",
                                fmt_point(&p),
                                flatten_matrix(&res).iter().map(|v| v.to_string()).collect::<Vec<_>>()
                            ),
                        ));
                    }
                }
                Ok(Outcome::new(Status::Pass, format!("rank inequality holds at {checked} points")))
            }
            _ => {
                let (n, h) = (ctx.submanifold(0), ctx.bivector(1));
                let pts = ctx.points(n.dim());
                let leaf = leaf_openness_check(n, h, &pts)?;
                let fail = leaf
                    .iter()
                    .find(|l| !l.contained || expected.is_some_and(|e| e != l.rank));
                let ranks = leaf.iter().map(|l| l.rank.to_string()).collect::<Vec<_>>().join(" ");
                Ok(match fail {
                    None => Outcome::new(
                        Status::Pass,
                        format!("Im h_# inside TN at {} points; ranks: {ranks}", leaf.len()),
                    ),
                    Some(l) => Outcome::new(
                        Status::Fail,
                        format!(
                            "at {} on `{}`: rank {}, image contained in TN: {}",
                            fmt_point(&l.point),
                            n.name(),
                            l.rank,
                            l.contained
                        ),
                    ),
                })
            }
        }
    }
}
