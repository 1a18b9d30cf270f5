//! Checks on commutative associative algebras and their duals.

use super::submanifolds::{conormal_outcome, kv_submanifold_outcome};
use super::{ArgType, Check, CheckContext, CheckError, CheckResult, Outcome, Registry, Status};
use crate::algebra::{annihilator_submanifold, validate_algebra, AlgebraError, SubspaceKind, SubspaceSpec};
use crate::dsl::{CheckDirective, Model};
use crate::geometry::codazzi_tensor;
use crate::oracle::{codazzi_at, eval_trilinear};

pub(super) fn register(r: &mut Registry) {
    r.register(Box::new(Algebra));
    r.register(Box::new(Annihilator));
}

struct Algebra;

impl Check for Algebra {
    fn kind(&self) -> &'static str {
        "algebra"
    }

    fn summary(&self) -> &'static str {
        "commutative, associative, with a symmetric 2-cocycle; the dual linear structure is K-V"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[&[ArgType::Algebra]]
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        let a = ctx.algebra(0);
        let h = ctx.bivector(0);
        let rep = validate_algebra(a);
        let cod = codazzi_tensor(h);
        let pts = ctx.points(a.dim());
        let o = ctx.cross_check(&pts, |p| eval_trilinear(&cod, p), |p| codazzi_at(h, p))?;
        if rep.valid() && !cod.is_zero() {
            return Err(CheckError("valid algebra with non-K-V dual".into()));
        }
        let details = if let Some((i, j)) = rep.commutativity_witness {
            format!("not commutative: e{i}e{j} != e{j}e{i}")
        } else if let Some((i, j, k)) = rep.associativity_witness {
            format!("not associative: (e{i}e{j})e{k} != e{i}(e{j}e{k})")
        } else if let Some((i, j)) = rep.symmetry_witness {
            format!("cocycle not symmetric at ({i},{j})")
        } else if let Some((i, j, k)) = rep.cocycle_witness {
            format!("cocycle condition fails: B(e{i}e{j}, e{k}) != B(e{i}, e{j}e{k})")
        } else {
            format!("valid; dual bivector is K-V; Codazzi zero: {}", cod.is_zero())
        };
        Ok(Outcome::verdict(rep.valid(), details).with_oracle(o))
    }
}

struct Annihilator;

impl Check for Annihilator {
    fn kind(&self) -> &'static str {
        "annihilator"
    }

    fn summary(&self) -> &'static str {
        "annihilator of an ideal is a K-V submanifold; of a subalgebra, coisotropic with a left-symmetric conormal algebroid"
    }

    fn signatures(&self) -> &'static [&'static [ArgType]] {
        &[&[ArgType::Algebra]]
    }

    fn options(&self) -> &'static [&'static str] {
        &["ideal", "subalgebra", "at"]
    }

    fn validate_extra(&self, d: &CheckDirective, m: &Model) -> Result<(), String> {
        let Some((_, rows)) = &d.options.subspace else {
            return Err("needs an `ideal [..]` or `subalgebra [..]` option".into());
        };
        let a = m.algebra(&d.args[0]).expect("validated");
        if rows.iter().any(|r| r.len() != a.dim()) {
            return Err(format!("subspace vectors need {} entries", a.dim()));
        }
        Ok(())
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult {
        let a = ctx.algebra(0);
        let h = ctx.bivector(0);
        let (kind, rows) = ctx.directive.options.subspace.clone().expect("validated");
        let spec = SubspaceSpec { basis: rows, kind };
        let chart = h.chart();
        let name = format!("{}_ann", a.name());
        let n = match annihilator_submanifold(a, chart, &spec, &name) {
            Ok(n) => n,
            Err(AlgebraError::InvalidSubspace(msg)) => return Ok(Outcome::new(Status::Fail, msg)),
            Err(e) => return Err(e.into()),
        };
        if let Some(at) = &ctx.directive.options.at {
            if at.len() != n.dim() {
                return Err(CheckError(format!("`at` needs {} tangent coordinates", n.dim())));
            }
        }
        let mut out = match kind {
            SubspaceKind::Ideal => kv_submanifold_outcome(ctx, &n, h)?,
            SubspaceKind::Subalgebra => conormal_outcome(ctx, &n, h, ctx.directive.options.at.as_deref())?,
        };
        out.details = format!("annihilator of dimension {}; {}", n.dim(), out.details);
        Ok(out)
    }
}
