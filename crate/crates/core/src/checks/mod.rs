//! Check kinds as interchangeable strategies behind one trait.
//!
//! Each kind declares the argument shapes it accepts and the options it
//! understands; [`Registry`] dispatches a directive to its strategy. A
//! strategy returns the symbolic verdict together with an optional
//! comparison against the numeric oracle at sample points.

mod algebraic;
mod fields;
mod maps;
mod submanifolds;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::Zero;

use crate::dsl::{CheckDirective, Model, ObjectKind};
use crate::geometry::{Chart, ScalarField, SymBivector};
use crate::oracle::{compare, OracleComparison};
use crate::sampling::Sampler;
use crate::structures::{AffineMap, AffineSubmanifold};
use crate::algebra::AlgebraSpec;
use crate::symexpr::{Expr, Rational, SymError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
    PointwisePass,
    Unsupported,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::PointwisePass => "pointwise-pass",
            Status::Unsupported => "unsupported",
        }
    }

    /// `pass` and `pointwise-pass`.
    pub fn is_pass(self) -> bool {
        matches!(self, Status::Pass | Status::PointwisePass)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A point (in the coordinates named in the details) and the residual that
/// is nonzero there.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub point: Vec<Rational>,
    pub residual: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub status: Status,
    pub witness: Option<Witness>,
    pub details: String,
    /// Present when the oracle ran.
    pub oracle: Option<OracleComparison>,
}

impl Outcome {
    pub fn new(status: Status, details: impl Into<String>) -> Self {
        Outcome {
            status,
            witness: None,
            details: details.into(),
            oracle: None,
        }
    }

    pub fn verdict(holds: bool, details: impl Into<String>) -> Self {
        Outcome::new(if holds { Status::Pass } else { Status::Fail }, details)
    }

    pub fn with_witness(mut self, w: Option<Witness>) -> Self {
        self.witness = w;
        self
    }

    pub fn with_oracle(mut self, o: Option<OracleComparison>) -> Self {
        self.oracle = o;
        self
    }
}

/// Engine failure while running a check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckError(pub String);

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

macro_rules! check_error_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CheckError {
            fn from(e: $t) -> Self {
                CheckError(e.to_string())
            }
        }
    )*};
}

check_error_from!(
    SymError,
    crate::geometry::GeometryError,
    crate::structures::StructureError,
    crate::algebra::AlgebraError
);

pub type CheckResult = Result<Outcome, CheckError>;

/// Shape of a check argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgType {
    /// A bivector; an algebra stands for its dual bivector.
    Bivector,
    Scalar,
    Map,
    Submanifold,
    Algebra,
}

impl ArgType {
    fn accepts(self, k: ObjectKind) -> bool {
        matches!(
            (self, k),
            (ArgType::Bivector, ObjectKind::Bivector | ObjectKind::Algebra)
                | (ArgType::Scalar, ObjectKind::Scalar)
                | (ArgType::Map, ObjectKind::Map)
                | (ArgType::Submanifold, ObjectKind::Submanifold)
                | (ArgType::Algebra, ObjectKind::Algebra)
        )
    }

    fn as_str(self) -> &'static str {
        match self {
            ArgType::Bivector => "bivector",
            ArgType::Scalar => "scalar",
            ArgType::Map => "map",
            ArgType::Submanifold => "submanifold",
            ArgType::Algebra => "algebra",
        }
    }
}

/// Options every kind accepts.
pub const COMMON_OPTIONS: &[&str] = &["label", "samples", "points", "expect"];

/// Everything a strategy needs to run one directive.
pub struct CheckContext<'a> {
    pub model: &'a Model,
    pub directive: &'a CheckDirective,
    /// Seed and sample count for this check.
    pub sampler: Sampler,
    pub oracle: bool,
}

impl<'a> CheckContext<'a> {
    fn arg(&self, i: usize) -> &'a str {
        &self.directive.args[i]
    }

    pub fn bivector(&self, i: usize) -> &'a SymBivector {
        self.model.bivector(self.arg(i)).expect("validated bivector")
    }

    pub fn scalar(&self, i: usize) -> &'a ScalarField {
        self.model.scalar(self.arg(i)).expect("validated scalar")
    }

    pub fn map(&self, i: usize) -> &'a AffineMap {
        self.model.map(self.arg(i)).expect("validated map")
    }

    pub fn submanifold(&self, i: usize) -> &'a AffineSubmanifold {
        self.model.submanifold(self.arg(i)).expect("validated submanifold")
    }

    pub fn algebra(&self, i: usize) -> &'a AlgebraSpec {
        self.model.algebra(self.arg(i)).expect("validated algebra")
    }

    /// Evaluation points of dimension `dim`: the `points` option when given
    /// (rows of other lengths are ignored), else the sampler's points.
    pub fn points(&self, dim: usize) -> Vec<Vec<Rational>> {
        match &self.directive.options.points {
            Some(p) => p.iter().filter(|r| r.len() == dim).cloned().collect(),
            None => self.sampler.points(dim),
        }
    }

    /// Runs the oracle comparison when the oracle is enabled.
    pub fn cross_check<S, O>(&self, points: &[Vec<Rational>], symbolic: S, oracle: O) -> Result<Option<OracleComparison>, CheckError>
    where
        S: Fn(&[Rational]) -> Result<Vec<Rational>, SymError>,
        O: Fn(&[Rational]) -> Result<Vec<Rational>, SymError>,
    {
        if !self.oracle {
            return Ok(None);
        }
        Ok(Some(compare(points, symbolic, oracle)?))
    }
}

/// One check kind.
pub trait Check: Send + Sync {
    fn kind(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    /// Accepted argument lists.
    fn signatures(&self) -> &'static [&'static [ArgType]];

    /// Options accepted beyond [`COMMON_OPTIONS`].
    fn options(&self) -> &'static [&'static str] {
        &[]
    }

    /// Kind-specific validation after argument shapes and charts matched.
    fn validate_extra(&self, _d: &CheckDirective, _m: &Model) -> Result<(), String> {
        Ok(())
    }

    fn run(&self, ctx: &CheckContext) -> CheckResult;
}

/// Dispatch table from kind name to strategy.
pub struct Registry {
    checks: BTreeMap<&'static str, Box<dyn Check>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            checks: BTreeMap::new(),
        }
    }

    /// All built-in kinds. Built once.
    pub fn standard() -> &'static Registry {
        static STD: OnceLock<Registry> = OnceLock::new();
        STD.get_or_init(|| {
            let mut r = Registry::empty();
            fields::register(&mut r);
            maps::register(&mut r);
            submanifolds::register(&mut r);
            algebraic::register(&mut r);
            r
        })
    }

    pub fn register(&mut self, c: Box<dyn Check>) {
        self.checks.insert(c.kind(), c);
    }

    pub fn get(&self, kind: &str) -> Option<&dyn Check> {
        self.checks.get(kind).map(|b| b.as_ref())
    }

    pub fn kinds(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.checks.keys().copied()
    }

    pub fn validate(&self, d: &CheckDirective, m: &Model) -> Result<(), String> {
        let check = self.get(&d.kind).ok_or_else(|| format!("unknown check kind `{}`", d.kind))?;
        let mut kinds = Vec::with_capacity(d.args.len());
        for a in &d.args {
            kinds.push(m.kind_of(a).ok_or_else(|| format!("unresolved reference `{a}`"))?);
        }
        let sig = check
            .signatures()
            .iter()
            .find(|s| s.len() == kinds.len() && s.iter().zip(&kinds).all(|(t, k)| t.accepts(*k)))
            .ok_or_else(|| {
                let want: Vec<String> = check
                    .signatures()
                    .iter()
                    .map(|s| s.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(" "))
                    .collect();
                let got: Vec<&str> = kinds.iter().map(|k| k.as_str()).collect();
                format!("expects ({}), got ({})", want.join(" | "), got.join(" "))
            })?;
        charts_compatible(sig, &d.args, m)?;
        for (name, set) in option_names(d) {
            if set && !COMMON_OPTIONS.contains(&name) && !check.options().contains(&name) {
                return Err(format!("option `{name}` does not apply to `{}`", d.kind));
            }
        }
        check.validate_extra(d, m)
    }
}

fn option_names(d: &CheckDirective) -> [(&'static str, bool); 6] {
    let o = &d.options;
    let (ideal, sub) = match &o.subspace {
        Some((crate::algebra::SubspaceKind::Ideal, _)) => (true, false),
        Some((crate::algebra::SubspaceKind::Subalgebra, _)) => (false, true),
        None => (false, false),
    };
    [
        ("form", o.form.is_some()),
        ("ideal", ideal),
        ("subalgebra", sub),
        ("value", o.value.is_some()),
        ("at", o.at.is_some()),
        ("rank", o.rank.is_some()),
    ]
}

/// With a map among the arguments, the first bivector lives on its source
/// and everything else on its target; otherwise all charts coincide.
fn charts_compatible(sig: &[ArgType], args: &[String], m: &Model) -> Result<(), String> {
    let chart_of = |t: ArgType, a: &str| -> Option<Chart> {
        match t {
            ArgType::Bivector => m.bivector(a).map(|h| h.chart().clone()),
            ArgType::Scalar => m.scalar(a).map(|f| f.chart().clone()),
            ArgType::Submanifold => m.submanifold(a).map(|n| n.ambient().clone()),
            ArgType::Algebra => m.chart_of(a).cloned(),
            ArgType::Map => None,
        }
    };
    let map = sig.iter().position(|t| *t == ArgType::Map).map(|i| m.map(&args[i]).expect("resolved"));
    let mut first_bivector = true;
    let mut common: Option<(Chart, &str)> = None;
    for (t, a) in sig.iter().zip(args) {
        let Some(ch) = chart_of(*t, a) else { continue };
        let expected = match map {
            Some(f) => {
                let on_source = *t == ArgType::Bivector && first_bivector;
                if *t == ArgType::Bivector {
                    first_bivector = false;
                }
                Some(if on_source { f.source() } else { f.target() })
            }
            None => common.as_ref().map(|(c, _)| c),
        };
        match expected {
            Some(e) if *e != ch => {
                return Err(format!(
                    "chart mismatch: `{a}` lives on `{}` but `{}` is expected",
                    ch.name(),
                    e.name()
                ))
            }
            Some(_) => {}
            None => common = Some((ch, a)),
        }
    }
    Ok(())
}

/// Witness for the first nonzero labeled residual: the first point where it
/// evaluates to a nonzero value (empty when no sample shows it).
pub(crate) fn first_witness(entries: &[(String, Expr)], chart: &Chart, points: &[Vec<Rational>]) -> Option<(String, Witness)> {
    let (label, e) = entries.iter().find(|(_, e)| !e.is_zero())?;
    let point = points
        .iter()
        .find(|p| matches!(e.eval_at(&chart.point_at(p)), Ok(v) if !v.is_zero()))
        .cloned()
        .unwrap_or_default();
    Some((
        label.clone(),
        Witness {
            point,
            residual: e.clone(),
        },
    ))
}

/// Pass when every residual vanishes; otherwise fail with a witness.
pub(crate) fn residual_outcome(
    what: &str,
    entries: &[(String, Expr)],
    chart: &Chart,
    points: &[Vec<Rational>],
) -> Outcome {
    match first_witness(entries, chart, points) {
        None => Outcome::new(Status::Pass, format!("{what}: all {} entries vanish identically", entries.len())),
        Some((label, w)) => {
            let n = entries.iter().filter(|(_, e)| !e.is_zero()).count();
            let at = if w.point.is_empty() {
                String::new()
            } else {
                format!(" (nonzero at the witness point on `{}`)", chart.name())
            };
            Outcome::new(
                Status::Fail,
                format!("{what}: {n} nonzero entries; first {label} = {}{at}", w.residual),
            )
            .with_witness(Some(w))
        }
    }
}

fn fmt_point(p: &[Rational]) -> String {
    format!("({})", p.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", "))
}

fn fmt_matrix(m: &crate::linalg::Matrix<Expr>) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect::<Vec<_>>().join(", "))
        .collect();
    format!("[{}]", rows.join("; "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{load_scenario, parse_scenario, DslError};

    #[test]
    fn registry_lists_every_kind() {
        let kinds: Vec<_> = Registry::standard().kinds().collect();
        for k in [
            "codazzi",
            "kv_bracket",
            "jacobi_tangent",
            "kv_map",
            "theorem1",
            "submanifold",
            "transversal",
            "coisotropic",
            "conormal",
            "graph",
            "preimage_transversal",
            "in_E",
            "special_class",
            "lie_derivative",
            "lift_props",
            "algebra",
            "annihilator",
            "rank",
        ] {
            assert!(kinds.contains(&k), "{k}");
        }
        assert_eq!(kinds.len(), 18);
    }

    #[test]
    fn validation_errors() {
        let base = "manifold M { dim 2 coords [x y] } manifold P { dim 1 coords [t] }\n\
                    bivector h on M { [x, 0; y] } bivector g on P { [t] } scalar f on P = t\n\
                    map F : P -> M { matrix [1; 0] offset [0, 0] }\n";
        let bad = |c: &str| match parse_scenario(&format!("{base}{c}")) {
            Err(DslError::Semantic(e)) => e.message,
            other => panic!("{c}: {other:?}"),
        };
        assert!(bad("check nonsense h").contains("unknown check kind"));
        assert!(bad("check codazzi f").contains("expects"));
        assert!(bad("check codazzi q").contains("unresolved"));
        assert!(bad("check in_E h f").contains("chart mismatch"));
        assert!(bad("check kv_map F h g").contains("chart mismatch"));
        assert!(bad("check codazzi h with { rank 2 }").contains("does not apply"));
        assert!(load_scenario(&format!("{base}check kv_map F g h\ncheck in_E g f")).is_ok());
    }
}
