use crate::algebra::SubspaceKind;
use crate::symexpr::{Expr, Rational};

/// A parsed scenario. Equality compares declarations and checks only; source
/// positions are carried alongside for diagnostics.
#[derive(Clone, Debug, Default)]
pub struct Scenario {
    pub declarations: Vec<Declaration>,
    pub checks: Vec<CheckDirective>,
    pub(crate) decl_pos: Vec<(usize, usize)>,
    pub(crate) check_pos: Vec<(usize, usize)>,
}

impl PartialEq for Scenario {
    fn eq(&self, other: &Self) -> bool {
        self.declarations == other.declarations && self.checks == other.checks
    }
}

impl Scenario {
    pub fn new(declarations: Vec<Declaration>, checks: Vec<CheckDirective>) -> Self {
        Scenario {
            declarations,
            checks,
            decl_pos: Vec::new(),
            check_pos: Vec::new(),
        }
    }

    /// `(line, column)` of the i-th declaration, when parsed from text.
    pub fn declaration_position(&self, i: usize) -> Option<(usize, usize)> {
        self.decl_pos.get(i).copied()
    }

    pub fn check_position(&self, i: usize) -> Option<(usize, usize)> {
        self.check_pos.get(i).copied()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Declaration {
    Manifold {
        name: String,
        dim: usize,
        coords: Vec<String>,
    },
    /// Rows are always stored in full, even when written as an upper triangle.
    Bivector {
        name: String,
        chart: String,
        rows: Vec<Vec<Expr>>,
    },
    Scalar {
        name: String,
        chart: String,
        value: Expr,
    },
    Map {
        name: String,
        source: String,
        target: String,
        matrix: Vec<Vec<Rational>>,
        offset: Vec<Rational>,
    },
    Submanifold {
        name: String,
        ambient: String,
        origin: Vec<Rational>,
        basis: Vec<Vec<Rational>>,
    },
    /// Indices are 1-based as written: `(i, j, k)` is `C^k_{ij}`.
    Algebra {
        name: String,
        dim: usize,
        products: Vec<((usize, usize, usize), Rational)>,
        cocycle: Vec<((usize, usize), Rational)>,
    },
}

impl Declaration {
    pub fn name(&self) -> &str {
        match self {
            Declaration::Manifold { name, .. }
            | Declaration::Bivector { name, .. }
            | Declaration::Scalar { name, .. }
            | Declaration::Map { name, .. }
            | Declaration::Submanifold { name, .. }
            | Declaration::Algebra { name, .. } => name,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Declaration::Manifold { .. } => "manifold",
            Declaration::Bivector { .. } => "bivector",
            Declaration::Scalar { .. } => "scalar",
            Declaration::Map { .. } => "map",
            Declaration::Submanifold { .. } => "submanifold",
            Declaration::Algebra { .. } => "algebra",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Pass,
    Fail,
    PointwisePass,
}

impl Expectation {
    pub fn as_str(self) -> &'static str {
        match self {
            Expectation::Pass => "pass",
            Expectation::Fail => "fail",
            Expectation::PointwisePass => "pointwise-pass",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LieForm {
    Stated,
    Corrected,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckOptions {
    pub label: Option<String>,
    pub samples: Option<usize>,
    pub points: Option<Vec<Vec<Rational>>>,
    pub expect: Option<Expectation>,
    pub form: Option<LieForm>,
    pub subspace: Option<(SubspaceKind, Vec<Vec<Rational>>)>,
    pub value: Option<Vec<Vec<Expr>>>,
    pub at: Option<Vec<Rational>>,
    pub rank: Option<usize>,
}

impl CheckOptions {
    pub fn is_empty(&self) -> bool {
        *self == CheckOptions::default()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckDirective {
    pub kind: String,
    pub args: Vec<String>,
    pub options: CheckOptions,
}

impl CheckDirective {
    /// The label, or `kind(arg, …)`.
    pub fn display_name(&self) -> String {
        match &self.options.label {
            Some(l) => l.clone(),
            None => format!("{}({})", self.kind, self.args.join(", ")),
        }
    }
}
