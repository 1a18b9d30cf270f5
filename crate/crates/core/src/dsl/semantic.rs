//! Name resolution and construction of engine objects from a scenario.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::ast::{Declaration, Scenario};
use crate::algebra::{algebra_bivector, dual_chart, AlgebraSpec};
use crate::geometry::{Chart, GeometryError, ScalarField, SymBivector};
use crate::linalg::Matrix;
use crate::structures::{AffineMap, AffineSubmanifold};
use crate::symexpr::Rational;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct SemanticError {
    /// 1-based `(line, column)` of the offending declaration or check, when
    /// the scenario came from text.
    pub position: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for SemanticError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some((l, c)) => write!(f, "{l}:{c}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl SemanticError {
    pub fn new(position: Option<(usize, usize)>, message: impl Into<String>) -> Self {
        SemanticError {
            position,
            message: message.into(),
        }
    }
}

/// What a declared name refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectKind {
    Manifold,
    Bivector,
    Scalar,
    Map,
    Submanifold,
    Algebra,
}

impl ObjectKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectKind::Manifold => "manifold",
            ObjectKind::Bivector => "bivector",
            ObjectKind::Scalar => "scalar",
            ObjectKind::Map => "map",
            ObjectKind::Submanifold => "submanifold",
            ObjectKind::Algebra => "algebra",
        }
    }
}

/// Engine objects built from the declarations of a scenario. An algebra
/// also provides its dual chart and its dual bivector under its own name.
#[derive(Clone, Debug, Default)]
pub struct Model {
    kinds: BTreeMap<String, ObjectKind>,
    charts: BTreeMap<String, Chart>,
    bivectors: BTreeMap<String, SymBivector>,
    scalars: BTreeMap<String, ScalarField>,
    maps: BTreeMap<String, AffineMap>,
    submanifolds: BTreeMap<String, AffineSubmanifold>,
    algebras: BTreeMap<String, AlgebraSpec>,
}

impl Model {
    pub fn build(sc: &Scenario) -> Result<Model, SemanticError> {
        let mut m = Model::default();
        for (i, d) in sc.declarations.iter().enumerate() {
            let pos = sc.declaration_position(i);
            let err = |msg: String| SemanticError::new(pos, format!("{} `{}`: {msg}", d.keyword(), d.name()));
            if m.kinds.contains_key(d.name()) {
                return Err(err("duplicate name".into()));
            }
            m.declare(d).map_err(err)?;
        }
        Ok(m)
    }

    fn chart(&self, name: &str) -> Result<&Chart, String> {
        match self.kinds.get(name) {
            Some(ObjectKind::Manifold | ObjectKind::Algebra) => Ok(&self.charts[name]),
            Some(k) => Err(format!("`{name}` is a {}, not a manifold", k.as_str())),
            None => Err(format!("unresolved reference `{name}`")),
        }
    }

    fn declare(&mut self, d: &Declaration) -> Result<(), String> {
        let geo = |e: GeometryError| e.to_string();
        let name = d.name().to_string();
        let kind = match d {
            Declaration::Manifold { dim, coords, .. } => {
                if *dim != coords.len() {
                    return Err(format!("dim {dim} but {} coordinates", coords.len()));
                }
                self.charts.insert(name.clone(), Chart::new(&name, coords).map_err(geo)?);
                ObjectKind::Manifold
            }
            Declaration::Bivector { chart, rows, .. } => {
                let ch = self.chart(chart)?;
                let h = SymBivector::from_rows(ch, rows.clone()).map_err(|e| match e {
                    GeometryError::Asymmetric(i, j) => {
                        format!("asymmetric: entries ({i},{j}) and ({j},{i}) differ")
                    }
                    other => other.to_string(),
                })?;
                self.bivectors.insert(name.clone(), h);
                ObjectKind::Bivector
            }
            Declaration::Scalar { chart, value, .. } => {
                let ch = self.chart(chart)?;
                self.scalars
                    .insert(name.clone(), ScalarField::new(ch, value.clone()).map_err(geo)?);
                ObjectKind::Scalar
            }
            Declaration::Map {
                source,
                target,
                matrix,
                offset,
                ..
            } => {
                let s = self.chart(source)?.clone();
                let t = self.chart(target)?.clone();
                if matrix.len() != t.dim() || matrix.iter().any(|r| r.len() != s.dim()) {
                    return Err(format!("matrix must be {}x{}", t.dim(), s.dim()));
                }
                let mat = if t.dim() == 0 {
                    Matrix::zeros(0, s.dim())
                } else {
                    Matrix::from_rows(matrix.clone())
                };
                let f = AffineMap::new(&s, &t, mat, offset.clone()).map_err(|e| e.to_string())?;
                self.maps.insert(name.clone(), f);
                ObjectKind::Map
            }
            Declaration::Submanifold {
                ambient, origin, basis, ..
            } => {
                let ch = self.chart(ambient)?;
                let n = AffineSubmanifold::new(&name, ch, origin.clone(), basis.clone())
                    .map_err(|e| e.to_string())?;
                self.submanifolds.insert(name.clone(), n);
                ObjectKind::Submanifold
            }
            Declaration::Algebra {
                dim,
                products,
                cocycle,
                ..
            } => {
                if *dim == 0 {
                    return Err("dimension must be positive".into());
                }
                let range = |i: usize| {
                    if i == 0 || i > *dim {
                        Err(format!("index {i} out of range 1..={dim}"))
                    } else {
                        Ok(i - 1)
                    }
                };
                let mut grouped: BTreeMap<(usize, usize), Vec<Rational>> = BTreeMap::new();
                for ((i, j, k), v) in products {
                    let (i, j, k) = (range(*i)?, range(*j)?, range(*k)?);
                    let row = grouped.entry((i, j)).or_insert_with(|| vec![Rational::zero(); *dim]);
                    if !row[k].is_zero() {
                        return Err(format!("product entry ({},{},{}) given twice", i + 1, j + 1, k + 1));
                    }
                    row[k] = v.clone();
                }
                let products: Vec<_> = grouped.into_iter().map(|((i, j), v)| (i, j, v)).collect();
                let mut pairs = Vec::new();
                for ((i, j), v) in cocycle {
                    let (i, j) = (range(*i)?, range(*j)?);
                    if pairs.iter().any(|(p, q, _)| (*p, *q) == (i, j)) {
                        return Err(format!("cocycle entry ({},{}) given twice", i + 1, j + 1));
                    }
                    pairs.push((i, j, v.clone()));
                }
                let a = AlgebraSpec::from_entries(&name, *dim, &products, &pairs).map_err(|e| e.to_string())?;
                let ch = dual_chart(&a).map_err(|e| e.to_string())?;
                let h = algebra_bivector(&a, &ch).map_err(|e| e.to_string())?;
                self.charts.insert(name.clone(), ch);
                self.bivectors.insert(name.clone(), h);
                self.algebras.insert(name.clone(), a);
                ObjectKind::Algebra
            }
        };
        self.kinds.insert(name, kind);
        Ok(())
    }

    pub fn kind_of(&self, name: &str) -> Option<ObjectKind> {
        self.kinds.get(name).copied()
    }

    pub fn chart_of(&self, name: &str) -> Option<&Chart> {
        self.charts.get(name)
    }

    /// A bivector, or the dual bivector of an algebra.
    pub fn bivector(&self, name: &str) -> Option<&SymBivector> {
        self.bivectors.get(name)
    }

    pub fn scalar(&self, name: &str) -> Option<&ScalarField> {
        self.scalars.get(name)
    }

    pub fn map(&self, name: &str) -> Option<&AffineMap> {
        self.maps.get(name)
    }

    pub fn submanifold(&self, name: &str) -> Option<&AffineSubmanifold> {
        self.submanifolds.get(name)
    }

    pub fn algebra(&self, name: &str) -> Option<&AlgebraSpec> {
        self.algebras.get(name)
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_syntax;
    use super::*;

    fn build(src: &str) -> Result<Model, SemanticError> {
        Model::build(&parse_syntax(src).unwrap())
    }

    #[test]
    fn errors_name_the_declaration() {
        let m = "manifold M { dim 2 coords [x y] }\n";
        let e = build(&format!("{m}bivector h on M {{ [0, x; 1, 0] }}")).unwrap_err();
        assert!(e.message.contains("asymmetric"), "{e}");
        assert_eq!(e.position, Some((2, 1)));
        assert!(build(&format!("{m}scalar M on M = x")).unwrap_err().message.contains("duplicate"));
        assert!(build(&format!("{m}scalar f on P = x")).unwrap_err().message.contains("unresolved"));
        assert!(build(&format!("{m}scalar f on M = z")).unwrap_err().message.contains("unknown variable"));
        assert!(build(&format!("{m}submanifold N in M {{ origin [0, 0] basis [1, 1; 2, 2] }}")).is_err());
        assert!(build(&format!("{m}map F : M -> M {{ matrix [1, 0] offset [0, 0] }}")).is_err());
        assert!(build("manifold M { dim 3 coords [x y] }").is_err());
        assert!(build("algebra A { dim 1 product { (1,1,2): 1 } }").is_err());
    }

    #[test]
    fn algebra_provides_chart_and_bivector() {
        let m = build("algebra A { dim 2 product { (1,1,1): 1 } }\nscalar f on A = y").unwrap();
        assert_eq!(m.kind_of("A"), Some(ObjectKind::Algebra));
        assert_eq!(m.chart_of("A").unwrap().dim(), 2);
        assert_eq!(m.bivector("A").unwrap().get(0, 0).to_string(), "x");
        assert!(m.scalar("f").is_some());
    }
}
