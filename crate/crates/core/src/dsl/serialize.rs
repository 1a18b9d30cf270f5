use std::fmt::Write;

use super::ast::{CheckDirective, CheckOptions, Declaration, LieForm, Scenario};
use crate::algebra::SubspaceKind;
use crate::symexpr::{Expr, Rational};

/// Canonical text for a scenario. Matrices are written in full; labels must
/// not contain `"` or line breaks.
pub fn serialize(sc: &Scenario) -> String {
    let mut out = String::new();
    for d in &sc.declarations {
        declaration(&mut out, d);
        out.push('\n');
    }
    for c in &sc.checks {
        check(&mut out, c);
        out.push('\n');
    }
    out
}

fn join<T>(items: &[T], sep: &str, f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(sep)
}

fn rat(r: &Rational) -> String {
    r.to_string()
}

fn rat_row(r: &[Rational]) -> String {
    format!("[{}]", join(r, ", ", rat))
}

fn rat_rows(rows: &[Vec<Rational>]) -> String {
    format!("[{}]", join(rows, "; ", |r| join(r, ", ", rat)))
}

fn expr_rows(rows: &[Vec<Expr>]) -> String {
    format!("[{}]", join(rows, "; ", |r| join(r, ", ", |e| e.to_string())))
}

fn declaration(out: &mut String, d: &Declaration) {
    let _ = match d {
        Declaration::Manifold { name, dim, coords } => {
            write!(out, "manifold {name} {{ dim {dim} coords [{}] }}", coords.join(" "))
        }
        Declaration::Bivector { name, chart, rows } => {
            write!(out, "bivector {name} on {chart} {{ {} }}", expr_rows(rows))
        }
        Declaration::Scalar { name, chart, value } => write!(out, "scalar {name} on {chart} = {value}"),
        Declaration::Map {
            name,
            source,
            target,
            matrix,
            offset,
        } => write!(
            out,
            "map {name} : {source} -> {target} {{ matrix {} offset {} }}",
            rat_rows(matrix),
            rat_row(offset)
        ),
        Declaration::Submanifold {
            name,
            ambient,
            origin,
            basis,
        } => write!(
            out,
            "submanifold {name} in {ambient} {{ origin {} basis {} }}",
            rat_row(origin),
            rat_rows(basis)
        ),
        Declaration::Algebra {
            name,
            dim,
            products,
            cocycle,
        } => {
            let p = join(products, " ", |((i, j, k), v)| format!("({i},{j},{k}): {v}"));
            let mut s = format!("algebra {name} {{ dim {dim} product {{ {p} }}");
            if !cocycle.is_empty() {
                let c = join(cocycle, " ", |((i, j), v)| format!("({i},{j}): {v}"));
                let _ = write!(s, " cocycle {{ {c} }}");
            }
            s.push_str(" }");
            out.push_str(&s);
            Ok(())
        }
    };
}

fn check(out: &mut String, c: &CheckDirective) {
    let _ = write!(out, "check {} {}", c.kind, c.args.join(" "));
    if !c.options.is_empty() {
        let _ = write!(out, " with {{ {} }}", options(&c.options));
    }
}

fn options(o: &CheckOptions) -> String {
    let mut parts = Vec::new();
    if let Some(l) = &o.label {
        parts.push(format!("label \"{l}\""));
    }
    if let Some(n) = o.samples {
        parts.push(format!("samples {n}"));
    }
    if let Some(p) = &o.points {
        parts.push(format!("points {}", rat_rows(p)));
    }
    if let Some(e) = o.expect {
        parts.push(format!("expect {}", e.as_str()));
    }
    if let Some(f) = o.form {
        parts.push(
            match f {
                LieForm::Stated => "form stated",
                LieForm::Corrected => "form corrected",
            }
            .to_string(),
        );
    }
    if let Some((kind, rows)) = &o.subspace {
        let kw = match kind {
            SubspaceKind::Ideal => "ideal",
            SubspaceKind::Subalgebra => "subalgebra",
        };
        parts.push(format!("{kw} {}", rat_rows(rows)));
    }
    if let Some(v) = &o.value {
        parts.push(format!("value {}", expr_rows(v)));
    }
    if let Some(a) = &o.at {
        parts.push(format!("at {}", rat_row(a)));
    }
    if let Some(r) = o.rank {
        parts.push(format!("rank {r}"));
    }
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_syntax;
    use super::*;

    #[test]
    fn round_trip_by_hand() {
        let src = "manifold M { dim 2 coords [x y] }\n\
                   bivector h on M { [x, 1/2; y^2] }\n\
                   scalar f on M = (x - 1)/(y + 2)\n\
                   map F : M -> M { matrix [1, 0; -2/3, 1] offset [0, 1] }\n\
                   submanifold N in M { origin [0, 0] basis [] }\n\
                   algebra A { dim 2 product { (1,1,1): 1 (1,2,2): -1 } cocycle { (2,2): 3/4 } }\n\
                   check lie_derivative h f with { form corrected value [x, 0; 0, 0] expect fail label \"a b\" }\n\
                   check annihilator A with { ideal [0, 1] at [1/2] rank 1 samples 3 points [] }\n";
        let a = parse_syntax(src).unwrap();
        let text = serialize(&a);
        let b = parse_syntax(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(serialize(&b), text);
    }
}
