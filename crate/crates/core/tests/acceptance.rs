//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines always reach stdout. A criterion whose claim the
//! engine refutes prints FAIL with the analysis but does not fail the target;
//! any other FAIL does.

use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::Rng;

use kvgeom::algebra::{
    algebra_bivector, algebra_to_kv, annihilator_submanifold, dual_chart, AlgebraSpec, SubspaceKind, SubspaceSpec,
};
use kvgeom::corpus;
use kvgeom::dsl::{load_scenario, parse_scenario, serialize, Declaration, DslError, Model};
use kvgeom::generate::{random_affine_map, random_algebra, random_bivector, random_kv, random_poly, random_scenario};
use kvgeom::geometry::{
    codazzi_tensor, in_e, is_kv, lie_derivative_h, lie_derivative_residual, special_class_check, Chart, LieIdentity,
    ScalarField, SymBivector,
};
use kvgeom::linalg::Matrix;
use kvgeom::report::Format;
use kvgeom::runner::{run, RunConfig, EXIT_OK};
use kvgeom::sampling::Sampler;
use kvgeom::structures::{
    conormal_algebroid, graph_check, is_coisotropic, is_kv_submanifold, preimage_transversal, product_kv,
    theorem1_equivalences, AffineMap, AffineSubmanifold, ProductSign, Transversality,
};
use kvgeom::symexpr::{int, parse_expr, Expr, Rational};
use kvgeom::tangent::{build_pi, schouten_jacobi, TangentChart};

enum Verdict {
    Pass(String),
    Fail(String),
    /// The claim does not hold; the analysis is in the message.
    Refuted(String),
}

type Res = Result<Verdict, String>;

fn chart(name: &str, coords: &[&str]) -> Chart {
    Chart::new(name, coords).expect("valid chart")
}

fn bivector(c: &Chart, rows: &[&[&str]]) -> SymBivector {
    let rows = rows.iter().map(|r| r.iter().map(|e| parse_expr(e).unwrap()).collect()).collect();
    SymBivector::from_rows(c, rows).expect("symmetric")
}

fn scalar(c: &Chart, e: &str) -> ScalarField {
    ScalarField::new(c, parse_expr(e).unwrap()).unwrap()
}

fn map(s: &Chart, t: &Chart, m: Vec<Vec<i64>>, c: Vec<i64>) -> AffineMap {
    let m = Matrix::from_rows(m.into_iter().map(|r| r.into_iter().map(int).collect()).collect());
    AffineMap::new(s, t, m, c.into_iter().map(int).collect()).unwrap()
}

fn within(start: Instant, bound: Duration, detail: String) -> Verdict {
    let t = start.elapsed();
    if t <= bound {
        Verdict::Pass(format!("{detail} ({:.2}s)", t.as_secs_f64()))
    } else {
        Verdict::Fail(format!("{detail}, but took {:.2}s > {}s", t.as_secs_f64(), bound.as_secs()))
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// K-V bivectors declared in the combined corpus scenario.
fn corpus_kv_instances() -> Vec<SymBivector> {
    let (sc, model): (_, Model) = load_scenario(corpus::find("paper_examples").unwrap().text).unwrap();
    sc.declarations
        .iter()
        .filter(|d| matches!(d, Declaration::Bivector { .. } | Declaration::Algebra { .. }))
        .filter_map(|d| model.bivector(d.name()).cloned())
        .filter(is_kv)
        .collect()
}

fn show(h: &SymBivector) -> String {
    let rows: Vec<String> = h
        .matrix()
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "))
        .collect();
    format!("[{}]", rows.join("; "))
}

fn c1_codazzi_corpus() -> Res {
    let start = Instant::now();
    let r2 = chart("R2", &["x", "y"]);
    for h in [bivector(&r2, &[&["x", "0"], &["0", "y"]]), bivector(&r2, &[&["x^2", "0"], &["0", "0"]])] {
        ensure(codazzi_tensor(&h).is_zero(), || format!("Codazzi nonzero for {:?}", h.matrix()))?;
    }
    let mut rng = Sampler::default().rng(101);
    for i in 0..50 {
        let a = random_algebra(&mut rng, 1 + i % 4);
        let h = algebra_to_kv(&a).map_err(err)?;
        ensure(codazzi_tensor(&h).is_zero(), || format!("algebra #{i} dual not K-V: {a:?}"))?;
    }
    Ok(within(start, Duration::from_secs(10), "2 worked instances and 50 algebra duals (dim <= 4) have zero Codazzi tensor".into()))
}

fn c2_lie_derivative() -> Res {
    let start = Instant::now();
    let r2 = chart("R2", &["x", "y"]);
    let h = bivector(&r2, &[&["x", "0"], &["0", "y"]]);
    let l = lie_derivative_h(&h, &scalar(&r2, "x")).map_err(err)?;
    ensure(l.get(0, 0) == &parse_expr("-x").unwrap(), || format!("(L h)(dx,dx) = {}", l.get(0, 0)))?;

    let instances: Vec<SymBivector> = corpus_kv_instances().into_iter().take(10).collect();
    ensure(instances.len() == 10, || format!("only {} corpus instances", instances.len()))?;
    let mut rng = Sampler::default().rng(102);
    let (mut stated_fail, mut corrected_fail, mut total) = (0, 0, 0);
    let mut example = None;
    for h in &instances {
        for _ in 0..50 {
            let f = ScalarField::new(h.chart(), random_poly(&mut rng, h.chart(), 3, 3)).unwrap();
            total += 1;
            if !lie_derivative_residual(h, &f, LieIdentity::Corrected).map_err(err)?.is_zero() {
                corrected_fail += 1;
            }
            let stated = lie_derivative_residual(h, &f, LieIdentity::AsStated).map_err(err)?;
            if !stated.is_zero() {
                stated_fail += 1;
                example.get_or_insert_with(|| format!("f = {} on h = {}", f.value(), show(h)));
            }
        }
    }
    let t = start.elapsed();
    ensure(t <= Duration::from_secs(10), || format!("took {:.2}s", t.as_secs_f64()))?;
    if stated_fail == 0 && corrected_fail == 0 {
        return Ok(Verdict::Pass(format!("value -x; residual zero for {total} pairs ({:.2}s)", t.as_secs_f64())));
    }
    if corrected_fail == 0 {
        let r = lie_derivative_residual(&h, &scalar(&r2, "x^2"), LieIdentity::AsStated).map_err(err)?;
        return Ok(Verdict::Refuted(format!(
            "value -x holds; the identity with +2<nabla_(a#) df, b#> leaves a nonzero residual for {stated_fail}/{total} pairs \
             (e.g. {}; on diag(x,y) with f = x^2 the (dx,dx) residual is {}); with -2 it vanishes for all {total}",
            example.unwrap_or_default(),
            r.get(0, 0)
        )));
    }
    Ok(Verdict::Fail(format!("corrected form fails for {corrected_fail}/{total} pairs")))
}

fn c3_poisson_equivalence() -> Res {
    let start = Instant::now();
    let mut rng = Sampler::default().rng(103);
    let (mut kv, mut total) = (0, 0);
    for i in 0..100 {
        let c = if i % 2 == 0 { chart("M", &["x", "y"]) } else { chart("M", &["x", "y", "z"]) };
        let h = if i % 4 < 2 { random_bivector(&mut rng, &c, 2) } else { random_kv(&mut rng, &c) };
        let a = codazzi_tensor(&h).is_zero();
        let pi = build_pi(&TangentChart::new(&c), &h).map_err(err)?;
        let b = schouten_jacobi(&pi).is_zero();
        ensure(a == b, || format!("disagreement on {}: Codazzi zero {a}, [Pi,Pi] zero {b}", show(&h)))?;
        kv += a as usize;
        total += 1;
    }
    Ok(within(start, Duration::from_secs(30), format!("{total} bivectors, {kv} K-V, verdicts agree")))
}

/// `(name, F, h1, h2, expected K-V-map verdict)`.
type MapInstance = (String, AffineMap, SymBivector, SymBivector, Option<bool>);

/// Four family maps `t ↦ (λt, μt)` followed by 26 further instances.
fn map_instances() -> Vec<MapInstance> {
    let l = chart("L", &["t"]);
    let r2 = chart("R2", &["x", "y"]);
    let h1 = bivector(&l, &[&["t^2"]]);
    let h2 = bivector(&r2, &[&["x^2", "0"], &["0", "y^2"]]);
    let mut out = Vec::new();
    for (lam, mu) in [(1, 0), (0, 1), (1, 1), (2, 3)] {
        let f = map(&l, &r2, vec![vec![lam], vec![mu]], vec![0, 0]);
        out.push((format!("({lam},{mu})"), f, h1.clone(), h2.clone(), Some(lam == 0 || mu == 0)));
    }
    let mut rng = Sampler::default().rng(104);
    let names = [["x", "y"], ["u", "v"]];
    for i in 0..26 {
        let d1 = 1 + i % 2;
        let d2 = 1 + (i / 2) % 2;
        let c1 = chart("P", &names[0][..d1]);
        let c2 = chart("Q", &names[1][..d2]);
        match i % 3 {
            0 => {
                let h = random_kv(&mut rng, &c1);
                out.push((format!("identity #{i}"), AffineMap::identity(&c1), h.clone(), h, Some(true)));
            }
            1 => {
                let (a, b) = (random_kv(&mut rng, &c1), random_kv(&mut rng, &c2));
                let p = product_kv(&a, &b, ProductSign::Plus).unwrap();
                let (pa, pb) = (p.p1.clone(), p.p2.clone());
                out.push((format!("projection 1 #{i}"), pa, p.h.clone(), a, Some(true)));
                if i % 2 == 1 {
                    out.push((format!("projection 2 #{i}"), pb, p.h, b, Some(true)));
                }
            }
            _ => {
                let (a, b) = (random_kv(&mut rng, &c1), random_kv(&mut rng, &c2));
                out.push((format!("random #{i}"), random_affine_map(&mut rng, &c1, &c2), a, b, None));
            }
        }
    }
    out.truncate(30);
    out
}

fn c4_theorem1() -> Res {
    let start = Instant::now();
    let sampler = Sampler::default();
    let inst = map_instances();
    ensure(inst.len() == 30, || format!("{} instances", inst.len()))?;
    let mut positives = 0;
    for (name, f, h1, h2, expected) in &inst {
        let r = theorem1_equivalences(f, h1, h2, &sampler).map_err(err)?;
        ensure(r.all_agree(), || format!("{name}: verdicts disagree: {r:?}"))?;
        if let Some(e) = expected {
            ensure(r.kv_map == *e, || format!("{name}: K-V map {} but expected {e}", r.kv_map))?;
        }
        positives += r.kv_map as usize;
    }
    Ok(within(
        start,
        Duration::from_secs(60),
        format!("30 instances ({positives} K-V maps), (i)-(iv) agree; (1,0),(0,1) pass, (1,1),(2,3) fail"),
    ))
}

fn c5_submanifolds() -> Res {
    let mut notes = Vec::new();
    for (m, k) in [(3usize, 1usize), (4, 2)] {
        let names: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
        let c = Chart::new("R", &names).unwrap();
        let h = SymBivector::new(&c, Matrix::from_fn(m, m, |i, j| &c.coord_expr(i) * &c.coord_expr(j))).unwrap();
        let basis = (0..k).map(|i| (0..m).map(|j| int((i == j) as i64)).collect()).collect();
        let n = AffineSubmanifold::new("N", &c, vec![Rational::zero(); m], basis).unwrap();
        let r = is_kv_submanifold(&n, &h).map_err(err)?;
        ensure(r.holds, || format!("({m},{k}) is not a K-V submanifold"))?;
        let ind = r.induced.ok_or("no induced structure")?;
        let ic = ind.chart().clone();
        for i in 0..k {
            for j in 0..k {
                let want = &ic.coord_expr(i) * &ic.coord_expr(j);
                ensure(ind.get(i, j) == &want, || format!("({m},{k}) induced ({i},{j}) = {}", ind.get(i, j)))?;
            }
        }
        notes.push(format!("({m},{k})"));
    }
    let r2 = chart("R2", &["x", "y"]);
    let axis = AffineSubmanifold::new("N", &r2, vec![int(0), int(0)], vec![vec![int(1), int(0)]]).unwrap();
    for f1 in ["x^2 + 1", "x", "3", "x^2 - x"] {
        for (f2, expect) in [("y", true), ("1", false)] {
            let h = bivector(&r2, &[&[f1, "0"], &["0", f2]]);
            let r = is_kv_submanifold(&axis, &h).map_err(err)?;
            ensure(r.holds == expect, || format!("f1 = {f1}, f2 = {f2}: holds {}", r.holds))?;
            if let Some(ind) = r.induced {
                let want = parse_expr(&f1.replace('x', ind.chart().coord(0).as_str())).unwrap();
                ensure(ind.get(0, 0) == &want, || format!("induced {} vs {want}", ind.get(0, 0)))?;
            }
        }
    }
    Ok(Verdict::Pass(format!(
        "x_i x_j passes for {}, induced x_i x_j; diag(f1,f2) axis passes for f2 = y (induced f1), fails for f2 = 1",
        notes.join(" ")
    )))
}

fn c6_transversal() -> Res {
    let mut rng = Sampler::default().rng(106);
    let sampler = Sampler::default();
    let mut count = 0;
    for (n, m) in [(3usize, 1usize), (3, 2), (4, 2), (4, 1), (3, 1), (2, 1)] {
        let src = Chart::new("S", &["a", "b", "c", "d"][..n]).unwrap();
        let tgt = Chart::new("T", &["u", "v"][..m]).unwrap();
        let f = loop {
            let f = random_affine_map(&mut rng, &src, &tgt);
            if f.matrix().rank() == m {
                break f;
            }
        };
        let p: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-2..=2))).collect();
        let pt = AffineSubmanifold::new("c", &tgt, f.apply_point(&p), vec![]).unwrap();
        let r = preimage_transversal(&f, &SymBivector::standard(&src), &SymBivector::standard(&tgt), &pt, &sampler)
            .map_err(err)?;
        ensure(r.source_verdict == Transversality::SymbolicTrue, || format!("fibre of {f:?}: {:?}", r.source_verdict))?;
        let ind = r.source_induced.ok_or("no induced structure")?;
        let b = Matrix::from_rows(r.preimage.basis().to_vec());
        let gram_inv = b.mul(&b.transpose()).inverse().ok_or("singular Gram matrix")?;
        let k = r.preimage.dim();
        for i in 0..k {
            for j in 0..k {
                let want = Expr::constant(gram_inv.get(i, j).clone());
                ensure(ind.get(i, j) == &want, || format!("induced ({i},{j}) = {} vs metric {want}", ind.get(i, j)))?;
            }
        }
        count += 1;
    }
    Ok(Verdict::Pass(format!(
        "{count} fibres: symbolic-true, induced structure is the restricted metric (inverse Gram matrix of the fibre basis)"
    )))
}

fn truncated_cubic() -> AlgebraSpec {
    let one = int(1);
    AlgebraSpec::from_entries(
        "T",
        3,
        &[
            (0, 0, vec![one.clone(), int(0), int(0)]),
            (0, 1, vec![int(0), one.clone(), int(0)]),
            (0, 2, vec![int(0), int(0), one.clone()]),
            (1, 1, vec![int(0), int(0), one]),
        ],
        &[],
    )
    .unwrap()
}

fn c7_coisotropic() -> Res {
    let a = truncated_cubic();
    let c = dual_chart(&a).map_err(err)?;
    let h = algebra_bivector(&a, &c).map_err(err)?;
    let v = |xs: &[i64]| xs.iter().map(|&x| int(x)).collect::<Vec<_>>();
    let mut notes = Vec::new();
    for basis in [vec![v(&[1, 0, 0])], vec![v(&[0, 0, 1])], vec![v(&[1, 0, 0]), v(&[0, 0, 1])]] {
        let spec = SubspaceSpec { basis: basis.clone(), kind: SubspaceKind::Subalgebra };
        let n = annihilator_submanifold(&a, &c, &spec, "N").map_err(err)?;
        ensure(is_coisotropic(&n, &h).map_err(err)?.holds, || format!("annihilator of {basis:?} not coisotropic"))?;
        let alg = conormal_algebroid(&n, &h).map_err(err)?;
        ensure(alg.is_left_symmetric(), || format!("conormal of {basis:?} not left-symmetric"))?;
        notes.push(format!("rank {}", alg.rank()));
    }
    for basis in [vec![v(&[0, 1, 0]), v(&[0, 0, 1])], vec![v(&[0, 0, 1])]] {
        let spec = SubspaceSpec { basis: basis.clone(), kind: SubspaceKind::Ideal };
        let n = annihilator_submanifold(&a, &c, &spec, "N").map_err(err)?;
        ensure(is_kv_submanifold(&n, &h).map_err(err)?.holds, || format!("annihilator of ideal {basis:?} fails"))?;
    }
    Ok(Verdict::Pass(format!(
        "subalgebra annihilators in the dual of R[t]/(t^3) are coisotropic, conormal products close and are left-symmetric ({}); ideal annihilators are K-V submanifolds",
        notes.join(", ")
    )))
}

fn c8_graph() -> Res {
    let inst = map_instances();
    let mut positives = 0;
    for (name, f, h1, h2, _) in &inst {
        let r = graph_check(f, h1, h2).map_err(err)?;
        ensure(r.agree(), || format!("{name}: graph coisotropic {}, K-V map {}", r.coisotropic, r.kv_map))?;
        positives += r.kv_map as usize;
    }
    Ok(Verdict::Pass(format!("Graph(F) coisotropic iff K-V map on all {} instances ({positives} K-V)", inst.len())))
}

fn c9_space_e() -> Res {
    let a = AlgebraSpec::from_entries("A", 2, &[(0, 0, vec![int(1), int(0)])], &[]).unwrap();
    let h = algebra_to_kv(&a).map_err(err)?;
    let c = h.chart().clone();
    let ys = ["y", "y^2", "y^3 - 2*y", "3", "y^4 + y"];
    for f in ys {
        ensure(in_e(&h, &scalar(&c, f)).map_err(err)?, || format!("{f} not in E"))?;
    }
    let r2 = chart("R2", &["x", "y"]);
    let hx = bivector(&r2, &[&["x^2", "0"], &["0", "0"]]);
    ensure(in_e(&hx, &scalar(&r2, "x")).map_err(err)?, || "x not in E for x^2".into())?;
    ensure(!in_e(&hx, &scalar(&r2, "x^2")).map_err(err)?, || "x^2 in E for x^2".into())?;
    let fx = scalar(&r2, "x");
    ensure(!special_class_check(&hx, &fx, &fx).map_err(err)?, || "special class holds on x^2".into())?;

    let mut tested = 0;
    for f1 in ys {
        for f2 in ys {
            ensure(special_class_check(&h, &scalar(&c, f1), &scalar(&c, f2)).map_err(err)?, || format!("fails for {f1}, {f2}"))?;
            tested += 1;
        }
    }
    let mut rng = Sampler::default().rng(109);
    for i in 0..20 {
        let b = algebra_to_kv(&random_algebra(&mut rng, 1 + i % 4)).map_err(err)?;
        let bc = b.chart().clone();
        let lin = |rng: &mut rand_chacha::ChaCha8Rng| random_poly(rng, &bc, 1, 3);
        let (f1, f2) = (ScalarField::new(&bc, lin(&mut rng)).unwrap(), ScalarField::new(&bc, lin(&mut rng)).unwrap());
        ensure(special_class_check(&b, &f1, &f2).map_err(err)?, || format!("random algebra #{i}"))?;
        tested += 1;
    }
    Ok(Verdict::Pass(format!(
        "y-only functions in E on the dual of e1.e1 = e1; on x^2: x in E, x^2 not, special class fails; special class holds on {tested} algebra-dual pairs"
    )))
}

fn c10_oracle_coherence() -> Res {
    let start = Instant::now();
    let (mut checks, mut compared) = (0, 0);
    for e in corpus::entries() {
        let out = run(&RunConfig {
            scenarios: vec![format!("builtin:{}", e.name)],
            ..RunConfig::default()
        });
        ensure(out.exit_code == EXIT_OK, || format!("{}: exit {} {:?}", e.name, out.exit_code, out.diagnostics))?;
        for r in &out.records {
            checks += 1;
            ensure(!r.details.contains("oracle disagrees"), || format!("{}: {}", e.name, r.details))?;
            compared += r.details.contains("oracle agrees") as usize;
        }
    }
    Ok(within(
        start,
        Duration::from_secs(60),
        format!("seed 42, 20 samples: oracle agrees on all {compared} cross-checked of {checks} corpus checks"),
    ))
}

fn c11_dsl() -> Res {
    let mut rng = Sampler::default().rng(111);
    for i in 0..100 {
        let sc = random_scenario(&mut rng);
        let text = serialize(&sc);
        let back = parse_scenario(&text).map_err(|e| format!("#{i}: {e}"))?;
        ensure(back == sc, || format!("#{i} does not round-trip"))?;
    }
    let malformed = [
        "manifold M { dim 2 coords [x y] }\nbivector h on M { [x +] }",
        "manifold M { dim 1 coords [x] }\nscalar f on M = (x + 1",
        "check codazzi h with { samples 0 }",
        "algebra A { dim 1 product { (0,1,1): 1 } }",
        "frobnicate M",
    ];
    for src in malformed {
        match parse_scenario(src) {
            Err(DslError::Parse(e)) if e.line > 0 && e.column > 0 => {}
            other => return Ok(Verdict::Fail(format!("{src:?}: {other:?}"))),
        }
    }
    let cfg = RunConfig {
        scenarios: vec!["builtin:paper_examples".into()],
        format: Format::Json,
        ..RunConfig::default()
    };
    ensure(run(&cfg).report == run(&cfg).report, || "reports differ between runs".into())?;
    Ok(Verdict::Pass(format!(
        "100 generated scenarios round-trip; {} malformed inputs give positioned parse errors; reports byte-identical",
        malformed.len()
    )))
}

fn main() {
    type Criterion = (&'static str, fn() -> Res);
    let criteria: [Criterion; 11] = [
        ("Codazzi corpus", c1_codazzi_corpus),
        ("Lie derivative of h along X_f", c2_lie_derivative),
        ("K-V iff tangent bivector Poisson", c3_poisson_equivalence),
        ("four characterizations of K-V maps agree", c4_theorem1),
        ("K-V submanifold criteria", c5_submanifolds),
        ("transversal Schur structure", c6_transversal),
        ("coisotropy and conormal algebroid", c7_coisotropic),
        ("graph characterization", c8_graph),
        ("space E and special class", c9_space_e),
        ("oracle coherence", c10_oracle_coherence),
        ("DSL robustness", c11_dsl),
    ];
    let mut unexpected = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(Verdict::Pass(d)) => println!("PASS {:>2} {title}: {d}", i + 1),
            Ok(Verdict::Refuted(d)) => println!("FAIL {:>2} {title}: claim refuted: {d}", i + 1),
            Ok(Verdict::Fail(d)) | Err(d) => {
                unexpected += 1;
                println!("FAIL {:>2} {title}: {d}", i + 1);
            }
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
