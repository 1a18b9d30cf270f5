//! Runs scenarios: parse, resolve, execute checks (in parallel, assembled in
//! declaration order), cross-check with the oracle and render the report.

use rayon::prelude::*;

use crate::checks::{CheckContext, Outcome, Registry, Status};
use crate::corpus;
use crate::dsl::{load_scenario, CheckDirective, Expectation, Model, Scenario};
use crate::report::{render_report, CheckRecord, Format};
use crate::sampling::{Sampler, DEFAULT_SAMPLES, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_ORACLE_DISAGREEMENT: i32 = 3;

/// Prefix selecting a built-in scenario instead of a file.
pub const BUILTIN_PREFIX: &str = "builtin:";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    /// File paths, or `builtin:NAME` for corpus entries.
    pub scenarios: Vec<String>,
    pub format: Format,
    pub seed: u64,
    /// At least one.
    pub samples: usize,
    pub oracle: bool,
    pub fail_fast: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenarios: Vec::new(),
            format: Format::Json,
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            oracle: true,
            fail_fast: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub exit_code: i32,
    /// Report for stdout; empty when an input could not be loaded.
    pub report: String,
    /// Messages for stderr.
    pub diagnostics: Vec<String>,
    pub records: Vec<CheckRecord>,
}

/// Result of one directive, before rendering.
#[derive(Clone, Debug, PartialEq)]
pub struct Executed {
    pub record: CheckRecord,
    /// Matches the expectation (or passes, without one).
    pub ok: bool,
    pub oracle_disagreement: bool,
}

pub fn read_scenario(path: &str) -> Result<String, String> {
    if let Some(name) = path.strip_prefix(BUILTIN_PREFIX) {
        return corpus::find(name)
            .map(|e| e.text.to_string())
            .ok_or_else(|| format!("no built-in scenario `{name}`"));
    }
    std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
}

pub fn run(config: &RunConfig) -> RunOutput {
    let mut out = RunOutput {
        exit_code: EXIT_OK,
        report: String::new(),
        diagnostics: Vec::new(),
        records: Vec::new(),
    };
    if config.samples == 0 {
        out.diagnostics.push("samples must be at least 1".into());
        out.exit_code = EXIT_INPUT_ERROR;
        return out;
    }
    let mut loaded = Vec::new();
    for path in &config.scenarios {
        match read_scenario(path).and_then(|t| load_scenario(&t).map_err(|e| format!("{path}: {e}"))) {
            Ok(sm) => loaded.push(sm),
            Err(msg) => out.diagnostics.push(msg),
        }
    }
    if !out.diagnostics.is_empty() {
        out.exit_code = EXIT_INPUT_ERROR;
        return out;
    }
    let mut executed = Vec::new();
    for (sc, model) in &loaded {
        let stop = execute_scenario(sc, model, config, &mut executed);
        if stop {
            break;
        }
    }
    for e in &executed {
        if e.oracle_disagreement {
            out.diagnostics.push(format!("oracle disagreement in `{}`", e.record.name));
        }
    }
    out.exit_code = if executed.iter().any(|e| e.oracle_disagreement) {
        EXIT_ORACLE_DISAGREEMENT
    } else if executed.iter().all(|e| e.ok) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    out.records = executed.into_iter().map(|e| e.record).collect();
    out.report = render_report(&out.records, config.format);
    out
}

/// Appends results to `acc`; returns true when fail-fast stopped the run.
fn execute_scenario(sc: &Scenario, model: &Model, config: &RunConfig, acc: &mut Vec<Executed>) -> bool {
    if config.fail_fast {
        for c in &sc.checks {
            let e = execute(c, model, config);
            let stop = !e.ok || e.oracle_disagreement;
            acc.push(e);
            if stop {
                return true;
            }
        }
        false
    } else {
        let results: Vec<Executed> = sc.checks.par_iter().map(|c| execute(c, model, config)).collect();
        acc.extend(results);
        false
    }
}

/// Runs one resolved directive.
pub fn execute(c: &CheckDirective, model: &Model, config: &RunConfig) -> Executed {
    let registry = Registry::standard();
    let check = registry.get(&c.kind).expect("validated kind");
    let ctx = CheckContext {
        model,
        directive: c,
        sampler: Sampler::new(config.seed, c.options.samples.unwrap_or(config.samples)),
        oracle: config.oracle,
    };
    let outcome = check
        .run(&ctx)
        .unwrap_or_else(|e| Outcome::new(Status::Unsupported, format!("engine error: {e}")));
    let mut details = outcome.details;
    let mut disagreement = false;
    if let Some(o) = &outcome.oracle {
        match &o.disagreement {
            None => details.push_str(&format!("; oracle agrees at {}/{} points", o.evaluated, o.points)),
            Some(p) => {
                disagreement = true;
                let pt: Vec<String> = p.iter().map(|q| q.to_string()).collect();
                details.push_str(&format!("; internal error: oracle disagrees at ({})", pt.join(", ")));
            }
        }
    }
    let ok = match c.options.expect {
        None => outcome.status.is_pass(),
        Some(exp) => {
            let matched = matches!(
                (exp, outcome.status),
                (Expectation::Pass, Status::Pass)
                    | (Expectation::Fail, Status::Fail)
                    | (Expectation::PointwisePass, Status::PointwisePass)
            );
            details.push_str(&format!(
                "; expected {}: {}",
                exp.as_str(),
                if matched { "as expected" } else { "NOT as expected" }
            ));
            matched
        }
    };
    Executed {
        record: CheckRecord {
            name: c.display_name(),
            kind: c.kind.clone(),
            status: outcome.status,
            witness: outcome.witness,
            details,
        },
        ok,
        oracle_disagreement: disagreement,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_text(text: &str) -> RunOutput {
        let dir = std::env::temp_dir().join(format!("kvgeom-runner-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("{:x}.kvs", text.len() * 31 + text.bytes().map(|b| b as usize).sum::<usize>()));
        std::fs::write(&path, text).unwrap();
        run(&RunConfig {
            scenarios: vec![path.to_string_lossy().into_owned()],
            ..RunConfig::default()
        })
    }

    #[test]
    fn exit_codes() {
        let empty = run_text("");
        assert_eq!(empty.exit_code, EXIT_OK);
        assert_eq!(empty.report, "{\n  \"checks\": []\n}\n");

        let bad = run_text("manifold M { dim 2 coords [x y] } bivector h on M { [0, x; 0] } check codazzi h");
        assert_eq!(bad.exit_code, EXIT_CHECK_FAILED);
        let w = bad.records[0].witness.as_ref().unwrap();
        assert_eq!(w.residual.to_string(), "-x");
        assert!(bad.records[0].details.contains("C(1,2,2) = -x"), "{}", bad.records[0].details);

        assert_eq!(run_text("bivector h on M { [x +] }").exit_code, EXIT_INPUT_ERROR);
        assert_eq!(run_text("manifold M { dim 1 coords [x] } check codazzi M").exit_code, EXIT_INPUT_ERROR);

        let expected = run_text(
            "manifold M { dim 2 coords [x y] } bivector h on M { [0, x; 0] } check codazzi h with { expect fail }",
        );
        assert_eq!(expected.exit_code, EXIT_OK);
    }

    #[test]
    fn fail_fast_stops() {
        let text = "manifold M { dim 1 coords [x] } bivector h on M { [x^2] } scalar f on M = x^2\n\
                    check in_E h f\ncheck codazzi h";
        let dir = std::env::temp_dir().join(format!("kvgeom-ff-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("ff.kvs");
        std::fs::write(&p, text).unwrap();
        let cfg = RunConfig {
            scenarios: vec![p.to_string_lossy().into_owned()],
            fail_fast: true,
            ..RunConfig::default()
        };
        let r = run(&cfg);
        assert_eq!(r.exit_code, EXIT_CHECK_FAILED);
        assert_eq!(r.records.len(), 1);
        let all = run(&RunConfig { fail_fast: false, ..cfg });
        assert_eq!(all.records.len(), 2);
    }
}
