//! Acceptance criteria, one line each. Exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use serde_json::Value;

use qzeta::classical::{
    bernoulli_euler_identity_audit, euler_number, frobenius_euler, series_coefficients, SequenceKind, SequenceTable,
};
use qzeta::cli::verify::{run_suite, Suite, VerificationReport, VerifyConfig};
use qzeta::ExactScalar;

const MAX_TAIL: f64 = 1e-28;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn first_failure(report: &VerificationReport) -> String {
    report
        .cases
        .iter()
        .find(|c| !c.pass)
        .map(|c| {
            format!(
                "; first mismatch {} ({})",
                serde_json::to_string(&c.inputs).unwrap_or_default(),
                c.note.clone().unwrap_or_default()
            )
        })
        .unwrap_or_default()
}

fn bracketing_suite(suite: Suite, time_limit: Option<f64>) -> Outcome {
    let start = Instant::now();
    let report = run_suite(suite, &VerifyConfig::default());
    let secs = start.elapsed().as_secs_f64();
    let tail = report.max_tail_bound();
    let in_time = time_limit.is_none_or(|t| secs < t);
    outcome(
        report.pass() && tail <= MAX_TAIL && in_time,
        format!(
            "{}/{} cases, max tail {:.3e}, {:.2} s{}",
            report.summary.passed,
            report.summary.total,
            tail,
            secs,
            first_failure(&report)
        ),
    )
}

fn criterion_1() -> Outcome {
    bracketing_suite(Suite::Interpolation, Some(10.0))
}

fn criterion_2() -> Outcome {
    let report = run_suite(Suite::HigherOrder, &VerifyConfig::default());
    let goldens: Vec<_> = report
        .cases
        .iter()
        .filter(|c| c.note.as_deref().is_some_and(|n| n.starts_with("golden")))
        .collect();
    let golden_values: Vec<&Value> = goldens.iter().map(|c| &c.rhs).collect();
    let goldens_ok = goldens.len() == 2
        && goldens.iter().all(|c| c.pass)
        && golden_values == [&Value::from("9/5"), &Value::from("153/50")];
    let tail = report.max_tail_bound();
    outcome(
        report.pass() && goldens_ok && tail <= MAX_TAIL,
        format!(
            "{}/{} cases, goldens 9/5 and 153/50 {}, max tail {:.3e}{}",
            report.summary.passed,
            report.summary.total,
            if goldens_ok { "reproduced" } else { "MISSING" },
            tail,
            first_failure(&report)
        ),
    )
}

fn criterion_3() -> Outcome {
    let report = run_suite(Suite::Distribution, &VerifyConfig::default());
    let rational = report
        .cases
        .iter()
        .all(|c| c.lhs.is_string() && c.rhs.is_string() && c.lhs == c.rhs && c.bound == "0");
    outcome(
        report.pass() && rational && report.summary.total == 2 * 2 * 2 * 9,
        format!(
            "{}/{} rational equalities{}",
            report.summary.passed,
            report.summary.total,
            first_failure(&report)
        ),
    )
}

fn criterion_4() -> Outcome {
    bracketing_suite(Suite::Lfun, None)
}

fn criterion_5() -> Outcome {
    let mut problems = Vec::new();
    let minus_one = ExactScalar::integer(-1);
    for n in 0..=20 {
        if frobenius_euler(n, &minus_one).unwrap() != euler_number(n) {
            problems.push(format!("H_{n}(-1) != E_{n}"));
        }
    }
    let kinds = [
        SequenceKind::Bernoulli,
        SequenceKind::Euler,
        SequenceKind::FrobeniusEuler(ExactScalar::new(1, 3).unwrap()),
        SequenceKind::FrobeniusEuler(ExactScalar::integer(-2)),
        SequenceKind::FrobeniusEuler(ExactScalar::integer(3)),
    ];
    for kind in kinds {
        let mut table = SequenceTable::new(kind.clone()).unwrap();
        table.extend_to(20);
        let oracle = series_coefficients(&kind, 20).unwrap();
        if table.values()[..=20] != oracle[..] {
            problems.push(format!("recurrence != series oracle for {kind:?}"));
        }
    }
    let audit = bernoulli_euler_identity_audit(10);
    let n1 = &audit[1];
    let audit_ok = !n1.equal && n1.lhs == ExactScalar::new(-1, 2).unwrap() && n1.rhs == minus_one;
    if !audit_ok {
        problems.push("audit does not show the n=1 mismatch".into());
    }
    let cli = Command::new(env!("CARGO_BIN_EXE_qzeta"))
        .args(["verify", "classical-audit", "--no-timing"])
        .output()
        .expect("binary runs");
    if cli.status.code() != Some(0) {
        problems.push(format!("verify classical-audit exited {:?}", cli.status.code()));
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            "H_n(-1)=E_n to n=20, recurrences match series oracles to order 20, audit reports n=1 (-1/2 vs -1) and exits 0".into()
        } else {
            problems.join("; ")
        },
    )
}

fn criterion_6() -> Outcome {
    let report = run_suite(Suite::Limits, &VerifyConfig::default());
    let misses: Vec<String> = report
        .cases
        .iter()
        .filter(|c| !c.pass)
        .map(|c| {
            format!(
                "{} n={} u={} achieved {}",
                c.inputs.get("object").cloned().unwrap_or_default(),
                c.inputs.get("n").cloned().unwrap_or_default(),
                c.inputs.get("u").cloned().unwrap_or_default(),
                c.note.clone().unwrap_or_default()
            )
        })
        .collect();
    outcome(
        report.pass(),
        format!(
            "{}/{} sequences decay by >= 2^6 from k=4 to k=12{}",
            report.summary.passed,
            report.summary.total,
            if misses.is_empty() {
                String::new()
            } else {
                format!("; short: {}", misses.join(", "))
            }
        ),
    )
}

fn criterion_7() -> Outcome {
    let report = run_suite(Suite::Shift, &VerifyConfig::default());
    let golden = report
        .cases
        .iter()
        .any(|c| c.rhs == "3/5" && c.pass && c.inputs.get("q").map(String::as_str) == Some("1/2"));
    outcome(
        report.pass() && golden,
        format!(
            "{}/{} cases within combined bounds, zeta_q(1/3|-1) brackets 3/5: {}{}",
            report.summary.passed,
            report.summary.total,
            golden,
            first_failure(&report)
        ),
    )
}

fn criterion_8() -> Outcome {
    let report = run_suite(Suite::TailSoundness, &VerifyConfig::default());
    outcome(
        report.pass(),
        format!(
            "{}/{} doubled evaluations stay within the first bound{}",
            report.summary.passed,
            report.summary.total,
            first_failure(&report)
        ),
    )
}

fn criterion_9() -> Outcome {
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_qzeta"))
            .args(args)
            .env_remove("QZETA_DEFAULT_PREC")
            .output()
            .expect("binary runs")
    };
    let mut problems = Vec::new();

    let ok = run(&["number", "--n", "1", "--q", "1/2", "--u", "1/3", "--mode", "exact"]);
    let value: Option<Value> = serde_json::from_slice(&ok.stdout).ok();
    if ok.status.code() != Some(0) || value.as_ref().map(|v| &v["value"]) != Some(&Value::from("2/5")) {
        problems.push("success path".to_string());
    }
    let usage = run(&["number", "--n", "1", "--q", "3/2", "--u", "1/3"]);
    if usage.status.code() != Some(2)
        || !String::from_utf8_lossy(&usage.stderr).contains("q must satisfy 0<q<1 in exact mode")
    {
        problems.push("usage path".to_string());
    }
    let domain = run(&["poly", "--n", "2", "--x", "1/2", "--q", "1/2", "--u", "1/3"]);
    if domain.status.code() != Some(3) {
        problems.push("domain path".to_string());
    }
    let verify_fail = run(&["verify", "higher-order", "--terms", "1", "--no-timing"]);
    if verify_fail.status.code() != Some(1) {
        problems.push("verification-failure path".to_string());
    }
    for args in [
        &["verify", "interpolation", "--no-timing"][..],
        &["table", "zeta", "--s", "-3..3", "--x", "1", "--q", "1/2", "--u", "1/3"][..],
    ] {
        let a = run(args);
        let b = run(args);
        if a.stdout != b.stdout || a.stdout.is_empty() {
            problems.push(format!("non-deterministic output for {args:?}"));
        }
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            "exit codes 0/1/2/3 observed; repeated --no-timing runs byte-identical".into()
        } else {
            format!("failed: {}", problems.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("interpolation", criterion_1),
        ("higher-order", criterion_2),
        ("distribution", criterion_3),
        ("l-function", criterion_4),
        ("classical", criterion_5),
        ("limits", criterion_6),
        ("shift", criterion_7),
        ("tail soundness", criterion_8),
        ("cli contract", criterion_9),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failures += 1;
        }
        println!(
            "criterion {} {:<15} {}  {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("{} of 9 criteria pass", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
