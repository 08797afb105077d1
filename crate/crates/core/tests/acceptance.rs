//! Acceptance suite: one line per criterion, nonzero exit on any failure
//! outside [`KNOWN_UNATTAINABLE`].
//!
//! Run with `cargo test -p spca-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use spca_core::hardness::gadget_table;
use spca_core::shortcode::{soundness_bound, ShortCodeParams};
use spca_core::verify::{self, CheckOptions, CheckReport};
use spca_core::Budget;

const SEED: u64 = 1;

struct Outcome {
    id: &'static str,
    title: &'static str,
    passed: bool,
    elapsed: Duration,
    limit: Option<Duration>,
    detail: String,
    /// Serialized reports, compared across reruns.
    payload: String,
}

fn failing(report: &CheckReport, ignore: &[&str]) -> Vec<String> {
    report
        .subchecks
        .iter()
        .filter(|s| !s.passed && !ignore.contains(&s.name.as_str()))
        .map(|s| format!("{}: {}", s.name, s.detail))
        .collect()
}

fn outcome(
    id: &'static str,
    title: &'static str,
    limit_s: u64,
    start: Instant,
    problems: Vec<String>,
    ok_detail: String,
    payload: String,
) -> Outcome {
    let elapsed = start.elapsed();
    let mut problems = problems;
    if elapsed > Duration::from_secs(limit_s) {
        problems.push(format!("took {:.1}s, limit {limit_s}s", elapsed.as_secs_f64()));
    }
    Outcome {
        id,
        title,
        passed: problems.is_empty(),
        elapsed,
        limit: Some(Duration::from_secs(limit_s)),
        detail: if problems.is_empty() { ok_detail } else { problems.join("; ") },
        payload,
    }
}

fn json(r: &CheckReport) -> String {
    serde_json::to_string(r).expect("reports serialize")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = verify::alg_ratios(200, SEED, &Budget::default()).expect("alg-ratios runs");
    let cases = r.subchecks[0].cases;
    let mut problems = failing(&r, &[]);
    if cases != (0..200).map(|i| 4 + i % 9).sum::<usize>() {
        problems.push(format!("expected every k of 200 instances, saw {cases} cases"));
    }
    let worst = r.sub("max(V1,V2) >= OPT/n^(1/3)").map_or(f64::NAN, |s| s.margin);
    outcome(
        "1",
        "approximation ratios on 200 PSD instances",
        60,
        start,
        problems,
        format!("{cases} (instance, k) pairs, 0 violations, worst combined margin {worst:.3e}"),
        json(&r),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let r = verify::ptas_additive(20, SEED, 0.25, &Budget::default()).expect("ptas runs");
    let problems = failing(&r, &[]);
    let hit = r.subchecks[0].detail.clone();
    outcome("2", "additive PTAS, eps = 0.25", 120, start, problems, hit, json(&r))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let r = verify::gadget();
    let mut problems = failing(&r, &[]);
    // frozen table: (x, y, z) bits → best count over h
    let frozen = [6, 7, 7, 7, 7, 7, 7, 7];
    for (row, want) in gadget_table().iter().zip(frozen) {
        if row.best != want {
            problems.push(format!("({}, {}, {}) gave {}, expected {want}", row.x, row.y, row.z, row.best));
        }
    }
    outcome("3", "3SAT to 2SAT gadget, all 8 assignments", 1, start, problems, "7/10 satisfied, 6/10 unsatisfied".into(), json(&r))
}

fn sandwich_report() -> CheckReport {
    let opts = CheckOptions {
        seed: SEED,
        trials: Some(20),
        c: 0.9,
        s: 0.8,
        ..CheckOptions::default()
    };
    verify::sat_sandwich(&opts).expect("sandwich runs")
}

/// Criteria that cannot pass as specified. A2 = A1 + 3d·I has negative
/// eigenvalues on a single clause; 4a still runs and reports FAIL.
const KNOWN_UNATTAINABLE: [&str; 1] = ["4a"];

const PSD_SUBCHECKS: [&str; 2] = ["A2 is PSD", "A2 diagonally dominant"];

fn criterion_4a(r: &CheckReport, start: Instant) -> Outcome {
    let psd = r.sub("A2 is PSD").expect("registered");
    let problems = if psd.passed {
        vec![]
    } else {
        vec![format!("{} (smallest eigenvalue {:.6})", psd.detail, psd.margin)]
    };
    outcome("4a", "SAT reduction: A2 passes is_psd", 120, start, problems, psd.detail.clone(), json(r))
}

fn criterion_4b(r: &CheckReport, start: Instant) -> Outcome {
    let problems = failing(r, &PSD_SUBCHECKS);
    outcome(
        "4b",
        "SAT reduction: stage identities and sandwich on 20 formulas",
        120,
        start,
        problems,
        "stage identities within 1e-9, OPT(A3, n) within [L, L + (c-s)/2]".into(),
        json(r),
    )
}

fn expansion_reports() -> (CheckReport, CheckReport) {
    let opts = CheckOptions {
        seed: SEED,
        trials: Some(50),
        ..CheckOptions::default()
    };
    (
        verify::power_expand(&opts).expect("power-expand runs"),
        verify::cheeger(&opts).expect("cheeger runs"),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let (pe, ch) = expansion_reports();
    let mut problems = failing(&pe, &[]);
    problems.extend(failing(&ch, &[]));
    let cases: usize = pe.subchecks.iter().chain(&ch.subchecks).map(|s| s.cases).sum();
    outcome(
        "5",
        "expansion lemmas on 50 walk graphs",
        180,
        start,
        problems,
        format!("{cases} cases, 0 violations"),
        format!("{}{}", json(&pe), json(&ch)),
    )
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let budget = Budget {
        exact_ops: 1e10,
        ..Budget::default()
    };
    let mut problems = Vec::new();
    let mut payload = String::new();
    let mut notes = Vec::new();
    for m in [2, 4] {
        let r = verify::shortcode_gap(m, 1, 1.0 / 20.0, &budget).expect("shortcode-gap runs");
        problems.extend(failing(&r, &[]).into_iter().map(|p| format!("m={m}: {p}")));
        let sound = r.sub("k-sparse optimum of A <= eta + 3^ell sqrt(k/n)").expect("registered");
        if sound.skipped {
            problems.push(format!("m={m}: soundness enumeration skipped"));
        }
        notes.push(format!("m={m}: {}", sound.detail));
        payload.push_str(&json(&r));
    }
    // frozen: e^{-0.2} + 3^{0.2}/2 at m=4, d=1
    let p = ShortCodeParams::new(4, 1, 1.0 / 20.0).expect("valid");
    let b = soundness_bound(&p);
    if (b - 1.441_596_222_885_740_6).abs() > 1e-12 || p.k != 8.0 {
        problems.push(format!("soundness bound {b} differs from the frozen 1.4415962228857406"));
    }
    outcome("6", "short-code instances m=2 and m=4 (d=1)", 300, start, problems, notes.join("; "), payload)
}

fn run_all() -> Vec<Outcome> {
    let mut out = vec![criterion_1(), criterion_2(), criterion_3()];
    let start = Instant::now();
    let r = sandwich_report();
    out.push(criterion_4a(&r, start));
    out.push(criterion_4b(&r, start));
    out.push(criterion_5());
    out.push(criterion_6());
    out
}

fn print(o: &Outcome) {
    println!(
        "criterion {:<3} {} {:<58} {:>7.2}s/{:>4}  {}",
        o.id,
        if o.passed { "PASS" } else { "FAIL" },
        o.title,
        o.elapsed.as_secs_f64(),
        o.limit.map_or("-".to_string(), |l| format!("{}s", l.as_secs())),
        o.detail
    );
}

fn main() -> ExitCode {
    // the default test harness flags are accepted and ignored
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let first = run_all();
    for o in &first {
        print(o);
    }

    let start = Instant::now();
    let second = run_all();
    let mismatched: Vec<&str> = first
        .iter()
        .zip(&second)
        .filter(|(a, b)| a.payload != b.payload)
        .map(|(a, _)| a.id)
        .collect();
    let det = Outcome {
        id: "7",
        title: "determinism: reruns reproduce every report bit-for-bit",
        passed: mismatched.is_empty(),
        elapsed: start.elapsed(),
        limit: None,
        detail: if mismatched.is_empty() {
            format!("{} reports identical", first.len())
        } else {
            format!("differing criteria: {}", mismatched.join(", "))
        },
        payload: String::new(),
    };
    print(&det);

    let failed: Vec<&str> = first.iter().chain(std::iter::once(&det)).filter(|o| !o.passed).map(|o| o.id).collect();
    let unexpected: Vec<&str> = failed.iter().copied().filter(|id| !KNOWN_UNATTAINABLE.contains(id)).collect();
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!(
            "acceptance: failed criteria {} (known unattainable: {})",
            failed.join(", "),
            KNOWN_UNATTAINABLE.join(", ")
        );
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
