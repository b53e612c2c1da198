//! Acceptance run: one line per criterion, PASS or FAIL.
//!
//! Criteria with a CLI suite go through the real binary; the rest call the
//! library. Known deviations (see `KNOWN`) are printed as FAIL with their
//! witness but do not fail the run; anything else that fails does.

use std::process::{Command, ExitCode};
use std::thread;
use std::time::Instant;

use serde_json::Value;
use wyang::reps::{
    classify, eval_rep_y, gl_fundamental, lowest_weight_extract, o_n_evaluation, on_evaluation_rational_check, on_vector,
    restrict_to_twisted, tensor_product, truncation_report, w_admissibility, Epsilon, Extraction,
};
use wyang::twisted::{theta_free_basis, verify_pq, ThetaSignature};
use wyang::yangian::t_relation_table;
use wyang::{Rational as Q, Scalar};

const BIN: &str = env!("CARGO_BIN_EXE_wyang");

/// Criteria whose stated values disagree with what the construction yields.
const KNOWN: &[u32] = &[11];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn of(fails: Vec<String>, ran: usize) -> Self {
        if fails.is_empty() {
            Outcome { pass: true, detail: format!("{ran} runs") }
        } else {
            Outcome { pass: false, detail: fails.join("; ") }
        }
    }
}

struct Run {
    code: i32,
    report: Value,
}

fn wyang(args: &[&str]) -> Run {
    let out = Command::new(BIN).args(args).args(["--out", "json"]).output().expect("spawn wyang");
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    Run { code: out.status.code().unwrap_or(-1), report }
}

fn failed_ids(r: &Value) -> Vec<String> {
    r["checks"]
        .as_array()
        .map(|cs| cs.iter().filter(|c| c["pass"] == false).map(|c| format!("{}{}", c["id"].as_str().unwrap_or("?"), c["index"])).collect())
        .unwrap_or_default()
}

fn check_count(r: &Value) -> usize {
    r["checks"].as_array().map_or(0, Vec::len)
}

/// Every invocation must exit 0 with a nonempty report.
fn all_pass(cmds: Vec<Vec<String>>) -> Outcome {
    let runs: Vec<Run> = thread::scope(|s| {
        let hs: Vec<_> = cmds.iter().map(|c| s.spawn(move || wyang(&c.iter().map(String::as_str).collect::<Vec<_>>()))).collect();
        hs.into_iter().map(|h| h.join().expect("runner")).collect()
    });
    let mut fails = vec![];
    let mut checks = 0;
    for (c, r) in cmds.iter().zip(&runs) {
        checks += check_count(&r.report);
        if r.code != 0 || check_count(&r.report) == 0 {
            let ids = failed_ids(&r.report);
            fails.push(format!("`{}` exit {} {:?}", c.join(" "), r.code, &ids[..ids.len().min(3)]));
        }
    }
    let mut o = Outcome::of(fails, cmds.len());
    if o.pass {
        o.detail = format!("{} runs, {checks} checks", cmds.len());
    }
    o
}

fn cmd(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

fn sig(t: &[i8]) -> ThetaSignature {
    ThetaSignature::validate(t).unwrap()
}

fn c1() -> Outcome {
    let mut v = vec![];
    for n in [2, 3] {
        for p in 1..=3 {
            v.push(cmd(&format!("verify rtt --N {n} --p {p}")));
        }
    }
    all_pass(v)
}

fn c2() -> Outcome {
    let mut fails = vec![];
    let mut ran = 0;
    for n in 1..=6 {
        for t0 in [1i8, -1] {
            let Ok(s) = ThetaSignature::standard(n, t0) else { continue };
            ran += 1;
            let r = verify_pq::<Q>(&s);
            if !r.is_pass() || r.checks.is_empty() {
                fails.push(format!("N={n} θ0={t0}: {} failures", r.failure_count()));
            }
        }
    }
    Outcome::of(fails, ran)
}

const TWISTED_GRID: [(usize, u32, &str); 5] = [(2, 1, "+1"), (2, 1, "-1"), (2, 2, "+1"), (2, 2, "-1"), (3, 1, "+1")];

fn c3() -> Outcome {
    all_pass(TWISTED_GRID.iter().map(|(n, p, t)| cmd(&format!("verify rsrs --N {n} --p {p} --theta0 {t}"))).collect())
}

fn c4() -> Outcome {
    all_pass(TWISTED_GRID.iter().map(|(n, p, t)| cmd(&format!("verify symmetry --N {n} --p {p} --theta0 {t}"))).collect())
}

fn c5() -> Outcome {
    let pairs: [(&[i8], &[i8]); 4] = [
        (&[1, 1], &[-1, -1]),
        (&[1, -1], &[-1, 1]),
        (&[1, 1, 1, 1], &[1, -1, -1, 1]),
        (&[1, 1, -1, -1], &[1, -1, 1, -1]),
    ];
    let mut fails = vec![];
    for (a, b) in pairs {
        let rules = t_relation_table::<Q>(a.len(), 1).unwrap();
        match theta_free_basis(&rules, &sig(a), &sig(b)) {
            Ok(r) if r.is_pass() && !r.checks.is_empty() => {}
            Ok(r) => fails.push(format!("{a:?} vs {b:?}: {} failures", r.failure_count())),
            Err(e) => fails.push(format!("{a:?} vs {b:?}: {e}")),
        }
    }
    Outcome::of(fails, pairs.len())
}

fn c6() -> Outcome {
    let r = wyang(&cmd("verify qdet-center --N 2 --p 2 --order 4").iter().map(String::as_str).collect::<Vec<_>>());
    let trace = r.report["checks"].as_array().is_some_and(|cs| cs.iter().any(|c| c["id"] == "d1-trace" && c["pass"] == true));
    let mut fails = vec![];
    if r.code != 0 {
        fails.push(format!("exit {} {:?}", r.code, failed_ids(&r.report)));
    }
    if !trace {
        fails.push("no passing d1 trace check".into());
    }
    let mut o = Outcome::of(fails, 1);
    if o.pass {
        o.detail = format!("{} checks", check_count(&r.report));
    }
    o
}

fn c7() -> Outcome {
    all_pass(["+1", "-1"].iter().map(|t| cmd(&format!("verify sdet-center --N 2 --p 1 --theta0 {t} --order 2"))).collect())
}

fn c8() -> Outcome {
    let mut v = vec![];
    for n in [2, 3, 4] {
        for t in ["+1", "-1"] {
            if n % 2 == 1 && t == "-1" {
                continue;
            }
            for p in [2, 3] {
                v.push(cmd(&format!("verify dims --N {n} --p {p} --theta0 {t}")));
            }
        }
    }
    all_pass(v)
}

fn c9() -> Outcome {
    all_pass([(1, 2), (1, 3), (2, 2), (2, 3)].iter().map(|(n, p)| cmd(&format!("verify cg --N {n} --p {p}"))).collect())
}

fn c10() -> Outcome {
    let mut v = vec![];
    for n in 1..=8usize {
        for p in 1..=8 / n {
            v.push(cmd(&format!("verify glnp-bracket --N {n} --p {p}")));
        }
    }
    all_pass(v)
}

fn c11() -> Outcome {
    let mut fails = vec![];
    let mut dims = vec![];
    let cases = [(2, 2, "-1", 10), (2, 2, "+1", 6), (3, 3, "+1", 36)];
    let runs: Vec<Run> = thread::scope(|s| {
        let hs: Vec<_> = cases
            .iter()
            .map(|(n, p, t, _)| {
                let c = cmd(&format!("verify fold --N {n} --p {p} --theta0 {t}"));
                s.spawn(move || wyang(&c.iter().map(String::as_str).collect::<Vec<_>>()))
            })
            .collect();
        hs.into_iter().map(|h| h.join().expect("runner")).collect()
    });
    for ((n, p, t, want), r) in cases.into_iter().zip(runs) {
        let bad = failed_ids(&r.report);
        // τ itself must be a bracket automorphism regardless of the dimension count
        if bad.iter().any(|id| !id.starts_with("dimension")) || check_count(&r.report) == 0 {
            fails.push(format!("({n},{p},{t}) automorphism failures {bad:?}"));
        }
        let note = r.report["notes"].as_array().and_then(|ns| ns.iter().filter_map(Value::as_str).find(|s| s.starts_with("folded rank")));
        let rank: Option<usize> = note.and_then(|s| s.split_whitespace().nth(2)).and_then(|w| w.trim_end_matches(';').parse().ok());
        dims.push(format!("({n},{p},{t}) -> {}", rank.map_or("?".into(), |r| r.to_string())));
        if rank != Some(want) {
            fails.push(format!("({n},{p},{t}) rank {rank:?}, stated {want}"));
        }
    }
    let mut o = Outcome::of(fails, 3);
    if o.pass {
        o.detail = dims.join(", ");
    }
    o
}

fn c12() -> Outcome {
    let grid = [(2, 1, "+1"), (2, 1, "-1"), (2, 2, "+1"), (2, 2, "-1"), (2, 3, "+1"), (2, 3, "-1"), (3, 1, "+1"), (3, 3, "+1")];
    all_pass(grid.iter().map(|(n, p, t)| cmd(&format!("verify fold-equivalence --N {n} --p {p} --theta0 {t}"))).collect())
}

fn c13() -> Outcome {
    let mut fails = vec![];
    let one = eval_rep_y::<Q>(2, &gl_fundamental(2), &Q::int(0), 6).unwrap();
    let two = tensor_product(&one, &one).unwrap();
    let mut ran = 0;
    for (k, rep) in [(1u32, &one), (2, &two)] {
        let r = truncation_report(rep, k, "T");
        ran += r.checks.len();
        if !r.is_pass() {
            fails.push(format!("{k}-fold T: {:?}", r.failures().map(|c| c.index.clone()).collect::<Vec<_>>()));
        }
        for t0 in [1, -1] {
            let s = ThetaSignature::standard(2, t0).unwrap();
            let r = truncation_report(&restrict_to_twisted(rep, &s).unwrap(), 2 * k, "S");
            ran += r.checks.len();
            if !r.is_pass() {
                fails.push(format!("{k}-fold S θ0={t0}: {:?}", r.failures().map(|c| c.index.clone()).collect::<Vec<_>>()));
            }
        }
    }
    let mut o = Outcome::of(fails, 6);
    if o.pass {
        o.detail = format!("{ran} level checks");
    }
    o
}

fn c14() -> Outcome {
    let s = ThetaSignature::standard(3, 1).unwrap();
    let phi = on_vector::<Q>(&s);
    let mut fails = vec![];
    match on_evaluation_rational_check(&s, &phi, &Q::frac(1, 2)) {
        Ok(true) => {}
        Ok(false) => fails.push("rational identity fails".into()),
        Err(e) => fails.push(e.to_string()),
    }
    let ev = o_n_evaluation(&s, &phi, 8).unwrap();
    let dead: Vec<u32> = (1..=ev.cutoff).filter(|&m| ev.level_vanishes(m)).collect();
    if !dead.is_empty() {
        fails.push(format!("vanishing levels {dead:?}"));
    }
    let mut o = Outcome::of(fails, 1);
    if o.pass {
        o.detail = format!("identity exact, levels 1..={} nonvanishing", ev.cutoff);
    }
    o
}

fn c15() -> Outcome {
    let mut fails = vec![];
    let dir = std::env::temp_dir().join(format!("wyang-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for a in ["0", "5/2", "-3"] {
        let built = Command::new(BIN).args(["rep", "build", "--N", "2", "--theta0", "-1", "--eval"]).arg(format!("fund@{a}")).args(["--out", "json"]).output().unwrap();
        if !built.status.success() {
            fails.push(format!("build fund@{a} exit {:?}", built.status.code()));
            continue;
        }
        let file = dir.join(format!("fund-{}.json", a.replace('/', "_")));
        std::fs::write(&file, &built.stdout).unwrap();
        let file = file.to_str().unwrap();
        let cl = wyang(&["rep", "classify", file]);
        let cd = &cl.report["classification"];
        if cl.code != 0 || cd["degrees"] != serde_json::json!([1]) {
            fails.push(format!("fund@{a}: exit {} degrees {}", cl.code, cd["degrees"]));
            continue;
        }
        let odd = cd["epsilon"].as_u64().is_some_and(|k| k % 2 == 1);
        for p in 1..=4 {
            let ad = wyang(&["rep", "admissible", file, "--p", &p.to_string()]);
            let got = ad.report["admissible"].as_bool();
            if got != Some(p >= 2 && odd) {
                fails.push(format!("fund@{a} p={p}: admissible {got:?}, ε odd {odd}"));
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    // the same data with ε even must never be admissible
    let s = ThetaSignature::standard(2, -1).unwrap();
    let r = restrict_to_twisted(&eval_rep_y::<Q>(2, &gl_fundamental(2), &Q::int(0), 8).unwrap(), &s).unwrap();
    let Extraction::Lowest(lw) = lowest_weight_extract(&r).unwrap() else {
        return Outcome { pass: false, detail: "no lowest vector".into() };
    };
    let mut cd = classify(&lw, &s).unwrap();
    cd.epsilon = Epsilon::Case(2);
    if let Some(p) = (0..=4).find(|&p| w_admissibility(&cd, &s, p)) {
        fails.push(format!("ε even admissible at p={p}"));
    }
    Outcome::of(fails, 3)
}

fn c16() -> Outcome {
    let mut fails = vec![];
    for (what, c) in [("table", "verify rtt --N 2 --p 2 --corrupt-table"), ("η_1", "verify glnp-bracket --N 2 --p 2 --corrupt-eta 1=5")] {
        let r = wyang(&cmd(c).iter().map(String::as_str).collect::<Vec<_>>());
        let bad = failed_ids(&r.report);
        if r.code != 1 || bad.is_empty() {
            fails.push(format!("corrupted {what}: exit {} with {} failures", r.code, bad.len()));
        }
    }
    let mut o = Outcome::of(fails, 2);
    if o.pass {
        o.detail = "both corruptions rejected with exit 1".into();
    }
    o
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: [Criterion; 16] = [
    (1, "RTT mode relations", c1),
    (2, "P/Q matrix identities", c2),
    (3, "RSRS mode relations", c3),
    (4, "symmetry relation", c4),
    (5, "θ-elimination", c5),
    (6, "qdet centrality", c6),
    (7, "sdet center", c7),
    (8, "level dimensions", c8),
    (9, "CG symmetry", c9),
    (10, "gl(Np) bracket realization", c10),
    (11, "τ automorphism and folded dimensions", c11),
    (12, "fold equivalence", c12),
    (13, "truncation biconditionals", c13),
    (14, "o(N) evaluation homomorphism", c14),
    (15, "classification round-trip", c15),
    (16, "negative controls", c16),
];

fn main() -> ExitCode {
    let start = Instant::now();
    let results: Vec<(Outcome, f64)> = thread::scope(|s| {
        let hs: Vec<_> = CRITERIA
            .iter()
            .map(|&(_, _, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    (f(), t.elapsed().as_secs_f64())
                })
            })
            .collect();
        hs.into_iter().map(|h| h.join().unwrap_or_else(|_| (Outcome { pass: false, detail: "panicked".into() }, 0.0))).collect()
    });
    let mut unexpected = 0;
    println!("acceptance criteria");
    for ((k, name, _), (o, secs)) in CRITERIA.iter().zip(&results) {
        let tag = match (o.pass, KNOWN.contains(k)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known deviation)",
            (false, false) => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!("criterion {k:>2}  {tag:<22}  {name}  [{secs:.1}s]  {}", o.detail);
    }
    let passed = results.iter().filter(|(o, _)| o.pass).count();
    println!("summary: {passed}/16 pass, {unexpected} unexpected failures, {:.1}s", start.elapsed().as_secs_f64());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
