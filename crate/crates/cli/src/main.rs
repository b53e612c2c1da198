//! `wyang`: batch verification and computation front end.
//!
//! Exit codes: 0 when every check passes, 1 when an identity is violated,
//! 2 for a bad invocation.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use wyang::fold::fold_equivalence;
use wyang::glnp::{
    a_symmetry_report, folded_dimension, glnp_bracket_verify, m_matrix, sl2_ladder_build, tau_fold, verify_cg_symmetry,
    CgNorm, GlnpBasis,
};
use wyang::json::{classification_to_json, element_to_json, matrix_to_json, rep_from_json, rep_to_json};
use wyang::pbw::{Gen, RelationTable, SignFlipped};
use wyang::report::Report;
use wyang::reps::{
    classify, coideal_product, eval_rep_y, gl_fundamental, gl_trivial, lowest_weight_extract, o_n_evaluation, on_vector,
    reps_battery, restrict_to_twisted, tensor_product, v_epsilon, w_admissibility, Extraction, Representation,
};
use wyang::twisted::{
    build_s, count_free_modes, count_free_modes_realised, expected_level_dim, sdet, sdet_center, verify_pq,
    verify_rsrs_modes, verify_symmetry, ModeForm, SdetShift, ThetaSignature,
};
use wyang::yangian::{classical_table_with, qdet, qdet_centrality, t_relation_table, verify_rtt_modes, ClassicalIndex, QdetConvention};
use wyang::{Error, Rational as Q, Scalar};

#[derive(Parser)]
#[command(name = "wyang", version, about = "Exact checks for truncated Yangians, twisted Yangians and folded W-algebras")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite.
    Verify {
        suite: Suite,
        #[command(flatten)]
        common: Common,
        /// Flip the sign of one bracket in the relation table (negative control).
        #[arg(long)]
        corrupt_table: bool,
        /// Override one normalization, as `r=value` (negative control).
        #[arg(long, value_name = "R=VALUE")]
        corrupt_eta: Option<String>,
    },
    /// Compute a single object.
    Compute {
        #[command(subcommand)]
        what: Compute,
    },
    /// Build, classify and test representations.
    Rep {
        #[command(subcommand)]
        what: RepCmd,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Rtt,
    Rsrs,
    Symmetry,
    QdetCenter,
    SdetCenter,
    Cg,
    GlnpBracket,
    TauAutomorphism,
    Fold,
    FoldEquivalence,
    Dims,
    Reps,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Out {
    Json,
    Text,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long = "N", default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    p: u32,
    /// `+1` (orthogonal) or `-1` (symplectic).
    #[arg(long, default_value = "+1", allow_hyphen_values = true, value_parser = parse_theta0)]
    theta0: i8,
    /// Series order for determinants.
    #[arg(long)]
    order: Option<u32>,
    /// Highest mode level scanned.
    #[arg(long)]
    max_level: Option<u32>,
    #[arg(long, value_enum, default_value_t = Out::Text)]
    out: Out,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "WYANG_JOBS")]
    jobs: Option<usize>,
    #[arg(long, default_value_t = 20_240_601)]
    seed: u64,
}

#[derive(Subcommand)]
enum Compute {
    /// Quantum determinant coefficients `d_0..d_order`.
    Qdet {
        #[command(flatten)]
        common: Common,
    },
    /// Sklyanin determinant, shifted, and its central coefficients.
    Sdet {
        #[command(flatten)]
        common: Common,
    },
    /// The matrix `M^{ab}_{jm}` representing a gl(Np) generator.
    Mmatrix {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        j: i64,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
}

#[derive(Subcommand)]
enum RepCmd {
    /// Build a representation and print it as JSON.
    Build {
        #[command(flatten)]
        common: Common,
        /// `fund@a` or `triv@a`; repeat for tensor products.
        #[arg(long = "eval", value_name = "KIND@A")]
        evals: Vec<String>,
        /// Keep the Y(N) module instead of restricting to the twisted Yangian.
        #[arg(long)]
        yangian: bool,
        /// Use the o(N) evaluation map on the vector representation.
        #[arg(long)]
        vector: bool,
        /// For Y^+(2): act on the o(2) character V(ε).
        #[arg(long)]
        eps: Option<String>,
        /// Highest mode kept.
        #[arg(long, default_value_t = 8)]
        cutoff: u32,
    },
    /// Lowest weight and classification data of a representation file.
    Classify {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Out::Json)]
        out: Out,
    },
    /// Whether a representation descends to the truncated algebra at level p.
    Admissible {
        file: PathBuf,
        #[arg(long)]
        p: u32,
        #[arg(long, value_enum, default_value_t = Out::Json)]
        out: Out,
    },
}

fn parse_theta0(s: &str) -> Result<i8, String> {
    match s.trim() {
        "+1" | "1" => Ok(1),
        "-1" => Ok(-1),
        _ => Err(format!("θ0 must be +1 or -1, got {s:?}")),
    }
}

/// What went wrong: bad input (exit 2) or an engine error.
enum Fail {
    Usage(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Usage(e.to_string())
    }
}

type Res<T> = std::result::Result<T, Fail>;

fn sig_of(c: &Common) -> Res<ThetaSignature> {
    Ok(ThetaSignature::standard(c.n, c.theta0)?)
}

fn with_table(c: &Common, corrupt: bool, f: impl FnOnce(&dyn RelationTable<Q>) -> wyang::Result<Report>) -> Res<Report> {
    let rules = t_relation_table::<Q>(c.n, c.p)?;
    if corrupt {
        if c.n < 2 {
            return Err(Fail::Usage("--corrupt-table needs N >= 2".into()));
        }
        // normal ordering consults the out-of-order pair
        let bad = SignFlipped::new(&rules, Gen::new(1, 2, 1), Gen::new(1, 1, 2));
        Ok(f(&bad)?)
    } else {
        Ok(f(&rules)?)
    }
}

fn basis_of(c: &Common, corrupt_eta: Option<&str>) -> Res<GlnpBasis<Q>> {
    let mut basis = GlnpBasis::<Q>::new(c.n, c.p as usize, CgNorm::Trace)?;
    if let Some(spec) = corrupt_eta {
        let (r, v) = spec.split_once('=').ok_or_else(|| Fail::Usage("--corrupt-eta expects r=value".into()))?;
        let r: usize = r.trim().parse().map_err(|_| Fail::Usage(format!("bad r in {spec:?}")))?;
        let v = Q::parse(v).ok_or_else(|| Fail::Usage(format!("bad value in {spec:?}")))?;
        basis = basis.with_eta(r, v);
    }
    Ok(basis)
}

fn run_suite(suite: Suite, c: &Common, corrupt_table: bool, corrupt_eta: Option<&str>) -> Res<Report> {
    let p = c.p;
    let mut rep = match suite {
        Suite::Rtt => with_table(c, corrupt_table, |r| verify_rtt_modes(r, c.max_level.unwrap_or(p)))?,
        Suite::Rsrs => {
            let sig = sig_of(c)?;
            let top = c.max_level.unwrap_or(2 * p);
            let mut rep = with_table(c, corrupt_table, |r| {
                let fam = build_s(r, &sig)?;
                verify_rsrs_modes(&fam, r, top, top, ModeForm::Corrected)
            })?;
            rep.absorb(verify_pq::<Q>(&sig));
            rep
        }
        Suite::Symmetry => {
            let sig = sig_of(c)?;
            with_table(c, corrupt_table, |r| verify_symmetry(&build_s(r, &sig)?, r))?
        }
        Suite::QdetCenter => {
            let d = c.order.unwrap_or(c.n as u32 * p);
            with_table(c, corrupt_table, |r| qdet_centrality(r, d, QdetConvention::Column))?
        }
        Suite::SdetCenter => {
            let sig = sig_of(c)?;
            let d = c.order.unwrap_or(2);
            with_table(c, corrupt_table, |r| sdet_center(r, &build_s(r, &sig)?, d, SdetShift::Symmetric))?
        }
        Suite::Cg => {
            let basis = basis_of(c, corrupt_eta)?;
            let mut rep = verify_cg_symmetry(&basis)?;
            let a = a_symmetry_report::<Q>(c.p as usize, c.n);
            let mut kept = Report::new("a-symmetry");
            for check in a.checks {
                if check.id == "band-reflection" {
                    kept.checks.push(check);
                } else if !check.pass {
                    kept.note(format!("{} fails at {:?}", check.id, check.index));
                }
            }
            rep.absorb(kept);
            rep
        }
        Suite::GlnpBracket => {
            let basis = basis_of(c, corrupt_eta)?;
            let mut rep = glnp_bracket_verify(&basis)?;
            rep.absorb(sl2_ladder_build(&basis)?.1);
            rep
        }
        Suite::TauAutomorphism => {
            let basis = basis_of(c, corrupt_eta)?;
            tau_fold(&basis, &sig_of(c)?)?
        }
        Suite::Fold => {
            let basis = basis_of(c, corrupt_eta)?;
            let sig = sig_of(c)?;
            let mut rep = tau_fold(&basis, &sig)?;
            let fd = folded_dimension(&basis, &sig);
            let idx = vec![c.n as i64, c.p as i64, c.theta0 as i64];
            rep.record("dimension", idx.clone(), fd.dim == fd.expected, || {
                format!("rank {} but dim {} = {}", fd.dim, fd.algebra, fd.expected)
            });
            rep.record("dimension-identified", idx, fd.dim == fd.identified_dim, || {
                format!("rank {} but dim {} = {}", fd.dim, fd.identified, fd.identified_dim)
            });
            rep.note(format!(
                "folded rank {}; {} expected by θ0, {} identified from the invariant form; diagonal part {} (fixed points {}, stated {})",
                fd.dim, fd.algebra, fd.identified, fd.diagonal_dim, fd.diagonal_expected_fixed_points, fd.diagonal_expected_stated
            ));
            rep
        }
        Suite::FoldEquivalence => {
            let rules = classical_table_with::<Q>(c.n, p, ClassicalIndex::Limit)?;
            fold_equivalence(&rules, &sig_of(c)?)?
        }
        Suite::Dims => {
            let sig = sig_of(c)?;
            let mut rep = Report::new("dims");
            for m in 1..=2 * p - 1 {
                let got = count_free_modes(&sig, p, m)?;
                let want = expected_level_dim(c.n, c.theta0, m);
                rep.record("free-modes", vec![m as i64], got == want, || format!("{got} free modes, expected {want}"));
            }
            let fam = with_fam(c, &sig)?;
            for m in 1..=p {
                let got = count_free_modes_realised(&fam, m)?;
                let want = expected_level_dim(c.n, c.theta0, m);
                rep.record("realised", vec![m as i64], got == want, || format!("rank {got}, expected {want}"));
            }
            rep
        }
        Suite::Reps => {
            let sig = sig_of(c)?;
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            // γ > 1/2: the canonical half is then u - γ, and γ = 1/2 is reducible for Y+(2)
            let half = Q::frac(1, 2);
            let gammas: Vec<Q> = (0..3)
                .map(|_| Q::frac(rng.random_range(1..=24), rng.random_range(1..=4)))
                .map(|g| if g <= half { g + Q::int(1) } else { g })
                .collect();
            reps_battery(&sig, &gammas, c.max_level.unwrap_or(4).max(2))?
        }
    };
    rep = rep.param("N", c.n).param("p", c.p).param("theta0", c.theta0);
    rep.sort();
    Ok(rep)
}

fn with_fam(c: &Common, sig: &ThetaSignature) -> Res<wyang::twisted::TwistedFamily<Q>> {
    let rules = t_relation_table::<Q>(c.n, c.p)?;
    Ok(build_s(&rules, sig)?)
}

fn emit(out: Out, v: &Value, text: impl FnOnce() -> String) {
    match out {
        Out::Json => println!("{}", serde_json::to_string_pretty(v).expect("values serialize")),
        Out::Text => println!("{}", text()),
    }
}

fn read_rep(path: &PathBuf) -> Res<Representation<Q>> {
    let s = fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&s).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
    Ok(rep_from_json(&v)?)
}

fn parse_eval(s: &str, n: usize, cutoff: u32) -> Res<Representation<Q>> {
    let (kind, a) = s.split_once('@').ok_or_else(|| Fail::Usage(format!("expected kind@a, got {s:?}")))?;
    let a = Q::parse(a).ok_or_else(|| Fail::Usage(format!("bad evaluation point in {s:?}")))?;
    let e = match kind {
        "fund" => gl_fundamental::<Q>(n),
        "triv" => gl_trivial::<Q>(n),
        _ => return Err(Fail::Usage(format!("unknown module {kind:?}; use fund or triv"))),
    };
    Ok(eval_rep_y(n, &e, &a, cutoff)?)
}

fn build(c: &Common, evals: &[String], yangian: bool, vector: bool, eps: Option<&str>, cutoff: u32) -> Res<Representation<Q>> {
    let sig = sig_of(c)?;
    if vector {
        return Ok(o_n_evaluation(&sig, &on_vector(&sig), cutoff)?);
    }
    let mut t: Option<Representation<Q>> = None;
    for e in evals {
        let f = parse_eval(e, c.n, cutoff)?;
        t = Some(match t {
            None => f,
            Some(acc) => tensor_product(&acc, &f)?,
        });
    }
    let t = match t {
        Some(t) => t,
        None => eval_rep_y(c.n, &gl_trivial(c.n), &Q::int(0), cutoff)?,
    };
    if yangian {
        return Ok(t);
    }
    match eps {
        Some(e) => {
            if c.n != 2 || c.theta0 != 1 {
                return Err(Fail::Usage("--eps applies to Y^+(2)".into()));
            }
            let e = Q::parse(e).ok_or_else(|| Fail::Usage(format!("bad ε {e:?}")))?;
            Ok(coideal_product(&t, &v_epsilon(&e, cutoff)?)?)
        }
        None => Ok(restrict_to_twisted(&t, &sig)?),
    }
}

/// `Ok(true)` when the command's checks all pass.
fn run(cli: Cli) -> Res<bool> {
    let started = Instant::now();
    let ok = match cli.cmd {
        Cmd::Verify { suite, common, corrupt_table, corrupt_eta } => {
            init_pool(common.jobs);
            let rep = run_suite(suite, &common, corrupt_table, corrupt_eta.as_deref())?;
            emit(common.out, &serde_json::to_value(&rep).expect("reports serialize"), || rep.to_string());
            rep.is_pass()
        }
        Cmd::Compute { what } => match what {
            Compute::Qdet { common } => {
                init_pool(common.jobs);
                let rules = t_relation_table::<Q>(common.n, common.p)?;
                let d = common.order.unwrap_or(common.n as u32 * common.p);
                let coeffs = qdet(&rules, d, QdetConvention::Column)?;
                let v = json!({"N": common.n, "p": common.p, "qdet": coeffs.iter().map(element_to_json).collect::<Vec<_>>()});
                emit(common.out, &v, || coeffs.iter().enumerate().map(|(k, e)| format!("d_{k} = {e}")).collect::<Vec<_>>().join("\n"));
                true
            }
            Compute::Sdet { common } => {
                init_pool(common.jobs);
                let sig = sig_of(&common)?;
                let rules = t_relation_table::<Q>(common.n, common.p)?;
                let d = common.order.unwrap_or(2);
                let res = sdet(&rules, &sig, d, SdetShift::Symmetric)?;
                let shifted: Vec<_> = (0..=d).map(|k| res.shifted.coeff(k).map(element_to_json).unwrap_or(Value::Null)).collect();
                let v = json!({
                    "N": common.n, "p": common.p, "theta0": common.theta0,
                    "shifted": shifted,
                    "centre": res.centre.iter().map(element_to_json).collect::<Vec<_>>(),
                });
                emit(common.out, &v, || {
                    res.centre.iter().enumerate().map(|(k, e)| format!("c_{} = {e}", 2 * (k + 1))).collect::<Vec<_>>().join("\n")
                });
                true
            }
            Compute::Mmatrix { common, j, m, a, b } => {
                let np = common.n * common.p as usize;
                let jp = common.p as i64;
                if j < 0 || j >= jp || m.abs() > j || a == 0 || b == 0 || a > common.n || b > common.n {
                    return Err(Fail::Usage(format!("need 0 <= j < p, |m| <= j, 1 <= a,b <= N (got j={j} m={m} a={a} b={b})")));
                }
                let x = m_matrix::<Q>(j, m, a, b, common.n, common.p as usize);
                let v = json!({"j": j, "m": m, "a": a, "b": b, "Np": np, "matrix": matrix_to_json(&x)});
                emit(common.out, &v, || x.to_string());
                true
            }
        },
        Cmd::Rep { what } => match what {
            RepCmd::Build { common, evals, yangian, vector, eps, cutoff } => {
                let r = build(&common, &evals, yangian, vector, eps.as_deref(), cutoff)?;
                println!("{}", serde_json::to_string_pretty(&rep_to_json(&r)).expect("values serialize"));
                true
            }
            RepCmd::Classify { file, out } => {
                let r = read_rep(&file)?;
                let (v, ok) = classify_value(&r)?;
                emit(out, &v, || v.to_string());
                ok
            }
            RepCmd::Admissible { file, p, out } => {
                let r = read_rep(&file)?;
                let sig = r.sig.clone().ok_or_else(|| Fail::Usage("admissibility needs a twisted (S-family) representation".into()))?;
                let lw = match lowest_weight_extract(&r)? {
                    Extraction::Lowest(lw) => lw,
                    other => return Err(Fail::Usage(format!("no unique lowest vector: {other:?}"))),
                };
                let cd = classify(&lw, &sig)?;
                let adm = w_admissibility(&cd, &sig, p);
                let v = json!({"p": p, "admissible": adm, "classification": classification_to_json(&cd)});
                emit(out, &v, || format!("admissible at p = {p}: {adm}"));
                true
            }
        },
    };
    eprintln!("elapsed {:.3}s", started.elapsed().as_secs_f64());
    Ok(ok)
}

fn classify_value(r: &Representation<Q>) -> Res<(Value, bool)> {
    let sig = r.sig.clone().ok_or_else(|| Fail::Usage("classification needs a twisted (S-family) representation".into()))?;
    Ok(match lowest_weight_extract(r)? {
        Extraction::Lowest(lw) => match classify(&lw, &sig) {
            Ok(cd) => (json!({"status": "classified", "classification": classification_to_json(&cd)}), true),
            Err(e) => (json!({"status": "classification-failure", "reason": e.to_string()}), false),
        },
        Extraction::Reducible(k) => (json!({"status": "reducible", "lowest_space_dim": k}), false),
        Extraction::NoLowestVector => (json!({"status": "not-lowest-weight"}), false),
    })
}

fn init_pool(jobs: Option<usize>) {
    if let Some(j) = jobs.filter(|&j| j > 0) {
        // only fails if a pool already exists, which is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
