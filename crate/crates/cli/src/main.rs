//! `reach`: command-line front end for certified LTI reachability.
//!
//! Exit codes: 0 reachable, 1 not reachable, 2 boundary hit, 3 unknown,
//! 64 usage, 65 bad input, 66 unreadable input, 69 outside the supported
//! class, 70 precision or budget exhausted, 75 time budget exceeded.

mod fixtures;

use clap::{Parser, Subcommand, ValueEnum};
use lti_reach::algnum::{format_rational, parse_rational, set_start_prec, AlgReal, DyInterval};
use lti_reach::approx::{build_problem_pair, pair_to_csv, pair_to_svg, set_target_semidecide, MembershipVerdict};
use lti_reach::boundary::SupportOracle;
use lti_reach::decomp::build_plan;
use lti_reach::exact::{decide, export_fo_formula, Theory};
use lti_reach::exppoly::set_depth_budget;
use lti_reach::model::{classify, parse_problem, serialize_problem, Horizon, ReachProblem, Target};
use lti_reach::oracle::sample_reachable_cloud;
use lti_reach::skolem::{self, verify_claims, Flavor};
use lti_reach::ReachError;
use serde_json::json;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::mpsc;
use std::time::Duration;

#[derive(Parser, Debug)]
#[command(name = "reach", version, about = "Certified reachability for x' = Ax + Bu with saturated inputs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    cfg: RunConfig,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
enum Command {
    /// Decide whether the target is reachable (exit code carries the verdict).
    Decide,
    /// Inner and outer polytopes of the reachable set.
    Approx,
    /// Split the problem into controllable stable parts.
    Decompose,
    /// Support point in the direction given by --dir.
    Support,
    /// Export the border formula in the theory given by --theory.
    Formula,
    /// Reduce a Skolem instance to set reachability.
    SkolemReduce,
    /// Certified endpoints of bang-bang schedules, as CSV.
    Simulate,
    /// Subclass tags and spectral data.
    Classify,
    /// List the bundled fixtures or print one.
    Fixtures { name: Option<String> },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum Format {
    Text,
    Document,
    Csv,
    Svg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum FlavorArg {
    Plain,
    Nontangential,
}

#[derive(clap::Args, Debug, Clone)]
struct RunConfig {
    /// Problem document (JSON).
    #[arg(long, short, global = true)]
    input: Option<PathBuf>,
    /// Bundled fixture to use instead of --input.
    #[arg(long, global = true)]
    fixture: Option<String>,
    /// Sandwich precision p: target gap 2^-p.
    #[arg(long, global = true, default_value_t = 6)]
    precision: u32,
    /// Enclosure width for support points and simulation.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Bisection depth for sign-change isolation.
    #[arg(long, global = true, default_value_t = 60)]
    max_depth: u32,
    /// Largest sandwich precision tried by decide.
    #[arg(long, global = true, default_value_t = 12)]
    max_p: u32,
    /// Wall-clock budget in seconds.
    #[arg(long, global = true)]
    time_limit: Option<f64>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// r0, rexp or rexpsin.
    #[arg(long, global = true, default_value = "rexp")]
    theory: String,
    /// Replace the horizon by tau ("inf" for unbounded).
    #[arg(long, global = true)]
    tau: Option<String>,
    /// Direction as comma-separated rationals.
    #[arg(long, global = true)]
    dir: Option<String>,
    /// Replace the target by this point (comma-separated rationals).
    #[arg(long, global = true)]
    target: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = FlavorArg::Nontangential)]
    flavor: FlavorArg,
    /// Number of cloud points for simulate and svg output.
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,
    /// Render formulas as SMT-LIB.
    #[arg(long, global = true)]
    smtlib: bool,
    /// Check the reduction claims after skolem-reduce.
    #[arg(long, global = true)]
    verify: bool,
}

enum Failure {
    Usage(String),
    Reach(ReachError),
    Timeout(f64),
}

impl From<ReachError> for Failure {
    fn from(e: ReachError) -> Self {
        Failure::Reach(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 64,
            Failure::Timeout(_) => 75,
            Failure::Reach(e) => match e {
                ReachError::Parse { .. } | ReachError::DimensionMismatch(_) => 65,
                ReachError::Io(_) => 66,
                ReachError::PrecisionExhausted(_) | ReachError::NeedsMoreBudget(_) => 70,
                _ => 69,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Reach(e) => e.to_string(),
            Failure::Timeout(s) => format!("time budget of {} s exceeded", s),
        }
    }
}

/// Text written to stdout plus the exit code.
struct Outcome {
    out: String,
    code: u8,
}

impl Outcome {
    fn ok(out: String) -> Outcome {
        Outcome { out, code: 0 }
    }
}

type Run = Result<Outcome, Failure>;

fn rationals(s: &str, flag: &str) -> Result<Vec<AlgReal>, Failure> {
    s.split(',')
        .map(|t| parse_rational(t.trim()).map(AlgReal::from).map_err(|e| Failure::Usage(format!("{}: {}", flag, e))))
        .collect()
}

fn input_text(cfg: &RunConfig) -> Result<String, Failure> {
    match (&cfg.input, &cfg.fixture) {
        (Some(_), Some(_)) => Err(Failure::Usage("give either --input or --fixture".into())),
        (Some(p), None) => Ok(std::fs::read_to_string(p).map_err(ReachError::Io)?),
        (None, Some(name)) => fixtures::find(name)
            .map(|f| f.text.to_string())
            .ok_or_else(|| Failure::Usage(format!("unknown fixture '{}'; see `reach fixtures`", name))),
        (None, None) => Err(Failure::Usage("no problem given: use --input or --fixture".into())),
    }
}

fn load_problem(cfg: &RunConfig) -> Result<ReachProblem, Failure> {
    let mut p = parse_problem(&input_text(cfg)?)?;
    if let Some(t) = &cfg.tau {
        p.horizon = if t == "inf" { Horizon::Infinite } else { Horizon::Bounded(rationals(t, "--tau")?.remove(0)) };
    }
    if let Some(y) = &cfg.target {
        p.target = Some(Target::Point(rationals(y, "--target")?));
    }
    p.validate()?;
    Ok(p)
}

fn fmt_alg(x: &AlgReal) -> String {
    match x.as_rational() {
        Some(q) => format_rational(q),
        None => format!("{:.15}", x.to_f64()),
    }
}

fn fmt_vec(v: &[AlgReal]) -> String {
    format!("({})", v.iter().map(fmt_alg).collect::<Vec<_>>().join(", "))
}

fn fmt_iv(v: &[DyInterval]) -> String {
    let rad = v.iter().map(|x| x.rad_f64()).fold(0.0, f64::max);
    let mids: Vec<String> = v.iter().map(|x| format!("{}", x.mid_f64())).collect();
    format!("({}) ± {:.1e}", mids.join(", "), rad)
}

fn cmd_decide(cfg: &RunConfig) -> Run {
    let p = load_problem(cfg)?;
    let target = p.target.clone().ok_or_else(|| Failure::Usage("problem has no target; use --target".into()))?;
    if !matches!(target, Target::Point(_)) {
        let rep = set_target_semidecide(&p, &target, cfg.max_p)?;
        let code = rep.verdict.exit_code() as u8;
        let out = match cfg.format {
            Format::Document => serde_json::to_string_pretty(&json!({
                "verdict": rep.verdict.name(),
                "support": rep.support.as_ref().map(|s| [s.lo_rational().to_f64(), s.hi_rational().to_f64()]),
                "witness": rep.witness.as_ref().map(|w| w.iter().map(format_rational).collect::<Vec<_>>()),
                "diagnostics": rep.diagnostics,
            }))
            .expect("serializable"),
            _ => {
                let mut s = format!("verdict: {}\n", rep.verdict.name());
                if let Some(v) = &rep.support {
                    let _ = writeln!(s, "support value in [{:e}, {:e}]", v.lo_rational().to_f64(), v.hi_rational().to_f64());
                }
                if let Some(w) = &rep.witness {
                    let _ = writeln!(s, "reduced witness: ({})", w.iter().map(format_rational).collect::<Vec<_>>().join(", "));
                }
                for d in &rep.diagnostics {
                    let _ = writeln!(s, "note: {}", d);
                }
                s
            }
        };
        return Ok(Outcome { out, code });
    }
    let rep = decide(&p, cfg.max_p)?;
    let code = rep.verdict.exit_code() as u8;
    let witness = match &rep.verdict {
        MembershipVerdict::BoundaryHit(w) => Some(w.clone()),
        _ => None,
    };
    let out = match cfg.format {
        Format::Document => serde_json::to_string_pretty(&json!({
            "verdict": rep.verdict.name(),
            "reachable": rep.verdict.reachable(),
            "precision": rep.precision,
            "gap": rep.gap,
            "directions": rep.directions,
            "boundary_witness": witness,
            "separation": rep.separation.as_ref().map(|s| json!({
                "normal": s.normal,
                "offset": format_rational(&s.offset),
                "target_value": [s.value.lo_rational().to_f64(), s.value.hi_rational().to_f64()],
            })),
            "diagnostics": rep.diagnostics,
        }))
        .expect("serializable"),
        _ => {
            let mut s = format!("verdict: {}\n", rep.verdict.name());
            if let Some(r) = rep.verdict.reachable() {
                let _ = writeln!(s, "reachable: {}", r);
            }
            let _ = writeln!(s, "precision: {}  gap: {:.3e}  directions: {}", rep.precision, rep.gap, rep.directions);
            if let Some(w) = &witness {
                let _ = writeln!(s, "boundary point: {}", fmt_vec(&w.point));
                if let Some(d) = &w.direction {
                    let _ = writeln!(s, "support direction: {}", fmt_vec(d));
                }
                let _ = writeln!(s, "closed horizon: {}  ({})", w.bounded, w.note);
            }
            if let Some(sep) = &rep.separation {
                let _ = writeln!(
                    s,
                    "separating halfspace: {} . x <= {}  (target value in [{:e}, {:e}])",
                    fmt_vec(&sep.normal),
                    format_rational(&sep.offset),
                    sep.value.lo_rational().to_f64(),
                    sep.value.hi_rational().to_f64()
                );
            }
            for d in &rep.diagnostics {
                let _ = writeln!(s, "note: {}", d);
            }
            s
        }
    };
    Ok(Outcome { out, code })
}

fn cmd_approx(cfg: &RunConfig) -> Run {
    let p = load_problem(cfg)?;
    let (r, pair) = build_problem_pair(&p, cfg.precision)?;
    let out = match cfg.format {
        Format::Csv => pair_to_csv(&pair),
        Format::Svg => {
            if r.n != 2 || r.d != 2 {
                return Err(ReachError::Unsupported("SVG output needs a planar full-dimensional set; use --format csv".into()).into());
            }
            let e = |i: usize| {
                let mut z = vec![AlgReal::zero(); 2];
                z[i] = AlgReal::one();
                r.lift(&z).map(|x| x.iter().map(|v| v.to_f64()).collect::<Vec<_>>())
            };
            let (c0, c1) = e(0).zip(e(1)).ok_or_else(|| ReachError::Unsupported("reduced coordinates do not lift".into()))?;
            let to_state = vec![vec![c0[0], c1[0]], vec![c0[1], c1[1]]];
            let horizon = match &p.horizon {
                Horizon::Bounded(t) => t.as_rational().cloned().unwrap_or_else(|| parse_rational(&format!("{}", t.to_f64().ceil() as i64)).expect("integer")),
                Horizon::Infinite => parse_rational("30").expect("literal"),
            };
            let cloud: Vec<Vec<f64>> = sample_reachable_cloud(&p, cfg.samples, &horizon, 256, cfg.seed)?.into_iter().map(|c| c.x).collect();
            let target = match &p.target {
                Some(Target::Point(y)) => Some(y.iter().map(|v| v.to_f64()).collect::<Vec<_>>()),
                _ => None,
            };
            pair_to_svg(&pair, Some(&to_state), &cloud, target.as_deref())?
        }
        Format::Document => serde_json::to_string_pretty(&json!({
            "dimension": pair.dim,
            "gap": pair.gap,
            "precision": pair.precision,
            "achieved": pair.achieved,
            "inner": pair.inner.iter().map(|v| v.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "outer": pair.outer.iter().map(|h| json!({
                "normal": h.normal.iter().map(format_rational).collect::<Vec<_>>(),
                "offset": format_rational(&h.offset),
            })).collect::<Vec<_>>(),
            "lineality": pair.lineality.iter().map(|v| v.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }))
        .expect("serializable"),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "reduced dimension {} of {}", r.d, r.n);
            let _ = writeln!(s, "Hausdorff gap {:.3e} (target 2^-{}, reached: {})", pair.gap, pair.precision, pair.achieved);
            let _ = writeln!(s, "{} inner vertices, {} outer halfspaces, {} support samples", pair.inner.len(), pair.outer.len(), pair.samples.len());
            for v in &pair.inner {
                let _ = writeln!(s, "inner {}", v.iter().map(|q| format!("{:.9}", q.to_f64())).collect::<Vec<_>>().join(" "));
            }
            for h in &pair.outer {
                let _ = writeln!(
                    s,
                    "outer {} <= {:.9}",
                    h.normal.iter().map(|q| format!("{:.9}", q.to_f64())).collect::<Vec<_>>().join(" "),
                    h.offset.to_f64()
                );
            }
            s
        }
    };
    Ok(Outcome::ok(out))
}

fn cmd_decompose(cfg: &RunConfig) -> Run {
    let p = load_problem(cfg)?;
    let plan = build_plan(&p)?;
    let out = match cfg.format {
        Format::Document => serde_json::to_string_pretty(&plan).expect("serializable"),
        _ => {
            let mut s = format!("state dimension {}, bounded horizon: {}\n", plan.n, plan.bounded);
            for part in &plan.parts {
                let _ = writeln!(s, "column {}: part of dimension {}", part.column, part.c.rows);
                for line in &part.provenance {
                    let _ = writeln!(s, "  {}", line);
                }
            }
            let _ = writeln!(s, "{} free directions", plan.free_dims.len());
            s
        }
    };
    Ok(Outcome::ok(out))
}

fn cmd_support(cfg: &RunConfig) -> Run {
    let p = load_problem(cfg)?;
    let dir = rationals(cfg.dir.as_deref().ok_or_else(|| Failure::Usage("support needs --dir".into()))?, "--dir")?;
    if dir.len() != p.n() {
        return Err(ReachError::DimensionMismatch(format!("direction has {} entries, system has {}", dir.len(), p.n())).into());
    }
    let mut enc: Option<Vec<DyInterval>> = None;
    let mut exact: Option<Vec<AlgReal>> = Some(vec![AlgReal::zero(); p.n()]);
    let mut crossings = Vec::new();
    for j in 0..p.m() {
        let b = p.column(j);
        if b.iter().all(|x| x.is_zero()) {
            continue;
        }
        let sp = SupportOracle::new(&p.a, &b, &p.horizon)?.support(&dir, cfg.tol)?;
        crossings.push(sp.pattern.crossings.len());
        enc = Some(match enc {
            None => sp.enclosure.clone(),
            Some(e) => e.iter().zip(&sp.enclosure).map(|(x, y)| x + y).collect(),
        });
        exact = match (exact, &sp.exact) {
            (Some(acc), Some(x)) => Some(acc.iter().zip(x).map(|(u, v)| u.add(v)).collect()),
            _ => None,
        };
    }
    let enc = enc.ok_or(ReachError::ZeroColumn)?;
    let out = match cfg.format {
        Format::Document => serde_json::to_string_pretty(&json!({
            "direction": dir,
            "enclosure": enc.iter().map(|x| [x.lo_rational().to_f64(), x.hi_rational().to_f64()]).collect::<Vec<_>>(),
            "exact": exact,
            "crossings": crossings,
        }))
        .expect("serializable"),
        _ => {
            let mut s = format!("{}\n", fmt_iv(&enc));
            if let Some(x) = &exact {
                let _ = writeln!(s, "exact: {}", fmt_vec(x));
            }
            let _ = writeln!(s, "sign changes per column: {:?}", crossings);
            s
        }
    };
    Ok(Outcome::ok(out))
}

fn cmd_formula(cfg: &RunConfig) -> Run {
    let p = load_problem(cfg)?;
    let theory = Theory::parse(&cfg.theory).ok_or_else(|| Failure::Usage(format!("unknown theory '{}'; use r0, rexp or rexpsin", cfg.theory)))?;
    let f = export_fo_formula(&p, theory)?;
    Ok(Outcome::ok(if cfg.smtlib { f.to_smtlib() } else { format!("{}\n", f) }))
}

fn cmd_skolem_reduce(cfg: &RunConfig) -> Run {
    let flavor = match cfg.flavor {
        FlavorArg::Plain => Flavor::Plain,
        FlavorArg::Nontangential => Flavor::Nontangential,
    };
    let inst = skolem::parse_instance(&input_text(cfg)?, flavor)?;
    let r = skolem::reduce(&inst)?;
    let mut s = String::new();
    match cfg.format {
        Format::Document => s = serialize_problem(&r.problem),
        _ => {
            for line in &r.log {
                let _ = writeln!(s, "# {}", line);
            }
            let _ = writeln!(s, "{}", serialize_problem(&r.problem));
            if let Some(c) = &r.compact {
                let _ = writeln!(s, "# compact variant");
                let _ = writeln!(s, "{}", serialize_problem(c));
            }
        }
    }
    if cfg.verify {
        let rep = verify_claims(&r, cfg.tol.max(1e-12))?;
        s.push('\n');
        s.push_str(&rep.to_string());
    }
    Ok(Outcome::ok(s))
}

fn cmd_simulate(cfg: &RunConfig) -> Run {
    let p = load_problem(cfg)?;
    let horizon = match &p.horizon {
        Horizon::Bounded(t) => t.as_rational().cloned().ok_or_else(|| ReachError::Unsupported("simulation needs a rational horizon".into()))?,
        Horizon::Infinite => parse_rational("20").expect("literal"),
    };
    let cloud = sample_reachable_cloud(&p, cfg.samples, &horizon, 256, cfg.seed)?;
    let mut s = String::new();
    let head: Vec<String> = (1..=p.n()).map(|i| format!("x{}", i)).collect();
    let _ = writeln!(s, "{},err", head.join(","));
    for c in &cloud {
        let xs: Vec<String> = c.x.iter().map(|v| format!("{:.17e}", v)).collect();
        let _ = writeln!(s, "{},{:.3e}", xs.join(","), c.err);
    }
    Ok(Outcome::ok(s))
}

fn cmd_classify(cfg: &RunConfig) -> Run {
    let p = load_problem(cfg)?;
    let cl = classify(&p)?;
    let mut s = String::new();
    let _ = writeln!(s, "tags: {:?}", cl.tags);
    let _ = writeln!(s, "controllability rank: {} of {}", cl.rank, p.n());
    let _ = writeln!(s, "column ranks: {:?}", cl.column_ranks);
    for ev in cl.spectral.distinct() {
        let _ = writeln!(s, "eigenvalue {} {:+}i (multiplicity {})", fmt_alg(&ev.re), ev.im.to_f64(), ev.alg_mult);
    }
    let _ = writeln!(s, "stable: {}", cl.spectral.is_stable());
    Ok(Outcome::ok(s))
}

fn cmd_fixtures(name: Option<&str>) -> Run {
    match name {
        None => {
            let mut s = String::new();
            for f in fixtures::FIXTURES {
                let _ = writeln!(s, "{:16} {}", f.name, f.about);
            }
            Ok(Outcome::ok(s))
        }
        Some(n) => fixtures::find(n)
            .map(|f| Outcome::ok(format!("{}\n", f.text)))
            .ok_or_else(|| Failure::Usage(format!("unknown fixture '{}'", n))),
    }
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Run {
    match cmd {
        Command::Decide => cmd_decide(cfg),
        Command::Approx => cmd_approx(cfg),
        Command::Decompose => cmd_decompose(cfg),
        Command::Support => cmd_support(cfg),
        Command::Formula => cmd_formula(cfg),
        Command::SkolemReduce => cmd_skolem_reduce(cfg),
        Command::Simulate => cmd_simulate(cfg),
        Command::Classify => cmd_classify(cfg),
        Command::Fixtures { name } => cmd_fixtures(name.as_deref()),
    }
}

fn run(cli: Cli) -> Run {
    let cfg = cli.cfg;
    if cfg.precision == 0 || cfg.max_p == 0 || cfg.max_depth == 0 || cfg.samples == 0 || !(cfg.tol > 0.0) || cfg.time_limit.is_some_and(|t| !(t > 0.0 && t.is_finite())) {
        return Err(Failure::Usage("budgets and tolerances must be positive".into()));
    }
    if let Ok(bits) = std::env::var("REACH_BITS") {
        let bits: u32 = bits.parse().map_err(|_| Failure::Usage(format!("REACH_BITS must be an integer, got '{}'", bits)))?;
        set_start_prec(bits);
    }
    set_depth_budget(cfg.max_depth);
    if let Some(j) = cfg.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let Some(limit) = cfg.time_limit else {
        return dispatch(&cli.command, &cfg);
    };
    let (tx, rx) = mpsc::channel();
    let cmd = cli.command.clone();
    let worker_cfg = cfg.clone();
    std::thread::spawn(move || {
        let _ = tx.send(dispatch(&cmd, &worker_cfg));
    });
    rx.recv_timeout(Duration::from_secs_f64(limit)).unwrap_or(Err(Failure::Timeout(limit)))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(cli) {
        Ok(o) => {
            print!("{}", o.out);
            ExitCode::from(o.code)
        }
        Err(f) => {
            eprintln!("reach: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
