use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use pvcauchy::comb::{comb_report, widom_sum, CombError};
use pvcauchy::constructions::{harmonic_measure, ConstructionError, HarmonicMeasureSpec};
use pvcauchy::fast_eval::{audit, batch_cauchy, error_bound, EvalTree, FastEvalError, SourceSet};
use pvcauchy::identities::{
    default_quadratic_points, maximal_summability, verify_quadratic, verify_reflectionless,
    IdentityError, IdentityReport, MaximalOptions, QuadraticOptions, Verdict,
};
use pvcauchy::measure::spec_file::SpecFile;
use pvcauchy::measure::MeasureError;
use pvcauchy::transforms::{cauchy_eps, cauchy_pv_with, Ladder, PvOptions, Status, TransformError};
use pvcauchy::{Cx64, Measure64};

#[derive(Parser)]
#[command(
    name = "pvc",
    version,
    about = "Principal-value Cauchy transforms, reflectionless checks and comb maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// Measure spec file (JSON).
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    nodes: Option<usize>,
    /// Smallest ε of the cross-check ladder (eval, verify-reflectionless) or
    /// of the maximal-function grid relative to the support diameter.
    #[arg(long)]
    eps_min: Option<f64>,
    #[arg(long)]
    eps_rungs: Option<usize>,
    /// File of `re,im` rows, inline `re,im;re,im;...`, or `random:N`.
    #[arg(long)]
    points: Option<String>,
    #[arg(long, default_value = "pvc-out")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Interval system, e.g. `[-1,-0.3],[0.3,1]`.
    #[arg(long, allow_hyphen_values = true)]
    intervals: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Principal value (or ε-truncated) Cauchy transform at points.
    Eval {
        #[command(flatten)]
        c: Common,
        /// Evaluate `C^μ_ε` at this ε instead of the principal value.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Maximal-function summability statistics.
    Maximal {
        #[command(flatten)]
        c: Common,
    },
    /// Quadratic identity `2 C^{C^μ dμ} = (C^μ)²` at test points.
    VerifyQuadratic {
        #[command(flatten)]
        c: Common,
    },
    /// Vanishing of the principal value on the support.
    VerifyReflectionless {
        #[command(flatten)]
        c: Common,
    },
    /// Harmonic measure of an interval union: build, verify, serialise.
    HarmonicMeasure {
        #[command(flatten)]
        c: Common,
    },
    /// Boundary trace of `F = ∫ C^μ`, VH classification and ray test.
    Comb {
        #[command(flatten)]
        c: Common,
    },
    /// Green's function at the gap critical points and their sum.
    Widom {
        #[command(flatten)]
        c: Common,
    },
    /// Treecode against the direct sum on random sources.
    Bench {
        #[command(flatten)]
        c: Common,
        #[arg(long, default_value_t = 12)]
        order: usize,
        #[arg(long, default_value_t = 200)]
        audit: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl From<MeasureError> for Failure {
    fn from(e: MeasureError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::NotEvaluable(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<IdentityError> for Failure {
    fn from(e: IdentityError) -> Self {
        match e {
            IdentityError::Transform(t) => t.into(),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Self {
        match e {
            ConstructionError::NonConvergence(_) => Failure::Numerical(e.to_string()),
            ConstructionError::Transform(t) => t.into(),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<CombError> for Failure {
    fn from(e: CombError) -> Self {
        match e {
            CombError::Transform(t) => t.into(),
            CombError::Construction(c) => c.into(),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<FastEvalError> for Failure {
    fn from(e: FastEvalError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// Verdict word, exit code and details for the one-line summary.
struct Outcome {
    verdict: String,
    code: u8,
    detail: String,
}

impl Outcome {
    fn from_verdict(v: Verdict, detail: String) -> Self {
        let code = match v {
            Verdict::Pass | Verdict::ExpectedFail => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 3,
        };
        Outcome {
            verdict: v.as_str().to_string(),
            code,
            detail,
        }
    }

    fn ok(verdict: impl Into<String>, detail: String) -> Self {
        Outcome {
            verdict: verdict.into(),
            code: 0,
            detail,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    match run(cli.command) {
        Ok(o) => {
            println!("{name}: {} ({})", o.verdict, o.detail);
            ExitCode::from(o.code)
        }
        Err(f) => {
            let (kind, msg) = match &f {
                Failure::Input(m) => ("input error", m),
                Failure::Numerical(m) => ("non-convergence", m),
            };
            println!("{name}: {kind} ({msg})");
            ExitCode::from(f.code())
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Eval { .. } => "eval",
        Command::Maximal { .. } => "maximal",
        Command::VerifyQuadratic { .. } => "verify-quadratic",
        Command::VerifyReflectionless { .. } => "verify-reflectionless",
        Command::HarmonicMeasure { .. } => "harmonic-measure",
        Command::Comb { .. } => "comb",
        Command::Widom { .. } => "widom",
        Command::Bench { .. } => "bench",
    }
}

fn run(cmd: Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Eval { c, eps } => eval(&c, eps),
        Command::Maximal { c } => maximal(&c),
        Command::VerifyQuadratic { c } => quadratic(&c),
        Command::VerifyReflectionless { c } => reflectionless(&c),
        Command::HarmonicMeasure { c } => harmonic(&c),
        Command::Comb { c } => comb(&c),
        Command::Widom { c } => widom(&c),
        Command::Bench { c, order, audit } => bench(&c, order, audit),
    }
}

fn config_echo(cmd: &str, c: &Common, effective: Value) -> Value {
    json!({
        "command": cmd,
        "spec": c.spec.as_ref().map(|p| p.display().to_string()),
        "tol": c.tol,
        "nodes": c.nodes,
        "eps_min": c.eps_min,
        "eps_rungs": c.eps_rungs,
        "points": c.points,
        "out": c.out.display().to_string(),
        "seed": c.seed,
        "intervals": c.intervals,
        "effective": effective,
    })
}

/// Writes `<name>.json` with the tool version and config echo around the
/// result.
fn write_report(c: &Common, name: &str, config: Value, result: Value) -> Result<(), Failure> {
    fs::create_dir_all(&c.out)?;
    let doc = json!({
        "tool": "pvc",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": c.seed,
        "config": config,
        "result": result,
    });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Input(e.to_string()))?;
    fs::write(c.out.join(format!("{name}.json")), text + "\n")?;
    Ok(())
}

fn write_file(c: &Common, name: &str, text: &str) -> Result<(), Failure> {
    fs::create_dir_all(&c.out)?;
    fs::write(c.out.join(name), text)?;
    Ok(())
}

fn positive(v: f64, what: &str) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Failure::Input(format!("{what} must be positive, got {v}")))
    }
}

fn load_spec(c: &Common) -> Result<(Measure64, bool), Failure> {
    let path = c
        .spec
        .as_ref()
        .ok_or_else(|| Failure::Input("--spec is required".into()))?;
    let spec = SpecFile::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok((spec.to_measure(base)?, spec.expects_failure()))
}

fn parse_intervals(text: &str) -> Result<Vec<(f64, f64)>, Failure> {
    let bad = || {
        Failure::Input(format!(
            "cannot parse intervals {text:?}; expected [a,b],[c,d],..."
        ))
    };
    let t = text.trim();
    if !t.starts_with('[') || !t.ends_with(']') {
        return Err(bad());
    }
    t[1..t.len() - 1]
        .split("],")
        .map(|piece| {
            let piece = piece.trim().trim_start_matches('[').trim_end_matches(']');
            let mut it = piece.split(',').map(|s| s.trim().parse::<f64>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
                _ => Err(bad()),
            }
        })
        .collect()
}

fn load_intervals(c: &Common) -> Result<Vec<(f64, f64)>, Failure> {
    let text = c
        .intervals
        .as_ref()
        .ok_or_else(|| Failure::Input("--intervals is required".into()))?;
    parse_intervals(text)
}

fn parse_point(s: &str) -> Option<Cx64> {
    let parts: Vec<&str> = s
        .split([',', ' ', '\t'])
        .filter(|p| !p.is_empty())
        .collect();
    match parts.as_slice() {
        [x] => Some(Complex::new(x.parse().ok()?, 0.0)),
        [x, y] => Some(Complex::new(x.parse().ok()?, y.parse().ok()?)),
        _ => None,
    }
}

/// Random points from `random:N` use the seed and `sampler`.
fn load_points(
    c: &Common,
    sampler: impl Fn(&mut ChaCha8Rng) -> Cx64,
) -> Result<Option<Vec<Cx64>>, Failure> {
    let Some(spec) = c.points.as_deref() else {
        return Ok(None);
    };
    if let Some(n) = spec.strip_prefix("random:") {
        let n: usize = n
            .parse()
            .map_err(|_| Failure::Input(format!("bad point count in {spec:?}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
        return Ok(Some((0..n).map(|_| sampler(&mut rng)).collect()));
    }
    let path = Path::new(spec);
    let (text, sep) = if path.is_file() {
        (fs::read_to_string(path)?, '\n')
    } else {
        (spec.to_string(), ';')
    };
    let mut out = Vec::new();
    for (i, line) in text.split(sep).enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(
            parse_point(line)
                .ok_or_else(|| Failure::Input(format!("point {}: cannot parse {line:?}", i + 1)))?,
        );
    }
    if out.is_empty() {
        return Err(Failure::Input("no test points".into()));
    }
    Ok(Some(out))
}

/// Half the bounding-box diagonal around its centre.
fn enclosing_disc(mu: &Measure64) -> (Cx64, f64) {
    let r = 0.5 * mu.diameter();
    (mu.center(), if r > 0.0 { r } else { 1.0 })
}

fn annulus(c: Cx64, r0: f64, r1: f64) -> impl Fn(&mut ChaCha8Rng) -> Cx64 {
    move |rng| {
        let r = rng.gen_range(r0..r1);
        let t = rng.gen_range(0.0..std::f64::consts::TAU);
        c + Complex::from_polar(r, t)
    }
}

fn pv_options(c: &Common, tol: f64) -> PvOptions<f64> {
    let mut o = if c.eps_rungs.is_some() || c.eps_min.is_some() {
        let mut l = Ladder::default();
        if let Some(r) = c.eps_rungs {
            l.rungs = r;
        }
        l.eps_min = c.eps_min;
        PvOptions {
            ladder: Some(l),
            ..PvOptions::new(tol)
        }
    } else {
        PvOptions::fast(tol)
    };
    o.tol = tol;
    o
}

fn pv_echo(o: &PvOptions<f64>) -> Value {
    json!({
        "pv_tol": o.tol,
        "ladder": o.ladder.map(|l| json!({"rungs": l.rungs, "ratio": l.ratio, "eps_min": l.eps_min})),
        "gauss_jacobi_nodes": o.nodes,
    })
}

fn fmt_point(z: Cx64) -> String {
    if z.im == 0.0 {
        format!("x={}", z.re)
    } else {
        format!("z={}{:+}i", z.re, z.im)
    }
}

fn eval(c: &Common, eps: Option<f64>) -> Result<Outcome, Failure> {
    let (mu, _) = load_spec(c)?;
    let tol = positive(c.tol.unwrap_or(1e-10), "--tol")?;
    let (centre, r) = enclosing_disc(&mu);
    let points = load_points(c, annulus(centre, 0.0, 2.0 * r))?
        .ok_or_else(|| Failure::Input("--points is required".into()))?;
    let mut opts = pv_options(c, tol);
    opts.nodes = c.nodes;
    let mut csv =
        String::from("point_re,point_im,value_re,value_im,tail_estimate,status,on_support\n");
    let mut unconverged = 0usize;
    for &z in &points {
        let (v, tail, status, on) = match eps {
            Some(e) => (
                cauchy_eps(&mu, z, positive(e, "--eps")?)?,
                0.0,
                "truncated",
                mu.distance(z) == 0.0,
            ),
            None => {
                let r = cauchy_pv_with(&mu, z, &opts)?;
                if r.status != Status::Converged {
                    unconverged += 1;
                }
                (r.value, r.tail_estimate, r.status.as_str(), r.on_support)
            }
        };
        csv.push_str(&format!(
            "{:e},{:e},{:e},{:e},{:e},{},{}\n",
            z.re, z.im, v.re, v.im, tail, status, on
        ));
    }
    write_file(c, "eval.csv", &csv)?;
    let effective = json!({"tol": tol, "eps": eps, "pv": pv_echo(&opts), "points": points.len()});
    write_report(
        c,
        "eval",
        config_echo("eval", c, effective),
        json!({"points": points.len(), "unconverged": unconverged}),
    )?;
    let detail = format!("{} points, {} unconverged", points.len(), unconverged);
    if unconverged > 0 {
        return Ok(Outcome {
            verdict: "not-converged".into(),
            code: 3,
            detail,
        });
    }
    Ok(Outcome::ok("ok", detail))
}

fn maximal(c: &Common) -> Result<Outcome, Failure> {
    let (mu, _) = load_spec(c)?;
    let mut opts = MaximalOptions::<f64>::default();
    if let Some(n) = c.nodes {
        opts.nodes = n;
    }
    if let Some(e) = c.eps_min {
        opts.eps_min_rel = positive(e, "--eps-min")?;
    }
    let s = maximal_summability(&mu, &opts)?;
    let mut csv = String::from("node_re,node_im,weight,maximal\n");
    for i in 0..s.nodes.len() {
        csv.push_str(&format!(
            "{:e},{:e},{:e},{:e}\n",
            s.nodes[i].re, s.nodes[i].im, s.weights[i], s.maximal_values[i]
        ));
    }
    write_file(c, "maximal.csv", &csv)?;
    let result = json!({
        "class": s.class.as_str(),
        "nodes": s.nodes.len(),
        "cutoffs": s.cutoffs,
        "l1_truncated": s.l1_truncated,
        "weak_by_cutoff": s.weak_by_cutoff,
        "weak_quasinorm": s.weak_quasinorm,
        "weak_variation": s.weak_variation,
        "slope": s.slope,
        "intercept": s.intercept,
        "r_squared": s.r_squared,
        "last_growth": s.last_growth,
        "lambdas": s.lambdas,
        "weak_profile": s.weak_profile,
        "eps": s.eps,
        "eps_l1_norms": s.eps_l1_norms,
    });
    let effective = json!({"nodes": opts.nodes, "eps_min_rel": opts.eps_min_rel});
    write_report(c, "maximal", config_echo("maximal", c, effective), result)?;
    Ok(Outcome::ok(
        s.class.as_str(),
        format!(
            "R²={:.6}, last growth {:.3e}, weak variation {:.3e}",
            s.r_squared, s.last_growth, s.weak_variation
        ),
    ))
}

fn identity_outcome(rep: &IdentityReport<f64>) -> Outcome {
    let worst = rep
        .worst()
        .map(|(z, r)| format!("max residual {r:.6e} at {}", fmt_point(z)))
        .unwrap_or_else(|| "no conclusive points".into());
    let groups: Vec<String> = rep
        .groups
        .iter()
        .map(|(k, v)| format!("{k}: {v:.6e}"))
        .collect();
    let detail = if groups.is_empty() {
        format!("{worst}; tol {:e}", rep.tolerance)
    } else {
        format!("{worst}; {}; tol {:e}", groups.join(", "), rep.tolerance)
    };
    Outcome::from_verdict(rep.verdict, detail)
}

fn quadratic(c: &Common) -> Result<Outcome, Failure> {
    let (mu, expect_fail) = load_spec(c)?;
    let tol = positive(c.tol.unwrap_or(1e-6), "--tol")?;
    let (centre, r) = enclosing_disc(&mu);
    let points = match load_points(c, annulus(centre, 1.5 * r, 3.0 * r))? {
        Some(p) => p,
        None => default_quadratic_points(&mu)?,
    };
    let mut opts = QuadraticOptions::new(tol);
    if let Some(n) = c.nodes {
        opts.nodes = n;
    }
    opts.expect_fail = expect_fail;
    let rep = verify_quadratic(&mu, &points, &opts)?;
    write_file(c, "quadratic.csv", &rep.to_csv())?;
    let effective = json!({"tol": tol, "nodes": opts.nodes, "expect_fail": expect_fail, "points": points.len()});
    write_report(
        c,
        "quadratic",
        config_echo("verify-quadratic", c, effective),
        rep.summary_json(),
    )?;
    Ok(identity_outcome(&rep))
}

fn reflectionless(c: &Common) -> Result<Outcome, Failure> {
    let (mu, expect_fail) = load_spec(c)?;
    let tol = positive(c.tol.unwrap_or(1e-6), "--tol")?;
    let n = c.nodes.unwrap_or(64);
    let opts = pv_options(c, 1e-12);
    let rep = verify_reflectionless(&mu, n, tol, &opts, expect_fail)?;
    write_file(c, "reflectionless.csv", &rep.to_csv())?;
    let effective =
        json!({"tol": tol, "nodes": [n, 2 * n], "pv": pv_echo(&opts), "expect_fail": expect_fail});
    write_report(
        c,
        "reflectionless",
        config_echo("verify-reflectionless", c, effective),
        rep.summary_json(),
    )?;
    Ok(identity_outcome(&rep))
}

fn harmonic_result(h: &HarmonicMeasureSpec<f64>) -> Value {
    json!({
        "intervals": h.intervals.iter().map(|(a, b)| [*a, *b]).collect::<Vec<_>>(),
        "gap_roots": h.gap_roots,
        "robin_constant": h.robin_constant,
        "robin_spread": h.robin_spread,
        "raw_mass": h.raw_mass,
        "mass": h.mass,
        "sweeps": h.sweeps,
    })
}

fn harmonic(c: &Common) -> Result<Outcome, Failure> {
    let intervals = load_intervals(c)?;
    let tol = positive(c.tol.unwrap_or(1e-6), "--tol")?;
    let n = c.nodes.unwrap_or(64);
    let h = harmonic_measure(&intervals)?;
    let spec = h.spec_file()?;
    write_file(c, "harmonic_measure.json", &(spec.to_json() + "\n"))?;
    let sidecar = serde_json::to_string_pretty(&h.sidecar_json())
        .map_err(|e| Failure::Input(e.to_string()))?;
    write_file(c, "harmonic_measure.sidecar.json", &(sidecar + "\n"))?;
    let opts = pv_options(c, 1e-12);
    let rep = verify_reflectionless(h.measure(), n, tol, &opts, false)?;
    write_file(c, "reflectionless.csv", &rep.to_csv())?;
    let effective = json!({"tol": tol, "nodes": [n, 2 * n], "pv": pv_echo(&opts)});
    write_report(
        c,
        "harmonic_measure.report",
        config_echo("harmonic-measure", c, effective),
        json!({"construction": harmonic_result(&h), "reflectionless": rep.summary_json()}),
    )?;
    let mut o = identity_outcome(&rep);
    let roots: Vec<String> = h.gap_roots.iter().map(|r| format!("{r:.12e}")).collect();
    o.detail = format!(
        "gap roots [{}], mass {:.15}; {}",
        roots.join(", "),
        h.mass,
        o.detail
    );
    Ok(o)
}

fn comb(c: &Common) -> Result<Outcome, Failure> {
    let mu = match (&c.spec, &c.intervals) {
        (Some(_), None) => load_spec(c)?.0,
        (None, Some(_)) => harmonic_measure(&load_intervals(c)?)?.measure().clone(),
        _ => {
            return Err(Failure::Input(
                "give exactly one of --spec and --intervals".into(),
            ))
        }
    };
    let n = c.nodes.unwrap_or(400);
    let tol = positive(c.tol.unwrap_or(1e-3), "--tol")?;
    let rep = comb_report(&mu, n, tol)?;
    write_file(c, "comb_trace.csv", &rep.to_csv())?;
    let effective = json!({"grid": n, "tol_angle": tol});
    write_report(
        c,
        "comb",
        config_echo("comb", c, effective),
        rep.summary_json(),
    )?;
    let verdict = if rep.comb.comb_like {
        "comb-like"
    } else {
        "not-comb-like"
    };
    let (v, h, ne) = rep.vh_fractions;
    Ok(Outcome::ok(
        verdict,
        format!(
            "strip height {:.12}, V/H/N fractions {v:.4}/{h:.4}/{ne:.4}, length {:.6}, {}",
            rep.strip_height,
            rep.rect_length,
            rep.rectifiability.as_str()
        ),
    ))
}

fn widom(c: &Common) -> Result<Outcome, Failure> {
    let h = harmonic_measure(&load_intervals(c)?)?;
    let w = widom_sum(&h)?;
    write_report(
        c,
        "widom",
        config_echo("widom", c, json!({})),
        json!({"construction": harmonic_result(&h), "widom": w.summary_json()}),
    )?;
    Ok(Outcome::ok(
        "ok",
        format!(
            "{} critical points, sum {:.12e}",
            w.critical_points.len(),
            w.sum
        ),
    ))
}

fn bench(c: &Common, order: usize, audit_count: usize) -> Result<Outcome, Failure> {
    let n = c.nodes.unwrap_or(1 << 14);
    let tol = positive(c.tol.unwrap_or(1e-9), "--tol")?;
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let pts: Vec<Cx64> = (0..n).map(|_| Complex::new(rng.gen(), rng.gen())).collect();
    let w: Vec<Cx64> = (0..n)
        .map(|_| Complex::new(rng.gen::<f64>() + 0.5, 0.0) / n as f64)
        .collect();
    let targets: Vec<Cx64> = (0..n).map(|_| Complex::new(rng.gen(), rng.gen())).collect();
    let sources = SourceSet::new(pts, w)?;
    let t0 = Instant::now();
    let tree = EvalTree::build(&sources, order, 32)?;
    let _ = batch_cauchy(&tree, &targets, 0.0);
    let fast = t0.elapsed().as_secs_f64();
    let (picked, worst) = audit(&sources, &tree, &targets, 0.0, audit_count);
    let result = json!({
        "sources": n,
        "targets": targets.len(),
        "order": order,
        "cells": tree.cell_count(),
        "leaves": tree.leaf_count(),
        "audited": picked.len(),
        "max_relative_error": worst,
        "per_cell_bound": error_bound(order),
    });
    let effective = json!({"sources": n, "order": order, "audit": audit_count, "tol": tol});
    write_report(c, "bench", config_echo("bench", c, effective), result)?;
    // wall times go to stdout only so the report stays reproducible
    let detail = format!(
        "max relative error {worst:.3e} on {} targets; treecode {fast:.3}s",
        picked.len()
    );
    Ok(Outcome::from_verdict(
        if worst < tol {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        detail,
    ))
}
