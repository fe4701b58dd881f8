//! Command-line front end. Every command produces a [`RunReport`]; the exit
//! code is 0 when nothing failed, 1 on a failed check or computation, and 2
//! when an input is rejected.

use std::collections::HashMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::bmgame::{run_game, verify_game, GameConfig, GameReport, GameState, Move, Oracle, PlayerOne};
use crate::bump::{check_bump_definition, make_bump, mu_constants, BumpSpec};
use crate::enclosure::n_set_enclosure;
use crate::error::{Error, Result};
use crate::indexcomb::{apply_finite_permutation, check_perm_a, check_s_k, check_y_k, DeltaSeq, IndexSeq, Verdict};
use crate::intervalsets::{hausdorff, IntervalSet};
use crate::nsets::{n_set_exact, window, Variant};
use crate::rational::{fmt_q, parse_q, to_f64, Q};
use crate::realfn::{random_function, C1Function, Function, PwlFunction};
use crate::report::{Check, ReportError, RunReport};

#[derive(Parser, Debug)]
#[command(name = "knotpoints", version, about = "Exception sets of Dini derivatives, Hausdorff tools and the Banach-Mazur strategy engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// N(f,a) for one variant: exact for PWL input, an enclosure for C¹ input.
    Nset(NsetArgs),
    /// Hausdorff distance between two interval sets.
    Hausdorff(HausdorffArgs),
    /// Index combinatorics checks on a scenario file.
    #[command(subcommand)]
    Comb(CombCommand),
    /// Bump construction and the μ constant.
    #[command(subcommand)]
    Bump(BumpCommand),
    /// Play or re-verify the Banach-Mazur game.
    #[command(subcommand)]
    Game(GameCommand),
    /// Fraction of grid points inside N(f,a) for a random function.
    JarnikDemo(JarnikArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct ReportArg {
    /// Also write the JSON report to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct NsetArgs {
    #[arg(long)]
    pub f: PathBuf,
    #[arg(long)]
    pub a: String,
    /// plus_upper, plus_lower, minus_upper, minus_lower, hat, check or full.
    #[arg(long, default_value = "full")]
    pub variant: String,
    /// Enclosure tolerance for C¹ input.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// What to print on stdout.
    #[arg(long, value_enum, default_value = "json")]
    pub out: OutFormat,
    #[command(flatten)]
    pub sink: ReportArg,
}

#[derive(Args, Debug)]
pub struct HausdorffArgs {
    #[arg(long)]
    pub k: PathBuf,
    #[arg(long)]
    pub l: PathBuf,
    #[command(flatten)]
    pub sink: ReportArg,
}

#[derive(Subcommand, Debug)]
pub enum CombCommand {
    /// 𝒮_k membership of `sets`.
    CheckS(ScenarioArgs),
    /// 𝒴_k membership of `(sets, f)`.
    CheckY(ScenarioArgs),
    /// Both claims about a finite permutation `sigma` of `[n_k]`.
    Perm(ScenarioArgs),
}

#[derive(Args, Debug)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[command(flatten)]
    pub sink: ReportArg,
}

#[derive(Subcommand, Debug)]
pub enum BumpCommand {
    /// Build φ from a spec and check the three defining properties.
    Make(BumpMakeArgs),
    /// μ(f,a,b,h) with its constants and margins.
    Mu(BumpMuArgs),
}

#[derive(Args, Debug)]
pub struct BumpMakeArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Write φ as function JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write `x,φ(x)` on `--grid` cells to this CSV file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    #[command(flatten)]
    pub sink: ReportArg,
}

#[derive(Args, Debug)]
pub struct BumpMuArgs {
    #[arg(long)]
    pub f: PathBuf,
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
    #[arg(long)]
    pub h: f64,
    #[command(flatten)]
    pub sink: ReportArg,
}

#[derive(Subcommand, Debug)]
pub enum GameCommand {
    /// Play up to `--rounds` rounds and record every certification.
    Run(GameRunArgs),
    /// Recompute every verdict of a saved run.
    Verify(GameVerifyArgs),
}

#[derive(Args, Debug)]
pub struct GameRunArgs {
    #[arg(long, default_value_t = 4)]
    pub rounds: usize,
    /// Seed of the random Player I.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Scripted Player I moves `{"moves": [{"f": ..., "alpha": ...}]}`; overrides `--seed`.
    #[arg(long)]
    pub moves: Option<PathBuf>,
    /// `everything`, `avoid:<p>` or `target:<tol>:<sets>`; repeat for later rounds.
    #[arg(long = "oracle", default_value = "everything")]
    pub oracles: Vec<String>,
    #[arg(long)]
    pub max_net_points: Option<usize>,
    #[arg(long)]
    pub star_samples: Option<usize>,
    #[command(flatten)]
    pub sink: ReportArg,
}

#[derive(Args, Debug)]
pub struct GameVerifyArgs {
    /// A `game run` report, a bare game report, or a game state.
    #[arg(long)]
    pub state: PathBuf,
    #[command(flatten)]
    pub sink: ReportArg,
}

#[derive(Args, Debug)]
pub struct JarnikArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 12)]
    pub depth: u32,
    #[arg(long, default_value_t = 0.55)]
    pub decay: f64,
    /// Scales, comma separated.
    #[arg(long = "a", value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8")]
    pub a_list: Vec<String>,
    /// Grid points are `i/grid` for `0 ≤ i ≤ grid`.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Use `f ≡ 0` instead of a random function.
    #[arg(long)]
    pub flat: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub out: OutFormat,
    #[command(flatten)]
    pub sink: ReportArg,
}

impl Command {
    fn report_path(&self) -> Option<&Path> {
        let s = match self {
            Command::Nset(a) => &a.sink,
            Command::Hausdorff(a) => &a.sink,
            Command::Comb(CombCommand::CheckS(a) | CombCommand::CheckY(a) | CombCommand::Perm(a)) => &a.sink,
            Command::Bump(BumpCommand::Make(a)) => &a.sink,
            Command::Bump(BumpCommand::Mu(a)) => &a.sink,
            Command::Game(GameCommand::Run(a)) => &a.sink,
            Command::Game(GameCommand::Verify(a)) => &a.sink,
            Command::JarnikDemo(a) => &a.sink,
        };
        s.report.as_deref()
    }
}

/// What a command hands back besides its checks.
#[derive(Default)]
struct Outcome {
    outputs: Value,
    checks: Vec<Check>,
    seed: Option<u64>,
    /// Replaces the report on stdout.
    stdout: Option<String>,
    files: Vec<(PathBuf, String)>,
}

/// Input files are read through this so their bytes enter the digest.
#[derive(Default)]
struct Inputs {
    bytes: Vec<Vec<u8>>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<Vec<u8>> {
        let b = std::fs::read(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        self.bytes.push(b.clone());
        Ok(b)
    }

    fn json<T: DeserializeOwned>(&mut self, path: &Path) -> Result<T> {
        let b = self.read(path)?;
        serde_json::from_slice(&b).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
    }
}

/// The outcome of one invocation: the report and what goes to stdout.
pub struct Invocation {
    pub report: RunReport,
    pub stdout: String,
    pub exit_code: i32,
}

/// Parses `args` (including the program name), runs the command and writes
/// any requested files. Parse errors and `--help` come back as `Err` with
/// clap's rendering and exit code.
pub fn invoke<I, T>(args: I) -> std::result::Result<Invocation, (String, i32)>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&args).map_err(|e| (e.render().to_string(), e.exit_code()))?;
    let words: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let mut inputs = Inputs::default();
    let res = dispatch(&cli.command, &mut inputs);
    let mut report = RunReport::new(words, &inputs.bytes);
    let mut stdout = None;
    let mut write_err = None;
    match res {
        Ok(o) => {
            report.outputs = o.outputs;
            report.checks = o.checks;
            report.seed = o.seed;
            stdout = o.stdout;
            for (p, s) in &o.files {
                if let Err(e) = write_atomic(p, s) {
                    write_err = Some(e);
                    break;
                }
            }
        }
        Err(e) => report.error = Some(ReportError::from(&e)),
    }
    if let Some(e) = write_err {
        report.error = Some(ReportError::from(&e));
    }
    report.settle();
    let json = report.to_json();
    if let Some(p) = cli.command.report_path() {
        if let Err(e) = write_atomic(p, &json) {
            report.error = Some(ReportError::from(&e));
            report.settle();
        }
    }
    let exit_code = report.exit_code();
    let stdout = if report.error.is_some() { report.to_json() } else { stdout.unwrap_or_else(|| report.to_json()) };
    Ok(Invocation { report, stdout, exit_code })
}

/// Entry point for the binary.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match invoke(args) {
        Ok(inv) => {
            print!("{}", inv.stdout);
            if let Some(e) = &inv.report.error {
                eprintln!("error ({}): {}", e.kind, e.message);
            }
            inv.exit_code
        }
        Err((msg, code)) => {
            if code == 0 {
                print!("{msg}");
            } else {
                eprint!("{msg}");
            }
            code
        }
    }
}

/// Writes through a sibling temporary file so readers never see a partial file.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Input(format!("{}: {e}", path.display()));
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

fn dispatch(cmd: &Command, inputs: &mut Inputs) -> Result<Outcome> {
    match cmd {
        Command::Nset(a) => cmd_nset(a, inputs),
        Command::Hausdorff(a) => cmd_hausdorff(a, inputs),
        Command::Comb(c) => cmd_comb(c, inputs),
        Command::Bump(c) => cmd_bump(c, inputs),
        Command::Game(c) => cmd_game(c, inputs),
        Command::JarnikDemo(a) => cmd_jarnik_demo(a),
    }
}

fn flag_q(name: &str, s: &str) -> Result<Q> {
    parse_q(s).map_err(|e| Error::Input(format!("--{name}: {e}")))
}

fn c1_input(f: Function, path: &Path) -> Result<C1Function> {
    match f {
        Function::C1(f) => Ok(f),
        Function::Pwl(_) => Err(Error::Input(format!("{}: field `class`: expected c1", path.display()))),
    }
}

fn cmd_nset(a: &NsetArgs, inputs: &mut Inputs) -> Result<Outcome> {
    let f: Function = inputs.json(&a.f)?;
    let scale = flag_q("a", &a.a)?;
    let variant = Variant::parse(&a.variant).ok_or_else(|| Error::Input(format!("--variant: unknown variant {:?}", a.variant)))?;
    let mut out = Outcome::default();
    match &f {
        Function::Pwl(p) => {
            let s = n_set_exact(p, &scale, variant)?;
            out.checks.push(Check::new("exact N-set", Verdict::Pass));
            out.outputs = json!({ "class": "pwl", "variant": variant.name(), "a": fmt_q(&scale), "set": s, "total_length": fmt_q(&s.total_length()) });
            if a.out == OutFormat::Csv {
                out.stdout = Some(s.to_csv());
            }
        }
        Function::C1(_) => {
            let e = n_set_enclosure(&f, &scale, variant, a.tol)?;
            let undecided = e.undecided_length();
            let v = if undecided > 0.0 { Verdict::Undecided { witness: format!("undecided length {undecided:e}") } } else { Verdict::Pass };
            out.checks.push(Check::new("enclosure decided", v));
            out.outputs = json!({
                "class": "c1", "variant": variant.name(), "a": fmt_q(&scale), "tol": a.tol,
                "inner": e.inner, "outer": e.outer, "undecided_length": undecided,
            });
            if a.out == OutFormat::Csv {
                out.stdout = Some(format!("# inner\n{}# outer\n{}", e.inner.to_csv(), e.outer.to_csv()));
            }
        }
    }
    Ok(out)
}

fn cmd_hausdorff(a: &HausdorffArgs, inputs: &mut Inputs) -> Result<Outcome> {
    let k: IntervalSet = inputs.json(&a.k)?;
    let l: IntervalSet = inputs.json(&a.l)?;
    let d = hausdorff(&k, &l);
    Ok(Outcome { outputs: json!({ "distance": fmt_q(&d), "distance_f64": to_f64(&d) }), ..Outcome::default() })
}

/// `{n_prefix, delta_prefix, k, m_max, sets}` plus what `check-y` and `perm` need.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Scenario {
    n_prefix: IndexSeq,
    #[serde(default)]
    delta_prefix: Option<DeltaSeq>,
    #[serde(default)]
    k: usize,
    m_max: usize,
    #[serde(default)]
    sets: Vec<IntervalSet>,
    #[serde(default)]
    f: Option<Function>,
    #[serde(default)]
    a_prefix: Option<Vec<String>>,
    #[serde(default)]
    b_prefix: Option<Vec<String>>,
    #[serde(default)]
    sigma: Option<Vec<usize>>,
    #[serde(default)]
    tol: Option<f64>,
}

fn required<'a, T>(v: &'a Option<T>, field: &str, cmd: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| Error::Input(format!("field `{field}` is required for {cmd}")))
}

fn q_list(v: &[String], field: &str) -> Result<Vec<Q>> {
    v.iter().map(|s| parse_q(s).map_err(|e| Error::Input(format!("field `{field}`: {e}")))).collect()
}

fn cmd_comb(c: &CombCommand, inputs: &mut Inputs) -> Result<Outcome> {
    let (args, name) = match c {
        CombCommand::CheckS(a) => (a, "check-s"),
        CombCommand::CheckY(a) => (a, "check-y"),
        CombCommand::Perm(a) => (a, "perm"),
    };
    let s: Scenario = inputs.json(&args.scenario)?;
    let mut out = Outcome::default();
    match c {
        CombCommand::CheckS(_) => {
            let delta = required(&s.delta_prefix, "delta_prefix", name)?;
            let v = check_s_k(&s.sets, &s.n_prefix, delta, s.k, s.m_max)?;
            out.checks.push(Check::new(format!("S_{} to depth {}", s.k, s.m_max), v));
        }
        CombCommand::CheckY(_) => {
            let delta = required(&s.delta_prefix, "delta_prefix", name)?;
            let f = required(&s.f, "f", name)?;
            let a = q_list(required(&s.a_prefix, "a_prefix", name)?, "a_prefix")?;
            let b = q_list(required(&s.b_prefix, "b_prefix", name)?, "b_prefix")?;
            let v = check_y_k(&s.sets, f, &s.n_prefix, delta, &a, &b, s.k, s.m_max, s.tol.unwrap_or(1e-6))?;
            out.checks.push(Check::new(format!("Y_{} to depth {}", s.k, s.m_max), v));
        }
        CombCommand::Perm(_) => {
            let sigma = required(&s.sigma, "sigma", name)?;
            let v = check_perm_a(&s.n_prefix, sigma, s.k, s.m_max)?;
            out.checks.push(Check::new(format!("σ fixes A_j^m(n^{}) and maps A_j^m(n) inside A_max(j,k)^max(m,k)(n)", s.k), v));
            if !s.sets.is_empty() {
                out.outputs = json!({ "permuted_sets": apply_finite_permutation(&s.sets, sigma)? });
            }
        }
    }
    Ok(out)
}

fn cmd_bump(c: &BumpCommand, inputs: &mut Inputs) -> Result<Outcome> {
    let mut out = Outcome::default();
    match c {
        BumpCommand::Make(a) => {
            let spec: BumpSpec = inputs.json(&a.spec)?;
            let spec = BumpSpec::new(spec.h_hat, spec.h_check, spec.h, spec.w).map_err(|e| Error::Input(format!("{}: {e}", a.spec.display())))?;
            let phi = make_bump(&spec)?;
            out.checks.push(Check::new("bump definition", check_bump_definition(&spec, &phi)?));
            let phi_f = Function::C1(phi.clone());
            out.outputs = json!({ "phi": phi_f, "sup_norm": phi.sup_norm(), "deriv_sup_norm": phi.deriv_sup_norm(), "warnings": spec.warnings() });
            if let Some(p) = &a.out {
                out.files.push((p.clone(), serde_json::to_string_pretty(&phi_f).expect("function serializes") + "\n"));
            }
            if let Some(p) = &a.csv {
                out.files.push((p.clone(), phi_f.to_csv(a.grid.max(1))));
            }
        }
        BumpCommand::Mu(a) => {
            let f = c1_input(inputs.json(&a.f)?, &a.f)?;
            let (sa, sb) = (flag_q("a", &a.a)?, flag_q("b", &a.b)?);
            let mc = mu_constants(&f, &sa, &sb, a.h)?;
            let fa = mc.length.deriv_norm + to_f64(&sa);
            let win = to_f64(&window(&sa)?);
            for (name, slack) in [
                ("μ < l/2", mc.length.l / 2.0 - mc.mu),
                ("2μ < 2^-a", win - 2.0 * mc.mu),
                ("2μ(‖f′‖+a) < h", a.h - 2.0 * mc.mu * fa),
            ] {
                let v = if slack > 0.0 { Verdict::Pass } else { Verdict::Fail { witness: format!("slack {slack:e}") } };
                out.checks.push(Check::new(name, v).with_margin(format!("{slack:e}")));
            }
            out.outputs = serde_json::to_value(&mc).expect("constants serialize");
        }
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Script {
    moves: Vec<Move>,
}

fn cmd_game(c: &GameCommand, inputs: &mut Inputs) -> Result<Outcome> {
    match c {
        GameCommand::Run(a) => game_run(a, inputs),
        GameCommand::Verify(a) => game_verify(a, inputs),
    }
}

fn game_run(a: &GameRunArgs, inputs: &mut Inputs) -> Result<Outcome> {
    let oracles = a.oracles.iter().map(|s| Oracle::parse(s).map_err(|e| Error::Input(format!("--oracle: {e}")))).collect::<Result<Vec<_>>>()?;
    let (player, seed) = match &a.moves {
        Some(p) => (PlayerOne::Scripted { moves: inputs.json::<Script>(p)?.moves }, None),
        None => (PlayerOne::Random { seed: a.seed }, Some(a.seed)),
    };
    let mut config = GameConfig::default();
    if let Some(n) = a.max_net_points {
        config.max_net_points = n;
    }
    if let Some(n) = a.star_samples {
        config.star_samples = n;
    }
    let report = run_game(&player, oracles, a.rounds, config)?;
    Ok(Outcome { checks: game_checks(&report), seed, outputs: serde_json::to_value(&report).expect("game report serializes"), ..Outcome::default() })
}

fn game_checks(report: &GameReport) -> Vec<Check> {
    let mut out: Vec<Check> = Vec::new();
    for r in &report.state.rounds {
        out.extend(r.checks.iter().cloned().map(|c| Check::new(format!("round {}: {}", r.m, c.name), c.verdict)));
    }
    out.extend(report.monotone.iter().cloned().map(Check::from));
    out.extend(report.limit.iter().cloned().map(Check::from));
    let played = report.state.rounds.len();
    let v = match &report.failure {
        None => Verdict::Pass,
        Some(f) => Verdict::Fail { witness: format!("round {} stopped ({}): {}", f.round, f.kind, f.error) },
    };
    out.push(Check::new(format!("{} of {} rounds completed", played, report.rounds_requested), v));
    out
}

/// The saved game inside a `game run` report, a bare game report, or a state.
fn load_state(v: Value) -> Result<(GameState, Option<GameReport>)> {
    let v = match v.get("schema").and_then(Value::as_str) {
        Some(_) => v.get("outputs").cloned().ok_or_else(|| Error::Input("field `outputs` missing".into()))?,
        None => v,
    };
    if v.get("state").is_some() {
        let r: GameReport = serde_json::from_value(v).map_err(|e| Error::Input(format!("game report: {e}")))?;
        return Ok((r.state.clone(), Some(r)));
    }
    let s: GameState = serde_json::from_value(v).map_err(|e| Error::Input(format!("game state: {e}")))?;
    Ok((s, None))
}

fn game_verify(a: &GameVerifyArgs, inputs: &mut Inputs) -> Result<Outcome> {
    let (state, saved) = load_state(inputs.json(&a.state)?)?;
    let fresh = verify_game(&state)?;
    let mut recorded: HashMap<String, Verdict> = HashMap::new();
    for r in &state.rounds {
        for c in &r.checks {
            recorded.insert(c.name.clone(), c.verdict.clone());
        }
    }
    if let Some(rep) = &saved {
        for c in rep.monotone.iter().chain(&rep.limit) {
            recorded.insert(c.name.clone(), c.verdict.clone());
        }
    }
    let mut compared = 0usize;
    let mut differ = Vec::new();
    for c in &fresh {
        if let Some(v) = recorded.get(&c.name) {
            compared += 1;
            if v != &c.verdict {
                differ.push(c.name.clone());
            }
        }
    }
    let mut checks: Vec<Check> = fresh.into_iter().map(Check::from).collect();
    let v = if differ.is_empty() { Verdict::Pass } else { Verdict::Fail { witness: format!("changed: {}", differ.join("; ")) } };
    checks.push(Check::new("recorded verdicts reproduced", v).with_margin(format!("{compared} compared")));
    if let Some(f) = saved.as_ref().and_then(|r| r.failure.as_ref()) {
        checks.push(Check::new("saved run completed", Verdict::Fail { witness: format!("round {} stopped ({}): {}", f.round, f.kind, f.error) }));
    }
    Ok(Outcome { outputs: json!({ "rounds": state.rounds.len(), "compared": compared }), checks, ..Outcome::default() })
}

/// Number of `i ∈ {0,…,grid}` with `i/grid ∈ s`.
fn grid_count(s: &IntervalSet, grid: usize) -> usize {
    let g = Q::from_integer(grid.into());
    s.intervals()
        .iter()
        .map(|(l, r)| {
            let lo = (l * &g).ceil().to_integer();
            let hi = (r * &g).floor().to_integer();
            if hi < lo {
                0
            } else {
                usize::try_from(hi - lo + 1).unwrap_or(0)
            }
        })
        .sum()
}

fn cmd_jarnik_demo(a: &JarnikArgs) -> Result<Outcome> {
    if a.grid < 1000 {
        return Err(Error::Input("--grid must be at least 1000".into()));
    }
    let scales = a.a_list.iter().map(|s| flag_q("a", s)).collect::<Result<Vec<_>>>()?;
    let f = if a.flat { PwlFunction::zero() } else { random_function(a.seed, a.depth, a.decay) };
    let mut rows = Vec::new();
    let mut csv = String::from("a,fraction_in_n,fraction_knot_like\n");
    let mut prof: Vec<(Q, f64)> = Vec::new();
    for s in &scales {
        let set = n_set_exact(&f, s, Variant::Full)?;
        let frac = grid_count(&set, a.grid) as f64 / (a.grid + 1) as f64;
        csv.push_str(&format!("{},{},{}\n", fmt_q(s), frac, 1.0 - frac));
        rows.push(json!({ "a": fmt_q(s), "fraction_in_n": frac, "fraction_knot_like": 1.0 - frac }));
        prof.push((s.clone(), frac));
    }
    prof.sort_by(|x, y| x.0.cmp(&y.0));
    let bad = prof.windows(2).find(|w| w[1].1 < w[0].1);
    let v = match bad {
        None => Verdict::Pass,
        Some(w) => Verdict::Fail { witness: format!("fraction drops from a={} to a={}", fmt_q(&w[0].0), fmt_q(&w[1].0)) },
    };
    let mut out = Outcome {
        checks: vec![Check::new("fraction in N(f,a) nondecreasing in a", v)],
        seed: (!a.flat).then_some(a.seed),
        outputs: json!({ "depth": a.depth, "decay": a.decay, "grid": a.grid, "flat": a.flat, "profile": rows }),
        ..Outcome::default()
    };
    if a.out == OutFormat::Csv {
        out.stdout = Some(csv);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;
    use num_traits::Zero;

    #[test]
    fn grid_counting() {
        let s = IntervalSet::new(vec![(Q::zero(), qr(1, 2)), (qr(7, 10), qr(7, 10))]).unwrap();
        assert_eq!(grid_count(&s, 10), 7);
        assert_eq!(grid_count(&IntervalSet::empty(), 10), 0);
    }

    #[test]
    fn parse_errors_exit_two() {
        let Err((_, code)) = invoke(["knotpoints", "nset"]) else { panic!("missing --f must not parse") };
        assert_eq!(code, 2);
        let inv = invoke(["knotpoints", "nset", "--f", "/nonexistent.json", "--a", "1"]).ok().unwrap();
        assert_eq!(inv.exit_code, 2);
    }

    #[test]
    fn flat_jarnik_profile_is_one() {
        let inv = invoke(["knotpoints", "jarnik-demo", "--flat", "--a", "1,2,3"]).ok().unwrap();
        assert_eq!(inv.exit_code, 0);
        for row in inv.report.outputs["profile"].as_array().unwrap() {
            assert_eq!(row["fraction_in_n"].as_f64(), Some(1.0));
        }
    }
}
