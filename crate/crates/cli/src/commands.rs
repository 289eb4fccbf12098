use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use posmap::bridge::{
    self, channel_from_stochastic, gamma_embed_in, gkls_from_kolmogorov, kolmogorov_from_generator,
    omega_reduce, pi_embed, stochastic_from_map, KolmogorovGenerator, ProbabilityVector,
    StochasticClass,
};
use posmap::dynamics::{evolve_continuous, evolve_discrete, Generator, State, StepMap};
use posmap::json::{
    map_to_json, matrix_json, parse_document, real_matrix_json, state_json, stochastic_json,
    Document, GeneratorJson, MapFormat, StochasticJson,
};
use posmap::linmap::{self, MapRep, StructuralFlags, DEFAULT_STRUCT_TOL};
use posmap::positivity::{
    classify, sweep, ClassifyOptions, DecomposeOptions, FalsifierOptions, FamilyKind,
    FamilyProperty, SweepReport, SweepSpec,
};
use posmap::{Error, Result};

use crate::gallery::{self, BasisName, GalleryName};

#[derive(Debug, Parser)]
#[command(
    name = "posmap",
    version,
    about = "Positivity hierarchy and classical/quantum bridge toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Numerical tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Multistart restarts for the falsifiers.
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Iteration budget per restart.
    #[arg(long, global = true)]
    max_iters: Option<usize>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MapSource {
    /// Input JSON file.
    input: Option<PathBuf>,
    /// Build the input from the built-in gallery instead of a file.
    #[arg(long, value_enum, conflicts_with = "input")]
    gallery: Option<GalleryName>,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Place a map in the positivity hierarchy.
    Analyze {
        #[command(flatten)]
        source: MapSource,
        /// Iteration budget of the decomposability search.
        #[arg(long, default_value_t = DecomposeOptions::default().max_iters)]
        decompose_iters: usize,
    },
    /// Sweep a one-parameter family against its closed-form membership.
    Sweep(SweepArgs),
    /// Classical to quantum.
    Embed(EmbedArgs),
    /// Quantum to classical.
    Reduce(ReduceArgs),
    /// Evolve a state under a generator or iterate a step map.
    Evolve(EvolveArgs),
    /// Rewrite a map among superoperator, Choi and Kraus forms.
    Convert {
        #[command(flatten)]
        source: MapSource,
        #[arg(long, value_enum)]
        to: FormatArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Plain,
    Transposed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PropertyArg {
    P,
    S,
    Cp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Superop,
    Choi,
    Kraus,
}

impl From<FormatArg> for MapFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Superop => MapFormat::Superop,
            FormatArg::Choi => MapFormat::Choi,
            FormatArg::Kraus => MapFormat::Kraus,
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    d: usize,
    #[arg(long, allow_negative_numbers = true)]
    a_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    a_max: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long, value_enum)]
    property: PropertyArg,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: TableFormat,
}

#[derive(Debug, Args)]
#[group(id = "embedding", required = true, multiple = false)]
struct EmbedMode {
    /// Probability vector to diagonal state (`--uniform --d D` for 𝕀/d).
    #[arg(long)]
    gamma: bool,
    /// Probability vector to pure state with `--phases`.
    #[arg(long)]
    pi: bool,
    /// Column-stochastic matrix to its classical channel.
    #[arg(long)]
    stochastic: bool,
    /// Rate matrix to a purely dissipative GKLS generator.
    #[arg(long)]
    generator: bool,
}

#[derive(Debug, Args)]
struct EmbedArgs {
    #[command(flatten)]
    mode: EmbedMode,
    input: Option<PathBuf>,
    /// Use the uniform distribution instead of an input file.
    #[arg(long, requires = "gamma", conflicts_with = "input")]
    uniform: bool,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Comma-separated phases for `--pi`; zeros when omitted.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    phases: Vec<f64>,
    #[arg(long, value_enum, default_value = "canonical")]
    basis: BasisName,
    /// Output form of the channel for `--stochastic`.
    #[arg(long, value_enum, default_value = "superop")]
    format: FormatArg,
}

#[derive(Debug, Args)]
#[group(id = "reduction", required = true, multiple = false)]
struct ReduceMode {
    /// Diagonal of a state in `--basis`.
    #[arg(long)]
    omega: bool,
    /// Transition matrix of a map in `--basis`.
    #[arg(long)]
    stochastic: bool,
    /// Kolmogorov generator of a GKLS generator in `--basis`.
    #[arg(long)]
    generator: bool,
}

#[derive(Debug, Args)]
struct ReduceArgs {
    #[command(flatten)]
    mode: ReduceMode,
    #[command(flatten)]
    source: MapSource,
    #[arg(long, value_enum, default_value = "canonical")]
    basis: BasisName,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    /// Generator file (rates `W` or GKLS `H` and `jumps`).
    #[arg(long, required_unless_present = "step", conflicts_with = "step")]
    generator: Option<PathBuf>,
    /// Step map file (map or stochastic matrix).
    #[arg(long)]
    step: Option<PathBuf>,
    /// Initial state file (density matrix or probability vector).
    #[arg(long)]
    state: PathBuf,
    /// Comma-separated sample times.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["t_max", "points"])]
    times: Vec<f64>,
    /// Final time of a uniform grid starting at 0.
    #[arg(long, requires = "points")]
    t_max: Option<f64>,
    /// Number of grid points on `[0, t_max]`.
    #[arg(long)]
    points: Option<usize>,
    /// Number of discrete steps.
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Skip the validation of the step map.
    #[arg(long)]
    no_validate: bool,
}

pub fn run(cli: Cli) -> Result<()> {
    let common = &cli.common;
    let text = match cli.command {
        Command::Analyze {
            source,
            decompose_iters,
        } => analyze(&source, decompose_iters, common)?,
        Command::Sweep(args) => run_sweep(&args, common)?,
        Command::Embed(args) => embed(&args, common)?,
        Command::Reduce(args) => reduce(&args, common)?,
        Command::Evolve(args) => evolve(&args)?,
        Command::Convert { source, to } => {
            let map = load_map(&source, common)?;
            to_json(&map_to_json(
                &map,
                to.into(),
                common.tol.unwrap_or(KRAUS_TOL),
            )?)
        }
    };
    emit(common.out.as_deref(), &text)
}

const KRAUS_TOL: f64 = 1e-10;

fn read_document(path: &Path) -> Result<Document> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_document(&text)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn wrong_kind(expected: &str, doc: &Document) -> Error {
    Error::KindMismatch(format!("expected a {expected}, got a {}", doc.kind()))
}

fn load_map(source: &MapSource, common: &Common) -> Result<MapRep> {
    match (&source.gallery, &source.input) {
        (Some(name), _) => gallery::build(*name, source.d, source.a, common.seed),
        (None, Some(path)) => match read_document(path)? {
            Document::Map(m) => Ok(m),
            other => Err(wrong_kind("map", &other)),
        },
        (None, None) => Err(Error::BadParameter(
            "give an input file or --gallery".into(),
        )),
    }
}

fn falsifier_options(common: &Common) -> FalsifierOptions {
    let base = FalsifierOptions::default();
    FalsifierOptions {
        restarts: common.restarts.unwrap_or(base.restarts),
        max_iters: common.max_iters.unwrap_or(base.max_iters),
        tol: common.tol.unwrap_or(base.tol),
        seed: common.seed,
        ..base
    }
}

#[derive(Serialize)]
struct SkippedReport {
    d: usize,
    flags: StructuralFlags,
    hierarchy: &'static str,
    reason: &'static str,
}

fn analyze(source: &MapSource, decompose_iters: usize, common: &Common) -> Result<String> {
    let map = load_map(source, common)?;
    let opts = ClassifyOptions {
        falsifier: falsifier_options(common),
        decompose: DecomposeOptions {
            max_iters: decompose_iters,
            ..DecomposeOptions::default()
        },
    };
    match classify(&map, &opts) {
        Ok(report) => Ok(to_json(&report)),
        Err(Error::NotHermitianPreserving) => Ok(to_json(&SkippedReport {
            d: map.dim(),
            flags: linmap::structural_flags(&map, DEFAULT_STRUCT_TOL),
            hierarchy: "skipped",
            reason: "the map is not Hermiticity-preserving, so no positivity level applies",
        })),
        Err(e) => Err(e),
    }
}

fn run_sweep(args: &SweepArgs, common: &Common) -> Result<String> {
    let spec = SweepSpec {
        kind: match args.family {
            FamilyArg::Plain => FamilyKind::Plain,
            FamilyArg::Transposed => FamilyKind::Transposed,
        },
        d: args.d,
        a_min: args.a_min,
        a_max: args.a_max,
        steps: args.steps,
        property: match args.property {
            PropertyArg::P => FamilyProperty::P,
            PropertyArg::S => FamilyProperty::S,
            PropertyArg::Cp => FamilyProperty::Cp,
        },
        n: args.n,
        opts: falsifier_options(common),
    };
    let report = sweep(&spec)?;
    eprintln!("{}", summary(&report));
    Ok(match args.format {
        TableFormat::Json => to_json(&report),
        TableFormat::Csv => csv(&report),
    })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), |v| v.to_string())
}

fn summary(report: &SweepReport) -> String {
    format!(
        "{:?} d={} {}: empirical threshold {}, oracle threshold {}, {} disagreements",
        report.family,
        report.d,
        report.property,
        fmt_opt(report.empirical_threshold),
        fmt_opt(report.oracle_threshold),
        report.disagreements
    )
}

fn csv(report: &SweepReport) -> String {
    let mut out = String::from("a,status,value,oracle\n");
    for r in &report.rows {
        let status = serde_json::to_value(r.status).expect("status");
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.a,
            status.as_str().unwrap_or_default(),
            r.value,
            r.oracle
        );
    }
    out
}

fn probability_input(path: &Path) -> Result<ProbabilityVector> {
    match read_document(path)? {
        Document::Probability(p) => Ok(p),
        other => Err(wrong_kind("probability vector", &other)),
    }
}

fn required_input(input: &Option<PathBuf>) -> Result<&Path> {
    input
        .as_deref()
        .ok_or_else(|| Error::BadParameter("an input file is required".into()))
}

fn embed(args: &EmbedArgs, common: &Common) -> Result<String> {
    let mode = &args.mode;
    if mode.gamma {
        let p = if args.uniform {
            ProbabilityVector::uniform(args.d)
        } else {
            probability_input(required_input(&args.input)?)?
        };
        let basis = gallery::basis(args.basis, p.dim(), common.seed)?;
        return Ok(to_json(&state_json(
            gamma_embed_in(&p, &basis)?.matrix(),
            None,
        )));
    }
    let path = required_input(&args.input)?;
    if mode.pi {
        let p = probability_input(path)?;
        let phases = if args.phases.is_empty() {
            vec![0.0; p.dim()]
        } else {
            args.phases.clone()
        };
        return Ok(to_json(&state_json(pi_embed(&p, &phases)?.matrix(), None)));
    }
    if mode.stochastic {
        let s = match read_document(path)? {
            Document::Stochastic(s) => s,
            other => return Err(wrong_kind("stochastic matrix", &other)),
        };
        let map = channel_from_stochastic(&s)?;
        return Ok(to_json(&map_to_json(
            &map,
            args.format.into(),
            common.tol.unwrap_or(KRAUS_TOL),
        )?));
    }
    let l = match read_document(path)? {
        Document::Generator(Generator::Kolmogorov(l)) => l,
        other => return Err(wrong_kind("rate matrix", &other)),
    };
    let g = gkls_from_kolmogorov(&l);
    Ok(to_json(&GeneratorJson::Gkls {
        h: matrix_json(g.hamiltonian()),
        jumps: g.jumps().iter().map(matrix_json).collect(),
    }))
}

#[derive(Serialize)]
struct ReducedStochastic {
    #[serde(flatten)]
    matrix: StochasticJson,
    classes: Vec<StochasticClass>,
}

fn reduce(args: &ReduceArgs, common: &Common) -> Result<String> {
    let tol = common.tol.unwrap_or(bridge::STOCHASTIC_TOL);
    if args.mode.omega {
        let rho = match read_document(required_input(&args.source.input)?)? {
            Document::State { rho, .. } => rho,
            other => return Err(wrong_kind("state", &other)),
        };
        let basis = gallery::basis(args.basis, rho.dim(), common.seed)?;
        return Ok(to_json(&omega_reduce(&rho, &basis)?));
    }
    if args.mode.stochastic {
        let map = load_map(&args.source, common)?;
        let basis = gallery::basis(args.basis, map.dim(), common.seed)?;
        let s = stochastic_from_map(&map, &basis)?;
        return Ok(to_json(&ReducedStochastic {
            matrix: stochastic_json(s.matrix()),
            classes: s.classes().iter().copied().collect(),
        }));
    }
    let generator = match (&args.source.gallery, &args.source.input) {
        (None, Some(path)) => match read_document(path)? {
            Document::Generator(Generator::Gkls(g)) => g.superop(),
            Document::Map(m) => m,
            other => return Err(wrong_kind("GKLS generator", &other)),
        },
        _ => load_map(&args.source, common)?,
    };
    let basis = gallery::basis(args.basis, generator.dim(), common.seed)?;
    let l = KolmogorovGenerator::from_matrix(
        kolmogorov_from_generator(&generator, &basis)?,
        tol.max(1e-10),
    )?;
    Ok(to_json(&GeneratorJson::Kolmogorov {
        w: real_matrix_json(l.rates()),
    }))
}

fn evolve(args: &EvolveArgs) -> Result<String> {
    let state = match read_document(&args.state)? {
        Document::State { rho, .. } => State::Quantum(rho),
        Document::Probability(p) => State::Classical(p),
        other => return Err(wrong_kind("state or probability vector", &other)),
    };
    let trajectory = if let Some(path) = &args.generator {
        let generator = match read_document(path)? {
            Document::Generator(g) => g,
            other => return Err(wrong_kind("generator", &other)),
        };
        let times = match (args.t_max, args.points) {
            (Some(t_max), Some(points)) => grid(t_max, points)?,
            _ if args.times.is_empty() => {
                return Err(Error::BadParameter(
                    "give --times or --t-max with --points".into(),
                ))
            }
            _ => args.times.clone(),
        };
        evolve_continuous(&generator, &state, &times)?
    } else {
        let path = args
            .step
            .as_deref()
            .expect("clap enforces --generator or --step");
        let step = match read_document(path)? {
            Document::Map(m) => StepMap::Channel(m),
            Document::Stochastic(s) => StepMap::Stochastic(s),
            other => return Err(wrong_kind("map or stochastic matrix", &other)),
        };
        evolve_discrete(&step, &state, args.steps, !args.no_validate)?
    };
    Ok(trajectory.to_json_lines())
}

fn grid(t_max: f64, points: usize) -> Result<Vec<f64>> {
    if points < 1 || !t_max.is_finite() || t_max < 0.0 {
        return Err(Error::BadParameter(
            "need points >= 1 and a finite t_max >= 0".into(),
        ));
    }
    if points == 1 {
        return Ok(vec![0.0]);
    }
    let h = t_max / (points - 1) as f64;
    Ok((0..points).map(|i| i as f64 * h).collect())
}
