//! Batch front end for the branchlink library.
//!
//! Subcommands build graphs and links, run the full weight-extension
//! pipeline, transport harmonic systems, materialise dimension-group
//! windows, and run the invariant suites. Exit codes: 0 success,
//! 1 usage, 2 input/schema, 3 validation failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use branchlink_core::error::Error;
use branchlink_core::extension::{extend, ExtTruncation, ExtVertex};
use branchlink_core::graph::{
    truncate, GraphProvider, LevelSeed, PascalGraph, Truncation, VertexId, VertexKey,
};
use branchlink_core::group::GroupElement;
use branchlink_core::harmonic::{
    check_extended, check_harmonic, extension_cone_over, from_extended, pullback, to_extended,
};
use branchlink_core::io;
use branchlink_core::k0::{embed_mu, K0Element, K0Functional};
use branchlink_core::link::{kappa_dim, standard_link, validate_link, weights, Link, WeightSystem};
use branchlink_core::ratio::Ratio;
use branchlink_core::report::Report;
use branchlink_core::selftest;
use branchlink_core::uq::{build_uq, gt_dim, q_schur_principal, signatures, QParam, Signature};

#[derive(Parser)]
#[command(
    name = "branchlink",
    about = "Exact computations on graded branching graphs, links, and their weight extensions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a finite truncation and emit it
    Graph(InputOpts),
    /// Build or load a link on the truncation, validate it, emit it
    Link(InputOpts),
    /// Kappa-dimensions (exact squares and their square roots)
    Kdim(InputOpts),
    /// Edge weights, weight-group generators, and the cyclic base
    Weights(InputOpts),
    /// The weight-extended cone over the top level
    Extend(InputOpts),
    /// Full run: graph, link, kappa-dimensions, weights, extension
    Pipeline(PipelineOpts),
    /// Coherent systems and their extended transforms
    #[command(subcommand)]
    Harmonic(HarmonicCmd),
    /// Dimension-group windows: embeddings, cone, action, functionals
    #[command(subcommand)]
    K0(K0Cmd),
    /// Signature, dimension, and kappa-dimension tables for the q-graph
    Uq(UqOpts),
    /// Run the invariant suites and print a machine-readable summary
    Selftest(SelftestOpts),
}

#[derive(Subcommand)]
enum HarmonicCmd {
    /// Transport a top-level distribution down the link
    Pullback(HarmonicOpts),
    /// Check an existing coherent system against the link
    Check(HarmonicOpts),
    /// Transport to the extension and back, checking every law
    Transform(HarmonicOpts),
}

#[derive(Subcommand)]
enum K0Cmd {
    /// Evaluate the one-step embedding of an element on its window
    Embed(K0Opts),
    /// Test membership in the positive cone
    Cone(K0Opts),
    /// Apply the translation action to an element
    Act(K0Opts),
    /// Evaluate the scaling functional of a state on an element
    Psi(K0Opts),
}

#[derive(Args, Clone)]
struct InputOpts {
    /// Built-in graph: pascal | uq
    #[arg(long, conflicts_with = "graph")]
    builtin: Option<String>,

    /// Explicit graph JSON file
    #[arg(long)]
    graph: Option<PathBuf>,

    /// Link JSON file (default: the standard link; for uq, the q-weight link)
    #[arg(long)]
    link: Option<PathBuf>,

    /// Deformation parameter for the uq graph, e.g. 1/2
    #[arg(long)]
    q: Option<String>,

    /// Top level of the truncation when seeding full levels
    #[arg(long, default_value_t = 3)]
    depth: usize,

    /// Cap on |signature| when enumerating uq seed levels
    #[arg(long, default_value_t = 4)]
    max_size: u64,

    /// Seed keys at the top level, separated by ';' (e.g. "(1,0);(2,0)")
    #[arg(long)]
    seeds: Option<String>,

    /// Output format: table | json | dot
    #[arg(long, default_value = "table")]
    format: String,

    /// Write output to a file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineOpts {
    #[command(flatten)]
    input: InputOpts,

    /// Directory for the emitted artifact files
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct HarmonicOpts {
    #[command(flatten)]
    input: InputOpts,

    /// Top distribution: uniform | binomial:p | delta:KEY | @FILE
    #[arg(long)]
    top: Option<String>,

    /// Coherent-system JSON file (for `check`/`transform`)
    #[arg(long)]
    system: Option<PathBuf>,

    /// Scaling exponent of the extended system
    #[arg(long, default_value_t = -1)]
    beta: i64,
}

#[derive(Args)]
struct K0Opts {
    #[command(flatten)]
    input: InputOpts,

    /// A delta element "KEY,GRADE", e.g. "(1),0"
    #[arg(long)]
    delta: Option<String>,

    /// Explicit entries "KEY,GRADE,VALUE" (repeatable)
    #[arg(long)]
    entry: Vec<String>,

    /// Level of the element when only --entry is given
    #[arg(long)]
    level: Option<usize>,

    /// Materialisation level; must be one above the element level
    #[arg(long)]
    window_level: Option<usize>,

    /// Also print the embedding matrix between the two cone levels,
    /// row-major
    #[arg(long)]
    matrix: bool,

    /// Grade of the translation for `act` and the scaling checks
    #[arg(long, default_value_t = 1)]
    gamma_grade: i64,

    /// Top distribution defining the state for `psi`
    #[arg(long)]
    top: Option<String>,

    /// Scaling exponent
    #[arg(long, default_value_t = -1)]
    beta: i64,
}

#[derive(Args)]
struct UqOpts {
    /// Deformation parameter, e.g. 1/2
    #[arg(long, default_value = "1/2")]
    q: String,

    /// Largest signature length listed
    #[arg(long, default_value_t = 3)]
    max_level: usize,

    /// Largest |signature| listed
    #[arg(long, default_value_t = 4)]
    max_size: u64,

    /// Output format: table | json
    #[arg(long, default_value = "table")]
    format: String,

    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestOpts {
    /// Output format: table | json
    #[arg(long, default_value = "table")]
    format: String,

    #[arg(long)]
    output: Option<PathBuf>,
}

// ---------------------------------------------------------------------
// error handling and exit codes

enum CliError {
    Usage(String),
    Core(Error),
    Failed(String), // validation failures detected by a report
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(Error::Schema(_)) | CliError::Core(Error::Io(_)) => 2,
            CliError::Core(_) => 3,
            CliError::Failed(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => format!("usage error: {m}"),
            CliError::Core(e) => format!("error: {e}"),
            CliError::Failed(m) => format!("validation failed: {m}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

// ---------------------------------------------------------------------
// context building

struct Context {
    t: Truncation,
    link: Link,
    ws: WeightSystem,
    q: Option<QParam>,
}

fn parse_seeds(spec: &str, level_hint: Option<usize>) -> CliResult<Vec<VertexId>> {
    let mut out = Vec::new();
    for part in spec.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let key = VertexKey::parse(part).map_err(|e| usage(format!("bad seed {part:?}: {e}")))?;
        let level = match (&key, level_hint) {
            (VertexKey::Tuple(parts), None) => parts.len(),
            (_, Some(l)) => l,
            (VertexKey::Text(_), None) => {
                return Err(usage(format!(
                    "seed {part:?} needs --depth to determine its level"
                )))
            }
        };
        out.push(VertexId::new(level, key));
    }
    if out.is_empty() {
        return Err(usage("no seeds given"));
    }
    Ok(out)
}

fn read_json(path: &PathBuf) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Core(Error::Io(e)))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Core(Error::Schema(format!("{}: {e}", path.display()))))
}

fn q_param(opts: &InputOpts) -> CliResult<QParam> {
    let raw = opts
        .q
        .as_deref()
        .ok_or_else(|| usage("--builtin uq requires --q"))?;
    let value = Ratio::from_str(raw).map_err(|e| usage(format!("bad --q: {e}")))?;
    QParam::new(value).map_err(|e| usage(format!("bad --q: {e}")))
}

fn require_failure_free(report: &Report) -> CliResult<()> {
    if let Some(item) = report.first_failure() {
        return Err(CliError::Failed(format!(
            "{} at {}: {}",
            item.check,
            item.location.as_deref().unwrap_or("-"),
            item.detail
        )));
    }
    Ok(())
}

fn build_context(opts: &InputOpts) -> CliResult<Context> {
    let builtin = opts.builtin.as_deref();
    match (builtin, &opts.graph) {
        (Some("pascal"), None) => {
            let g = PascalGraph;
            let seeds = match &opts.seeds {
                Some(spec) => parse_seeds(spec, None)?
                    .into_iter()
                    .map(|v| {
                        let VertexKey::Tuple(parts) = &v.key else {
                            return Err(usage("pascal seeds must be (n,k) tuples"));
                        };
                        Ok(VertexId::new(parts[0] as usize, v.key.clone()))
                    })
                    .collect::<CliResult<Vec<_>>>()?,
                None => {
                    let LevelSeed::Finite(seeds) = g.level_seed(opts.depth) else {
                        unreachable!()
                    };
                    seeds
                }
            };
            let t = truncate(&g, &seeds)?;
            finish_context(t, opts, None)
        }
        (Some("uq"), None) => {
            let q = q_param(opts)?;
            let seeds: Vec<Signature> = match &opts.seeds {
                Some(spec) => parse_seeds(spec, None)?
                    .iter()
                    .map(|v| {
                        Signature::from_vertex(v)
                            .map_err(|e| usage(format!("bad uq seed {v}: {e}")))
                    })
                    .collect::<CliResult<Vec<_>>>()?,
                None => signatures(opts.depth, opts.max_size),
            };
            if let Some(path) = &opts.link {
                let vertices: Vec<VertexId> = seeds.iter().map(Signature::to_vertex).collect();
                let t = truncate(&branchlink_core::uq::UqGraph, &vertices)?;
                let link = io::link_from_json(&t, &read_json(path)?)?;
                finish_with_link(t, link, Some(q))
            } else {
                let (t, link, ws) = build_uq(&q, &seeds)?;
                Ok(Context {
                    t,
                    link,
                    ws,
                    q: Some(q),
                })
            }
        }
        (None, Some(path)) => {
            let g = io::graph_from_json(&read_json(path)?)?;
            let seeds = match &opts.seeds {
                Some(spec) => {
                    let keys = parse_seeds(spec, Some(g.top_level()))?;
                    keys.into_iter()
                        .map(|v| VertexId::new(g.top_level(), v.key))
                        .collect()
                }
                None => {
                    let LevelSeed::Finite(seeds) = g.level_seed(g.top_level()) else {
                        unreachable!()
                    };
                    seeds
                }
            };
            let t = truncate(&g, &seeds)?;
            finish_context(t, opts, None)
        }
        (Some(other), None) => Err(usage(format!(
            "unknown builtin {other:?}; expected pascal or uq"
        ))),
        (None, None) => Err(usage("give --builtin or --graph")),
        (Some(_), Some(_)) => Err(usage("--builtin conflicts with --graph")),
    }
}

fn finish_context(t: Truncation, opts: &InputOpts, q: Option<QParam>) -> CliResult<Context> {
    let link = match &opts.link {
        Some(path) => io::link_from_json(&t, &read_json(path)?)?,
        None => standard_link(&t),
    };
    finish_with_link(t, link, q)
}

fn finish_with_link(t: Truncation, link: Link, q: Option<QParam>) -> CliResult<Context> {
    require_failure_free(&validate_link(&t, &link))?;
    let ws = weights(&t, &link, kappa_dim(&t, &link)?)?;
    Ok(Context { t, link, ws, q })
}

impl Context {
    fn identity_extension(&self) -> CliResult<ExtTruncation> {
        let seeds: Vec<ExtVertex> = self
            .t
            .level(self.t.top_level())
            .iter()
            .map(|z| ExtVertex::new(z.clone(), GroupElement::identity()))
            .collect();
        Ok(extend(&self.t, &self.ws, &seeds)?)
    }

    /// Group element for a user-facing grade: powers of q on the
    /// q-graph, powers of the detected base otherwise; grade 0 always
    /// means the identity.
    fn gamma_for_grade(&self, grade: i64) -> CliResult<GroupElement> {
        if grade == 0 {
            return Ok(GroupElement::identity());
        }
        let base = match &self.q {
            Some(q) => q.value().clone(),
            None => match self.ws.base() {
                Some(b) => b.clone(),
                None => {
                    return Err(usage(
                        "nonzero grades need a nontrivial weight group".to_string(),
                    ))
                }
            },
        };
        Ok(GroupElement::from_ratio(&base)
            .map_err(CliError::Core)?
            .pow(grade))
    }
}

// ---------------------------------------------------------------------
// output plumbing

fn emit(opts_output: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match opts_output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Core(Error::Io(e))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(opts_output: &Option<PathBuf>, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    emit(opts_output, &text)
}

fn report_lines(report: &Report) -> String {
    let mut out = String::new();
    let _ = write!(out, "{report}");
    out
}

// ---------------------------------------------------------------------
// commands

fn cmd_graph(opts: &InputOpts) -> CliResult<()> {
    let ctx = build_context(opts)?;
    let report = ctx.t.validate();
    match opts.format.as_str() {
        "json" => emit_json(
            &opts.output,
            &json!({
                "graph": io::truncation_to_json(&ctx.t),
                "validation": io::report_to_json(&report),
            }),
        )?,
        "dot" => emit(&opts.output, &io::truncation_to_dot(&ctx.t))?,
        "table" => {
            let mut out = String::new();
            for n in 0..=ctx.t.top_level() {
                let _ = writeln!(out, "level {n} ({} vertices):", ctx.t.level(n).len());
                for v in ctx.t.level(n) {
                    let _ = writeln!(out, "  {v}  dim {}", ctx.t.dim(v).unwrap());
                }
            }
            out.push_str(&report_lines(&report));
            emit(&opts.output, &out)?;
        }
        other => return Err(usage(format!("unknown format {other:?}"))),
    }
    require_failure_free(&report)
}

fn cmd_link(opts: &InputOpts) -> CliResult<()> {
    let ctx = build_context(opts)?;
    let report = validate_link(&ctx.t, &ctx.link);
    match opts.format.as_str() {
        "json" => emit_json(
            &opts.output,
            &json!({
                "link": io::link_to_json(&ctx.link),
                "validation": io::report_to_json(&report),
            }),
        )?,
        "table" => {
            let mut out = String::new();
            for ((child, parent), value) in ctx.link.entries() {
                let _ = writeln!(out, "kappa({child}, {parent}) = {value}");
            }
            out.push_str(&report_lines(&report));
            emit(&opts.output, &out)?;
        }
        other => return Err(usage(format!("unknown format {other:?}"))),
    }
    require_failure_free(&report)
}

fn cmd_kdim(opts: &InputOpts) -> CliResult<()> {
    let ctx = build_context(opts)?;
    match opts.format.as_str() {
        "json" => {
            let doc = io::weight_system_to_json(&ctx.ws);
            emit_json(
                &opts.output,
                &json!({ "kdim": doc["kdim"], "kdim_sq": doc["kdim_sq"] }),
            )
        }
        "table" => {
            let mut out = String::new();
            for n in 0..=ctx.t.top_level() {
                for v in ctx.t.level(n) {
                    let sq = ctx.ws.kdim_sq(v).unwrap();
                    match ctx.ws.kdim(v) {
                        Some(d) => {
                            let _ = writeln!(out, "{v}  dim {}  kdim {d}", ctx.t.dim(v).unwrap());
                        }
                        None => {
                            let _ = writeln!(
                                out,
                                "{v}  dim {}  kdim_sq {sq} (irrational kdim)",
                                ctx.t.dim(v).unwrap()
                            );
                        }
                    }
                }
            }
            emit(&opts.output, &out)
        }
        other => Err(usage(format!("unknown format {other:?}"))),
    }
}

fn cmd_weights(opts: &InputOpts) -> CliResult<()> {
    let ctx = build_context(opts)?;
    match opts.format.as_str() {
        "json" => emit_json(&opts.output, &io::weight_system_to_json(&ctx.ws)),
        "table" => {
            let mut out = String::new();
            for ((child, parent), value) in ctx.ws.rho_entries() {
                let _ = writeln!(out, "rho({child}, {parent}) = {value}");
            }
            let gens: Vec<String> = ctx.ws.generators().iter().map(|g| g.to_string()).collect();
            let _ = writeln!(out, "generators: {{{}}}", gens.join(", "));
            match ctx.ws.base() {
                Some(b) => {
                    let _ = writeln!(out, "weight group: cyclic with base {b}");
                }
                None if ctx.ws.is_trivial_group() => {
                    let _ = writeln!(out, "weight group: trivial");
                }
                None => {
                    let _ = writeln!(out, "weight group: not cyclic");
                }
            }
            emit(&opts.output, &out)
        }
        other => Err(usage(format!("unknown format {other:?}"))),
    }
}

fn cmd_extend(opts: &InputOpts) -> CliResult<()> {
    let ctx = build_context(opts)?;
    let x = ctx.identity_extension()?;
    match opts.format.as_str() {
        "json" => emit_json(&opts.output, &io::ext_truncation_to_json(&x)),
        "dot" => emit(&opts.output, &io::ext_truncation_to_dot(&x)),
        "table" => {
            let mut out = String::new();
            for n in 0..=x.top_level() {
                let _ = writeln!(out, "level {n} ({} vertices):", x.level(n).len());
                for v in x.level(n) {
                    let _ = writeln!(out, "  {v}  ext_dim {}", x.ext_dim(v).unwrap());
                }
            }
            emit(&opts.output, &out)
        }
        other => Err(usage(format!("unknown format {other:?}"))),
    }
}

fn cmd_pipeline(opts: &PipelineOpts) -> CliResult<()> {
    let input = &opts.input;
    let ctx = build_context(input)?;
    let graph_report = ctx.t.validate();
    let link_report = validate_link(&ctx.t, &ctx.link);
    let x = ctx.identity_extension()?;

    // structural invariants re-checked on the built artifacts
    let mut pipeline_report = Report::new();
    let mut dims_match = true;
    for v in x.vertices() {
        if x.ext_dim(v).unwrap() != ctx.t.dim(&v.z).unwrap() {
            dims_match = false;
            pipeline_report.fail_at("extension-dimension", v.to_string(), "ext_dim != dim");
        }
    }
    if dims_match {
        pipeline_report.pass("extension-dimension", "ext_dim = dim on the cone");
    }

    if let Some(path) = &opts.out_dir {
        std::fs::create_dir_all(path).map_err(|e| CliError::Core(Error::Io(e)))?;
        let write = |name: &str, text: String| -> CliResult<()> {
            std::fs::write(path.join(name), text).map_err(|e| CliError::Core(Error::Io(e)))
        };
        write(
            "graph.json",
            serde_json::to_string_pretty(&io::truncation_to_json(&ctx.t)).unwrap() + "\n",
        )?;
        write(
            "link.json",
            serde_json::to_string_pretty(&io::link_to_json(&ctx.link)).unwrap() + "\n",
        )?;
        write(
            "weights.json",
            serde_json::to_string_pretty(&io::weight_system_to_json(&ctx.ws)).unwrap() + "\n",
        )?;
        write(
            "extension.json",
            serde_json::to_string_pretty(&io::ext_truncation_to_json(&x)).unwrap() + "\n",
        )?;
        write("extension.dot", io::ext_truncation_to_dot(&x))?;
    }

    match input.format.as_str() {
        "json" => {
            let doc = json!({
                "graph": io::truncation_to_json(&ctx.t),
                "link": io::link_to_json(&ctx.link),
                "weights": io::weight_system_to_json(&ctx.ws),
                "extension": io::ext_truncation_to_json(&x),
                "validation": {
                    "graph": io::report_to_json(&graph_report),
                    "link": io::report_to_json(&link_report),
                    "pipeline": io::report_to_json(&pipeline_report),
                },
            });
            emit_json(&input.output, &doc)?;
        }
        "table" | "dot" => {
            let mut out = String::new();
            let sizes: Vec<String> = (0..=ctx.t.top_level())
                .map(|n| ctx.t.level(n).len().to_string())
                .collect();
            let _ = writeln!(out, "truncation levels: [{}]", sizes.join(", "));
            let ext_sizes: Vec<String> = (0..=x.top_level())
                .map(|n| x.level(n).len().to_string())
                .collect();
            let _ = writeln!(out, "extension levels:  [{}]", ext_sizes.join(", "));
            let gens: Vec<String> = ctx.ws.generators().iter().map(|g| g.to_string()).collect();
            let _ = writeln!(out, "generators: {{{}}}", gens.join(", "));
            match ctx.ws.base() {
                Some(b) => {
                    let _ = writeln!(out, "weight group base: {b}");
                }
                None => {
                    let _ = writeln!(out, "weight group base: none");
                }
            }
            out.push_str(&report_lines(&graph_report));
            out.push_str(&report_lines(&link_report));
            out.push_str(&report_lines(&pipeline_report));
            emit(&input.output, &out)?;
        }
        other => return Err(usage(format!("unknown format {other:?}"))),
    }

    require_failure_free(&graph_report)?;
    require_failure_free(&link_report)?;
    require_failure_free(&pipeline_report)
}

fn parse_top(
    ctx: &Context,
    spec: Option<&str>,
) -> CliResult<BTreeMap<VertexId, Ratio>> {
    let spec = spec.ok_or_else(|| usage("give --top"))?;
    let level = ctx.t.level(ctx.t.top_level());
    if spec == "uniform" {
        let n = level.len() as i64;
        return Ok(level
            .iter()
            .map(|v| (v.clone(), Ratio::one() / Ratio::from_int(n)))
            .collect());
    }
    if let Some(p) = spec.strip_prefix("binomial:") {
        let p = Ratio::from_str(p).map_err(|e| usage(format!("bad binomial parameter: {e}")))?;
        if p.is_negative() || (Ratio::one() - p.clone()).is_negative() {
            return Err(usage("binomial parameter must lie in [0,1]"));
        }
        let complement = Ratio::one() - p.clone();
        let mut top = BTreeMap::new();
        for v in level {
            let VertexKey::Tuple(parts) = &v.key else {
                return Err(usage("binomial tops need (n,k) tuple keys"));
            };
            if parts.len() != 2 {
                return Err(usage("binomial tops need (n,k) tuple keys"));
            }
            let (n, k) = (parts[0], parts[1]);
            let value = &(&Ratio::from_biguint(ctx.t.dim(v).unwrap()) * &p.pow(k))
                * &complement.pow(n - k);
            top.insert(v.clone(), value);
        }
        return Ok(top);
    }
    if let Some(key) = spec.strip_prefix("delta:") {
        let key = VertexKey::parse(key).map_err(|e| usage(format!("bad delta key: {e}")))?;
        let v = VertexId::new(ctx.t.top_level(), key);
        if !ctx.t.contains(&v) {
            return Err(usage(format!("delta vertex {v} is not on the top level")));
        }
        return Ok(BTreeMap::from([(v, Ratio::one())]));
    }
    if let Some(path) = spec.strip_prefix('@') {
        let doc = read_json(&PathBuf::from(path))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| CliError::Core(Error::Schema("top file must be an object".into())))?;
        let mut top = BTreeMap::new();
        for (key, value) in obj {
            let key = VertexKey::parse(key).map_err(CliError::Core)?;
            let value = Ratio::from_str(value.as_str().ok_or_else(|| {
                CliError::Core(Error::Schema("top values must be rational strings".into()))
            })?)
            .map_err(CliError::Core)?;
            top.insert(VertexId::new(ctx.t.top_level(), key), value);
        }
        return Ok(top);
    }
    Err(usage(format!(
        "unknown top spec {spec:?}; expected uniform, binomial:p, delta:KEY, or @FILE"
    )))
}

fn cmd_harmonic(cmd: &HarmonicCmd) -> CliResult<()> {
    let (opts, mode) = match cmd {
        HarmonicCmd::Pullback(o) => (o, "pullback"),
        HarmonicCmd::Check(o) => (o, "check"),
        HarmonicCmd::Transform(o) => (o, "transform"),
    };
    let ctx = build_context(&opts.input)?;

    let nu = match (&opts.system, mode) {
        (Some(path), _) => io::coherent_from_json(&read_json(path)?)?,
        (None, "check") => return Err(usage("harmonic check needs --system")),
        (None, _) => pullback(&ctx.t, &ctx.link, &parse_top(&ctx, opts.top.as_deref())?)?,
    };
    let report = check_harmonic(&ctx.t, &ctx.link, &nu);

    match mode {
        "pullback" | "check" => {
            match opts.input.format.as_str() {
                "json" => emit_json(
                    &opts.input.output,
                    &json!({
                        "system": io::coherent_to_json(&nu),
                        "validation": io::report_to_json(&report),
                    }),
                )?,
                _ => {
                    let mut out = String::new();
                    for n in 0..=nu.depth() {
                        for (v, value) in nu.level_support(n) {
                            let _ = writeln!(out, "nu({v}) = {value}");
                        }
                    }
                    out.push_str(&report_lines(&report));
                    emit(&opts.input.output, &out)?;
                }
            }
            require_failure_free(&report)
        }
        "transform" => {
            require_failure_free(&report)?;
            let ext = to_extended(&ctx.t, &ctx.ws, &nu, opts.beta)?;
            let cone = extension_cone_over(&ctx.t, &ctx.ws, &nu)?;
            let ext_report = check_extended(&cone, &ext);
            let back = from_extended(&ctx.t, &ctx.ws, &ext)?;
            let mut round_trip = Report::new();
            if back == nu {
                round_trip.pass("round-trip", "from_extended(to_extended(nu)) = nu");
            } else {
                round_trip.fail_at("round-trip", "system", "round trip is not the identity");
            }
            match opts.input.format.as_str() {
                "json" => emit_json(
                    &opts.input.output,
                    &json!({
                        "system": io::coherent_to_json(&nu),
                        "extended": io::extended_to_json(&ext, &ctx.ws),
                        "validation": {
                            "coherent": io::report_to_json(&report),
                            "extended": io::report_to_json(&ext_report),
                            "round_trip": io::report_to_json(&round_trip),
                        },
                    }),
                )?,
                _ => {
                    let mut out = String::new();
                    for n in 0..=ext.depth() {
                        for (v, value) in ext.level_support(n) {
                            let _ = writeln!(out, "nu~{v} = {value}");
                        }
                    }
                    out.push_str(&report_lines(&ext_report));
                    out.push_str(&report_lines(&round_trip));
                    emit(&opts.input.output, &out)?;
                }
            }
            require_failure_free(&ext_report)?;
            require_failure_free(&round_trip)
        }
        _ => unreachable!(),
    }
}

fn parse_element(ctx: &Context, opts: &K0Opts) -> CliResult<K0Element> {
    if let Some(delta) = &opts.delta {
        let (key, grade) = delta
            .rsplit_once(',')
            .ok_or_else(|| usage("--delta needs the form KEY,GRADE"))?;
        let key = VertexKey::parse(key.trim()).map_err(|e| usage(format!("bad delta key: {e}")))?;
        let grade: i64 = grade
            .trim()
            .parse()
            .map_err(|_| usage("delta grade must be an integer"))?;
        let z = ctx
            .t
            .vertices()
            .find(|v| v.key == key)
            .ok_or_else(|| usage(format!("key {key} is not in the truncation")))?
            .clone();
        let gamma = ctx.gamma_for_grade(grade)?;
        return Ok(K0Element::delta(ExtVertex::new(z, gamma), &ctx.t)?);
    }
    if !opts.entry.is_empty() {
        let mut values = BTreeMap::new();
        let mut level = None;
        for entry in &opts.entry {
            let mut parts = entry.rsplitn(3, ',');
            let value = parts.next().ok_or_else(|| usage("bad --entry"))?;
            let grade = parts.next().ok_or_else(|| usage("bad --entry"))?;
            let key = parts.next().ok_or_else(|| usage("bad --entry"))?;
            let key = VertexKey::parse(key.trim()).map_err(|e| usage(format!("bad key: {e}")))?;
            let grade: i64 = grade
                .trim()
                .parse()
                .map_err(|_| usage("entry grade must be an integer"))?;
            let value =
                Ratio::from_str(value.trim()).map_err(|e| usage(format!("bad value: {e}")))?;
            let z = ctx
                .t
                .vertices()
                .find(|v| v.key == key)
                .ok_or_else(|| usage(format!("key {key} is not in the truncation")))?
                .clone();
            level = Some(z.level);
            values.insert(ExtVertex::new(z, ctx.gamma_for_grade(grade)?), value);
        }
        let level = opts
            .level
            .or(level)
            .ok_or_else(|| usage("give --level with --entry"))?;
        return Ok(K0Element::new(level, values, &ctx.t)?);
    }
    Err(usage("give --delta or --entry"))
}

fn cmd_k0(cmd: &K0Cmd) -> CliResult<()> {
    let opts = match cmd {
        K0Cmd::Embed(o) | K0Cmd::Cone(o) | K0Cmd::Act(o) | K0Cmd::Psi(o) => o,
    };
    let ctx = build_context(&opts.input)?;
    let f = parse_element(&ctx, opts)?;

    match cmd {
        K0Cmd::Embed(_) => {
            if let Some(level) = opts.window_level {
                if level != f.level() + 1 {
                    return Err(usage(format!(
                        "--window-level must be {} (one above the element)",
                        f.level() + 1
                    )));
                }
            }
            let image = embed_mu(&f, &ctx.t, &ctx.ws);
            let window = image.support_window()?;
            let materialized = image.materialize(&window)?;
            let matrix = if opts.matrix {
                let x = ctx.identity_extension()?;
                let rows = x.level(f.level() + 1).to_vec();
                let cols = x.level(f.level()).to_vec();
                Some((x, rows, cols))
            } else {
                None
            };
            match opts.input.format.as_str() {
                "json" => {
                    let mut doc = io::k0_to_json(&materialized, &ctx.ws);
                    if let Some((x, rows, cols)) = &matrix {
                        let entries: Vec<Value> = rows
                            .iter()
                            .map(|r| {
                                Value::Array(
                                    cols.iter()
                                        .map(|c| Value::String(x.mu_tilde(r, c).to_string()))
                                        .collect(),
                                )
                            })
                            .collect();
                        doc.as_object_mut()
                            .unwrap()
                            .insert("matrix".into(), Value::Array(entries));
                    }
                    emit_json(&opts.input.output, &doc)?;
                }
                _ => {
                    let mut out = String::new();
                    for (v, value) in materialized.support() {
                        let _ = writeln!(out, "image{v} = {value}");
                    }
                    if materialized.support_len() == 0 {
                        out.push_str("image = 0\n");
                    }
                    if let Some((x, rows, cols)) = &matrix {
                        let _ = writeln!(
                            out,
                            "embedding matrix ({} rows x {} cols, row-major):",
                            rows.len(),
                            cols.len()
                        );
                        for r in rows {
                            let cells: Vec<String> =
                                cols.iter().map(|c| x.mu_tilde(r, c).to_string()).collect();
                            let _ = writeln!(out, "  {r}: [{}]", cells.join(", "));
                        }
                    }
                    emit(&opts.input.output, &out)?;
                }
            }
            Ok(())
        }
        K0Cmd::Cone(_) => {
            let answer = f.in_positive_cone();
            match opts.input.format.as_str() {
                "json" => emit_json(&opts.input.output, &json!({ "in_positive_cone": answer }))?,
                _ => emit(&opts.input.output, &format!("in_positive_cone: {answer}\n"))?,
            }
            Ok(())
        }
        K0Cmd::Act(_) => {
            let gamma = ctx.gamma_for_grade(opts.gamma_grade)?;
            let moved = f.gamma_action(&gamma);
            match opts.input.format.as_str() {
                "json" => emit_json(&opts.input.output, &io::k0_to_json(&moved, &ctx.ws))?,
                _ => {
                    let mut out = String::new();
                    for (v, value) in moved.support() {
                        let _ = writeln!(out, "f{v} = {value}");
                    }
                    emit(&opts.input.output, &out)?;
                }
            }
            Ok(())
        }
        K0Cmd::Psi(_) => {
            let nu = pullback(&ctx.t, &ctx.link, &parse_top(&ctx, opts.top.as_deref())?)?;
            let psi = K0Functional::from_state(&ctx.t, &ctx.ws, &nu, opts.beta)?;
            let value = psi.eval(&f)?;
            match opts.input.format.as_str() {
                "json" => emit_json(&opts.input.output, &json!({ "psi": value.to_string() }))?,
                _ => emit(&opts.input.output, &format!("psi(f) = {value}\n"))?,
            }
            Ok(())
        }
    }
}

fn cmd_uq(opts: &UqOpts) -> CliResult<()> {
    let q = QParam::new(
        Ratio::from_str(&opts.q).map_err(|e| usage(format!("bad --q: {e}")))?,
    )
    .map_err(|e| usage(format!("bad --q: {e}")))?;

    let mut rows = Vec::new();
    for n in 0..=opts.max_level {
        for lambda in signatures(n, opts.max_size) {
            let dim = gt_dim(&lambda);
            let kdim = q_schur_principal(&lambda, &q);
            rows.push((n, lambda, dim, kdim));
        }
    }
    match opts.format.as_str() {
        "json" => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(n, lambda, dim, kdim)| {
                    json!({
                        "level": n,
                        "signature": lambda.to_string(),
                        "dim": dim.to_string(),
                        "kdim": kdim.to_string(),
                    })
                })
                .collect();
            emit_json(
                &opts.output,
                &json!({ "q": q.value().to_string(), "signatures": items }),
            )
        }
        "table" => {
            let mut out = String::new();
            let _ = writeln!(out, "q = {}", q.value());
            let _ = writeln!(out, "{:<8} {:<14} {:<10} kdim", "level", "signature", "dim");
            for (n, lambda, dim, kdim) in &rows {
                let _ = writeln!(out, "{n:<8} {:<14} {dim:<10} {kdim}", lambda.to_string());
            }
            emit(&opts.output, &out)
        }
        other => Err(usage(format!("unknown format {other:?}"))),
    }
}

fn cmd_selftest(opts: &SelftestOpts) -> CliResult<()> {
    let results = selftest::run_all();
    let all_ok = results.iter().all(|r| r.passed);
    match opts.format.as_str() {
        "json" => emit_json(&opts.output, &selftest::summary_json(&results))?,
        "table" => {
            let mut out = String::new();
            for r in &results {
                let status = if r.passed { "pass" } else { "FAIL" };
                let _ = writeln!(out, "[{status}] {}: {}", r.name, r.detail);
            }
            let _ = writeln!(out, "{}", if all_ok { "all suites passed" } else { "FAILURES" });
            emit(&opts.output, &out)?;
        }
        other => return Err(usage(format!("unknown format {other:?}"))),
    }
    if all_ok {
        Ok(())
    } else {
        Err(CliError::Failed("self-test suites failed".into()))
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Graph(opts) => cmd_graph(opts),
        Command::Link(opts) => cmd_link(opts),
        Command::Kdim(opts) => cmd_kdim(opts),
        Command::Weights(opts) => cmd_weights(opts),
        Command::Extend(opts) => cmd_extend(opts),
        Command::Pipeline(opts) => cmd_pipeline(opts),
        Command::Harmonic(cmd) => cmd_harmonic(cmd),
        Command::K0(cmd) => cmd_k0(cmd),
        Command::Uq(opts) => cmd_uq(opts),
        Command::Selftest(opts) => cmd_selftest(opts),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.code())
        }
    }
}
