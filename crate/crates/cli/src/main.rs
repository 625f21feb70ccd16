use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dtscatter::catalog::{canonical_name, Catalog, ModelParams, FIGURE_OPERATORS};
use dtscatter::figures::{figure_file_name, render_ascii, render_svg, render_wold_svg, sanitize, Diagram, DiagramSpec};
use dtscatter::table::{Mismatch, Table, TableEntry};
use dtscatter::verify::{run_suite, Manifest, Status};
use dtscatter::wave::{scattering_operator, wave_operator_table, Direction, Pair, WaveSettings};
use dtscatter::window::WindowSpec;
use dtscatter::wold::{wold_decompose, WoldReport};
use dtscatter::{Error, Site};

#[derive(Parser, Debug)]
#[command(
    name = "dtscatter",
    version,
    about = "Discrete-time scattering on the half-space lattice"
)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Window radius R
    #[arg(short = 'R', long = "radius", global = true, default_value_t = 20)]
    radius: i64,
    /// Extra sites computed around the window
    #[arg(long, global = true, default_value_t = 4)]
    guard: i64,
    /// Unchanged steps required once an orbit has passed the interaction
    #[arg(long, global = true, default_value_t = 2)]
    margin: usize,
    /// Iteration cap (default 4·(R+guard))
    #[arg(long, global = true)]
    cap: Option<usize>,
    #[arg(long, global = true, default_value_t = 2, allow_negative_numbers = true)]
    z: i64,
    #[arg(long = "l", global = true, default_value_t = 3, allow_negative_numbers = true)]
    l: i64,
    /// Output directory; without it results go to stdout
    #[arg(short = 'o', long = "out", global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Replace the image of (0,1) by zero in the named catalog entry.
    #[arg(long, global = true, hide = true)]
    corrupt: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Svg,
    Ascii,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the image of one basis vector
    #[command(allow_negative_numbers = true)]
    Apply { operator: String, x: i64, j: i64 },
    /// Compute W±(U,U0) by iteration and compare with the closed form
    Wave {
        u: String,
        u0: String,
        /// + or -
        direction: String,
    },
    /// Compute S(U,U0) = W+* W-
    Scatter { u: String, u0: String },
    /// Orbit classification of an isometry
    Wold { operator: String },
    /// Run every check and write the manifest
    Verify,
    /// Draw arrow diagrams; all figure operators when none are named
    Render { operators: Vec<String> },
}

/// Everything that determines a run's output.
#[derive(Clone, Debug, Serialize)]
struct RunConfig {
    z: i64,
    l: i64,
    radius: i64,
    guard: i64,
    margin: usize,
    cap: usize,
    format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    corrupt: Option<String>,
}

enum Failure {
    Usage(String),
    Computation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownOperator(_) | Error::Params(_) | Error::NegativeRow { .. } => Failure::Usage(e.to_string()),
            other => Failure::Computation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Computation(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

struct Context {
    config: RunConfig,
    catalog: Catalog,
    spec: WindowSpec,
    settings: WaveSettings,
}

impl Context {
    fn new(args: &RunArgs) -> CliResult<Self> {
        let params = ModelParams::new(args.z, args.l)?;
        let spec = WindowSpec::new(args.radius, args.guard)?;
        let mut catalog = Catalog::new(params)?;
        if let Some(name) = &args.corrupt {
            catalog.corrupt(name)?;
        }
        let settings = WaveSettings {
            margin: args.margin,
            cap: args.cap,
        };
        let config = RunConfig {
            z: params.z,
            l: params.l,
            radius: spec.radius,
            guard: spec.guard,
            margin: settings.margin,
            cap: settings.resolved_cap(&spec),
            format: args.format,
            corrupt: args.corrupt.clone(),
        };
        Ok(Context {
            config,
            catalog,
            spec,
            settings,
        })
    }

    fn pair(&self, u: &str, u0: &str) -> CliResult<Pair<'_>> {
        Ok(Pair::from_catalog(&self.catalog, u, u0)?)
    }

    /// Wave and scattering names are computed by iteration, anything else
    /// is read from the catalog.
    fn table(&self, name: &str) -> CliResult<Table> {
        let name = canonical_name(name);
        if let Some((kind, u, u0)) = split_pair_name(&name) {
            let pair = self.pair(u, u0)?;
            let t = match kind {
                "W+" => wave_operator_table(pair, Direction::Plus, self.spec, self.settings)?,
                "W-" => wave_operator_table(pair, Direction::Minus, self.spec, self.settings)?,
                _ => scattering_operator(pair, self.spec, self.settings)?,
            };
            return Ok(t);
        }
        Ok(Table::tabulate(self.catalog.get(&name)?, self.spec)?)
    }
}

fn split_pair_name(name: &str) -> Option<(&str, &str, &str)> {
    let (kind, rest) = name.split_once('(')?;
    if !matches!(kind, "W+" | "W-" | "S") {
        return None;
    }
    let (u, u0) = rest.strip_suffix(')')?.split_once(',')?;
    Some((kind, u, u0))
}

fn parse_direction(text: &str) -> CliResult<Direction> {
    match text {
        "+" | "plus" | "Plus" => Ok(Direction::Plus),
        "-" | "minus" | "Minus" => Ok(Direction::Minus),
        other => Err(Failure::Usage(format!("direction must be + or -, got `{other}`"))),
    }
}

#[derive(Serialize)]
struct TableOutput<'a> {
    config: &'a RunConfig,
    operator: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_diff: Option<Vec<Mismatch>>,
    table: Vec<TableEntry>,
}

#[derive(Serialize)]
struct WoldOutput<'a> {
    config: &'a RunConfig,
    #[serde(flatten)]
    report: &'a WoldReport,
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    config: &'a RunConfig,
    #[serde(flatten)]
    manifest: &'a Manifest,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

fn svg_with_config(svg: String, config: &RunConfig) -> String {
    let meta = serde_json::to_string(config).expect("config serializes");
    let meta = meta.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;");
    match svg.find("<title>") {
        Some(i) => format!("{}<metadata>{meta}</metadata>\n{}", &svg[..i], &svg[i..]),
        None => svg,
    }
}

fn ascii_with_config(text: String, config: &RunConfig) -> String {
    let meta = serde_json::to_string(config).expect("config serializes");
    match text.split_once('\n') {
        Some((head, rest)) => format!("{head}\n# config {meta}\n{rest}"),
        None => text,
    }
}

/// Writes into the output directory, or prints when there is none.
fn emit(out: Option<&Path>, file: &str, contents: &str) -> CliResult<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(file), contents)?;
        }
        None => print!("{contents}"),
    }
    Ok(())
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Json => "json",
        Format::Svg => "svg",
        Format::Ascii => "txt",
    }
}

/// Table JSON, or its diagram in the requested format.
fn emit_table(ctx: &Context, table: &Table, oracle: Option<&str>, out: Option<&Path>) -> CliResult<bool> {
    let window = ctx.spec.window();
    let mut clean = true;
    let body = match ctx.config.format {
        Format::Json => {
            let oracle_diff = match oracle {
                Some(name) => {
                    let diff = table.diff(ctx.catalog.get(name)?, window)?;
                    clean = diff.is_empty();
                    Some(diff)
                }
                None => None,
            };
            to_json(&TableOutput {
                config: &ctx.config,
                operator: table.name().to_string(),
                oracle: oracle.map(str::to_string),
                oracle_diff,
                table: table.entries_on(window),
            })
        }
        Format::Svg => svg_with_config(
            render_svg(&Diagram::of(table, window), &DiagramSpec::default()),
            &ctx.config,
        ),
        Format::Ascii => ascii_with_config(render_ascii(&Diagram::of(table, window)), &ctx.config),
    };
    let file = match ctx.config.format {
        Format::Svg => figure_file_name(table.name(), ctx.spec.radius),
        f => format!("table_{}_{}.{}", sanitize(table.name()), ctx.spec.radius, extension(f)),
    };
    emit(out, &file, &body)?;
    Ok(clean)
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    let ctx = Context::new(&cli.run)?;
    let out = cli.run.out.as_deref();
    match cli.command {
        Command::Apply { operator, x, j } => {
            let s = Site::new(x, j)?;
            let image = ctx.catalog.get(&operator)?.image_of(s)?;
            match image {
                Some(t) => println!("{t}"),
                None => println!("0"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Wave { u, u0, direction } => {
            let dir = parse_direction(&direction)?;
            let pair = ctx.pair(&u, &u0)?;
            let table = wave_operator_table(pair, dir, ctx.spec, ctx.settings)?;
            let clean = emit_table(&ctx, &table, Some(table.name()), out)?;
            Ok(if clean { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Scatter { u, u0 } => {
            let pair = ctx.pair(&u, &u0)?;
            let table = scattering_operator(pair, ctx.spec, ctx.settings)?;
            let oracle = ctx.catalog.get(table.name()).ok().map(|o| o.name().to_string());
            let clean = emit_table(&ctx, &table, oracle.as_deref(), out)?;
            Ok(if clean { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Wold { operator } => {
            let table = ctx.table(&operator)?;
            let report = wold_decompose(&table)?;
            let stem = format!("wold_{}_{}", sanitize(table.name()), ctx.spec.radius);
            match (out, ctx.config.format) {
                (Some(_), _) | (None, Format::Json) => {
                    let json = to_json(&WoldOutput {
                        config: &ctx.config,
                        report: &report,
                    });
                    emit(out, &format!("{stem}.json"), &json)?;
                }
                _ => {}
            }
            if out.is_some() || ctx.config.format == Format::Svg {
                let diagram = Diagram::of(&table, ctx.spec.window());
                let svg = svg_with_config(render_wold_svg(&diagram, &report, &DiagramSpec::default()), &ctx.config);
                emit(out, &format!("{stem}.svg"), &svg)?;
            }
            if out.is_none() && ctx.config.format == Format::Ascii {
                print!(
                    "{}",
                    ascii_with_config(render_ascii(&Diagram::of(&table, ctx.spec.window())), &ctx.config)
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify => {
            let manifest = run_suite(&ctx.catalog, ctx.spec, ctx.settings)?;
            for c in &manifest.checks {
                let word = match c.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                    Status::Indeterminate => "indeterminate",
                };
                eprintln!("{word:>13}  {}", c.name);
            }
            let json = to_json(&VerifyOutput {
                config: &ctx.config,
                manifest: &manifest,
            });
            emit(out, &format!("verify_{}.json", ctx.spec.radius), &json)?;
            if manifest.passed {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("failing checks: {}", manifest.failing.join("; "));
                Ok(ExitCode::from(1))
            }
        }
        Command::Render { operators } => {
            let names: Vec<String> = if operators.is_empty() {
                FIGURE_OPERATORS.iter().map(|s| s.to_string()).collect()
            } else {
                operators
            };
            if out.is_none() && names.len() > 1 {
                return Err(Failure::Usage("rendering several figures needs -o <dir>".into()));
            }
            for name in &names {
                let table = ctx.table(name)?;
                emit_table(&ctx, &table, None, out)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Computation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
