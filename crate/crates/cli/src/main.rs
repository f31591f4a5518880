//! `bvca`: build ordered Bratteli diagrams, walk their adic orbits, compile
//! them into one-dimensional cellular automata, and render the results.
//!
//! Every subcommand is a pure function from input files and flags to output
//! files; repeated runs are bit-identical. Primary output goes to standard
//! output so stages can be piped; secondary artifacts take explicit paths.
//! Usage errors exit 2, pipeline errors exit 1 with a diagnostic on standard
//! error.

use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use bvca_core::analyze::analyze;
use bvca_core::builders::{
    from_odometer, from_substitution, from_toeplitz, OdometerSpec, SubstitutionSpec, ToeplitzSpec,
};
use bvca_core::ca::{
    decode, make_x_init, parse_config, parse_rule, simulate, synthesize, verify_conjugacy,
    CAConfig, HarvestSpec, RuleTable,
};
use bvca_core::path::canonicalize;
use bvca_core::render::{render_grid, render_pgm, RenderSpec};
use bvca_core::spacetime::{check_patch, format_symbol, harvest_tiles, orbit_slab, parse_symbol, Slab};
use bvca_core::telescope::{telescope, CutSchedule};
use bvca_core::vershik::orbit;
use bvca_core::{validate, DiagramSpec, PathRep, Tail, ValidatedDiagram};

#[derive(Parser)]
#[command(
    name = "bvca",
    version,
    about = "Compile Bratteli-Vershik systems into one-dimensional cellular automata"
)]
struct Cli {
    /// Accepted for interface stability; the pipeline is deterministic and
    /// never draws random numbers.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a stationary diagram from a primitive proper substitution
    BuildSub(BuildSubArgs),
    /// Build an odometer diagram from its digit quotients
    BuildOdo(BuildOdoArgs),
    /// Build a diagram from a staged Toeplitz description
    BuildToeplitz(BuildToeplitzArgs),
    /// Report width, focus, primitivity, proper ordering, equal path number
    Analyze(DiagramInput),
    /// Contract runs of levels and emit the recoded diagram
    Telescope(TelescopeArgs),
    /// Walk the successor orbit of a path
    Orbit(OrbitArgs),
    /// Materialize a rectangular patch of a spacetime diagram
    Patch(PatchArgs),
    /// Harvest the admissible 2x2 tiles, or check a patch against them
    Tiles(TilesArgs),
    /// Synthesize a local rule (and optionally the initial configuration)
    Synth(SynthArgs),
    /// Run the automaton and print configuration snapshots
    Simulate(SimulateArgs),
    /// Read the encoded path back off a configuration
    Decode(DecodeArgs),
    /// Check the automaton orbit against the adic orbit, step by step
    Verify(VerifyArgs),
    /// Draw a patch as a text grid or a PGM image with a legend
    Render(RenderArgs),
}

#[derive(Args)]
struct BuildSubArgs {
    /// Substitution JSON ({"a": "abb", ...}); standard input when omitted
    spec: Option<PathBuf>,
}

#[derive(Args)]
struct BuildOdoArgs {
    /// Quotients before the cycle starts, lowest level first
    #[arg(long, value_delimiter = ',', value_name = "Q,Q,...")]
    prefix: Vec<u64>,
    /// Quotients repeated forever above the prefix
    #[arg(long, required = true, value_delimiter = ',', value_name = "Q,Q,...")]
    cycle: Vec<u64>,
}

#[derive(Args)]
struct BuildToeplitzArgs {
    /// Staged Toeplitz JSON; standard input when omitted
    spec: Option<PathBuf>,
    /// How far to expand the sequence while harvesting level words
    #[arg(long, default_value_t = 512, value_name = "CELLS")]
    horizon: usize,
    /// Also write the fill report and harvested words here
    #[arg(long, value_name = "PATH")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct DiagramInput {
    /// Diagram JSON; standard input when omitted
    #[arg(long, value_name = "PATH")]
    diagram: Option<PathBuf>,
}

#[derive(Args)]
struct TelescopeArgs {
    #[command(flatten)]
    input: DiagramInput,
    /// Contract every run of this many levels
    #[arg(long, default_value_t = 2, value_name = "N", conflicts_with = "cycle")]
    gap: usize,
    /// Gap sizes used once, bottom up, before the cycle
    #[arg(long, value_delimiter = ',', value_name = "N,N,...", requires = "cycle")]
    prefix: Vec<usize>,
    /// Gap sizes repeated forever
    #[arg(long, value_delimiter = ',', value_name = "N,N,...")]
    cycle: Vec<usize>,
    /// Also write the label recoding table here
    #[arg(long, value_name = "PATH")]
    recoding: Option<PathBuf>,
}

#[derive(Args)]
struct OrbitArgs {
    #[command(flatten)]
    input: DiagramInput,
    /// Steps to walk; negative walks predecessors
    #[arg(long, allow_hyphen_values = true, value_name = "N")]
    steps: i64,
    #[command(flatten)]
    base: BaseArgs,
}

/// Starting path: explicit labels for the lowest levels plus a tail.
#[derive(Args)]
struct BaseArgs {
    /// Edge labels at levels 1, 2, ... (the rest follows the tail)
    #[arg(long, value_delimiter = ',', value_name = "L,L,...")]
    labels: Vec<u32>,
    /// Which extremal edge the path takes above the explicit labels
    #[arg(long, value_enum, default_value_t = TailArg::Min)]
    tail: TailArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum TailArg {
    Min,
    Max,
}

impl BaseArgs {
    fn path(&self) -> PathRep {
        let tail = match self.tail {
            TailArg::Min => Tail::Min,
            TailArg::Max => Tail::Max,
        };
        PathRep::new(self.labels.clone(), tail)
    }
}

#[derive(Args)]
struct PatchArgs {
    #[command(flatten)]
    input: DiagramInput,
    /// Orbit rows to materialize, e.g. -5..0
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, value_name = "LO..HI")]
    rows: (i64, i64),
    /// Columns to materialize, e.g. -1..8
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, value_name = "LO..HI")]
    cols: (i64, i64),
    #[command(flatten)]
    base: BaseArgs,
}

#[derive(Args)]
struct TilesArgs {
    /// Diagram JSON; required unless --check supplies a patch
    #[arg(long, value_name = "PATH", conflicts_with = "check")]
    diagram: Option<PathBuf>,
    /// Initial half-height of the harvest window
    #[arg(long, default_value_t = 16, value_name = "ROWS")]
    rows: i64,
    /// Give up doubling past this half-height
    #[arg(long, default_value_t = 4096, value_name = "ROWS")]
    max_rows: i64,
    /// Check this patch file for admissibility instead of printing tiles
    #[arg(long, value_name = "PATH")]
    check: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    input: DiagramInput,
    /// Initial half-height of the harvest window
    #[arg(long, default_value_t = 32, value_name = "ROWS")]
    rows: i64,
    /// Give up doubling past this half-height
    #[arg(long, default_value_t = 1024, value_name = "ROWS")]
    max_rows: i64,
    /// Also write the initial configuration here
    #[arg(long, value_name = "PATH")]
    init: Option<PathBuf>,
    /// Minimum number of explicit core cells in the initial configuration
    #[arg(long, default_value_t = 0, value_name = "CELLS")]
    min_core: usize,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: DiagramInput,
    /// Rule table JSON
    #[arg(long, value_name = "PATH")]
    rule: PathBuf,
    /// Starting configuration JSON
    #[arg(long, value_name = "PATH")]
    init: PathBuf,
    /// Steps to run
    #[arg(long, value_name = "N")]
    steps: u64,
    /// Print every snapshot (a JSON array), not just the final configuration
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    input: DiagramInput,
    /// Rule table JSON
    #[arg(long, value_name = "PATH")]
    rule: PathBuf,
    /// Configuration JSON to decode
    #[arg(long, value_name = "PATH")]
    init: PathBuf,
    /// Run this many steps before decoding
    #[arg(long, default_value_t = 0, value_name = "N")]
    steps: u64,
    /// Path depth to reconstruct
    #[arg(long, value_name = "LEVELS")]
    depth: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: DiagramInput,
    /// Automaton steps to compare against the adic orbit
    #[arg(long, value_name = "N")]
    steps: u64,
    /// Truncation depth for the comparison
    #[arg(long, value_name = "LEVELS")]
    depth: usize,
}

#[derive(Args)]
struct RenderArgs {
    /// Patch JSON produced by the patch subcommand
    #[arg(long, value_name = "PATH")]
    patch: PathBuf,
    /// Rows to draw; the whole patch when omitted
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, value_name = "LO..HI")]
    rows: Option<(i64, i64)>,
    /// Columns to draw; the whole patch when omitted
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true, value_name = "LO..HI")]
    cols: Option<(i64, i64)>,
    /// Write a PGM image here instead of printing a text grid
    #[arg(long, value_name = "PATH")]
    pgm: Option<PathBuf>,
    /// Where the gray-level legend goes (default: the PGM path + ".legend")
    #[arg(long, value_name = "PATH", requires = "pgm")]
    legend: Option<PathBuf>,
}

/// Inclusive integer range written `LO..HI` (or `LO..=HI`).
fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected a range like -5..0, got '{s}'"))?;
    let lo: i64 = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad range start '{lo}': {e}"))?;
    let hi: i64 = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad range end '{hi}': {e}"))?;
    if lo > hi {
        return Err(format!("range '{s}' is empty"));
    }
    Ok((lo, hi))
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

fn read_input(path: Option<&Path>) -> CliResult<String> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()).into())
        }
        _ => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| format!("standard input: {e}"))?;
            Ok(text)
        }
    }
}

fn write_output(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load_diagram(path: Option<&Path>) -> CliResult<ValidatedDiagram> {
    let spec = DiagramSpec::from_json(&read_input(path)?)?;
    Ok(validate(&spec)?)
}

/// Self-contained patch file: the diagram travels with the symbols so the
/// patch can be rendered or checked without extra inputs. Rows are listed in
/// increasing row order; cells in increasing column order from `j0`.
#[derive(Serialize, Deserialize)]
struct PatchFile {
    diagram: DiagramSpec,
    m0: i64,
    j0: i64,
    rows: Vec<Vec<String>>,
}

impl PatchFile {
    fn from_slab(d: &ValidatedDiagram, slab: &Slab) -> PatchFile {
        PatchFile {
            diagram: d.spec().clone(),
            m0: slab.m0,
            j0: slab.j0,
            rows: slab
                .rows()
                .iter()
                .map(|row| row.iter().map(|&s| format_symbol(d, s)).collect())
                .collect(),
        }
    }

    fn load(path: &Path) -> CliResult<(ValidatedDiagram, Slab)> {
        let text = read_input(Some(path))?;
        let file: PatchFile =
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let d = validate(&file.diagram)?;
        if file.rows.is_empty() || file.rows.iter().any(|r| r.len() != file.rows[0].len()) {
            return Err(format!("{}: patch rows must be non-empty and equal-width", path.display()).into());
        }
        let rows = file
            .rows
            .iter()
            .map(|row| row.iter().map(|name| parse_symbol(&d, name)).collect())
            .collect::<Result<Vec<Vec<_>>, _>>()?;
        Ok((d, Slab::from_rows(file.m0, file.j0, rows)))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::BuildSub(args) => {
            let sub: SubstitutionSpec = serde_json::from_str(&read_input(args.spec.as_deref())?)
                .map_err(|e| format!("substitution spec: {e}"))?;
            print!("{}", from_substitution(&sub)?.to_canonical_json());
        }
        Command::BuildOdo(args) => {
            let spec = OdometerSpec::new(args.prefix, args.cycle);
            print!("{}", from_odometer(&spec)?.to_canonical_json());
        }
        Command::BuildToeplitz(args) => {
            let spec: ToeplitzSpec = serde_json::from_str(&read_input(args.spec.as_deref())?)
                .map_err(|e| format!("toeplitz spec: {e}"))?;
            let (diagram, words, report) = from_toeplitz(&spec, args.horizon)?;
            if let Some(path) = &args.report {
                let summary = json!({ "fill": report, "words": words });
                write_output(path, &format!("{:#}\n", summary))?;
            }
            print!("{}", diagram.to_canonical_json());
        }
        Command::Analyze(input) => {
            let d = load_diagram(input.diagram.as_deref())?;
            let report = analyze(&d);
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Telescope(args) => {
            let d = load_diagram(args.input.diagram.as_deref())?;
            let cuts = if args.cycle.is_empty() {
                CutSchedule::every(args.gap)
            } else {
                CutSchedule {
                    prefix: args.prefix,
                    cycle: args.cycle,
                }
            };
            let result = telescope(&d, &cuts)?;
            if let Some(path) = &args.recoding {
                let table = json!({
                    "level1": &result.recoding.level1,
                    "templates": &result.recoding.templates,
                });
                write_output(path, &format!("{:#}\n", table))?;
            }
            print!("{}", result.spec.to_canonical_json());
        }
        Command::Orbit(args) => {
            let d = load_diagram(args.input.diagram.as_deref())?;
            let base = canonicalize(&d, &args.base.path())?;
            let paths = orbit(&d, &base, args.steps)?;
            println!("{}", serde_json::to_string_pretty(&paths)?);
        }
        Command::Patch(args) => {
            let d = load_diagram(args.input.diagram.as_deref())?;
            let base = canonicalize(&d, &args.base.path())?;
            let slab = orbit_slab(&d, &base, args.rows, args.cols)?;
            let file = PatchFile::from_slab(&d, &slab);
            println!("{}", serde_json::to_string_pretty(&file)?);
        }
        Command::Tiles(args) => match &args.check {
            Some(patch_path) => {
                let (d, slab) = PatchFile::load(patch_path)?;
                let tiles = harvest_tiles(&d, args.rows, args.max_rows)?;
                check_patch(&tiles, &slab)?;
                println!(
                    "admissible: rows {}..={}, columns {}..={} against {} tiles",
                    slab.m0,
                    slab.m1(),
                    slab.j0,
                    slab.j1(),
                    tiles.len()
                );
            }
            None => {
                let d = load_diagram(args.diagram.as_deref())?;
                let tiles = harvest_tiles(&d, args.rows, args.max_rows)?;
                let out = json!({
                    "rowsUsed": tiles.rows_used,
                    "saturated": tiles.saturated,
                    "count": tiles.len(),
                    "tiles": tiles.to_named(&d),
                });
                println!("{}", serde_json::to_string_pretty(&out)?);
            }
        },
        Command::Synth(args) => {
            let d = load_diagram(args.input.diagram.as_deref())?;
            let harvest = HarvestSpec {
                initial_rows: args.rows,
                max_rows: args.max_rows,
            };
            let rule = synthesize(&d, &harvest)?;
            let cert = rule.certificate().expect("synthesized rules carry a certificate");
            eprintln!(
                "rule: width {}, radius {}, {} contexts, harvested {} rows, saturated: {}",
                rule.w(),
                rule.radius(),
                rule.len(),
                cert.harvest_rows,
                cert.saturated
            );
            if let Some(path) = &args.init {
                let cfg = make_x_init(&d, rule.w(), args.min_core)?;
                write_output(path, &cfg.to_json(&d))?;
            }
            print!("{}", rule.to_json(&d));
        }
        Command::Simulate(args) => {
            let d = load_diagram(args.input.diagram.as_deref())?;
            let (rule, cfg) = load_rule_and_config(&d, &args.rule, &args.init)?;
            let snapshots = simulate(&d, &rule, &cfg, args.steps)?;
            if args.all {
                let all: Vec<_> = snapshots.iter().map(|c| c.to_named(&d)).collect();
                println!("{}", serde_json::to_string_pretty(&all)?);
            } else {
                let last = snapshots.last().expect("simulate returns steps+1 snapshots");
                print!("{}", last.to_json(&d));
            }
        }
        Command::Decode(args) => {
            let d = load_diagram(args.input.diagram.as_deref())?;
            let (rule, cfg) = load_rule_and_config(&d, &args.rule, &args.init)?;
            let cfg = if args.steps > 0 {
                simulate(&d, &rule, &cfg, args.steps)?
                    .pop()
                    .expect("simulate returns steps+1 snapshots")
            } else {
                cfg
            };
            let path = decode(&d, &rule, &cfg, args.depth)?;
            println!("{}", serde_json::to_string_pretty(&path)?);
        }
        Command::Verify(args) => {
            let d = load_diagram(args.input.diagram.as_deref())?;
            let report = verify_conjugacy(&d, args.steps, args.depth)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            report.ensure_clean()?;
        }
        Command::Render(args) => {
            let (d, slab) = PatchFile::load(&args.patch)?;
            let spec = RenderSpec {
                rows: args.rows.unwrap_or((slab.m0, slab.m1())),
                cols: args.cols.unwrap_or((slab.j0, slab.j1())),
            };
            match &args.pgm {
                Some(pgm_path) => {
                    let (pgm, legend) = render_pgm(&d, &slab, &spec)?;
                    let legend_path = args.legend.clone().unwrap_or_else(|| {
                        let mut s = pgm_path.as_os_str().to_owned();
                        s.push(".legend");
                        PathBuf::from(s)
                    });
                    write_output(pgm_path, &pgm)?;
                    write_output(&legend_path, &legend)?;
                }
                None => print!("{}", render_grid(&d, &slab, &spec)?),
            }
        }
    }
    Ok(())
}

fn load_rule_and_config(
    d: &ValidatedDiagram,
    rule_path: &Path,
    init_path: &Path,
) -> CliResult<(RuleTable, CAConfig)> {
    let rule = parse_rule(d, &read_input(Some(rule_path))?)?;
    let cfg = parse_config(d, &read_input(Some(init_path))?)?;
    Ok((rule, cfg))
}
