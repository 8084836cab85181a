use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lozenge_core::error::FormulaError;
use lozenge_core::formula::{formula_quartered, macmahon_count, proctor_count};
use lozenge_core::harness::{
    correspondence_probe, run_sweep_with, Check, ClosedForms, DentPolicy, Span, StandardForms,
    SweepSpec,
};
use lozenge_core::lattice::{
    build_hexagon, build_quartered, build_staircase_trimmed, region_stats, remove_forced, QHParams,
    Region,
};
use lozenge_core::matching::{count_tilings, Count};
use lozenge_core::render::{to_ascii, to_svg};
use serde_json::json;

const OUT_DIR_VAR: &str = "LOZENGE_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "lozenge",
    version,
    about = "Exact lozenge tiling counts on the triangular lattice"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for sampled dent subsets and lemma instances.
    #[arg(long, global = true, default_value_t = 20_141_107)]
    seed: u64,
    /// More detail on stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count tilings by brute force.
    Count {
        #[command(flatten)]
        region: Selector,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Evaluate the closed form for a family.
    Formula {
        #[command(flatten)]
        region: Selector,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run the verification sweep; exits 1 if any instance fails.
    Verify(VerifyArgs),
    /// Draw a region, optionally with one of its tilings.
    Render {
        #[command(flatten)]
        region: Selector,
        /// Overlay the N-th tiling (0-based, enumeration order).
        #[arg(long)]
        tiling: Option<usize>,
        #[arg(long, value_enum, default_value_t = Picture::Svg)]
        format: Picture,
        /// Write to a file instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Match staircase regions against reduced quartered hexagons.
    Probe {
        #[arg(long, default_value_t = 3)]
        max_a: u32,
        #[arg(long, default_value_t = 6)]
        max_b: u32,
        #[arg(long, default_value_t = 4)]
        max_c: u32,
    },
}

#[derive(Args, Debug)]
struct Selector {
    #[arg(value_enum, required_unless_present = "region_file")]
    family: Option<Family>,
    /// Side parameters a b c.
    #[arg(num_args = 0..=3)]
    params: Vec<u32>,
    /// Dent positions, comma separated (quartered hexagons).
    #[arg(long, value_delimiter = ',')]
    dents: Vec<u32>,
    /// Read a region in the text format instead of building one.
    #[arg(long, conflicts_with = "family")]
    region_file: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    Hexagon,
    Macmahon,
    Staircase,
    Proctor,
    Quartered,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Hexagon => "hexagon",
            Family::Macmahon => "macmahon",
            Family::Staircase => "staircase",
            Family::Proctor => "proctor",
            Family::Quartered => "quartered",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Picture {
    Svg,
    Ascii,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Preset::Desk)]
    preset: Preset,
    /// Restrict a parameter in every family, e.g. `a=0..2` (inclusive).
    #[arg(long, num_args = 1..)]
    ranges: Vec<String>,
    /// Run only these checks (repeatable).
    #[arg(long = "check")]
    checks: Vec<String>,
    /// Identity grid bound.
    #[arg(long)]
    grid: Option<u32>,
    /// Number of seeded ratio-lemma instances.
    #[arg(long)]
    lemma_samples: Option<usize>,
    /// Dent subsets: auto, all, initial, or sample:N.
    #[arg(long, default_value = "auto")]
    dents: String,
    /// Report path; `.csv` selects CSV. Defaults to report.jsonl in $LOZENGE_OUT_DIR or the
    /// current directory.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Record per-instance wall time (reports are then no longer reproducible byte for byte).
    #[arg(long)]
    timings: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Check the harness itself by running against a deliberately wrong MacMahon formula.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

/// MacMahon's product plus one, so every nonempty box fails.
struct Faulty;

impl ClosedForms for Faulty {
    fn macmahon(&self, a: u32, b: u32, c: u32) -> Result<Count, FormulaError> {
        let n = macmahon_count(a, b, c)?;
        Ok(if a * b * c > 0 { n + Count::one() } else { n })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Preset {
    Desk,
    Empty,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
    Runtime(String),
}

impl Failure {
    fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Check(_) | Failure::Runtime(_) => ExitCode::from(1),
            Failure::Usage(_) => ExitCode::from(2),
        }
    }
}

fn usage(msg: impl ToString) -> Failure {
    Failure::Usage(msg.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Runtime(m) => eprintln!("error: {m}"),
                Failure::Check(m) => eprintln!("{m}"),
            }
            f.exit_code()
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Count { region, format } => {
            let built = build(region)?;
            if cli.verbose > 0 {
                let stats = region_stats(&built.region);
                let (_, forced) = remove_forced(&built.region);
                eprintln!(
                    "{}: {} up, {} down, {} components, {forced} forced lozenges",
                    built.region.label(),
                    stats.up,
                    stats.down,
                    stats.components
                );
            }
            emit(&built, &count_tilings(&built.region), *format);
            Ok(())
        }
        Command::Formula { region, format } => {
            if region.region_file.is_some() {
                return Err(usage("formula needs a family, not a region file"));
            }
            let built = build(region)?;
            let value = closed_form(&built).map_err(usage)?;
            emit(&built, &value, *format);
            Ok(())
        }
        Command::Verify(args) => verify(args, cli),
        Command::Render {
            region,
            tiling,
            format,
            output,
        } => {
            let built = build(region)?;
            let picture = match format {
                Picture::Svg => to_svg(&built.region, *tiling),
                Picture::Ascii => to_ascii(&built.region),
            };
            match output {
                Some(path) => write_file(&resolve(path), &picture),
                None => {
                    print!("{picture}");
                    Ok(())
                }
            }
        }
        Command::Probe {
            max_a,
            max_b,
            max_c,
        } => {
            let report = correspondence_probe(*max_a, *max_b, *max_c);
            print!("{}", report.to_text());
            println!(
                "map P(a,b,c) -> R(a,b,c; 1..k) holds for all entries: {}",
                report.identity_map()
            );
            Ok(())
        }
    }
}

struct Built {
    family: &'static str,
    params: Option<(u32, u32, u32)>,
    dents: Vec<u32>,
    qh: Option<QHParams>,
    region: Region,
}

fn build(sel: &Selector) -> Result<Built, Failure> {
    if let Some(path) = &sel.region_file {
        if !sel.params.is_empty() || !sel.dents.is_empty() {
            return Err(usage("--region-file takes no parameters or dents"));
        }
        let text =
            std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let region =
            Region::from_text(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        return Ok(Built {
            family: "region-file",
            params: None,
            dents: Vec::new(),
            qh: None,
            region,
        });
    }
    let family = sel
        .family
        .expect("clap requires a family without --region-file");
    let &[a, b, c] = sel.params.as_slice() else {
        return Err(usage(format!(
            "{} needs three parameters a b c",
            family.name()
        )));
    };
    let needs_dents = family == Family::Quartered;
    if !needs_dents && !sel.dents.is_empty() {
        return Err(usage(format!("{} takes no dents", family.name())));
    }
    let mut qh = None;
    let region = match family {
        Family::Hexagon | Family::Macmahon => build_hexagon(a, b, c),
        Family::Staircase | Family::Proctor => build_staircase_trimmed(a, b, c).map_err(usage)?,
        Family::Quartered => {
            let p = QHParams::new(a, b, c, sel.dents.clone()).map_err(usage)?;
            let r = build_quartered(&p).map_err(usage)?;
            qh = Some(p);
            r
        }
    };
    Ok(Built {
        family: family.name(),
        params: Some((a, b, c)),
        dents: sel.dents.clone(),
        qh,
        region,
    })
}

fn closed_form(built: &Built) -> Result<Count, String> {
    let (a, b, c) = built.params.expect("families carry parameters");
    let value = match built.family {
        "hexagon" | "macmahon" => macmahon_count(a, b, c),
        "staircase" | "proctor" => proctor_count(a, b, c),
        _ => formula_quartered(built.qh.as_ref().expect("quartered parameters")),
    };
    value.map_err(|e| e.to_string())
}

fn emit(built: &Built, value: &Count, format: Format) {
    match format {
        Format::Text => println!("{value}"),
        Format::Json => {
            let params = match built.params {
                Some((a, b, c)) => json!({ "a": a, "b": b, "c": c }),
                None => json!({ "label": built.region.label() }),
            };
            let out = json!({
                "family": built.family,
                "params": params,
                "dents": built.dents,
                "value": value.to_string(),
            });
            println!("{out}");
        }
        Format::Csv => {
            let (a, b, c) = match built.params {
                Some((a, b, c)) => (a.to_string(), b.to_string(), c.to_string()),
                None => Default::default(),
            };
            let dents: Vec<String> = built.dents.iter().map(u32::to_string).collect();
            println!("family,a,b,c,dents,value");
            println!(
                "{},{a},{b},{c},\"{}\",{value}",
                built.family,
                dents.join(",")
            );
        }
    }
}

fn parse_policy(s: &str) -> Result<DentPolicy, Failure> {
    match s {
        "auto" => Ok(DentPolicy::Auto),
        "all" => Ok(DentPolicy::All),
        "initial" => Ok(DentPolicy::InitialSegments),
        _ => {
            let n = s
                .strip_prefix("sample:")
                .and_then(|n| n.parse().ok())
                .ok_or_else(|| usage(format!("unknown dent policy {s:?}")))?;
            Ok(DentPolicy::Sample(n))
        }
    }
}

fn verify(args: &VerifyArgs, cli: &Cli) -> Result<(), Failure> {
    let mut spec = match args.preset {
        Preset::Desk => SweepSpec::desk(),
        Preset::Empty => SweepSpec::empty(),
    };
    spec.seed = cli.seed;
    spec.timings = args.timings;
    spec.dents = parse_policy(&args.dents)?;
    for r in &args.ranges {
        let (name, span) = r
            .split_once('=')
            .ok_or_else(|| usage(format!("range {r:?} is not of the form name=lo..hi")))?;
        let span: Span = span.parse().map_err(usage)?;
        let mut chars = name.chars();
        let (Some(p), None) = (chars.next(), chars.next()) else {
            return Err(usage(format!("unknown parameter {name:?}")));
        };
        spec.restrict(p, span).map_err(usage)?;
    }
    if !args.checks.is_empty() {
        spec.checks = args
            .checks
            .iter()
            .map(|c| c.parse::<Check>())
            .collect::<Result<_, _>>()
            .map_err(usage)?;
    }
    if let Some(g) = args.grid {
        spec.identity_grid = g;
    }
    if let Some(n) = args.lemma_samples {
        spec.lemma_samples = n;
    }
    let default = PathBuf::from(if args.format == Format::Csv {
        "report.csv"
    } else {
        "report.jsonl"
    });
    spec.output = Some(resolve(args.output.as_ref().unwrap_or(&default)));
    let forms: &dyn ClosedForms = if args.inject_fault {
        &Faulty
    } else {
        &StandardForms
    };
    let report = run_sweep_with(&spec, forms).map_err(|e| Failure::Runtime(e.to_string()))?;
    match args.format {
        Format::Text => print!("{}", report.summary_text()),
        Format::Json => print!("{}", report.to_jsonl()),
        Format::Csv => print!("{}", report.to_csv()),
    }
    if cli.verbose > 0 {
        eprintln!(
            "report written to {}",
            spec.output.as_ref().unwrap().display()
        );
    }
    if report.all_passed() {
        Ok(())
    } else {
        let mut msg = String::from("verification failed:");
        for r in report.failures().take(10) {
            msg.push_str(&format!(
                "\n  {} {}: expected {} got {}",
                r.check, r.params, r.expected, r.actual
            ));
        }
        Err(Failure::Check(msg))
    }
}

/// Relative paths land in `$LOZENGE_OUT_DIR` when it is set.
fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, body).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}
