use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use boxpress::gen::GenKind;
use boxpress::Variant;
use boxpress_cli::commands::{
    bench_table, certificate_failure, cmd_bench, cmd_export, cmd_gen, cmd_pack, cmd_validate, emit, load_instance,
    load_result, write_bench_csv, Algorithm, Failure, GenArgs, PackArgs,
};
use boxpress_cli::format::{write_instance, write_result};
use clap::{Parser, Subcommand};

/// Bounded-volume container packing for boxes and convex polyhedra.
///
/// Exit status: 0 on success, 1 when a validation or certificate check
/// fails, 2 on usage or input errors. BOXPRESS_THREADS caps the number of
/// worker threads.
#[derive(Parser, Debug)]
#[command(name = "boxpress", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded random instance.
    Gen {
        /// uniform-boxes, skewed-boxes or random-hulls
        #[arg(value_parser = parse_kind)]
        kind: GenKind,
        #[arg(short, long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Smallest side length (semi-axis for hulls).
        #[arg(long, default_value_t = 0.1)]
        lo: f64,
        /// Largest side length (semi-axis for hulls).
        #[arg(long, default_value_t = 1.0)]
        hi: f64,
        /// Largest side ratio for skewed boxes.
        #[arg(long, default_value_t = 100.0)]
        max_aspect: f64,
        /// Sample points per hull.
        #[arg(long, default_value_t = 16)]
        points: usize,
        /// Variant recorded in the header.
        #[arg(long, value_parser = parse_variant)]
        variant: Option<Variant>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pack an instance and write a result file with its certificate.
    Pack {
        instance: PathBuf,
        #[arg(long, value_parser = parse_algorithm)]
        algorithm: Option<Algorithm>,
        /// Overrides the variant in the instance header.
        #[arg(long, value_parser = parse_variant)]
        variant: Option<Variant>,
        /// Height-class parameter (slab) or grid accuracy (basesearch).
        #[arg(long)]
        eps: Option<f64>,
        /// Depth factor of the slab container.
        #[arg(long)]
        c: Option<f64>,
        /// Ratio assumed for the strip packer in basesearch.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a result against its instance from scratch.
    Validate { instance: PathBuf, result: PathBuf },
    /// Pack every instance in a directory and tabulate ratios and timings.
    Bench {
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', value_parser = parse_algorithm, default_value = "slab")]
        algorithm: Vec<Algorithm>,
        /// Grid accuracies for basesearch runs.
        #[arg(long, value_delimiter = ',', default_value = "1.0")]
        eps: Vec<f64>,
        /// CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a packed result as a Wavefront OBJ scene.
    Export {
        instance: PathBuf,
        result: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_kind(s: &str) -> Result<GenKind, String> {
    GenKind::from_tag(s).ok_or_else(|| format!("unknown kind `{s}` (uniform-boxes, skewed-boxes, random-hulls)"))
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::from_tag(s).ok_or_else(|| {
        let tags: Vec<&str> = Variant::ALL.iter().map(|v| v.tag()).collect();
        format!("unknown variant `{s}` ({})", tags.join(", "))
    })
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    Algorithm::from_tag(s).ok_or_else(|| format!("unknown algorithm `{s}` (slab, basesearch)"))
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("BOXPRESS_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().with_context(|| format!("BOXPRESS_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        bail!("BOXPRESS_THREADS must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Gen { kind, n, seed, lo, hi, max_aspect, points, variant, out } => {
            let file = cmd_gen(&GenArgs { kind, n, seed, lo, hi, max_aspect, points, variant })?;
            emit(out.as_deref(), &write_instance(&file))
        }
        Command::Pack { instance, algorithm, variant, eps, c, alpha, out } => {
            let file = load_instance(&instance)?;
            let result = cmd_pack(&file, &PackArgs { algorithm, variant, eps, c, alpha })?;
            emit(out.as_deref(), &write_result(&result))?;
            let r = &result.result;
            let summary = format!(
                "{} {}: volume {:.6}, lower bound {:.6}, ratio {:.4} <= {:.4}",
                r.variant.tag(),
                instance.display(),
                r.volume,
                r.lower_bound.lower_bound,
                r.certificate.empirical_ratio(),
                r.claimed_ratio
            );
            if out.is_some() {
                println!("{summary}");
            } else {
                eprintln!("{summary}");
            }
            match certificate_failure(&result) {
                Some(f) => Err(f.into()),
                None => Ok(()),
            }
        }
        Command::Validate { instance, result } => {
            let inst = load_instance(&instance)?;
            let res = load_result(&result)?;
            let report = cmd_validate(&inst, &res)?;
            for l in &report.lines {
                println!("{l}");
            }
            for f in &report.failures {
                println!("FAIL {f}");
            }
            if report.failures.is_empty() {
                println!("valid");
                Ok(())
            } else {
                Err(Failure::Invalid(report.failures.join("; ")).into())
            }
        }
        Command::Bench { corpus, algorithm, eps, out } => {
            let (rows, summaries) = cmd_bench(&corpus, &algorithm, &eps)?;
            print!("{}", bench_table(&rows, &summaries));
            if let Some(p) = out {
                write_bench_csv(&p, &rows)?;
            }
            let exceeded: Vec<String> = summaries
                .iter()
                .filter(|s| !s.within_bound())
                .map(|s| format!("{} {} max ratio {} > {}", s.variant.tag(), s.algorithm.tag(), s.max_ratio, s.bound))
                .collect();
            if exceeded.is_empty() {
                Ok(())
            } else {
                Err(Failure::Bench(exceeded.join("; ")).into())
            }
        }
        Command::Export { instance, result, out } => {
            let inst = load_instance(&instance)?;
            let res = load_result(&result)?;
            emit(out.as_deref(), &cmd_export(&inst, &res)?)
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.chain().any(|e| e.is::<Failure>()) {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
