use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use vertex_smash::suites::{run_suite, SuiteConfig, SUITES};
use vertex_smash::Window;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Runs a verification suite and prints its report.
#[derive(Parser, Debug)]
#[command(name = "verify", version)]
struct Args {
    /// heisenberg, lattice, lattice-smash, modules, pseudo or coproduct
    suite: String,
    /// Builtin lattice (a1, a2, hyperbolic) or a JSON lattice file
    #[arg(long, default_value = "a1")]
    lattice: String,
    #[arg(long, default_value_t = 4)]
    max_weight: i64,
    #[arg(long, default_value_t = 2)]
    radius: i64,
    /// Exponent window LO:HI
    #[arg(long, default_value = "-6:6", value_parser = parse_window, allow_hyphen_values = true)]
    window: Window,
    /// Rectangle side LO:HI for weak associativity searches
    #[arg(long, default_value = "-4:4", value_parser = parse_window, allow_hyphen_values = true)]
    assoc_window: Window,
    #[arg(long, default_value_t = 20)]
    lmax: usize,
    #[arg(long, default_value_t = 8)]
    kmax: usize,
    /// Worker threads; falls back to VERIFY_THREADS, then all cores
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_window(s: &str) -> Result<Window, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
    Ok(Window { lo, hi })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = SuiteConfig {
        lattice: args.lattice,
        max_weight: args.max_weight,
        radius: args.radius,
        window: args.window,
        assoc_window: args.assoc_window,
        lmax: args.lmax,
        kmax: args.kmax,
        threads: args.threads,
        seed: args.seed,
    };
    match run_suite(&cfg, &args.suite) {
        Ok(report) => {
            match args.format {
                Format::Json => println!("{}", report.to_json()),
                Format::Text => print!("{}", report.to_text()),
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("verify: {e}");
            if !SUITES.contains(&args.suite.as_str()) {
                eprintln!("suites: {}", SUITES.join(", "));
            }
            ExitCode::from(2)
        }
    }
}
