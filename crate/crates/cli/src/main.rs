use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use weil_core::io as wio;
use weil_core::par::Execution;
use weil_core::pipeline::{
    compare, figure_csv, spectrum_run, verify_run, weil_matrix, zeros, ComparisonRecord,
    InvariantCheck, RunConfig,
};
use weil_core::weil_form::LambdaSpec;
use weil_core::Error;

#[derive(Parser)]
#[command(name = "weil-lab", version, about = "Weil quadratic form spectra against zeta zeros")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the matrix of the truncated Weil form and write it out.
    Assemble(RunArgs),
    /// Diagonalize, build the perturbed operator and export its spectrum.
    Spectrum(RunArgs),
    /// Generate the table of zeta zeros from the theta-series oracle.
    Oracle(OracleArgs),
    /// Compare operator spectra with the zeta zeros.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct Common {
    /// Decimal digits of working precision.
    #[arg(long, default_value_t = 60)]
    digits: u32,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Cache directory for matrices, eigendata and zero tables.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Run the invariant suites and fail with exit code 2 on a violation.
    #[arg(long)]
    verify: bool,
    /// Disable data-parallel loops.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct RunArgs {
    /// `sqrt:<k>` or a decimal literal.
    #[arg(long)]
    lambda: LambdaSpec,
    #[arg(long = "n-max")]
    n_max: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 50)]
    zeros: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CompareArgs {
    /// Repeat to compare several values of lambda.
    #[arg(long, required = true)]
    lambda: Vec<LambdaSpec>,
    #[arg(long = "n-max")]
    n_max: usize,
    #[arg(long, default_value_t = 50)]
    zeros: usize,
    #[command(flatten)]
    common: Common,
}

impl Common {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }

    fn config(&self, lambda: LambdaSpec, n: usize) -> RunConfig {
        let mut c = RunConfig::new(lambda, n, self.digits).with_execution(self.exec());
        if let Some(dir) = &self.cache {
            c = c.with_cache(dir);
        }
        c
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>, Error> {
        fs::create_dir_all(&self.out)?;
        Ok(BufWriter::new(File::create(self.out.join(name))?))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Structure(_)
        | Error::IdentityViolation(_)
        | Error::RootCountMismatch { .. }
        | Error::DegenerateNormalization(_)
        | Error::CacheMismatch(_) => 2,
        Error::EvenSimpleViolation(_) => 3,
        Error::NonConvergence { .. }
        | Error::MissedZeroSuspected { .. }
        | Error::OscillationBudgetExceeded { .. } => 4,
        _ => 1,
    }
}

fn report_checks(checks: &[InvariantCheck]) -> Result<(), Error> {
    for c in checks {
        let mark = if c.passed { "ok" } else { "FAILED" };
        println!("  [{mark}] {}: {}", c.name, c.detail);
    }
    match checks.iter().find(|c| !c.passed) {
        Some(c) if c.name == "even-simple" => Err(Error::EvenSimpleViolation(c.detail.clone())),
        Some(c) => Err(Error::IdentityViolation(format!("{}: {}", c.name, c.detail))),
        None => Ok(()),
    }
}

fn cmd_assemble(args: &RunArgs) -> Result<(), Error> {
    let config = args.common.config(args.lambda.clone(), args.n_max);
    let m = weil_matrix(&config)?;
    let name = format!("{}.matrix", config.cache_key());
    wio::write_matrix(args.common.create(&name)?, &m)?;
    println!("wrote {}", args.common.out.join(&name).display());
    if args.common.verify {
        let half = m.params.ctx.tol_half();
        let defect = m.telescoping_defect();
        if defect > half {
            return Err(Error::Structure(format!(
                "telescoping defect {:e}",
                defect.to_f64()
            )));
        }
        println!("  [ok] parity, difference-quotient structure, telescoping identity");
    }
    Ok(())
}

fn cmd_spectrum(args: &RunArgs) -> Result<(), Error> {
    let config = args.common.config(args.lambda.clone(), args.n_max);
    let run = spectrum_run(&config)?;
    println!(
        "lambda={} N={} bits={} eps_N={} gap={}",
        config.lambda,
        config.n,
        run.matrix.params.ctx.bits(),
        weil_core::pipeline::sci3(&run.eigen.eps_n),
        weil_core::pipeline::sci3(&run.eigen.gap)
    );
    let stem = config.cache_key();
    let name = match args.common.format {
        Format::Csv => {
            let name = format!("{stem}.spectrum.csv");
            wio::write_spectrum_csv(args.common.create(&name)?, &run.spectrum)?;
            name
        }
        Format::Json => {
            let name = format!("{stem}.spectrum.json");
            wio::write_spectrum_json(
                args.common.create(&name)?,
                &run.matrix.params,
                &run.spectrum,
            )?;
            name
        }
    };
    println!("wrote {}", args.common.out.join(&name).display());
    if args.common.verify {
        report_checks(&verify_run(&run))?;
    }
    Ok(())
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), Error> {
    let c = &args.common;
    let table = zeros(args.zeros, c.digits, c.cache.as_deref(), c.exec())?;
    let name = format!("zeros_c{}_d{}.zeros", args.zeros, c.digits);
    wio::write_zeros(c.create(&name)?, &table)?;
    println!("wrote {}", c.out.join(&name).display());
    if c.verify {
        let lit = weil_core::xi_oracle::LITERATURE_ZEROS;
        for (k, text) in lit.iter().enumerate().take(table.len()) {
            let expected = weil_core::PrecisionContext::from_digits(c.digits)?.parse(text)?;
            let d = rug_diff(&table.entries[k].value, &expected);
            if d > 1e-28 {
                return Err(Error::IdentityViolation(format!(
                    "zero {} differs from the literature value by {d:e}",
                    k + 1
                )));
            }
        }
        println!("  [ok] agreement with the literature fixture");
    }
    Ok(())
}

fn rug_diff(a: &weil_core::MpReal, b: &weil_core::MpReal) -> f64 {
    weil_core::MpReal::with_val(a.prec(), a - b).abs().to_f64()
}

fn cmd_compare(args: &CompareArgs) -> Result<(), Error> {
    let c = &args.common;
    let table = zeros(args.zeros, c.digits, c.cache.as_deref(), c.exec())?;
    let rows: Vec<usize> = (1..=args.zeros).collect();
    let mut records = Vec::new();
    let mut figure = String::new();
    for lambda in &args.lambda {
        let config = c.config(lambda.clone(), args.n_max);
        let run = spectrum_run(&config)?;
        if c.verify {
            println!("invariants for lambda={lambda}:");
            report_checks(&verify_run(&run))?;
        }
        let cmp = compare(&run.spectrum, &table, &rows);
        println!("lambda={lambda} N={}", args.n_max);
        for r in &cmp {
            println!("  {:>3}  {}", r.k, r.diff_sci());
        }
        figure.push_str(&format!("# lambda={lambda}\n"));
        figure.push_str(&figure_csv(&cmp));
        figure.push('\n');
        records.extend(cmp.iter().map(|r| (lambda.to_string(), ComparisonRecord::from(r))));
    }
    let name = match c.format {
        Format::Csv => {
            let name = "comparison.csv".to_string();
            let mut w = c.create(&name)?;
            writeln!(w, "lambda,k,zero,eigenvalue,diff")?;
            for (lambda, r) in &records {
                writeln!(w, "{lambda},{},{},{},{}", r.k, r.zero, r.eigenvalue, r.diff)?;
            }
            name
        }
        Format::Json => {
            let name = "comparison.json".to_string();
            let json: Vec<serde_json::Value> = records
                .iter()
                .map(|(lambda, r)| {
                    let mut v = serde_json::to_value(r).expect("plain record");
                    v["lambda"] = serde_json::Value::String(lambda.clone());
                    v
                })
                .collect();
            serde_json::to_writer_pretty(c.create(&name)?, &json)?;
            name
        }
    };
    let mut w = c.create("figure.csv")?;
    w.write_all(figure.as_bytes())?;
    println!(
        "wrote {} and {}",
        c.out.join(&name).display(),
        c.out.join("figure.csv").display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Assemble(a) => cmd_assemble(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
