mod scenario;
mod svg;
mod sweep;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pimring_core::modarith::barrett_factor;
use pimring_core::ntt::twiddles_for_base;
use pimring_core::rns::{build_base, default_coeff_bits};

use scenario::CliError;

#[derive(Parser)]
#[command(
    name = "pimring",
    version,
    about = "RNS/NTT polynomial arithmetic with a DPU platform cost model",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate and print an RNS base (primes, Barrett factors, roots)
    Params(ParamsArgs),
    /// Run the correctness self-check suites
    Verify(verify::VerifyArgs),
    /// Run a scaling sweep over the platform cost model and emit CSV
    Sweep(sweep::SweepArgs),
}

#[derive(Args)]
struct ParamsArgs {
    /// Polynomial length (power of two)
    #[arg(long)]
    n: usize,
    /// Total coefficient bits (defaults to the standard width for --n)
    #[arg(long)]
    bits: Option<u32>,
    /// Write the base as a key=value config file
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Params(args) => cmd_params(args),
        Cmd::Verify(args) => verify::cmd_verify(args),
        Cmd::Sweep(args) => sweep::cmd_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn cmd_params(args: ParamsArgs) -> Result<(), CliError> {
    let n = scenario::checked_poly_len(args.n)?;
    let bits = match args.bits.or_else(|| default_coeff_bits(n)) {
        Some(b) => b,
        None => {
            return Err(CliError::Usage(format!(
                "no default coefficient width for n = {n}; pass --bits"
            )))
        }
    };
    let base = build_base(n, bits).map_err(|e| match e {
        pimring_core::Error::PrimeExhausted { two_n, bit_size } => CliError::Planning(format!(
            "prime pool exhausted: too few primes p = 1 (mod {two_n}) with {bit_size} bits; \
             NTT-friendly moduli thin out as the polynomial grows, which is why residues \
             are 32-bit words rather than 16-bit"
        )),
        other => CliError::Usage(other.to_string()),
    })?;
    let tables = twiddles_for_base(&base, n).map_err(|e| CliError::Planning(e.to_string()))?;

    println!("n = {n}");
    println!("coefficient bits = {bits}");
    println!("moduli = {}", base.len());
    println!("big modulus M = {} ({} bits)", base.big_modulus(), base.big_modulus().bits());
    for (i, (m, t)) in base.moduli().iter().zip(&tables).enumerate() {
        println!(
            "modulus[{i}]: p = {}, barrett = {}, psi = {}, n_inv = {}",
            m.p(),
            barrett_factor(m.p()),
            t.psi(),
            t.n_inv()
        );
    }

    if let Some(path) = args.config {
        let mut text = String::new();
        text.push_str(&format!("n={n}\nbits={bits}\n"));
        text.push_str(&base.to_config_string());
        std::fs::write(&path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        println!("base written to {}", path.display());
    }
    Ok(())
}
