//! Correctness self-checks: round-trip, convolution-oracle, and
//! CRT-homomorphism suites with reproducible per-trial seeds.

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pimring_core::modarith::{mod_add, mod_mul};
use pimring_core::ntt::{build_twiddles, ntt_forward, ntt_inverse, TwiddleTable};
use pimring_core::polyring::schoolbook_negacyclic_mul;
use pimring_core::rns::{build_base, default_coeff_bits, RnsBase};
use pimring_core::{Domain, SubPolynomial};

use crate::scenario::{checked_poly_len, CliError};

#[derive(Args)]
pub struct VerifyArgs {
    /// Polynomial length (power of two)
    #[arg(long, default_value_t = 2048)]
    n: usize,
    /// Total coefficient bits (defaults to the standard width for --n)
    #[arg(long)]
    bits: Option<u32>,
    /// Trials per suite
    #[arg(long, default_value_t = 25)]
    trials: u64,
    /// Base seed; trial t runs with seed + t
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Debug: corrupt one forward twiddle entry and expect a failure
    #[arg(long, hide = true)]
    corrupt_twiddle: bool,
}

struct Failure {
    suite: &'static str,
    invariant: &'static str,
    seed: u64,
    detail: String,
}

pub fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let n = checked_poly_len(args.n)?;
    let bits = args
        .bits
        .or_else(|| default_coeff_bits(n))
        .ok_or_else(|| CliError::Usage(format!("no default bits for n = {n}; pass --bits")))?;
    if args.trials == 0 {
        eprintln!("warning: --trials 0 checks nothing");
        println!("verification: PASS (vacuous, 0 trials)");
        return Ok(());
    }
    let base = build_base(n, bits).map_err(|e| CliError::Planning(e.to_string()))?;

    let mut failure: Option<Failure> = None;

    let round_trip = run_round_trip(&base, n, args.seed, args.trials, args.corrupt_twiddle);
    report("round-trip", &round_trip, args.trials);
    failure = failure.or(round_trip.err());

    // Convolution oracle is quadratic; clamp the length, not the coverage.
    let conv_n = n.min(128);
    let conv_base = if conv_n == n {
        base.clone()
    } else {
        build_base(conv_n, 27).map_err(|e| CliError::Planning(e.to_string()))?
    };
    let convolution = run_convolution(&conv_base, conv_n, args.seed, args.trials);
    report("convolution-oracle", &convolution, args.trials);
    failure = failure.or(convolution.err());

    let crt = run_crt(&base, args.seed, args.trials);
    report("crt-homomorphism", &crt, args.trials);
    failure = failure.or(crt.err());

    match failure {
        None => {
            println!("verification: PASS");
            Ok(())
        }
        Some(f) => {
            println!("verification: FAIL");
            Err(CliError::Verification(format!(
                "{} violated '{}' (reproduce with --seed {}): {}",
                f.suite, f.invariant, f.seed, f.detail
            )))
        }
    }
}

fn report(name: &str, outcome: &Result<(), Failure>, trials: u64) {
    match outcome {
        Ok(()) => println!("{name:<20} PASS ({trials} trials)"),
        Err(f) => println!(
            "{name:<20} FAIL at seed {} ({}): {}",
            f.seed, f.invariant, f.detail
        ),
    }
}

fn random_sub(base: &RnsBase, idx: usize, n: usize, rng: &mut impl Rng) -> SubPolynomial {
    let p = base.modulus(idx).p();
    SubPolynomial::new(
        base,
        idx,
        (0..n).map(|_| rng.gen_range(0..p)).collect(),
        Domain::Coefficient,
    )
    .expect("in-range residues")
}

fn run_round_trip(
    base: &RnsBase,
    n: usize,
    seed: u64,
    trials: u64,
    corrupt: bool,
) -> Result<(), Failure> {
    let mut tables: Vec<TwiddleTable> = Vec::new();
    for (i, m) in base.moduli().iter().enumerate() {
        let t = build_twiddles(m, n, i).expect("base primes support 2n");
        tables.push(if corrupt && i == 0 {
            corrupt_table(&t, m)
        } else {
            t
        });
    }
    for trial in 0..trials {
        let trial_seed = seed.wrapping_add(trial);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        for (i, table) in tables.iter().enumerate() {
            let a = random_sub(base, i, n, &mut rng);
            let back = ntt_inverse(ntt_forward(a.clone(), table).unwrap(), table).unwrap();
            if back != a {
                return Err(Failure {
                    suite: "round-trip",
                    invariant: "iNTT(NTT(a)) == a",
                    seed: trial_seed,
                    detail: format!(
                        "mismatch at modulus {}{}",
                        base.modulus(i).p(),
                        if corrupt { " (corrupted twiddle injected)" } else { "" }
                    ),
                });
            }
        }
    }
    Ok(())
}

fn corrupt_table(t: &TwiddleTable, m: &pimring_core::ResidueModulus) -> TwiddleTable {
    let mut forward = t.forward().to_vec();
    forward[1] = (forward[1] + 1) % m.p();
    TwiddleTable::from_raw_parts(
        *m,
        t.modulus_index(),
        forward,
        t.inverse_scrambled().to_vec(),
        t.n_inv(),
    )
    .expect("still structurally valid")
}

fn run_convolution(base: &RnsBase, n: usize, seed: u64, trials: u64) -> Result<(), Failure> {
    let m = base.modulus(0);
    let table = build_twiddles(m, n, 0).unwrap();
    for trial in 0..trials {
        let trial_seed = seed.wrapping_add(trial);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let a = random_sub(base, 0, n, &mut rng);
        let b = random_sub(base, 0, n, &mut rng);
        let want = schoolbook_negacyclic_mul(&a, &b, m).unwrap();
        let fa = ntt_forward(a, &table).unwrap();
        let fb = ntt_forward(b, &table).unwrap();
        let slots: Vec<u32> = fa
            .coeffs()
            .iter()
            .zip(fb.coeffs())
            .map(|(&x, &y)| mod_mul(x, y, m))
            .collect();
        let prod = SubPolynomial::new(base, 0, slots, Domain::NttBitReversed).unwrap();
        let got = ntt_inverse(prod, &table).unwrap();
        if got != want {
            return Err(Failure {
                suite: "convolution-oracle",
                invariant: "iNTT(NTT(A) o NTT(B)) == schoolbook product",
                seed: trial_seed,
                detail: format!("mismatch at n = {n}"),
            });
        }
    }
    Ok(())
}

fn run_crt(base: &RnsBase, seed: u64, trials: u64) -> Result<(), Failure> {
    use num_bigint::BigUint;
    let big = base.big_modulus();
    for trial in 0..trials {
        let trial_seed = seed.wrapping_add(trial);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let mut draw = || -> BigUint {
            let bytes: Vec<u8> = (0..big.bits().div_ceil(8) + 8).map(|_| rng.gen()).collect();
            BigUint::from_bytes_le(&bytes) % big
        };
        let x = draw();
        let y = draw();
        let xs = base.decompose(&x).unwrap();
        let ys = base.decompose(&y).unwrap();
        if base.reconstruct(&xs).unwrap() != x {
            return Err(Failure {
                suite: "crt-homomorphism",
                invariant: "reconstruct(decompose(x)) == x",
                seed: trial_seed,
                detail: "round-trip mismatch".into(),
            });
        }
        let add: Vec<u32> = xs
            .iter()
            .zip(&ys)
            .zip(base.moduli())
            .map(|((&a, &b), m)| mod_add(a, b, m))
            .collect();
        let mul: Vec<u32> = xs
            .iter()
            .zip(&ys)
            .zip(base.moduli())
            .map(|((&a, &b), m)| mod_mul(a, b, m))
            .collect();
        if base.decompose(&((&x + &y) % big)).unwrap() != add
            || base.decompose(&(&x * &y % big)).unwrap() != mul
        {
            return Err(Failure {
                suite: "crt-homomorphism",
                invariant: "residue-wise ops match ops mod M",
                seed: trial_seed,
                detail: "homomorphism mismatch".into(),
            });
        }
    }
    Ok(())
}
