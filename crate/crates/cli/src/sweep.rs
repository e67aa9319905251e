//! Scaling sweeps over the cost model, emitted as versioned CSV rows
//! (one per sweep point and preset) plus an optional SVG chart.

use std::path::PathBuf;

use clap::Args;

use pimring_core::pimsim::{
    auto_strategy, plan_work, simulate, CostTable, DpuModel, MulPreset, PlatformModel,
    SimReport, Strategy,
};
use pimring_core::rns::{build_base, default_coeff_bits};

use crate::scenario::{
    checked_poly_len, load_config, parse_phase_list, parse_preset_list, parse_strategy, CliError,
    STANDARD_LENGTHS,
};
use crate::svg;

pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "schema,axis,point,n,bits,k,ciphertexts,dpus,ranks,strategy,\
preset,phases,compute_seconds,transfer_seconds,retrieval_seconds,makespan_cycles,imbalanced,\
butterfly_overhead,speedup_vs_first_preset,error";

#[derive(Args)]
pub struct SweepArgs {
    /// Sweep axis: ciphertexts, dpus, or n
    #[arg(long, default_value = "ciphertexts")]
    axis: String,
    /// Polynomial length (fixed unless axis = n)
    #[arg(long, default_value_t = 4096)]
    n: usize,
    /// Total coefficient bits (defaults to the standard width per length)
    #[arg(long)]
    bits: Option<u32>,
    /// Ciphertext count: the sweep maximum when axis = ciphertexts,
    /// the fixed count otherwise
    #[arg(long, default_value_t = 1024)]
    ciphertexts: u32,
    /// Usable DPUs; a comma list when axis = dpus
    #[arg(long, default_value = "128")]
    dpus: String,
    /// DPU ranks; derived from --dpus when omitted
    #[arg(long)]
    ranks: Option<u32>,
    /// Work split: auto, parallel, or sequential
    #[arg(long, default_value = "auto")]
    strategy: String,
    /// Cost-table preset(s): default, dummy, optimistic (comma list)
    #[arg(long, default_value = "default")]
    preset: String,
    /// Phase list: ntt, intt, mul, add, bgvmul (comma list)
    #[arg(long, default_value = "ntt,bgvmul,intt")]
    phases: String,
    /// Seed recorded for reproducibility (the model is deterministic)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write CSV here instead of stdout
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also render an SVG line chart of compute seconds
    #[arg(long)]
    svg: Option<PathBuf>,
    /// key=value config overriding the DPU/cost/platform models
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy)]
struct SweepPoint {
    point: u64,
    n: usize,
    bits: u32,
    ciphertexts: u32,
    dpus: u32,
    ranks: u32,
}

pub struct Row {
    pub point: u64,
    pub preset: MulPreset,
    pub report: Option<SimReport>,
    pub n: usize,
    pub bits: u32,
    pub k: usize,
    pub ciphertexts: u32,
    pub dpus: u32,
    pub ranks: u32,
    pub strategy: Option<Strategy>,
    pub error: Option<String>,
}

pub fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let mut model = DpuModel::default();
    let mut cost_base = CostTable::default();
    let mut platform_base = PlatformModel::default();
    if let Some(path) = &args.config {
        load_config(path, &mut model, &mut cost_base, &mut platform_base)?;
    }
    model
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let presets = parse_preset_list(&args.preset)?;
    let phases = parse_phase_list(&args.phases)?;
    let forced_strategy = parse_strategy(&args.strategy)?;
    let points = sweep_points(&args)?;

    let mut rows: Vec<Row> = Vec::new();
    for pt in &points {
        let k = match build_base(pt.n, pt.bits) {
            Ok(base) => base.len(),
            Err(e) => {
                rows.push(Row {
                    point: pt.point,
                    preset: presets[0],
                    report: None,
                    n: pt.n,
                    bits: pt.bits,
                    k: 0,
                    ciphertexts: pt.ciphertexts,
                    dpus: pt.dpus,
                    ranks: pt.ranks,
                    strategy: None,
                    error: Some(e.to_string()),
                });
                continue;
            }
        };
        let strategy = forced_strategy.unwrap_or_else(|| auto_strategy(pt.ranks, k));
        let mut platform = platform_base.clone();
        platform.usable_dpus = pt.dpus;
        platform.ranks = pt.ranks;
        platform.dpus_per_rank = platform_base.dpus_per_rank;

        let plan = match plan_work(pt.ciphertexts, k, &platform, strategy) {
            Ok(p) => p,
            Err(e) => {
                rows.push(Row {
                    point: pt.point,
                    preset: presets[0],
                    report: None,
                    n: pt.n,
                    bits: pt.bits,
                    k,
                    ciphertexts: pt.ciphertexts,
                    dpus: pt.dpus,
                    ranks: pt.ranks,
                    strategy: Some(strategy),
                    error: Some(e.to_string()),
                });
                continue;
            }
        };
        for &preset in &presets {
            let mut cost = cost_base.clone();
            cost.preset = preset;
            let report = simulate(&plan, &phases, pt.n, &cost, &model, &platform);
            rows.push(Row {
                point: pt.point,
                preset,
                report: Some(report),
                n: pt.n,
                bits: pt.bits,
                k,
                ciphertexts: pt.ciphertexts,
                dpus: pt.dpus,
                ranks: pt.ranks,
                strategy: Some(strategy),
                error: None,
            });
        }
    }

    let csv = render_csv(&args, &rows);
    match &args.csv {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.svg {
        let chart = svg::line_chart(&args.axis, &rows);
        std::fs::write(path, chart)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn sweep_points(args: &SweepArgs) -> Result<Vec<SweepPoint>, CliError> {
    let parse_dpus_single = |s: &str| -> Result<u32, CliError> {
        s.trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad DPU count '{s}'")))
    };
    let bits_for = |n: usize| -> Result<u32, CliError> {
        args.bits.or_else(|| default_coeff_bits(n)).ok_or_else(|| {
            CliError::Usage(format!("no default coefficient width for n = {n}; pass --bits"))
        })
    };
    let ranks_for = |dpus: u32| args.ranks.unwrap_or_else(|| dpus.div_ceil(64).max(1));

    match args.axis.as_str() {
        "ciphertexts" => {
            let n = checked_poly_len(args.n)?;
            let bits = bits_for(n)?;
            let dpus = parse_dpus_single(&args.dpus)?;
            let max = args.ciphertexts.max(1);
            let mut points = Vec::new();
            let mut c = 1u32;
            while c <= max {
                points.push(SweepPoint {
                    point: c as u64,
                    n,
                    bits,
                    ciphertexts: c,
                    dpus,
                    ranks: ranks_for(dpus),
                });
                if c > max / 2 {
                    break;
                }
                c *= 2;
            }
            Ok(points)
        }
        "dpus" => {
            let n = checked_poly_len(args.n)?;
            let bits = bits_for(n)?;
            args.dpus
                .split(',')
                .map(|s| {
                    let dpus = parse_dpus_single(s)?;
                    Ok(SweepPoint {
                        point: dpus as u64,
                        n,
                        bits,
                        ciphertexts: args.ciphertexts,
                        dpus,
                        ranks: ranks_for(dpus),
                    })
                })
                .collect()
        }
        "n" => {
            let dpus = parse_dpus_single(&args.dpus)?;
            STANDARD_LENGTHS
                .iter()
                .map(|&n| {
                    Ok(SweepPoint {
                        point: n as u64,
                        n,
                        bits: bits_for(n)?,
                        ciphertexts: args.ciphertexts,
                        dpus,
                        ranks: ranks_for(dpus),
                    })
                })
                .collect()
        }
        other => Err(CliError::Usage(format!(
            "unknown sweep axis '{other}'; expected ciphertexts, dpus, or n"
        ))),
    }
}

fn presets_first(rows: &[Row], point: u64) -> MulPreset {
    rows.iter()
        .find(|r| r.point == point && r.report.is_some())
        .map(|r| r.preset)
        .unwrap_or(MulPreset::Custom)
}

fn render_csv(args: &SweepArgs, rows: &[Row]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    let phases_label = args.phases.replace(',', "+");

    // Speed-up is reported against the first preset at the same point.
    let baseline = |point: u64| -> Option<f64> {
        rows.iter()
            .find(|r| r.point == point && r.report.is_some())
            .and_then(|r| r.report.as_ref())
            .map(|rep| rep.compute_seconds)
    };

    for row in rows {
        let (compute, transfer, retrieval, makespan, imbalanced, overhead) = match &row.report {
            Some(r) => (
                format!("{:.9}", r.compute_seconds),
                format!("{:.9}", r.transfer_seconds),
                format!("{:.9}", r.retrieval_seconds),
                r.makespan_cycles.to_string(),
                r.imbalanced.to_string(),
                r.butterfly_overhead.to_string(),
            ),
            None => Default::default(),
        };
        // Speed-up versus the first preset at the same point; the
        // baseline row itself leaves the column empty.
        let speedup = match (&row.report, baseline(row.point)) {
            (Some(r), Some(base))
                if row.preset != presets_first(rows, row.point)
                    && base > 0.0
                    && r.compute_seconds > 0.0 =>
            {
                format!("{:.4}", base / r.compute_seconds)
            }
            _ => String::new(),
        };
        let error = row
            .error
            .as_ref()
            .map(|e| format!("\"{}\"", e.replace('"', "'")))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            CSV_SCHEMA_VERSION,
            args.axis,
            row.point,
            row.n,
            row.bits,
            row.k,
            row.ciphertexts,
            row.dpus,
            row.ranks,
            row.strategy.map(|s| s.name()).unwrap_or(""),
            row.preset.name(),
            phases_label,
            compute,
            transfer,
            retrieval,
            makespan,
            imbalanced,
            overhead,
            speedup,
            error
        ));
    }
    out
}
