//! Shared CLI plumbing: error-to-exit-code mapping, scenario validation,
//! and platform/cost config loading.

use std::fmt;
use std::path::Path;

use pimring_core::pimsim::{CostTable, DpuModel, KernelKind, MulPreset, PlatformModel, Strategy};

pub const EXIT_VERIFICATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_PLANNING: u8 = 3;

/// Failures mapped onto the documented exit codes:
/// 0 success, 1 verification failure, 2 usage error, 3 planning/capacity.
#[derive(Debug)]
pub enum CliError {
    Verification(String),
    Usage(String),
    Planning(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => EXIT_VERIFICATION,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Planning(_) => EXIT_PLANNING,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Verification(msg) | CliError::Usage(msg) | CliError::Planning(msg) => {
                f.write_str(msg)
            }
        }
    }
}

pub const STANDARD_LENGTHS: [usize; 4] = [1024, 2048, 4096, 8192];

/// Powers of two are accepted; non-standard lengths get a warning.
pub fn checked_poly_len(n: usize) -> Result<usize, CliError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(CliError::Usage(format!(
            "polynomial length {n} must be a power of two >= 2"
        )));
    }
    if !STANDARD_LENGTHS.contains(&n) {
        eprintln!("warning: n = {n} is outside the standard set {STANDARD_LENGTHS:?}");
    }
    Ok(n)
}

pub fn parse_preset_list(text: &str) -> Result<Vec<MulPreset>, CliError> {
    text.split(',')
        .map(|s| {
            MulPreset::parse(s.trim()).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown preset '{s}'; expected default, dummy, or optimistic"
                ))
            })
        })
        .collect()
}

pub fn parse_phase_list(text: &str) -> Result<Vec<KernelKind>, CliError> {
    text.split([',', '+'])
        .map(|s| {
            KernelKind::parse(s.trim()).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown phase '{s}'; expected ntt, intt, mul, add, or bgvmul"
                ))
            })
        })
        .collect()
}

pub fn parse_strategy(text: &str) -> Result<Option<Strategy>, CliError> {
    match text {
        "auto" => Ok(None),
        "parallel" => Ok(Some(Strategy::ModulusParallel)),
        "sequential" => Ok(Some(Strategy::ModulusSequential)),
        other => Err(CliError::Usage(format!(
            "unknown strategy '{other}'; expected auto, parallel, or sequential"
        ))),
    }
}

/// Applies one key=value config file to all three model structs.
pub fn load_config(
    path: &Path,
    model: &mut DpuModel,
    cost: &mut CostTable,
    platform: &mut PlatformModel,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    model
        .apply_config(&text)
        .and_then(|_| cost.apply_config(&text))
        .and_then(|_| platform.apply_config(&text))
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
