//! One module per suite; each returns its checks without running them.

mod decomposition;
mod divergence;
mod forelli_rudin;
mod gradient;
mod identities;
mod jacobians;
mod kernels;
mod metric;
mod oscillation;
mod representation;

use crate::check::Check;
use crate::{SuiteConfig, VerifyError};

pub fn build(config: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    Ok(match config.suite.as_str() {
        "identities" => identities::checks(config),
        "jacobians" => jacobians::checks(config),
        "forelli-rudin" => forelli_rudin::checks(config),
        "metric" => metric::checks(config),
        "gradient-laplacian" => gradient::checks(config),
        "kernels" => kernels::checks(config),
        "representation" => representation::checks(config),
        "oscillation" => oscillation::checks(config),
        "decomposition" => decomposition::checks(config),
        "divergence" => divergence::checks(config),
        other => return Err(VerifyError::Config(format!("unknown suite '{other}'"))),
    })
}

/// Seed for a sub-stream of the configured seed.
pub(crate) fn derived_seed(seed: u64, stream: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
}
