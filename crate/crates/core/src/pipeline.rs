// SPDX-License-Identifier: Apache-2.0

//! Source text to check model in one call.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elab::{self, ElabError, ElabOptions, ElaboratedDesign, NbStallMode};
use crate::lang::{self, DesignAst, Diagnostic};
use crate::wrappers::{self, CheckModel, DeadlockOptions, EnvValid, InvalidInputOptions, ModelKind, WrapperError};

/// Model-construction settings that a report echoes back.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    pub nb_stall_cycles: u64,
    pub nb_stall_mode: NbStallMode,
    pub env_valid: EnvValid,
    pub strict_input_ready: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        let e = ElabOptions::default();
        CheckConfig {
            nb_stall_cycles: e.nb_stall_cycles,
            nb_stall_mode: e.nb_stall_mode,
            env_valid: EnvValid::default(),
            strict_input_ready: false,
        }
    }
}

impl CheckConfig {
    pub fn elab_options(&self) -> ElabOptions {
        ElabOptions { nb_stall_cycles: self.nb_stall_cycles, nb_stall_mode: self.nb_stall_mode }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{} error(s); first: {}", .0.len(), .0.first().map(|d| d.to_string()).unwrap_or_default())]
    Parse(Vec<Diagnostic>),
    #[error(transparent)]
    Elab(#[from] ElabError),
    #[error(transparent)]
    Wrapper(#[from] WrapperError),
}

pub fn parse_and_elaborate(source: &str, cfg: &CheckConfig) -> Result<(DesignAst, ElaboratedDesign), PipelineError> {
    let ast = lang::parse(source).map_err(PipelineError::Parse)?;
    let elab = elab::elaborate(&ast, &cfg.elab_options())?;
    Ok((ast, elab))
}

pub fn build_model(elab: &ElaboratedDesign, kind: ModelKind, cfg: &CheckConfig) -> Result<CheckModel, WrapperError> {
    match kind {
        ModelKind::InvalidInput => wrappers::build_invalid_input_model(
            elab,
            &InvalidInputOptions { strict_input_ready: cfg.strict_input_ready, swap_roles: false },
        ),
        ModelKind::Deadlock => wrappers::build_deadlock_model(elab, &DeadlockOptions { env_valid: cfg.env_valid }),
    }
}

pub fn build_check_model(source: &str, kind: ModelKind, cfg: &CheckConfig) -> Result<CheckModel, PipelineError> {
    let (_, elab) = parse_and_elaborate(source, cfg)?;
    Ok(build_model(&elab, kind, cfg)?)
}
