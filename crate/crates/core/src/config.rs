//! Run configuration shared by every subcommand, and the reproducible
//! result record.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::format;
use crate::pic::DEFAULT_HEIGHT_CAP_BITS;
use crate::scalars::{FieldSpec, Scalar};
use crate::skew::{AlgebraContext, DEFAULT_ORBIT_BOUND, DEFAULT_ROOT_CHECK_BOUND};

#[derive(Debug, Clone)]
pub struct Config {
    pub field: FieldSpec,
    pub q: Scalar,
    pub prec: i64,
    pub orbit_bound: i64,
    pub seed: u64,
    pub retry_budget: u32,
    pub height_cap_bits: u64,
    pub root_check_bound: u32,
}

impl Config {
    pub fn new(field: FieldSpec, q_literal: &str) -> Result<Self> {
        let q = format::parse_scalar(q_literal, field)?;
        Ok(Config {
            field,
            q,
            prec: crate::laurent::DEFAULT_PREC,
            orbit_bound: DEFAULT_ORBIT_BOUND,
            seed: 1,
            retry_budget: 32,
            height_cap_bits: DEFAULT_HEIGHT_CAP_BITS,
            root_check_bound: DEFAULT_ROOT_CHECK_BOUND,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.prec < 8 {
            return Err(Error::Unsupported("prec must be at least 8".into()));
        }
        if self.orbit_bound < 1 {
            return Err(Error::Unsupported("orbit bound must be at least 1".into()));
        }
        if self.q.field_spec() != self.field && !self.q.same_field(&Scalar::zero(self.field)) {
            return Err(Error::FieldMismatch(
                self.q.field_spec().to_string(),
                self.field.to_string(),
            ));
        }
        Ok(())
    }

    pub fn context(&self) -> Result<Arc<AlgebraContext>> {
        self.validate()?;
        AlgebraContext::with_options(
            self.q.clone(),
            self.prec,
            self.root_check_bound,
            self.orbit_bound,
            false,
        )
    }

    pub fn echo(&self) -> String {
        format!(
            "field={} q={} prec={} orbit_bound={} seed={}",
            format::field_spec_to_string(self.field),
            self.q,
            self.prec,
            self.orbit_bound,
            self.seed
        )
    }
}

/// Output of one command run: echoes the invocation so reruns are
/// byte-comparable.
#[derive(Debug, Clone)]
pub struct JobResult {
    pub command: String,
    pub config_echo: String,
    pub output: String,
    pub status: i32,
}

impl JobResult {
    pub fn ok(command: impl Into<String>, config: &Config, output: String) -> Self {
        JobResult {
            command: command.into(),
            config_echo: config.echo(),
            output,
            status: 0,
        }
    }

    pub fn render(&self) -> String {
        format!(
            "# command: {}\n# config: {}\n{}",
            self.command, self.config_echo, self.output
        )
    }
}
