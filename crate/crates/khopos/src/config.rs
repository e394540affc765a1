//! Run configuration shared by the CLI binary and the examples.

use crate::cube::ComputeBudget;
use crate::error::{Error, Result};
use crate::linalg::CoefficientRing;
use crate::table::Window;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Table,
    Csv,
}

impl OutputFormat {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "json" => Ok(OutputFormat::Json),
            "table" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Parse(format!(
                "unknown output format '{other}' (expected json, table or csv)"
            ))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Table => "table",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub ring: CoefficientRing,
    pub window: Window,
    pub budget: ComputeBudget,
    /// Explicit worker count; None defers to KHOPOS_WORKERS, then to rayon.
    pub workers: Option<usize>,
    pub format: OutputFormat,
}

impl Default for JobConfig {
    fn default() -> Self {
        Self {
            ring: CoefficientRing::Z,
            window: Window::Full,
            budget: ComputeBudget::default(),
            workers: None,
            format: OutputFormat::Json,
        }
    }
}

impl JobConfig {
    pub fn validate(&self) -> Result<()> {
        if self.budget.max_states_per_level == 0 || self.budget.max_matrix_nonzeros == 0 {
            return Err(Error::Precondition("budgets must be positive".into()));
        }
        if let Window::Range(lo, hi) = self.window {
            if lo > hi {
                return Err(Error::Precondition(format!(
                    "window [{lo}, {hi}] is not well-ordered"
                )));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Precondition("worker count must be positive".into()));
        }
        Ok(())
    }

    pub fn effective_workers(&self) -> Result<Option<usize>> {
        if self.workers.is_some() {
            return Ok(self.workers);
        }
        match std::env::var("KHOPOS_WORKERS") {
            Ok(raw) => {
                let n: usize = raw.parse().map_err(|_| {
                    Error::Parse(format!(
                        "KHOPOS_WORKERS must be a positive integer, got '{raw}'"
                    ))
                })?;
                if n == 0 {
                    return Err(Error::Parse(
                        "KHOPOS_WORKERS must be a positive integer, got '0'".into(),
                    ));
                }
                Ok(Some(n))
            }
            Err(_) => Ok(None),
        }
    }

    /// Pins the global thread pool to the configured width. Once another pool
    /// is installed the call is a no-op, which keeps repeated invocations in
    /// one process harmless.
    pub fn install_workers(&self) -> Result<()> {
        self.validate()?;
        if let Some(n) = self.effective_workers()? {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
        Ok(())
    }
}
