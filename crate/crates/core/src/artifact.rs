//! Offline pipeline and the versioned template file.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::PolySystem;
use crate::solver::{fill_dense, SolverTemplate};
use crate::template::{
    augment, finalize, reduce_columns, remove_excess_rows, search_detailed, CandidateBasis, ReductionTrace,
    SearchConfig, SearchOrigin,
};

pub const TEMPLATE_FORMAT: &str = "resultant-forge-template";
pub const TEMPLATE_VERSION: u64 = 1;

/// What the basis search found before reduction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub origin: SearchOrigin,
    pub evaluated: usize,
    pub accepted: usize,
    pub rows: usize,
    pub cols: usize,
    pub eigen_size: usize,
}

/// Floating-point rank of `M(λ)` on one random instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankCheck {
    pub size: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateFile {
    pub format: String,
    pub version: u64,
    pub config: SearchConfig,
    pub search: SearchSummary,
    /// Accepted basis before column pruning and row removal.
    pub unreduced: CandidateBasis,
    pub trace: ReductionTrace,
    pub template: SolverTemplate,
    pub rank_check: RankCheck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Run column pruning before squaring.
    pub reduce_columns: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { reduce_columns: true }
    }
}

/// search → column pruning → excess-row removal → finalize.
pub fn generate(sys: &PolySystem, cfg: &SearchConfig) -> Result<TemplateFile> {
    generate_with(sys, cfg, PipelineOptions::default())
}

pub fn generate_with(sys: &PolySystem, cfg: &SearchConfig, opts: PipelineOptions) -> Result<TemplateFile> {
    let outcome = search_detailed(sys, cfg)?;
    let cand = outcome.candidate.clone();
    let aug = augment(sys, cand.hidden_var)?;
    let mut trace = ReductionTrace::default();
    let mut cur = cand.clone();
    if opts.reduce_columns {
        let (c, _, t) = reduce_columns(&cur, &aug, cfg)?;
        cur = c;
        trace.extend(t);
    }
    let (c, _, t) = remove_excess_rows(&cur, &aug, cfg)?;
    cur = c;
    trace.extend(t);
    let template = finalize(&cur, &aug, cfg)?;
    let rank_check = float_rank(&template, cfg.seed)?;
    Ok(TemplateFile {
        format: TEMPLATE_FORMAT.into(),
        version: TEMPLATE_VERSION,
        config: cfg.clone(),
        search: SearchSummary {
            origin: outcome.origin,
            evaluated: outcome.evaluated,
            accepted: outcome.accepted,
            rows: cand.n_rows(),
            cols: cand.n_cols(),
            eigen_size: cand.eigen_size(),
        },
        unreduced: cand,
        trace,
        template,
        rank_check,
    })
}

/// SVD rank of `M0 + λM1` at random coefficients, tolerance `1e-8·σ_max`.
fn float_rank(tpl: &SolverTemplate, seed: u64) -> Result<RankCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xF10A7);
    let coeffs: Vec<f64> = (0..tpl.n_slots()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let lambda: f64 = rng.random_range(-1.0..1.0);
    let (m0, m1) = fill_dense(&tpl.primary, &coeffs)?;
    let m: Mat<f64> = &m0 + &m1 * faer::Scale(lambda);
    let size = m.nrows();
    if size == 0 {
        return Ok(RankCheck { size, rank: 0 });
    }
    let sv = m
        .singular_values()
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > 1e-8 * smax).count();
    Ok(RankCheck { size, rank })
}

impl TemplateFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("template serialization") + "\n"
    }

    /// Parse, rejecting foreign formats and unknown versions.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let format = value.get("format").and_then(|v| v.as_str()).unwrap_or_default();
        if format != TEMPLATE_FORMAT {
            return Err(Error::Format(format!("not a template file (format '{format}')")));
        }
        let version = value
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Format("missing version".into()))?;
        if version != TEMPLATE_VERSION {
            return Err(Error::UnsupportedVersion {
                kind: "template",
                found: version,
                expected: TEMPLATE_VERSION,
            });
        }
        let file: TemplateFile = serde_json::from_value(value)?;
        file.template.validate()?;
        Ok(file)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// `"template: inv a×a, eig b×b"`.
    pub fn summary_line(&self) -> String {
        format!(
            "template: inv {0}×{0}, eig {1}×{1}",
            self.template.inversion_size(),
            self.template.eigen_size()
        )
    }
}
