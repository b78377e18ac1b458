//! Pipeline configuration and the study-condition modes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::correlate::{ConvBackend, DEFAULT_FFT_CROSSOVER};
use crate::error::{Error, Result};
use crate::kernel_raster::TextStyle;
use crate::lyric_text::GroupingConfig;
use crate::media_ingest::DEFAULT_CUT_THRESHOLD;
use crate::placement::{AnchorMode, EnergyWeights, PlacementConfig};
use crate::render_plan::{AnimationSpec, WordHighlight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Full,
    /// Subtitle-style: no line breaks, no highlighting, bottom-center.
    Baseline,
    /// No line breaks, no highlighting, no contrast term.
    ReadabilityAblated,
    /// No focus, foreground, or previous-phrase terms.
    AttentionAblated,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Baseline => "baseline",
            Mode::ReadabilityAblated => "readability_ablated",
            Mode::AttentionAblated => "attention_ablated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub fps: f64,
    pub weights: EnergyWeights<f64>,
    pub grouping: GroupingConfig,
    pub line_breaking: bool,
    pub style: TextStyle,
    pub animation: AnimationSpec,
    pub anchor_mode: AnchorMode,
    pub cut_threshold: f64,
    pub surround_margin: usize,
    pub normalize_terms: bool,
    /// Bottom margin of the baseline's fixed position, in pixels.
    pub baseline_margin: usize,
    pub fft_crossover: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Full,
            fps: 25.0,
            weights: EnergyWeights::default(),
            grouping: GroupingConfig::default(),
            line_breaking: true,
            style: TextStyle::default(),
            animation: AnimationSpec::default(),
            anchor_mode: AnchorMode::UpperLeft,
            cut_threshold: DEFAULT_CUT_THRESHOLD,
            surround_margin: 2,
            normalize_terms: true,
            baseline_margin: 16,
            fft_crossover: DEFAULT_FFT_CROSSOVER,
        }
    }
}

impl PipelineConfig {
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&bytes)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Applies the overrides of the selected mode. `Full` is the identity.
    pub fn apply_mode(&self) -> PipelineConfig {
        let mut cfg = self.clone();
        match cfg.mode {
            Mode::Full => {}
            Mode::Baseline => {
                cfg.line_breaking = false;
                cfg.animation.word_highlight = WordHighlight::None;
            }
            Mode::ReadabilityAblated => {
                cfg.line_breaking = false;
                cfg.animation.word_highlight = WordHighlight::None;
                cfg.weights.cnt = 0.0;
            }
            Mode::AttentionAblated => {
                cfg.weights.fcs = 0.0;
                cfg.weights.fgd = 0.0;
                cfg.weights.prv = 0.0;
            }
        }
        cfg
    }

    /// Bottom margin when placement is pinned to bottom-center.
    pub fn forced_bottom_center(&self) -> Option<usize> {
        (self.mode == Mode::Baseline).then_some(self.baseline_margin)
    }

    pub fn placement(&self) -> PlacementConfig {
        PlacementConfig {
            anchor: self.anchor_mode,
            surround_margin: self.surround_margin,
            normalize: self.normalize_terms,
            backend: ConvBackend::Auto {
                crossover: self.fft_crossover,
            },
            text_color: self.style.color,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "fps must be > 0, got {}",
                self.fps
            )));
        }
        if !(self.cut_threshold > 0.0 && self.cut_threshold <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "cut_threshold must be in (0, 1], got {}",
                self.cut_threshold
            )));
        }
        self.weights.validate()?;
        if self.forced_bottom_center().is_none()
            && self.weights.as_array().iter().all(|&w| w == 0.0)
        {
            return Err(Error::InvalidInput(
                "at least one energy weight must be positive".into(),
            ));
        }
        self.grouping.validate()?;
        self.style.validate()?;
        self.animation.validate()
    }
}
