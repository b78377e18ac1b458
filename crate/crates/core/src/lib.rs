//! Lyric video layout engine.
//!
//! Turns word-level lyric timings, video frames, and attention masks into a
//! render plan: words are grouped into phrases and broken into balanced
//! lines, each phrase is placed at the argmin of a weighted sum of energy
//! maps (focus distance, foreground overlap, background contrast, distance
//! to the previous phrase), and the plan is emitted as JSON, ASS karaoke
//! subtitles, or composited PNG frames.
//!
//! The raster and placement math is generic over [`Scalar`] (`f32`/`f64`);
//! the `*F64`/`*F32` aliases below name the concrete instantiations.

pub mod config;
pub mod correlate;
pub mod error;
pub mod font;
pub mod grid;
pub mod kernel_raster;
pub mod lyric_text;
pub mod media_ingest;
pub mod pipeline;
pub mod placement;
pub mod render_plan;
pub mod scalar;

pub use config::{Mode, PipelineConfig};
pub use correlate::{cross_correlate, ConvBackend};
pub use error::{Error, Result};
pub use grid::{Frame, Grid, MaskFrame, PixelCoord};
pub use kernel_raster::{layout_phrase, pad_kernel, rasterize_phrase, TextKernel, TextStyle};
pub use lyric_text::{GroupingConfig, LyricPhrase, WordTiming};
pub use media_ingest::{PhraseContext, Sequence, Shot};
pub use placement::{AnchorMode, CostMap, EnergyWeights, PlacementConfig, PlacementResult};
pub use render_plan::{AnimationSpec, RenderPlan};
pub use scalar::Scalar;

pub type CostMapF64 = CostMap<f64>;
pub type CostMapF32 = CostMap<f32>;
pub type MaskFrameF64 = MaskFrame<f64>;
pub type MaskFrameF32 = MaskFrame<f32>;
pub type TextKernelF64 = TextKernel<f64>;
pub type TextKernelF32 = TextKernel<f32>;
pub type EnergyWeightsF64 = EnergyWeights<f64>;
pub type EnergyWeightsF32 = EnergyWeights<f32>;
pub type PhraseContextF64 = PhraseContext<f64>;
pub type PhraseContextF32 = PhraseContext<f32>;
pub type PlacementResultF64 = PlacementResult<f64>;
pub type PlacementResultF32 = PlacementResult<f32>;
