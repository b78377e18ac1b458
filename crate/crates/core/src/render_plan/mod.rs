//! Render plan assembly and its emitters (JSON, ASS karaoke, composited frames).

mod ass;
mod overlay;

pub use ass::{ass_timestamp, emit_ass, karaoke_durations};
pub use overlay::{composite_frame, plan_layouts, render_overlay_frames, write_overlay_pngs};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::PixelCoord;
use crate::kernel_raster::TextStyle;
use crate::lyric_text::LyricPhrase;
use crate::placement::TermValues;

pub const PLAN_FORMAT: &str = "lyricvid-render-plan";
pub const PLAN_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhraseAnimation {
    Fade,
    SlideUp,
    SlideDown,
    FadeSlideUp,
    FadeSlideDown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordHighlight {
    Fade,
    SlideUp,
    SlideDown,
    AccentColor,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnimationSpec {
    pub phrase_in_out: PhraseAnimation,
    pub word_highlight: WordHighlight,
    pub accent: [u8; 3],
    /// Extra display time before and after each phrase, in seconds.
    pub pad_s: f64,
}

impl Default for AnimationSpec {
    fn default() -> Self {
        Self {
            phrase_in_out: PhraseAnimation::Fade,
            word_highlight: WordHighlight::SlideUp,
            accent: [255, 210, 0],
            pad_s: 0.2,
        }
    }
}

impl AnimationSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.pad_s >= 0.0 && self.pad_s.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "pad_s must be ≥ 0, got {}",
                self.pad_s
            )));
        }
        Ok(())
    }
}

/// Seconds serialized with exactly three fractional digits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Seconds(pub f64);

impl Serialize for Seconds {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n: serde_json::Number = format!("{:.3}", self.0)
            .parse()
            .map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Seconds {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Seconds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VideoMeta {
    pub width: usize,
    pub height: usize,
    pub fps: f64,
    pub frame_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannedWord {
    pub text: String,
    pub t_in: Seconds,
    pub t_out: Seconds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergySummary {
    pub fcs: f64,
    pub fgd: f64,
    pub cnt: f64,
    pub prv: f64,
    pub combined: f64,
}

impl EnergySummary {
    pub fn new(terms: TermValues<f64>, combined: f64) -> Self {
        Self {
            fcs: terms.fcs,
            fgd: terms.fgd,
            cnt: terms.cnt,
            prv: terms.prv,
            combined,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannedPhrase {
    pub index: usize,
    pub lines: Vec<String>,
    pub x: usize,
    pub y: usize,
    pub t_in: Seconds,
    pub t_out: Seconds,
    pub display_in: Seconds,
    pub display_out: Seconds,
    pub shot_index: usize,
    pub kernel_width: usize,
    pub kernel_height: usize,
    pub words: Vec<PlannedWord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergySummary>,
}

impl PlannedPhrase {
    pub fn position(&self) -> PixelCoord {
        PixelCoord::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderPlan {
    pub format: String,
    pub version: u32,
    pub mode: String,
    pub video: VideoMeta,
    pub style: TextStyle,
    pub animation: AnimationSpec,
    pub phrases: Vec<PlannedPhrase>,
}

/// A phrase after placement, with what the plan needs from stage 2.
#[derive(Debug, Clone)]
pub struct PlacedPhrase {
    pub phrase: LyricPhrase,
    pub kernel_dims: (usize, usize),
    pub energy: Option<EnergySummary>,
}

pub fn assemble_plan(
    placed: &[PlacedPhrase],
    style: &TextStyle,
    anim: &AnimationSpec,
    video: VideoMeta,
    mode: &str,
) -> Result<RenderPlan> {
    anim.validate()?;
    let mut order: Vec<usize> = (0..placed.len()).collect();
    order.sort_by(|&a, &b| placed[a].phrase.t_in.total_cmp(&placed[b].phrase.t_in));

    let mut phrases = Vec::with_capacity(placed.len());
    for (index, &i) in order.iter().enumerate() {
        let p = &placed[i];
        let pos = p.phrase.placement.ok_or(Error::UnplacedPhrase(i))?;
        let (kw, kh) = p.kernel_dims;
        if kw > video.width
            || kh > video.height
            || pos.x > video.width - kw
            || pos.y > video.height - kh
        {
            return Err(Error::Phrase {
                phrase: i,
                text: p.phrase.text(),
                message: format!("placement ({}, {}) leaves the valid region", pos.x, pos.y),
            });
        }
        phrases.push(PlannedPhrase {
            index,
            lines: p.phrase.lines.clone(),
            x: pos.x,
            y: pos.y,
            t_in: Seconds(p.phrase.t_in),
            t_out: Seconds(p.phrase.t_out),
            display_in: Seconds((p.phrase.t_in - anim.pad_s).max(0.0)),
            display_out: Seconds(p.phrase.t_out + anim.pad_s),
            shot_index: p.phrase.shot_index,
            kernel_width: kw,
            kernel_height: kh,
            words: p
                .phrase
                .words
                .iter()
                .map(|w| PlannedWord {
                    text: w.text.clone(),
                    t_in: Seconds(w.t_in),
                    t_out: Seconds(w.t_out),
                })
                .collect(),
            energy: p.energy,
        });
    }
    Ok(RenderPlan {
        format: PLAN_FORMAT.to_string(),
        version: PLAN_VERSION,
        mode: mode.to_string(),
        video,
        style: style.clone(),
        animation: anim.clone(),
        phrases,
    })
}

/// Pretty-printed JSON with a trailing newline.
pub fn emit_json(plan: &RenderPlan) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(plan)?;
    out.push(b'\n');
    Ok(out)
}

pub fn parse_json(bytes: &[u8]) -> Result<RenderPlan> {
    let plan: RenderPlan = serde_json::from_slice(bytes)?;
    if plan.format != PLAN_FORMAT || plan.version != PLAN_VERSION {
        return Err(Error::InvalidInput(format!(
            "unsupported plan format {:?} version {}",
            plan.format, plan.version
        )));
    }
    Ok(plan)
}
