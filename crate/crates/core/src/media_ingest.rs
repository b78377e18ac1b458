//! Frame and mask loading, histogram shot detection, and per-phrase averages.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Frame, Grid, MaskFrame};
use crate::scalar::Scalar;

/// Frames with aligned focus and foreground masks.
#[derive(Debug, Clone)]
pub struct Sequence<M> {
    pub frames: Vec<Frame>,
    pub focus: Vec<MaskFrame<M>>,
    pub foreground: Vec<MaskFrame<M>>,
    pub fps: f64,
}

impl<M: Scalar> Sequence<M> {
    /// Checks alignment, dimensions, and fps.
    pub fn new(
        frames: Vec<Frame>,
        focus: Vec<MaskFrame<M>>,
        foreground: Vec<MaskFrame<M>>,
        fps: f64,
    ) -> Result<Self> {
        if !(fps > 0.0 && fps.is_finite()) {
            return Err(Error::InvalidInput(format!("fps must be > 0, got {fps}")));
        }
        if frames.is_empty() {
            return Err(Error::InvalidInput("sequence has no frames".into()));
        }
        let dims = frames[0].dims();
        for (i, f) in frames.iter().enumerate() {
            check_dims(&format!("frame {i}"), dims, f.dims())?;
        }
        for (name, masks) in [("focus", &focus), ("foreground", &foreground)] {
            if masks.len() != frames.len() {
                return Err(Error::InvalidInput(format!(
                    "{name} masks: {} files for {} frames",
                    masks.len(),
                    frames.len()
                )));
            }
            for (i, m) in masks.iter().enumerate() {
                check_dims(&format!("{name} mask {i}"), dims, m.dims())?;
            }
        }
        Ok(Self {
            frames,
            focus,
            foreground,
            fps,
        })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.frames[0].dims()
    }
}

fn check_dims(what: &str, expected: (usize, usize), found: (usize, usize)) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            what: what.to_string(),
            expected,
            found,
        });
    }
    Ok(())
}

/// Where to find the frame and mask directories.
#[derive(Debug, Clone)]
pub struct SequencePaths {
    pub frames: PathBuf,
    pub focus: Option<PathBuf>,
    pub foreground: Option<PathBuf>,
}

impl SequencePaths {
    /// Mask directories default to `focus/` and `foreground/` next to the frame directory.
    pub fn with_sibling_masks(frames: impl Into<PathBuf>) -> Self {
        let frames = frames.into();
        let parent = frames.parent().map(Path::to_path_buf).unwrap_or_default();
        Self {
            focus: Some(parent.join("focus")),
            foreground: Some(parent.join("foreground")),
            frames,
        }
    }
}

/// Lists `%06d.png` files, requiring contiguous numbering from zero.
fn numbered_pngs(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut indices = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        let Some(stem) = name.strip_suffix(".png") else {
            continue;
        };
        if stem.len() == 6 && stem.bytes().all(|b| b.is_ascii_digit()) {
            indices.push(stem.parse::<usize>().expect("six digits"));
        }
    }
    indices.sort_unstable();
    for (expected, &found) in indices.iter().enumerate() {
        if found != expected {
            return Err(Error::SequenceGap {
                dir: dir.to_path_buf(),
                expected,
            });
        }
    }
    Ok(indices
        .into_iter()
        .map(|i| dir.join(format!("{i:06}.png")))
        .collect())
}

fn open_image(path: &Path) -> Result<image::DynamicImage> {
    image::open(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_frame(path: &Path) -> Result<Frame> {
    let rgb = open_image(path)?.into_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let pixels = rgb.pixels().map(|p| p.0).collect();
    Frame::new(w, h, pixels)
}

/// Loads an 8-bit grayscale mask, mapping `v` to `v / 255`.
pub fn load_mask<M: Scalar>(path: &Path) -> Result<MaskFrame<M>> {
    let gray = open_image(path)?.into_luma8();
    let (w, h) = (gray.width() as usize, gray.height() as usize);
    let scale = M::of(1.0 / 255.0);
    let values = gray
        .pixels()
        .map(|p| M::of(f64::from(p.0[0])) * scale)
        .collect();
    Grid::new(w, h, values)
}

/// Loads every `%06d.png` frame of a directory, in order.
pub fn load_frames(dir: &Path) -> Result<Vec<Frame>> {
    let files = numbered_pngs(dir)?;
    if files.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{}: no %06d.png frames",
            dir.display()
        )));
    }
    files.par_iter().map(|p| load_frame(p)).collect()
}

/// Loaded sequence plus non-fatal findings.
#[derive(Debug)]
pub struct LoadedSequence<M> {
    pub sequence: Sequence<M>,
    pub warnings: Vec<String>,
}

/// Loads frames and masks. A missing mask directory yields all-black masks.
pub fn load_sequence<M: Scalar>(paths: &SequencePaths, fps: f64) -> Result<LoadedSequence<M>> {
    if !(fps > 0.0 && fps.is_finite()) {
        return Err(Error::InvalidInput(format!("fps must be > 0, got {fps}")));
    }
    let frames = load_frames(&paths.frames)?;
    let (w, h) = frames[0].dims();

    let mut warnings = Vec::new();
    let mut load_masks = |dir: &Option<PathBuf>, name: &str| -> Result<Vec<MaskFrame<M>>> {
        match dir {
            Some(dir) if dir.is_dir() => {
                let files = numbered_pngs(dir)?;
                if files.len() != frames.len() {
                    return Err(Error::InvalidInput(format!(
                        "{}: {} {name} masks for {} frames",
                        dir.display(),
                        files.len(),
                        frames.len()
                    )));
                }
                files.par_iter().map(|p| load_mask(p)).collect()
            }
            _ => {
                warnings.push(format!("no {name} mask directory, using all-zero masks"));
                Ok(vec![Grid::filled(w, h, M::zero()); frames.len()])
            }
        }
    };
    let focus = load_masks(&paths.focus, "focus")?;
    let foreground = load_masks(&paths.foreground, "foreground")?;
    Ok(LoadedSequence {
        sequence: Sequence::new(frames, focus, foreground, fps)?,
        warnings,
    })
}

/// Half-open frame range `[start_frame, end_frame)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shot {
    pub start_frame: usize,
    pub end_frame: usize,
}

pub const DEFAULT_CUT_THRESHOLD: f64 = 0.3;
const BINS: usize = 8;

/// 8 bins per channel, concatenated and normalized to total mass 1.
pub fn color_histogram(frame: &Frame) -> [f64; 3 * BINS] {
    let mut counts = [0u64; 3 * BINS];
    for px in frame.pixels() {
        for (c, &v) in px.iter().enumerate() {
            counts[c * BINS + (v as usize >> 5)] += 1;
        }
    }
    let total = (frame.pixels().len() * 3) as f64;
    counts.map(|n| n as f64 / total)
}

/// Half the L1 distance, in `[0, 1]`.
pub fn histogram_distance(a: &[f64; 3 * BINS], b: &[f64; 3 * BINS]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Cuts between frames whose histogram distance exceeds `cut_threshold`.
pub fn detect_shots(frames: &[Frame], cut_threshold: f64) -> Result<Vec<Shot>> {
    if frames.is_empty() {
        return Err(Error::InvalidInput(
            "shot detection needs at least one frame".into(),
        ));
    }
    if !(cut_threshold > 0.0 && cut_threshold <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "cut threshold must be in (0, 1], got {cut_threshold}"
        )));
    }
    let hists: Vec<_> = frames.par_iter().map(color_histogram).collect();
    let mut shots = Vec::new();
    let mut start = 0;
    for i in 1..frames.len() {
        if histogram_distance(&hists[i - 1], &hists[i]) > cut_threshold {
            shots.push(Shot {
                start_frame: start,
                end_frame: i,
            });
            start = i;
        }
    }
    shots.push(Shot {
        start_frame: start,
        end_frame: frames.len(),
    });
    Ok(shots)
}

/// Parses an explicit boundary file of `start,end` lines and checks that the
/// shots tile `[0, frame_count)`.
pub fn parse_shot_file(text: &str, frame_count: usize) -> Result<Vec<Shot>> {
    let mut shots = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: idx + 1,
            message,
        };
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| parse_err("expected `start,end`".into()))?;
        let start: usize = a
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad start {a:?}")))?;
        let end: usize = b
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("bad end {b:?}")))?;
        if start >= end {
            return Err(parse_err(format!("empty shot {start},{end}")));
        }
        shots.push(Shot {
            start_frame: start,
            end_frame: end,
        });
    }
    validate_tiling(&shots, frame_count)?;
    Ok(shots)
}

pub fn validate_tiling(shots: &[Shot], frame_count: usize) -> Result<()> {
    let mut expected = 0;
    for s in shots {
        if s.start_frame != expected || s.end_frame <= s.start_frame {
            return Err(Error::InvalidInput(format!(
                "shots must tile the frame range: shot {}..{} where {expected} was expected",
                s.start_frame, s.end_frame
            )));
        }
        expected = s.end_frame;
    }
    if expected != frame_count {
        return Err(Error::InvalidInput(format!(
            "shots cover {expected} frames, sequence has {frame_count}"
        )));
    }
    Ok(())
}

pub fn shot_of_frame(shots: &[Shot], frame: usize) -> Option<usize> {
    shots
        .iter()
        .position(|s| s.start_frame <= frame && frame < s.end_frame)
}

/// Inclusive frame range a phrase is displayed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSpan {
    pub first: usize,
    pub last: usize,
}

impl FrameSpan {
    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

// Products like 0.3 * 10 land a hair above the integer; snap those first.
fn snapped(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r
    } else {
        v
    }
}

/// `[floor(t_in·fps), min(ceil(t_out·fps), frame_count − 1)]`.
pub fn phrase_frame_span(t_in: f64, t_out: f64, fps: f64, frame_count: usize) -> Result<FrameSpan> {
    if !(fps > 0.0 && fps.is_finite()) {
        return Err(Error::InvalidInput(format!("fps must be > 0, got {fps}")));
    }
    let first = snapped(t_in * fps).floor().max(0.0) as usize;
    if first >= frame_count {
        return Err(Error::InvalidInput(format!(
            "phrase starting at {t_in}s begins after the last frame ({frame_count} frames at {fps} fps)"
        )));
    }
    let last_raw = snapped(t_out * fps).ceil().max(0.0) as usize;
    let last = last_raw.min(frame_count - 1).max(first);
    Ok(FrameSpan { first, last })
}

/// Per-phrase averages of the attention masks and the masked background.
#[derive(Debug, Clone)]
pub struct PhraseContext<T> {
    pub avg_focus: MaskFrame<T>,
    pub avg_foreground: MaskFrame<T>,
    /// Mean of `frame · (1 − foreground)` per channel, in `[0, 255]`.
    pub avg_background: Grid<[T; 3]>,
    pub span: FrameSpan,
}

impl<T: Scalar> PhraseContext<T> {
    pub fn dims(&self) -> (usize, usize) {
        self.avg_focus.dims()
    }
}

pub fn build_phrase_context<T: Scalar, M: Scalar>(
    span: FrameSpan,
    frames: &[Frame],
    focus: &[MaskFrame<M>],
    foreground: &[MaskFrame<M>],
) -> Result<PhraseContext<T>> {
    if span.last >= frames.len() || span.last >= focus.len() || span.last >= foreground.len() {
        return Err(Error::InvalidInput(format!(
            "frame span {}..={} exceeds sequence of {} frames",
            span.first,
            span.last,
            frames.len()
        )));
    }
    let (w, h) = frames[span.first].dims();
    let n = w * h;
    let range = span.first..=span.last;
    let inv = T::one() / T::of(span.len() as f64);
    let cast = |m: M| T::from(m).unwrap_or_else(T::zero);

    let chunk = w.max(1024);
    let mut focus_sum = vec![T::zero(); n];
    let mut fgd_sum = vec![T::zero(); n];
    let mut bg_sum = vec![[T::zero(); 3]; n];
    focus_sum
        .par_chunks_mut(chunk)
        .zip(fgd_sum.par_chunks_mut(chunk))
        .zip(bg_sum.par_chunks_mut(chunk))
        .enumerate()
        .for_each(|(ci, ((fcs, fgd), bg))| {
            let base = ci * chunk;
            for f in range.clone() {
                let fcs_src = &focus[f].as_slice()[base..base + fcs.len()];
                let fgd_src = &foreground[f].as_slice()[base..base + fgd.len()];
                let px_src = &frames[f].pixels()[base..base + bg.len()];
                for i in 0..fcs.len() {
                    fcs[i] += cast(fcs_src[i]);
                    let s = cast(fgd_src[i]);
                    fgd[i] += s;
                    let keep = T::one() - s;
                    for c in 0..3 {
                        bg[i][c] += T::of(f64::from(px_src[i][c])) * keep;
                    }
                }
            }
        });

    let clamp01 = |v: T| v.max(T::zero()).min(T::one());
    let top = T::of(255.0);
    Ok(PhraseContext {
        avg_focus: Grid::new(
            w,
            h,
            focus_sum.into_iter().map(|v| clamp01(v * inv)).collect(),
        )?,
        avg_foreground: Grid::new(
            w,
            h,
            fgd_sum.into_iter().map(|v| clamp01(v * inv)).collect(),
        )?,
        avg_background: Grid::new(
            w,
            h,
            bg_sum
                .into_iter()
                .map(|px| px.map(|v| (v * inv).max(T::zero()).min(top)))
                .collect(),
        )?,
        span,
    })
}
