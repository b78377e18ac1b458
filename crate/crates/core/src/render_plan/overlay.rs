//! Composites planned text onto frames, with the foreground drawn over it.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::{RenderPlan, WordHighlight};
use crate::error::{Error, Result};
use crate::grid::{Frame, MaskFrame};
use crate::kernel_raster::{layout_phrase, TextLayout};
use crate::scalar::Scalar;

/// Re-rasterizes every planned phrase with the plan's style.
pub fn plan_layouts(plan: &RenderPlan) -> Result<Vec<TextLayout<f64>>> {
    plan.phrases
        .iter()
        .map(|p| {
            let layout = layout_phrase::<f64>(&p.lines, &plan.style)?;
            if layout.kernel.dims() != (p.kernel_width, p.kernel_height) {
                return Err(Error::InvalidInput(format!(
                    "phrase {} rasterizes to {:?}, plan says {}x{}",
                    p.index,
                    layout.kernel.dims(),
                    p.kernel_width,
                    p.kernel_height
                )));
            }
            Ok(layout)
        })
        .collect()
}

/// Composites every phrase active at `frame_index`.
///
/// Text is alpha-blended with its coverage, then the foreground mask puts
/// the original pixels back on top: `s·frame + (1 − s)·text`.
pub fn composite_frame<M: Scalar>(
    plan: &RenderPlan,
    layouts: &[TextLayout<f64>],
    frame_index: usize,
    frame: &Frame,
    foreground: &MaskFrame<M>,
) -> Frame {
    let t = frame_index as f64 / plan.video.fps;
    let active: Vec<usize> = plan
        .phrases
        .iter()
        .enumerate()
        .filter(|(_, p)| p.display_in.0 <= t && t < p.display_out.0)
        .map(|(i, _)| i)
        .collect();
    if active.is_empty() {
        return frame.clone();
    }

    let (w, h) = frame.dims();
    let style_color = plan.style.color.map(f64::from);
    let accent = plan.animation.accent.map(f64::from);
    let mut out = frame.clone();
    let mut text_layer: Vec<[f64; 3]> = frame.pixels().iter().map(|px| px.map(f64::from)).collect();
    let mut touched = vec![false; w * h];

    for i in active {
        let phrase = &plan.phrases[i];
        let layout = &layouts[i];
        let sung = match plan.animation.word_highlight {
            WordHighlight::AccentColor => phrase
                .words
                .iter()
                .position(|wd| wd.t_in.0 <= t && t < wd.t_out.0),
            _ => None,
        };
        let coverage = layout.kernel.coverage();
        for ky in 0..coverage.height() {
            let fy = phrase.y + ky;
            if fy >= h {
                break;
            }
            for kx in 0..coverage.width() {
                let fx = phrase.x + kx;
                if fx >= w {
                    break;
                }
                let alpha = coverage.get(kx, ky);
                if alpha <= 0.0 {
                    continue;
                }
                let color = match sung {
                    Some(wi) if layout.words.get(wi).is_some_and(|b| b.contains(kx, ky)) => accent,
                    _ => style_color,
                };
                let idx = fy * w + fx;
                let px = &mut text_layer[idx];
                for c in 0..3 {
                    px[c] = alpha * color[c] + (1.0 - alpha) * px[c];
                }
                touched[idx] = true;
            }
        }
    }

    for (idx, _) in touched.iter().enumerate().filter(|(_, t)| **t) {
        let (x, y) = (idx % w, idx / w);
        let s = foreground.get(x, y).to_f64_lossy().clamp(0.0, 1.0);
        let orig = frame.get(x, y);
        let text = text_layer[idx];
        let px: [u8; 3] = std::array::from_fn(|c| {
            (s * f64::from(orig[c]) + (1.0 - s) * text[c])
                .round()
                .clamp(0.0, 255.0) as u8
        });
        out.set(x, y, px);
    }
    out
}

pub fn render_overlay_frames<M: Scalar>(
    plan: &RenderPlan,
    frames: &[Frame],
    foreground: &[MaskFrame<M>],
    layouts: &[TextLayout<f64>],
) -> Result<Vec<Frame>> {
    if frames.len() != foreground.len() {
        return Err(Error::InvalidInput(format!(
            "{} frames but {} foreground masks",
            frames.len(),
            foreground.len()
        )));
    }
    if layouts.len() != plan.phrases.len() {
        return Err(Error::InvalidInput(format!(
            "{} layouts for {} planned phrases",
            layouts.len(),
            plan.phrases.len()
        )));
    }
    for (i, (f, m)) in frames.iter().zip(foreground).enumerate() {
        if f.dims() != m.dims() || f.dims() != (plan.video.width, plan.video.height) {
            return Err(Error::DimensionMismatch {
                what: format!("overlay frame {i}"),
                expected: (plan.video.width, plan.video.height),
                found: if f.dims() != m.dims() {
                    m.dims()
                } else {
                    f.dims()
                },
            });
        }
    }
    Ok(frames
        .par_iter()
        .zip(foreground)
        .enumerate()
        .map(|(i, (f, m))| composite_frame(plan, layouts, i, f, m))
        .collect())
}

/// Writes `%06d.png` into `dir`, creating it if needed.
pub fn write_overlay_pngs(dir: &Path, frames: &[Frame]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    frames.par_iter().enumerate().try_for_each(|(i, f)| {
        let path = dir.join(format!("{i:06}.png"));
        let raw: Vec<u8> = f.pixels().iter().flatten().copied().collect();
        image::save_buffer(
            &path,
            &raw,
            f.width() as u32,
            f.height() as u32,
            image::ExtendedColorType::Rgb8,
        )
        .map_err(|source| Error::Image { path, source })
    })
}
