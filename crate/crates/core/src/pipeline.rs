//! Three-stage orchestration: text and video preprocessing, placement, emission.

use std::fs;
use std::path::{Path, PathBuf};

use crate::config::PipelineConfig;
use crate::correlate::valid_dims;
use crate::error::{Error, Result};
use crate::grid::{Grid, MaskFrame, PixelCoord};
use crate::kernel_raster::{layout_phrase, TextKernel};
use crate::lyric_text::{
    break_all_lines, compute_line_break_threshold, group_words_into_phrases, parse_word_timings,
    LyricPhrase, WordTiming,
};
use crate::media_ingest::{
    build_phrase_context, detect_shots, load_sequence, parse_shot_file, phrase_frame_span,
    shot_of_frame, validate_tiling, Sequence, SequencePaths, Shot,
};
use crate::placement::{energy_maps, EnergyMaps};
use crate::render_plan::{
    assemble_plan, emit_ass, emit_json, plan_layouts, render_overlay_frames, write_overlay_pngs,
    EnergySummary, PlacedPhrase, RenderPlan, VideoMeta,
};
use crate::scalar::Scalar;

/// Placement details for one phrase, in time order.
#[derive(Debug, Clone)]
pub struct PhraseReport {
    pub text: String,
    pub position: PixelCoord,
    pub shot_index: usize,
    pub energy: EnergySummary,
    /// Present when the caller asked to keep the maps.
    pub maps: Option<EnergyMaps<f64>>,
    pub kernel: TextKernel<f64>,
}

#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub plan: RenderPlan,
    pub shots: Vec<Shot>,
    pub phrases: Vec<PhraseReport>,
    pub warnings: Vec<String>,
}

fn phrase_error(index: usize, phrase: &LyricPhrase, err: Error) -> Error {
    let message = match err {
        Error::KernelTooLarge {
            kernel_w,
            kernel_h,
            image_w,
            image_h,
        } => format!(
            "text block {kernel_w}x{kernel_h} does not fit the {image_w}x{image_h} frame; \
             reduce the line break threshold or the glyph height"
        ),
        other => other.to_string(),
    };
    Error::Phrase {
        phrase: index,
        text: phrase.text(),
        message,
    }
}

/// Previous position to chain from: only when it was placed in the same shot.
pub fn previous_in_shot(prev: Option<(usize, PixelCoord)>, shot: usize) -> Option<PixelCoord> {
    prev.filter(|(s, _)| *s == shot).map(|(_, p)| p)
}

/// Stages 1 and 2 over an in-memory sequence, then plan assembly.
pub fn plan_sequence<M: Scalar>(
    config: &PipelineConfig,
    words: &[WordTiming],
    seq: &Sequence<M>,
    shots: Option<Vec<Shot>>,
    keep_maps: bool,
) -> Result<PlanOutcome> {
    let cfg = config.apply_mode();
    cfg.validate()?;
    let mut warnings = Vec::new();

    // Stage 1: phrases and shots.
    let mut phrases = group_words_into_phrases(words, &cfg.grouping);
    phrases.sort_by(|a, b| a.t_in.total_cmp(&b.t_in));
    if cfg.line_breaking && !phrases.is_empty() {
        let threshold =
            compute_line_break_threshold(&phrases, cfg.grouping.line_break_threshold_override)?;
        break_all_lines(&mut phrases, threshold)?;
    }
    let shots = match shots {
        Some(s) => {
            validate_tiling(&s, seq.len())?;
            s
        }
        None => detect_shots(&seq.frames, cfg.cut_threshold)?,
    };

    // Stage 2: placement in time order, chaining the previous position within a shot.
    let frame_dims = seq.dims();
    let placement_cfg = cfg.placement();
    let mut placed = Vec::with_capacity(phrases.len());
    let mut reports = Vec::with_capacity(phrases.len());
    let mut prev: Option<(usize, PixelCoord)> = None;
    for (i, mut phrase) in phrases.into_iter().enumerate() {
        let span = phrase_frame_span(phrase.t_in, phrase.t_out, seq.fps, seq.len())
            .map_err(|e| phrase_error(i, &phrase, e))?;
        let shot = shot_of_frame(&shots, span.first)
            .ok_or_else(|| Error::Internal(format!("frame {} not covered by shots", span.first)))?;
        let layout = layout_phrase::<f64>(&phrase.lines, &cfg.style)
            .map_err(|e| phrase_error(i, &phrase, e))?;
        warnings.extend(layout.warnings.iter().map(|w| format!("phrase {i}: {w}")));
        let kernel = layout.kernel;
        valid_dims(frame_dims, kernel.dims()).map_err(|e| phrase_error(i, &phrase, e))?;

        let ctx = build_phrase_context::<f64, M>(span, &seq.frames, &seq.focus, &seq.foreground)?;
        let prev_pos = previous_in_shot(prev, shot);
        let maps = energy_maps(&ctx, &kernel, &cfg.weights, prev_pos, &placement_cfg)
            .map_err(|e| phrase_error(i, &phrase, e))?;
        let result = match cfg.forced_bottom_center() {
            Some(margin) => maps.result_at(crate::placement::bottom_center(
                frame_dims,
                kernel.dims(),
                margin,
            )?),
            None => maps.argmin(),
        };

        phrase.shot_index = shot;
        phrase.placement = Some(result.position);
        prev = Some((shot, result.position));
        let energy = EnergySummary::new(result.terms, result.combined);
        reports.push(PhraseReport {
            text: phrase.text(),
            position: result.position,
            shot_index: shot,
            energy,
            maps: keep_maps.then_some(maps),
            kernel: kernel.clone(),
        });
        placed.push(PlacedPhrase {
            phrase,
            kernel_dims: kernel.dims(),
            energy: Some(energy),
        });
    }

    // Stage 3 input.
    let video = VideoMeta {
        width: frame_dims.0,
        height: frame_dims.1,
        fps: seq.fps,
        frame_count: seq.len(),
    };
    let plan = assemble_plan(&placed, &cfg.style, &cfg.animation, video, cfg.mode.name())?;
    Ok(PlanOutcome {
        plan,
        shots,
        phrases: reports,
        warnings,
    })
}

/// Min-max scaled grayscale, darker meaning lower.
pub fn map_to_gray(map: &Grid<f64>) -> Vec<u8> {
    let (lo, hi) = map.min_max();
    let range = hi - lo;
    map.as_slice()
        .iter()
        .map(|&v| {
            if range > 0.0 {
                ((v - lo) / range * 255.0).round() as u8
            } else {
                0
            }
        })
        .collect()
}

fn save_gray(path: &Path, width: usize, height: usize, data: &[u8]) -> Result<()> {
    image::save_buffer(
        path,
        data,
        width as u32,
        height as u32,
        image::ExtendedColorType::L8,
    )
    .map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the four term maps, the combined map, and the kernel for one phrase.
pub fn dump_phrase_debug(
    dir: &Path,
    index: usize,
    maps: &EnergyMaps<f64>,
    kernel: &TextKernel<f64>,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let (w, h) = maps.combined.dims();
    for (name, map) in [
        ("fcs", &maps.fcs),
        ("fgd", &maps.fgd),
        ("cnt", &maps.cnt),
        ("prv", &maps.prv),
        ("combined", &maps.combined),
    ] {
        let path = dir.join(format!("phrase_{index:03}_{name}.png"));
        save_gray(&path, w, h, &map_to_gray(map))?;
        written.push(path);
    }
    let path = dir.join(format!("phrase_{index:03}_kernel.png"));
    let gray: Vec<u8> = kernel
        .coverage()
        .as_slice()
        .iter()
        .map(|&v| (v * 255.0).round() as u8)
        .collect();
    save_gray(&path, kernel.width(), kernel.height(), &gray)?;
    written.push(path);
    Ok(written)
}

#[derive(Debug, Clone)]
pub struct PipelinePaths {
    pub words: PathBuf,
    pub sequence: SequencePaths,
    pub shots: Option<PathBuf>,
    pub out_json: PathBuf,
    pub out_ass: Option<PathBuf>,
    pub overlay_dir: Option<PathBuf>,
    pub debug_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub struct RunReport {
    pub outcome: PlanOutcome,
    pub warnings: Vec<String>,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// File-level pipeline: reads inputs, writes the JSON plan and any requested extras.
pub fn run_pipeline(config: &PipelineConfig, paths: &PipelinePaths) -> Result<RunReport> {
    let words_file = fs::File::open(&paths.words).map_err(|e| Error::io(&paths.words, e))?;
    let parsed = parse_word_timings(words_file)?;
    let mut warnings = parsed.warnings;

    let loaded = load_sequence::<f32>(&paths.sequence, config.fps)?;
    warnings.extend(loaded.warnings);
    let seq = loaded.sequence;

    let shots = match &paths.shots {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            Some(parse_shot_file(&text, seq.len())?)
        }
        None => None,
    };

    let outcome = plan_sequence(
        config,
        &parsed.words,
        &seq,
        shots,
        paths.debug_dir.is_some(),
    )?;
    warnings.extend(outcome.warnings.iter().cloned());

    write_file(&paths.out_json, &emit_json(&outcome.plan)?)?;
    if let Some(ass) = &paths.out_ass {
        write_file(ass, &emit_ass(&outcome.plan))?;
    }
    if let Some(dir) = &paths.debug_dir {
        for (i, report) in outcome.phrases.iter().enumerate() {
            if let Some(maps) = &report.maps {
                dump_phrase_debug(dir, i, maps, &report.kernel)?;
            }
        }
    }
    if let Some(dir) = &paths.overlay_dir {
        render_to_dir(&outcome.plan, &seq.frames, &seq.foreground, dir)?;
    }
    Ok(RunReport { outcome, warnings })
}

pub fn render_to_dir<M: Scalar>(
    plan: &RenderPlan,
    frames: &[crate::grid::Frame],
    foreground: &[MaskFrame<M>],
    dir: &Path,
) -> Result<()> {
    let layouts = plan_layouts(plan)?;
    let out = render_overlay_frames(plan, frames, foreground, &layouts)?;
    write_overlay_pngs(dir, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Mode;
    use crate::grid::Frame;
    use crate::kernel_raster::TextStyle;

    fn tiny_sequence(n: usize) -> Sequence<f64> {
        let frames = (0..n)
            .map(|i| Frame::filled(64, 48, [(i * 3) as u8, 40, 80]))
            .collect();
        let focus = vec![Grid::filled(64, 48, 0.0); n];
        let fgd = vec![Grid::filled(64, 48, 0.0); n];
        Sequence::new(frames, focus, fgd, 10.0).unwrap()
    }

    fn words() -> Vec<WordTiming> {
        vec![
            WordTiming::new("la", 0.2, 0.5).unwrap(),
            WordTiming::new("di", 0.6, 0.9).unwrap(),
            WordTiming::new("da", 2.0, 2.4).unwrap(),
        ]
    }

    fn cfg(mode: Mode) -> PipelineConfig {
        PipelineConfig {
            mode,
            fps: 10.0,
            style: TextStyle {
                glyph_height_px: 7,
                ..TextStyle::default()
            },
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn plans_every_phrase_in_bounds() {
        let out =
            plan_sequence(&cfg(Mode::Full), &words(), &tiny_sequence(40), None, false).unwrap();
        assert_eq!(out.plan.phrases.len(), 2);
        for p in &out.plan.phrases {
            assert!(p.x + p.kernel_width <= 64 && p.y + p.kernel_height <= 48);
        }
    }

    #[test]
    fn baseline_sits_bottom_center() {
        let out = plan_sequence(
            &cfg(Mode::Baseline),
            &words(),
            &tiny_sequence(40),
            None,
            false,
        )
        .unwrap();
        for p in &out.plan.phrases {
            assert_eq!(p.x, (64 - p.kernel_width) / 2);
            assert_eq!(p.y, 48 - p.kernel_height - 16);
        }
    }

    #[test]
    fn phrase_after_video_end_names_phrase() {
        let late = vec![WordTiming::new("late", 30.0, 31.0).unwrap()];
        let err =
            plan_sequence(&cfg(Mode::Full), &late, &tiny_sequence(40), None, false).unwrap_err();
        assert!(matches!(err, Error::Phrase { phrase: 0, .. }), "{err}");
    }

    #[test]
    fn oversized_text_suggests_fix() {
        let long = vec![WordTiming::new("averyveryverylongword", 0.0, 1.0).unwrap()];
        let err =
            plan_sequence(&cfg(Mode::Full), &long, &tiny_sequence(40), None, false).unwrap_err();
        assert!(err.to_string().contains("line break threshold"), "{err}");
    }

    #[test]
    fn gray_dump_scaling() {
        let g = Grid::new(3, 1, vec![2.0, 4.0, 3.0]).unwrap();
        assert_eq!(map_to_gray(&g), vec![0, 255, 128]);
        assert_eq!(map_to_gray(&Grid::filled(2, 1, 5.0)), vec![0, 0]);
    }
}
