use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lyricvid::config::{Mode, PipelineConfig};
use lyricvid::media_ingest::{self, SequencePaths};
use lyricvid::pipeline::{self, PipelinePaths};
use lyricvid::placement::AnchorMode;
use lyricvid::render_plan::{self, WordHighlight};
use lyricvid::Error;

#[derive(Parser)]
#[command(
    name = "lyricvid",
    version,
    about = "Lay out lyric text over music video frames"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write the JSON plan (and optionally ASS).
    Plan {
        /// Study condition; overrides the config file.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[command(flatten)]
        args: PlanArgs,
    },
    /// Run the pipeline under one of the study conditions.
    Ablate {
        #[arg(long, value_enum)]
        mode: Mode,
        #[command(flatten)]
        args: PlanArgs,
    },
    /// Composite a saved plan onto frames.
    Render {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        frames: PathBuf,
        /// Defaults to `foreground/` next to the frame directory.
        #[arg(long)]
        foreground: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Detect shot boundaries and print `start,end` per shot.
    Shots {
        #[arg(long)]
        frames: PathBuf,
        #[arg(long, default_value_t = media_ingest::DEFAULT_CUT_THRESHOLD)]
        cut_threshold: f64,
    },
}

#[derive(Args)]
struct PlanArgs {
    /// Word timing file (`word<TAB>t_in<TAB>t_out`).
    #[arg(long)]
    words: PathBuf,
    /// Directory of `%06d.png` RGB frames.
    #[arg(long)]
    frames: PathBuf,
    /// Focus masks; defaults to `focus/` next to the frame directory.
    #[arg(long)]
    focus: Option<PathBuf>,
    /// Foreground masks; defaults to `foreground/` next to the frame directory.
    #[arg(long)]
    foreground: Option<PathBuf>,
    /// Explicit shot boundaries (`start,end` per line), bypassing detection.
    #[arg(long)]
    shots: Option<PathBuf>,
    #[arg(long, default_value = "plan.json")]
    out_json: PathBuf,
    #[arg(long)]
    out_ass: Option<PathBuf>,
    /// Also composite overlay frames into this directory.
    #[arg(long)]
    overlay_dir: Option<PathBuf>,
    /// Dump per-phrase cost maps and kernels as PNG.
    #[arg(long)]
    debug_dir: Option<PathBuf>,
    #[command(flatten)]
    overrides: ConfigOverrides,
}

/// Flags mirroring config keys; they win over `--config`.
#[derive(Args)]
struct ConfigOverrides {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    fps: Option<f64>,
    #[arg(long)]
    gap_threshold: Option<f64>,
    #[arg(long)]
    line_break_threshold: Option<usize>,
    #[arg(long)]
    no_line_breaks: bool,
    #[arg(long)]
    w_fcs: Option<f64>,
    #[arg(long)]
    w_fgd: Option<f64>,
    #[arg(long)]
    w_cnt: Option<f64>,
    #[arg(long)]
    w_prv: Option<f64>,
    #[arg(long)]
    glyph_height: Option<usize>,
    #[arg(long)]
    pad: Option<f64>,
    #[arg(long, value_parser = parse_anchor)]
    anchor: Option<AnchorMode>,
    #[arg(long)]
    cut_threshold: Option<f64>,
    #[arg(long)]
    surround_margin: Option<usize>,
    /// Sum raw energies instead of min-max normalized ones.
    #[arg(long)]
    raw_terms: bool,
    #[arg(long, value_parser = parse_highlight)]
    word_highlight: Option<WordHighlight>,
}

fn parse_anchor(s: &str) -> Result<AnchorMode, String> {
    match s {
        "upper_left" => Ok(AnchorMode::UpperLeft),
        "center" => Ok(AnchorMode::Center),
        _ => Err(format!("unknown anchor {s:?} (upper_left, center)")),
    }
}

fn parse_highlight(s: &str) -> Result<WordHighlight, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown highlight {s:?}"))
}

impl ConfigOverrides {
    fn resolve(&self) -> Result<PipelineConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = self.fps {
            cfg.fps = v;
        }
        if let Some(v) = self.gap_threshold {
            cfg.grouping.gap_threshold_s = v;
        }
        if let Some(v) = self.line_break_threshold {
            cfg.grouping.line_break_threshold_override = Some(v);
        }
        if self.no_line_breaks {
            cfg.line_breaking = false;
        }
        for (flag, slot) in [
            (self.w_fcs, &mut cfg.weights.fcs),
            (self.w_fgd, &mut cfg.weights.fgd),
            (self.w_cnt, &mut cfg.weights.cnt),
            (self.w_prv, &mut cfg.weights.prv),
        ] {
            if let Some(v) = flag {
                *slot = v;
            }
        }
        if let Some(v) = self.glyph_height {
            cfg.style.glyph_height_px = v;
        }
        if let Some(v) = self.pad {
            cfg.animation.pad_s = v;
        }
        if let Some(v) = self.anchor {
            cfg.anchor_mode = v;
        }
        if let Some(v) = self.cut_threshold {
            cfg.cut_threshold = v;
        }
        if let Some(v) = self.surround_margin {
            cfg.surround_margin = v;
        }
        if self.raw_terms {
            cfg.normalize_terms = false;
        }
        if let Some(v) = self.word_highlight {
            cfg.animation.word_highlight = v;
        }
        Ok(cfg)
    }
}

fn sequence_paths(
    frames: PathBuf,
    focus: Option<PathBuf>,
    foreground: Option<PathBuf>,
) -> SequencePaths {
    let mut paths = SequencePaths::with_sibling_masks(frames);
    if focus.is_some() {
        paths.focus = focus;
    }
    if foreground.is_some() {
        paths.foreground = foreground;
    }
    paths
}

fn run_plan(args: PlanArgs, mode: Option<Mode>) -> Result<(), Error> {
    let mut cfg = args.overrides.resolve()?;
    if let Some(m) = mode {
        cfg.mode = m;
    }
    let paths = PipelinePaths {
        words: args.words,
        sequence: sequence_paths(args.frames, args.focus, args.foreground),
        shots: args.shots,
        out_json: args.out_json,
        out_ass: args.out_ass,
        overlay_dir: args.overlay_dir,
        debug_dir: args.debug_dir,
    };
    let report = pipeline::run_pipeline(&cfg, &paths)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!("phrase\tshot\tx\ty\tE_fcs\tE_fgd\tE_cnt\tE_prv\tcombined\ttext");
    for (i, p) in report.outcome.phrases.iter().enumerate() {
        let e = p.energy;
        println!(
            "{i}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{}",
            p.shot_index,
            p.position.x,
            p.position.y,
            e.fcs,
            e.fgd,
            e.cnt,
            e.prv,
            e.combined,
            p.text
        );
    }
    Ok(())
}

fn run() -> Result<(), Error> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match cli.command {
        Command::Plan { mode, args } => run_plan(args, mode),
        Command::Ablate { mode, args } => run_plan(args, Some(mode)),
        Command::Render {
            plan,
            frames,
            foreground,
            out,
        } => {
            let bytes = std::fs::read(&plan).map_err(|e| Error::Io {
                path: plan.clone(),
                source: e,
            })?;
            let plan = render_plan::parse_json(&bytes)?;
            let paths = SequencePaths {
                focus: None,
                ..sequence_paths(frames, None, foreground)
            };
            let loaded = media_ingest::load_sequence::<f32>(&paths, plan.video.fps)?;
            for w in loaded.warnings.iter().filter(|w| !w.contains("focus")) {
                eprintln!("warning: {w}");
            }
            let seq = loaded.sequence;
            pipeline::render_to_dir(&plan, &seq.frames, &seq.foreground, &out)
        }
        Command::Shots {
            frames,
            cut_threshold,
        } => {
            let frames = media_ingest::load_frames(&frames)?;
            for s in media_ingest::detect_shots(&frames, cut_threshold)? {
                println!("{},{}", s.start_frame, s.end_frame);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
