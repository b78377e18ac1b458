//! ASS v4.00+ karaoke emitter.

use std::fmt::Write;

use super::{PlannedPhrase, RenderPlan, WordHighlight};

fn centis(t: f64) -> i64 {
    (t * 100.0).round() as i64
}

/// `h:mm:ss.cc`, rounded to the nearest centisecond.
pub fn ass_timestamp(t: f64) -> String {
    let cs = centis(t.max(0.0));
    format!(
        "{}:{:02}:{:02}.{:02}",
        cs / 360_000,
        cs / 6_000 % 60,
        cs / 100 % 60,
        cs % 100
    )
}

/// `\k` durations: the leading pad first, then one per word.
///
/// Durations are differences of rounded boundaries, so they add up exactly
/// to the span from the display start to the last word's out time. Silence
/// between words is absorbed by the preceding word.
pub fn karaoke_durations(phrase: &PlannedPhrase) -> Vec<u32> {
    let mut bounds = Vec::with_capacity(phrase.words.len() + 2);
    bounds.push(centis(phrase.display_in.0));
    bounds.extend(phrase.words.iter().map(|w| centis(w.t_in.0)));
    if let Some(last) = phrase.words.last() {
        bounds.push(centis(last.t_out.0));
    }
    bounds
        .windows(2)
        .map(|b| (b[1] - b[0]).max(0) as u32)
        .collect()
}

// ASS has no brace escape; keep override blocks intact.
fn sanitize(word: &str) -> String {
    word.replace('{', "(").replace('}', ")")
}

fn colour(rgb: [u8; 3]) -> String {
    format!("&H00{:02X}{:02X}{:02X}", rgb[2], rgb[1], rgb[0])
}

fn karaoke_text(phrase: &PlannedPhrase) -> String {
    let durations = karaoke_durations(phrase);
    let mut text = String::new();
    write!(text, "{{\\k{}}}", durations[0]).unwrap();

    // Words per line, to put `\N` where the layout breaks.
    let per_line: Vec<usize> = phrase
        .lines
        .iter()
        .map(|l| l.split(' ').filter(|w| !w.is_empty()).count())
        .collect();
    let mut line_ends = Vec::new();
    let mut acc = 0;
    for n in &per_line {
        acc += n;
        line_ends.push(acc);
    }
    let lines_match = acc == phrase.words.len();

    for (i, word) in phrase.words.iter().enumerate() {
        if i > 0 {
            if lines_match && line_ends.contains(&i) {
                text.push_str("\\N");
            } else {
                text.push(' ');
            }
        }
        write!(text, "{{\\k{}}}{}", durations[i + 1], sanitize(&word.text)).unwrap();
    }
    text
}

pub fn emit_ass(plan: &RenderPlan) -> Vec<u8> {
    let style = &plan.style;
    let (primary, secondary) = match plan.animation.word_highlight {
        WordHighlight::AccentColor => (plan.animation.accent, style.color),
        _ => (style.color, style.color),
    };

    let mut out = String::new();
    out.push_str("[Script Info]\n");
    out.push_str("ScriptType: v4.00+\n");
    writeln!(out, "PlayResX: {}", plan.video.width).unwrap();
    writeln!(out, "PlayResY: {}", plan.video.height).unwrap();
    out.push_str("WrapStyle: 2\n");
    out.push_str("ScaledBorderAndShadow: yes\n\n");

    out.push_str("[V4+ Styles]\n");
    out.push_str(
        "Format: Name, Fontname, Fontsize, PrimaryColour, SecondaryColour, OutlineColour, \
         BackColour, Bold, Italic, Underline, StrikeOut, ScaleX, ScaleY, Spacing, Angle, \
         BorderStyle, Outline, Shadow, Alignment, MarginL, MarginR, MarginV, Encoding\n",
    );
    writeln!(
        out,
        "Style: Lyric,Poppins,{},{},{},&H00000000,&H00000000,0,0,0,0,100,100,0,0,1,0,0,7,0,0,0,1",
        style.glyph_height_px,
        colour(primary),
        colour(secondary)
    )
    .unwrap();
    out.push('\n');

    out.push_str("[Events]\n");
    out.push_str(
        "Format: Layer, Start, End, Style, Name, MarginL, MarginR, MarginV, Effect, Text\n",
    );
    for phrase in &plan.phrases {
        writeln!(
            out,
            "Dialogue: 0,{},{},Lyric,,0,0,0,,{{\\pos({},{})}}{{\\an7}}{}",
            ass_timestamp(phrase.display_in.0),
            ass_timestamp(phrase.display_out.0),
            phrase.x,
            phrase.y,
            karaoke_text(phrase)
        )
        .unwrap();
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;
    use crate::kernel_raster::TextStyle;

    fn word(text: &str, a: f64, b: f64) -> PlannedWord {
        PlannedWord {
            text: text.into(),
            t_in: Seconds(a),
            t_out: Seconds(b),
        }
    }

    fn phrase(
        lines: &[&str],
        words: Vec<PlannedWord>,
        pad: f64,
        pos: (usize, usize),
    ) -> PlannedPhrase {
        let t_in = words[0].t_in.0;
        let t_out = words.last().unwrap().t_out.0;
        PlannedPhrase {
            index: 0,
            lines: lines.iter().map(|s| s.to_string()).collect(),
            x: pos.0,
            y: pos.1,
            t_in: Seconds(t_in),
            t_out: Seconds(t_out),
            display_in: Seconds((t_in - pad).max(0.0)),
            display_out: Seconds(t_out + pad),
            shot_index: 0,
            kernel_width: 10,
            kernel_height: 10,
            words,
            energy: None,
        }
    }

    fn plan(phrases: Vec<PlannedPhrase>) -> RenderPlan {
        RenderPlan {
            format: PLAN_FORMAT.into(),
            version: PLAN_VERSION,
            mode: "full".into(),
            video: VideoMeta {
                width: 640,
                height: 360,
                fps: 25.0,
                frame_count: 250,
            },
            style: TextStyle::default(),
            animation: AnimationSpec::default(),
            phrases,
        }
    }

    fn dialogues(p: &RenderPlan) -> Vec<String> {
        String::from_utf8(emit_ass(p))
            .unwrap()
            .lines()
            .filter(|l| l.starts_with("Dialogue:"))
            .map(str::to_string)
            .collect()
    }

    #[test]
    fn timestamps() {
        assert_eq!(ass_timestamp(0.8), "0:00:00.80");
        assert_eq!(ass_timestamp(3725.456), "1:02:05.46");
    }

    #[test]
    fn single_word_line() {
        let p = plan(vec![phrase(
            &["hi"],
            vec![word("hi", 1.0, 1.5)],
            0.2,
            (120, 300),
        )]);
        assert_eq!(
            dialogues(&p),
            vec![
                r"Dialogue: 0,0:00:00.80,0:00:01.70,Lyric,,0,0,0,,{\pos(120,300)}{\an7}{\k20}{\k50}hi"
            ]
        );
    }

    #[test]
    fn two_lines_use_hard_break() {
        let words = vec![
            word("one", 1.0, 1.2),
            word("two", 1.5, 1.7),
            word("three", 1.8, 2.4),
        ];
        let p = plan(vec![phrase(&["one two", "three"], words, 0.2, (0, 0))]);
        let d = &dialogues(&p)[0];
        assert!(
            d.ends_with(r"{\k20}{\k50}one {\k30}two\N{\k60}three"),
            "{d}"
        );
    }

    #[test]
    fn empty_plan_has_header_only() {
        let text = String::from_utf8(emit_ass(&plan(vec![]))).unwrap();
        assert!(text.starts_with("[Script Info]\n"));
        assert!(text.contains("PlayResX: 640\nPlayResY: 360\n"));
        assert!(text.contains("[V4+ Styles]"));
        assert!(text.contains("[Events]"));
        assert!(!text.contains("Dialogue:"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn accent_colour_becomes_primary() {
        let mut p = plan(vec![]);
        p.animation.word_highlight = WordHighlight::AccentColor;
        p.animation.accent = [0x11, 0x22, 0x33];
        let text = String::from_utf8(emit_ass(&p)).unwrap();
        assert!(text.contains("Style: Lyric,Poppins,40,&H00332211,&H00FFFFFF,"));
    }
}
