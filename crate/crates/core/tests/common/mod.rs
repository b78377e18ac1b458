//! Independent reference computations and fixtures shared by the test targets.
//!
//! Nothing here calls the library routine it is used to check.

#![allow(dead_code)]

use lyricvid::font;
use lyricvid::grid::{Frame, Grid, PixelCoord};
use lyricvid::kernel_raster::{Alignment, TextStyle};
use lyricvid::lyric_text::WordTiming;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- text

/// Random word sequence with random gaps, ordered by start time.
pub fn random_words(rng: &mut impl Rng, n: usize, max_gap: f64) -> Vec<WordTiming> {
    let mut t = rng.gen_range(0.0..1.0);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let dur = rng.gen_range(0.05..0.8);
        let len = rng.gen_range(1..8);
        let text: String = (0..len)
            .map(|j| (b'a' + ((i * 7 + j * 3) % 26) as u8) as char)
            .collect();
        out.push(WordTiming::new(text, t, t + dur).unwrap());
        t += dur + rng.gen_range(0.0..max_gap);
    }
    out
}

/// Splits at every adjacent pair whose gap exceeds the threshold; returns word indices.
pub fn oracle_groups(words: &[WordTiming], gap: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..words.len() {
        let split = i == 0 || words[i].t_in - words[i - 1].t_out > gap;
        if split {
            groups.push(vec![i]);
        } else {
            groups.last_mut().unwrap().push(i);
        }
    }
    groups
}

pub fn oracle_lower_median(counts: &[usize]) -> usize {
    let mut v = counts.to_vec();
    v.sort();
    v[(v.len() - 1) / 2]
}

/// Exhaustive balanced split: enumerates every set of `lines − 1` break
/// positions. Returns `(n · Σ (len − mean)², line lengths)` of the best split,
/// ties to the lexicographically largest length tuple.
pub fn oracle_balanced_split(word_lens: &[usize], lines: usize) -> (u64, Vec<usize>) {
    let gaps = word_lens.len() - 1;
    let mut best: Option<(u64, Vec<usize>)> = None;
    for mask in 0u32..(1 << gaps) {
        if mask.count_ones() as usize != lines - 1 {
            continue;
        }
        let mut lens = Vec::new();
        let mut cur = word_lens[0];
        for (i, &len) in word_lens.iter().enumerate().skip(1) {
            if mask >> (i - 1) & 1 == 1 {
                lens.push(cur);
                cur = len;
            } else {
                cur += 1 + len;
            }
        }
        lens.push(cur);
        let n = lens.len() as i64;
        let sum: i64 = lens.iter().map(|&l| l as i64).sum();
        let sq: i64 = lens.iter().map(|&l| (l * l) as i64).sum();
        let cost = (n * sq - sum * sum) as u64;
        let better = match &best {
            None => true,
            Some((c, l)) => cost < *c || (cost == *c && lens > *l),
        };
        if better {
            best = Some((cost, lens));
        }
    }
    best.unwrap()
}

pub fn scaled_cost(lens: &[usize]) -> u64 {
    let n = lens.len() as i64;
    let sum: i64 = lens.iter().map(|&l| l as i64).sum();
    let sq: i64 = lens.iter().map(|&l| (l * l) as i64).sum();
    (n * sq - sum * sum) as u64
}

// ---------------------------------------------------------------- media

pub fn random_frame(rng: &mut impl Rng, w: usize, h: usize) -> Frame {
    let pixels = (0..w * h)
        .map(|_| [rng.gen(), rng.gen(), rng.gen()])
        .collect();
    Frame::new(w, h, pixels).unwrap()
}

pub fn random_grid(rng: &mut impl Rng, w: usize, h: usize) -> Grid<f64> {
    Grid::from_fn(w, h, |_, _| rng.gen_range(0.0..1.0))
}

/// Per-channel 8-bin histograms each normalized to 1, then averaged.
pub fn oracle_hist_distance(a: &Frame, b: &Frame) -> f64 {
    let hist = |f: &Frame| {
        let mut h = [[0.0f64; 8]; 3];
        let n = (f.width() * f.height()) as f64;
        for y in 0..f.height() {
            for x in 0..f.width() {
                let px = f.get(x, y);
                for c in 0..3 {
                    h[c][(px[c] / 32) as usize] += 1.0 / n;
                }
            }
        }
        h
    };
    let (ha, hb) = (hist(a), hist(b));
    let mut l1 = 0.0;
    for c in 0..3 {
        for k in 0..8 {
            l1 += (ha[c][k] - hb[c][k]).abs();
        }
    }
    // Mean of the three per-channel half-L1 distances.
    l1 / 6.0
}

pub fn oracle_shot_starts(frames: &[Frame], threshold: f64) -> Vec<usize> {
    let mut starts = vec![0];
    for i in 1..frames.len() {
        if oracle_hist_distance(&frames[i - 1], &frames[i]) > threshold {
            starts.push(i);
        }
    }
    starts
}

pub struct OracleContext {
    pub focus: Grid<f64>,
    pub fgd: Grid<f64>,
    pub bg: Grid<[f64; 3]>,
}

pub fn oracle_context(
    first: usize,
    last: usize,
    frames: &[Frame],
    focus: &[Grid<f64>],
    fgd: &[Grid<f64>],
) -> OracleContext {
    let (w, h) = frames[0].dims();
    let n = (last - first + 1) as f64;
    let mut f_out = Grid::filled(w, h, 0.0);
    let mut g_out = Grid::filled(w, h, 0.0);
    let mut b_out = Grid::filled(w, h, [0.0; 3]);
    for y in 0..h {
        for x in 0..w {
            let (mut sf, mut sg, mut sb) = (0.0, 0.0, [0.0; 3]);
            for i in first..=last {
                sf += focus[i].get(x, y);
                let s = fgd[i].get(x, y);
                sg += s;
                let px = frames[i].get(x, y);
                for c in 0..3 {
                    sb[c] += px[c] as f64 * (1.0 - s);
                }
            }
            f_out.set(x, y, sf / n);
            g_out.set(x, y, sg / n);
            b_out.set(x, y, sb.map(|v| v / n));
        }
    }
    OracleContext {
        focus: f_out,
        fgd: g_out,
        bg: b_out,
    }
}

// ---------------------------------------------------------------- raster

/// Stamps glyphs by forward-mapping every inked font pixel onto the block of
/// output pixels it covers under nearest-neighbor scaling, then crops.
pub fn oracle_stamp(lines: &[&str], style: &TextStyle) -> Grid<f64> {
    let gh = style.glyph_height_px;
    let gw = ((5 * gh) as f64 / 7.0).round() as usize;
    let gap = ((gh as f64 / 7.0).round() as usize).max(1);
    let leading = style.leading_px.unwrap_or(gh / 4);
    let widths: Vec<usize> = lines
        .iter()
        .map(|l| {
            let n = l.chars().count();
            n * gw + (n - 1) * gap
        })
        .collect();
    let bw = *widths.iter().max().unwrap();
    let bh = lines.len() * gh + (lines.len() - 1) * leading;
    let mut canvas = vec![vec![0.0f64; bw]; bh];
    // Output pixel d maps to source floor(d·src/dst); invert that mapping.
    let span = |src_px: usize, src: usize, dst: usize| {
        let lo = (src_px * dst).div_ceil(src);
        let hi = ((src_px + 1) * dst).div_ceil(src);
        lo..hi
    };
    for (li, line) in lines.iter().enumerate() {
        let x0 = match style.alignment {
            Alignment::Left => 0,
            Alignment::Center => (bw - widths[li]) / 2,
        };
        let y0 = li * (gh + leading);
        for (ci, ch) in line.chars().enumerate() {
            let gx = x0 + ci * (gw + gap);
            for col in 0..5 {
                for row in 0..7 {
                    if !font::glyph_pixel(ch, col, row) {
                        continue;
                    }
                    for y in span(row, 7, gh) {
                        for x in span(col, 5, gw) {
                            canvas[y0 + y][gx + x] = 1.0;
                        }
                    }
                }
            }
        }
    }
    let rows: Vec<usize> = (0..bh)
        .filter(|&y| canvas[y].iter().any(|&v| v > 0.0))
        .collect();
    let cols: Vec<usize> = (0..bw)
        .filter(|&x| (0..bh).any(|y| canvas[y][x] > 0.0))
        .collect();
    let (ya, yb) = (rows[0], *rows.last().unwrap());
    let (xa, xb) = (cols[0], *cols.last().unwrap());
    Grid::from_fn(xb - xa + 1, yb - ya + 1, |x, y| canvas[y + ya][x + xa])
}

// ---------------------------------------------------------------- placement

pub fn oracle_correlate(img: &Grid<f64>, k: &Grid<f64>) -> Grid<f64> {
    let (ow, oh) = (img.width() - k.width() + 1, img.height() - k.height() + 1);
    Grid::from_fn(ow, oh, |x, y| {
        let mut s = 0.0;
        for i in 0..k.height() {
            for j in 0..k.width() {
                s += img.get(x + j, y + i) * k.get(j, i);
            }
        }
        s
    })
}

pub fn oracle_center(mask: &Grid<f64>) -> (f64, f64) {
    let (mut sx, mut sy, mut t) = (0.0, 0.0, 0.0);
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            let v = mask.get(x, y);
            sx += v * x as f64;
            sy += v * y as f64;
            t += v;
        }
    }
    if t == 0.0 {
        (
            (mask.width() - 1) as f64 / 2.0,
            (mask.height() - 1) as f64 / 2.0,
        )
    } else {
        (sx / t, sy / t)
    }
}

pub struct OracleInputs<'a> {
    pub focus: &'a Grid<f64>,
    pub fgd: &'a Grid<f64>,
    pub bg: &'a Grid<[f64; 3]>,
    pub kernel: &'a Grid<f64>,
    pub weights: [f64; 4],
    pub prev: Option<PixelCoord>,
    pub color: [u8; 3],
    pub margin: usize,
    pub center_anchor: bool,
}

/// Evaluates every term at every valid position directly, normalizes each
/// over the region, and scans for the first minimum in row-major order.
pub fn oracle_argmin(inp: &OracleInputs) -> PixelCoord {
    let (w, h) = inp.fgd.dims();
    let (kw, kh) = inp.kernel.dims();
    let (vw, vh) = (w - kw + 1, h - kh + 1);
    let m = inp.margin as isize;
    let (cx, cy) = oracle_center(inp.focus);
    let (ax, ay) = if inp.center_anchor {
        ((kw - 1) as f64 / 2.0, (kh - 1) as f64 / 2.0)
    } else {
        (0.0, 0.0)
    };
    let diff = |x: isize, y: isize| {
        let xc = x.clamp(0, w as isize - 1) as usize;
        let yc = y.clamp(0, h as isize - 1) as usize;
        let px = inp.bg.get(xc, yc);
        let d: Vec<f64> = (0..3).map(|c| px[c] - inp.color[c] as f64).collect();
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    };
    let kval = |j: isize, i: isize| {
        if j < 0 || i < 0 || j >= kw as isize || i >= kh as isize {
            0.0
        } else {
            inp.kernel.get(j as usize, i as usize)
        }
    };

    let mut terms = vec![[0.0f64; 4]; vw * vh];
    for y in 0..vh {
        for x in 0..vw {
            let fcs = (x as f64 + ax - cx).hypot(y as f64 + ay - cy);
            let mut fgd = 0.0;
            for i in 0..kh {
                for j in 0..kw {
                    fgd += inp.fgd.get(x + j, y + i) * inp.kernel.get(j, i);
                }
            }
            let mut sur = 0.0;
            for i in -m..kh as isize + m {
                for j in -m..kw as isize + m {
                    sur += diff(x as isize + j, y as isize + i) * (1.0 - kval(j, i));
                }
            }
            let prv = match inp.prev {
                Some(p) => (x as f64 - p.x as f64).hypot(y as f64 - p.y as f64),
                None => 0.0,
            };
            terms[y * vw + x] = [fcs, fgd, sur, prv];
        }
    }
    let max_sur = terms.iter().map(|t| t[2]).fold(f64::MIN, f64::max);
    for t in terms.iter_mut() {
        t[2] = max_sur - t[2];
    }
    for k in 0..4 {
        let lo = terms.iter().map(|t| t[k]).fold(f64::MAX, f64::min);
        let hi = terms.iter().map(|t| t[k]).fold(f64::MIN, f64::max);
        for t in terms.iter_mut() {
            t[k] = if hi > lo {
                (t[k] - lo) / (hi - lo)
            } else {
                0.0
            };
        }
    }
    let mut best = 0;
    let mut best_v = f64::INFINITY;
    for (i, t) in terms.iter().enumerate() {
        let v: f64 = (0..4).map(|k| inp.weights[k] * t[k]).sum();
        if v < best_v {
            best_v = v;
            best = i;
        }
    }
    PixelCoord::new(best % vw, best / vw)
}

/// Owned random placement problem.
#[derive(Debug, Clone)]
pub struct Instance {
    pub focus: Grid<f64>,
    pub fgd: Grid<f64>,
    pub bg: Grid<[f64; 3]>,
    pub kernel: Grid<f64>,
    pub weights: [f64; 4],
    pub prev: Option<PixelCoord>,
    pub color: [u8; 3],
    pub margin: usize,
    pub center_anchor: bool,
}

impl Instance {
    pub fn inputs(&self) -> OracleInputs<'_> {
        OracleInputs {
            focus: &self.focus,
            fgd: &self.fgd,
            bg: &self.bg,
            kernel: &self.kernel,
            weights: self.weights,
            prev: self.prev,
            color: self.color,
            margin: self.margin,
            center_anchor: self.center_anchor,
        }
    }
}

/// Frame up to `max_frame` square, kernel up to `max_kernel` square, some
/// weights zeroed now and then.
pub fn random_instance(rng: &mut impl Rng, max_frame: usize, max_kernel: usize) -> Instance {
    let (w, h) = (rng.gen_range(4..=max_frame), rng.gen_range(4..=max_frame));
    let (kw, kh) = (
        rng.gen_range(1..=max_kernel.min(w)),
        rng.gen_range(1..=max_kernel.min(h)),
    );
    let mut kernel = Grid::from_fn(kw, kh, |_, _| match rng.gen_range(0..3) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.gen_range(0.0..1.0),
    });
    kernel.set(rng.gen_range(0..kw), rng.gen_range(0..kh), 1.0);
    let focus = if rng.gen_bool(0.1) {
        Grid::filled(w, h, 0.0)
    } else {
        random_grid(rng, w, h)
    };
    let weights = std::array::from_fn(|_| {
        if rng.gen_bool(0.2) {
            0.0
        } else {
            rng.gen_range(0.01..3.0)
        }
    });
    let prev = rng
        .gen_bool(0.7)
        .then(|| PixelCoord::new(rng.gen_range(0..=w - kw), rng.gen_range(0..=h - kh)));
    Instance {
        focus,
        fgd: random_grid(rng, w, h),
        bg: Grid::from_fn(w, h, |_, _| {
            std::array::from_fn(|_| rng.gen_range(0.0..255.0))
        }),
        kernel,
        weights,
        prev,
        color: [rng.gen(), rng.gen(), rng.gen()],
        margin: rng.gen_range(0..3),
        center_anchor: rng.gen_bool(0.3),
    }
}

// ---------------------------------------------------------------- ASS

/// Karaoke durations per word from absolute centisecond marks: lead-in, then each word
/// running until the next word starts (the last until its own end).
pub fn oracle_k_durations(display_in: f64, words: &[(f64, f64)]) -> Vec<i64> {
    let cs = |t: f64| (t * 100.0).round() as i64;
    let mut out = vec![cs(words[0].0) - cs(display_in)];
    for i in 0..words.len() {
        let end = if i + 1 < words.len() {
            words[i + 1].0
        } else {
            words[i].1
        };
        out.push(cs(end) - cs(words[i].0));
    }
    out
}

// ---------------------------------------------------------------- fixture

/// Moving-disk music video: two shots, a foreground "body" disk and a
/// smaller focus "face" disk drifting across a gradient background.
pub struct DiskVideo {
    pub frames: Vec<Frame>,
    pub focus: Vec<Grid<f32>>,
    pub foreground: Vec<Grid<f32>>,
}

pub fn disk_video(w: usize, h: usize, n: usize) -> DiskVideo {
    let mut frames = Vec::with_capacity(n);
    let mut focus = Vec::with_capacity(n);
    let mut foreground = Vec::with_capacity(n);
    for i in 0..n {
        let second_shot = i >= n / 2;
        let t = i as f64 / n as f64;
        let (bx, by) = if second_shot {
            (w as f64 * (0.8 - 0.4 * t), h as f64 * 0.55)
        } else {
            (w as f64 * (0.25 + 0.4 * t), h as f64 * 0.6)
        };
        let body_r = h as f64 * 0.28;
        let face_r = h as f64 * 0.1;
        let (fx, fy) = (bx, by - body_r * 0.7);
        let mut px = Vec::with_capacity(w * h);
        let mut fm = Vec::with_capacity(w * h);
        let mut gm = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let (xf, yf) = (x as f64, y as f64);
                let in_body = (xf - bx).hypot(yf - by) <= body_r;
                let in_face = (xf - fx).hypot(yf - fy) <= face_r;
                let base = if second_shot {
                    [230, (120 + y * 60 / h) as u8, 40]
                } else {
                    [(20 + x * 60 / w) as u8, 30, (60 + y * 120 / h) as u8]
                };
                px.push(if in_body || in_face {
                    [200, 170, 150]
                } else {
                    base
                });
                fm.push(if in_face { 1.0 } else { 0.0 });
                gm.push(if in_body || in_face { 1.0 } else { 0.0 });
            }
        }
        frames.push(Frame::new(w, h, px).unwrap());
        focus.push(Grid::new(w, h, fm).unwrap());
        foreground.push(Grid::new(w, h, gm).unwrap());
    }
    DiskVideo {
        frames,
        focus,
        foreground,
    }
}

/// `phrases` lyric phrases spread across `seconds`, 2–5 words each.
pub fn lyric_words(rng: &mut impl Rng, phrases: usize, seconds: f64) -> Vec<WordTiming> {
    const VOCAB: [&str; 16] = [
        "night", "we", "run", "under", "neon", "light", "hold", "on", "to", "me", "city", "sleeps",
        "and", "hearts", "burn", "bright",
    ];
    let slot = seconds / phrases as f64;
    let mut words = Vec::new();
    for p in 0..phrases {
        let mut t = p as f64 * slot + 0.1;
        let end = (p + 1) as f64 * slot - 0.7;
        let count = rng.gen_range(2..=5);
        let step = (end - t) / count as f64;
        for _ in 0..count {
            let dur = step * rng.gen_range(0.5..0.95);
            let text = VOCAB[rng.gen_range(0..VOCAB.len())];
            words.push(WordTiming::new(text, t, t + dur).unwrap());
            t += step;
        }
    }
    words
}
