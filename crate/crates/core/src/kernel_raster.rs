//! Rasterizes laid-out phrase lines into the grayscale text kernel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::font::{self, GLYPH_HEIGHT, GLYPH_WIDTH};
use crate::grid::Grid;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    Left,
    Center,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TextStyle {
    pub glyph_height_px: usize,
    pub color: [u8; 3],
    /// Gap between stacked lines; `None` means a quarter of the glyph height.
    pub leading_px: Option<usize>,
    pub alignment: Alignment,
}

impl Default for TextStyle {
    fn default() -> Self {
        Self {
            glyph_height_px: 40,
            color: [255, 255, 255],
            leading_px: None,
            alignment: Alignment::Center,
        }
    }
}

impl TextStyle {
    pub fn leading(&self) -> usize {
        self.leading_px.unwrap_or(self.glyph_height_px / 4)
    }

    /// Scaled glyph width, proportional to the 5×7 cell.
    pub fn glyph_width(&self) -> usize {
        (GLYPH_WIDTH * self.glyph_height_px + GLYPH_HEIGHT / 2) / GLYPH_HEIGHT
    }

    /// One font column at the current scale.
    pub fn glyph_gap(&self) -> usize {
        ((self.glyph_height_px + GLYPH_HEIGHT / 2) / GLYPH_HEIGHT).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.glyph_height_px < 5 {
            return Err(Error::InvalidInput(format!(
                "glyph_height_px must be at least 5, got {}",
                self.glyph_height_px
            )));
        }
        Ok(())
    }
}

/// Text coverage raster with values in `[0, 1]` and at least one inked pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct TextKernel<T> {
    coverage: Grid<T>,
}

impl<T: Scalar> TextKernel<T> {
    pub fn new(coverage: Grid<T>) -> Result<Self> {
        if coverage
            .as_slice()
            .iter()
            .any(|v| !(*v >= T::zero() && *v <= T::one()))
        {
            return Err(Error::InvalidInput(
                "kernel coverage must lie in [0, 1]".into(),
            ));
        }
        if !coverage.as_slice().iter().any(|v| *v > T::zero()) {
            return Err(Error::InvalidInput("kernel has no inked pixel".into()));
        }
        Ok(Self { coverage })
    }

    pub fn coverage(&self) -> &Grid<T> {
        &self.coverage
    }

    pub fn width(&self) -> usize {
        self.coverage.width()
    }

    pub fn height(&self) -> usize {
        self.coverage.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.coverage.dims()
    }
}

/// Pixel box of one word inside the kernel, end-exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordBox {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl WordBox {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }
}

#[derive(Debug, Clone)]
pub struct TextLayout<T> {
    pub kernel: TextKernel<T>,
    /// One box per word, in reading order.
    pub words: Vec<WordBox>,
    pub warnings: Vec<String>,
}

pub fn rasterize_phrase<T: Scalar>(lines: &[String], style: &TextStyle) -> Result<TextKernel<T>> {
    Ok(layout_phrase(lines, style)?.kernel)
}

/// Renders `lines` with the embedded font and crops to the inked extent.
pub fn layout_phrase<T: Scalar>(lines: &[String], style: &TextStyle) -> Result<TextLayout<T>> {
    style.validate()?;
    if lines.is_empty() || lines.iter().any(|l| l.is_empty()) {
        return Err(Error::InvalidInput("phrase lines must be non-empty".into()));
    }
    let gh = style.glyph_height_px;
    let gw = style.glyph_width();
    let gap = style.glyph_gap();
    let leading = style.leading();

    let line_chars: Vec<Vec<char>> = lines.iter().map(|l| l.chars().collect()).collect();
    let line_width = |n: usize| n * gw + (n - 1) * gap;
    let block_w = line_chars
        .iter()
        .map(|c| line_width(c.len()))
        .max()
        .unwrap_or(0);
    let block_h = lines.len() * gh + (lines.len() - 1) * leading;

    let mut warnings = Vec::new();
    let mut canvas = vec![false; block_w * block_h];
    let mut boxes = Vec::new();

    for (li, chars) in line_chars.iter().enumerate() {
        let x_off = match style.alignment {
            Alignment::Left => 0,
            Alignment::Center => (block_w - line_width(chars.len())) / 2,
        };
        let y_off = li * (gh + leading);
        let mut word_start: Option<usize> = None;
        for (ci, &c) in chars.iter().enumerate() {
            let gx = x_off + ci * (gw + gap);
            if c == ' ' {
                if let Some(s) = word_start.take() {
                    boxes.push((s, gx - gap, y_off));
                }
            } else if word_start.is_none() {
                word_start = Some(gx);
            }
            if !font::is_supported(c) {
                warnings.push(format!(
                    "character {c:?} is not in the font, drawn as a box"
                ));
            }
            for dy in 0..gh {
                let row = dy * GLYPH_HEIGHT / gh;
                for dx in 0..gw {
                    if font::glyph_pixel(c, dx * GLYPH_WIDTH / gw, row) {
                        canvas[(y_off + dy) * block_w + gx + dx] = true;
                    }
                }
            }
        }
        if let Some(s) = word_start {
            boxes.push((s, x_off + line_width(chars.len()), y_off));
        }
    }

    // Tight crop.
    let inked = |x: usize, y: usize| canvas[y * block_w + x];
    let rows: Vec<usize> = (0..block_h)
        .filter(|&y| (0..block_w).any(|x| inked(x, y)))
        .collect();
    let cols: Vec<usize> = (0..block_w)
        .filter(|&x| (0..block_h).any(|y| inked(x, y)))
        .collect();
    let (Some(&y0), Some(&y1), Some(&x0), Some(&x1)) =
        (rows.first(), rows.last(), cols.first(), cols.last())
    else {
        return Err(Error::InvalidInput(format!(
            "phrase {lines:?} renders no ink"
        )));
    };
    let coverage = Grid::from_fn(x1 - x0 + 1, y1 - y0 + 1, |x, y| {
        if inked(x + x0, y + y0) {
            T::one()
        } else {
            T::zero()
        }
    });
    let (kw, kh) = coverage.dims();
    let words = boxes
        .into_iter()
        .map(|(sx, ex, ly)| WordBox {
            x0: sx.saturating_sub(x0).min(kw),
            x1: ex.saturating_sub(x0).min(kw),
            y0: ly.saturating_sub(y0).min(kh),
            y1: (ly + gh).saturating_sub(y0).min(kh),
        })
        .collect();
    Ok(TextLayout {
        kernel: TextKernel::new(coverage)?,
        words,
        warnings,
    })
}

/// Surrounds the kernel with `margin` zero pixels on every side.
pub fn pad_kernel<T: Scalar>(kernel: &TextKernel<T>, margin: usize) -> TextKernel<T> {
    let (w, h) = kernel.dims();
    let src = kernel.coverage();
    let padded = Grid::from_fn(w + 2 * margin, h + 2 * margin, |x, y| {
        if x >= margin && x < margin + w && y >= margin && y < margin + h {
            src.get(x - margin, y - margin)
        } else {
            T::zero()
        }
    });
    TextKernel { coverage: padded }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn style(h: usize) -> TextStyle {
        TextStyle {
            glyph_height_px: h,
            ..TextStyle::default()
        }
    }

    fn lines(ls: &[&str]) -> Vec<String> {
        ls.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn identity_scale_capital_a() {
        let k: TextKernel<f64> = rasterize_phrase(&lines(&["A"]), &style(7)).unwrap();
        assert_eq!(k.dims(), (5, 7));
        for y in 0..7 {
            for x in 0..5 {
                let expect = if font::glyph_pixel('A', x, y) {
                    1.0
                } else {
                    0.0
                };
                assert_eq!(k.coverage().get(x, y), expect);
            }
        }
    }

    #[test]
    fn two_lines_centered() {
        let s = style(7);
        let k: TextKernel<f64> = rasterize_phrase(&lines(&["ab", "c"]), &s).unwrap();
        assert_eq!(k.height(), 2 * 7 + s.leading());
        assert_eq!(k.width(), 2 * 5 + 1);
        // 'c' is 5 wide and centered under 11 columns: offset 3.
        let second_row = 7 + s.leading() + 3;
        let inked: Vec<usize> = (0..k.width())
            .filter(|&x| k.coverage().get(x, second_row) > 0.0)
            .collect();
        assert_eq!(inked, vec![3]);
    }

    #[test]
    fn word_boxes_follow_words() {
        let layout: TextLayout<f64> =
            layout_phrase(&lines(&["hi you", "there"]), &style(7)).unwrap();
        assert_eq!(layout.words.len(), 3);
        assert!(layout.words[0].x1 <= layout.words[1].x0);
        assert!(layout.words[2].y0 > layout.words[0].y0);
    }

    #[test]
    fn unsupported_chars_warn() {
        let layout: TextLayout<f64> = layout_phrase(&lines(&["é"]), &style(7)).unwrap();
        assert_eq!(layout.warnings.len(), 1);
        assert!(layout
            .kernel
            .coverage()
            .as_slice()
            .iter()
            .all(|&v| v == 1.0));
    }

    #[test]
    fn blank_text_is_rejected() {
        assert!(rasterize_phrase::<f64>(&lines(&["   "]), &style(7)).is_err());
        assert!(rasterize_phrase::<f64>(&[], &style(7)).is_err());
        assert!(rasterize_phrase::<f64>(&lines(&["a"]), &style(4)).is_err());
    }

    #[test]
    fn padding() {
        let k = TextKernel::new(Grid::filled(2, 2, 1.0f64)).unwrap();
        assert_eq!(pad_kernel(&k, 0), k);
        let p = pad_kernel(&k, 1);
        assert_eq!(p.dims(), (4, 4));
        assert_eq!(p.coverage().sum(), 4.0);
        assert_eq!(p.coverage().get(1, 1), 1.0);
        assert_eq!(p.coverage().get(0, 0), 0.0);
    }

    #[test]
    fn default_scale_is_proportional() {
        let s = TextStyle::default();
        assert_eq!(s.glyph_width(), 29);
        assert_eq!(s.glyph_gap(), 6);
        assert_eq!(s.leading(), 10);
    }
}
