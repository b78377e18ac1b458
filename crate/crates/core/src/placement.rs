//! Energy cost maps over the valid placement region and their weighted argmin.
//!
//! Every map is indexed by the candidate upper-left corner of the text box,
//! so all four terms share the `(W − kw + 1) × (H − kh + 1)` grid.

use serde::{Deserialize, Serialize};

use crate::correlate::{cross_correlate, valid_dims, ConvBackend};
use crate::error::{Error, Result};
use crate::grid::{Grid, MaskFrame, PixelCoord};
use crate::kernel_raster::{pad_kernel, TextKernel};
use crate::media_ingest::PhraseContext;
use crate::scalar::Scalar;

/// Energy values over candidate placements; lower is better.
pub type CostMap<T> = Grid<T>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorMode {
    /// Measure from the text box's upper-left corner.
    #[default]
    UpperLeft,
    /// Measure from the text box's center.
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyWeights<T> {
    pub fcs: T,
    pub fgd: T,
    pub cnt: T,
    pub prv: T,
}

impl<T: Scalar> Default for EnergyWeights<T> {
    fn default() -> Self {
        Self::uniform(T::one())
    }
}

impl<T: Scalar> EnergyWeights<T> {
    pub fn uniform(w: T) -> Self {
        Self {
            fcs: w,
            fgd: w,
            cnt: w,
            prv: w,
        }
    }

    pub fn new(fcs: T, fgd: T, cnt: T, prv: T) -> Self {
        Self { fcs, fgd, cnt, prv }
    }

    pub fn scaled(&self, c: T) -> Self {
        Self::new(self.fcs * c, self.fgd * c, self.cnt * c, self.prv * c)
    }

    pub fn as_array(&self) -> [T; 4] {
        [self.fcs, self.fgd, self.cnt, self.prv]
    }

    pub fn validate(&self) -> Result<()> {
        if self
            .as_array()
            .iter()
            .any(|w| !(w.is_finite() && *w >= T::zero()))
        {
            return Err(Error::InvalidInput(format!(
                "energy weights must be finite and non-negative, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementConfig {
    pub anchor: AnchorMode,
    /// Zero border around the kernel for the contrast term.
    pub surround_margin: usize,
    /// Min-max normalize every term before weighting.
    pub normalize: bool,
    pub backend: ConvBackend,
    pub text_color: [u8; 3],
}

impl Default for PlacementConfig {
    fn default() -> Self {
        Self {
            anchor: AnchorMode::UpperLeft,
            surround_margin: 2,
            normalize: true,
            backend: ConvBackend::default(),
            text_color: [255, 255, 255],
        }
    }
}

/// Intensity-weighted mean `(x, y)` of the mask; the frame center when the
/// mask is empty.
pub fn focus_center<T: Scalar>(mask: &MaskFrame<T>) -> (T, T) {
    let (w, h) = mask.dims();
    let mut cols = vec![T::zero(); w];
    let mut rows = vec![T::zero(); h];
    for (y, row_sum) in rows.iter_mut().enumerate() {
        for (x, &v) in mask.row(y).iter().enumerate() {
            cols[x] += v;
            *row_sum += v;
        }
    }
    let total = cols.iter().fold(T::zero(), |a, &v| a + v);
    if total.is_nan() || total <= T::zero() {
        let half = T::of(0.5);
        return (T::of((w - 1) as f64) * half, T::of((h - 1) as f64) * half);
    }
    // Normalizing the marginals first keeps point masses exact.
    let mean = |marginal: &[T]| {
        marginal
            .iter()
            .enumerate()
            .fold(T::zero(), |a, (i, &m)| a + (m / total) * T::of(i as f64))
    };
    (mean(&cols), mean(&rows))
}

fn anchor_offset<T: Scalar>(anchor: AnchorMode, kernel: (usize, usize)) -> (T, T) {
    match anchor {
        AnchorMode::UpperLeft => (T::zero(), T::zero()),
        AnchorMode::Center => {
            let half = T::of(0.5);
            (
                T::of((kernel.0 - 1) as f64) * half,
                T::of((kernel.1 - 1) as f64) * half,
            )
        }
    }
}

/// Distance from each candidate's anchor to the focus center of mass.
pub fn energy_fcs<T: Scalar>(
    avg_focus: &MaskFrame<T>,
    valid: (usize, usize),
    anchor: AnchorMode,
) -> Result<CostMap<T>> {
    let (w, h) = avg_focus.dims();
    if valid.0 == 0 || valid.1 == 0 || valid.0 > w || valid.1 > h {
        return Err(Error::InvalidInput(format!(
            "valid region {valid:?} does not fit a {w}x{h} mask"
        )));
    }
    let kernel = (w - valid.0 + 1, h - valid.1 + 1);
    let (cx, cy) = focus_center(avg_focus);
    let (ox, oy) = anchor_offset::<T>(anchor, kernel);
    Ok(Grid::from_fn(valid.0, valid.1, |x, y| {
        let dx = T::of(x as f64) + ox - cx;
        let dy = T::of(y as f64) + oy - cy;
        dx.hypot(dy)
    }))
}

/// Foreground overlap `s̄_fgd ⊗ k`.
pub fn energy_fgd<T: Scalar>(
    avg_foreground: &MaskFrame<T>,
    kernel: &TextKernel<T>,
    backend: ConvBackend,
) -> Result<CostMap<T>> {
    cross_correlate(avg_foreground, kernel.coverage(), backend)
}

/// Euclidean RGB distance of every background pixel to the text color.
pub fn color_difference<T: Scalar>(avg_background: &Grid<[T; 3]>, text_color: [u8; 3]) -> Grid<T> {
    let color = text_color.map(|c| T::of(f64::from(c)));
    avg_background.map(|px| {
        let d: [T; 3] = std::array::from_fn(|c| px[c] - color[c]);
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    })
}

fn replicate_pad<T: Scalar>(image: &Grid<T>, margin: usize) -> Grid<T> {
    let (w, h) = image.dims();
    Grid::from_fn(w + 2 * margin, h + 2 * margin, |x, y| {
        let sx = x.saturating_sub(margin).min(w - 1);
        let sy = y.saturating_sub(margin).min(h - 1);
        image.get(sx, sy)
    })
}

/// Contrast term: colour difference summed over the pixels around the text
/// (`1 − k` of the margin-padded kernel), flipped so high contrast is low cost.
pub fn energy_cnt<T: Scalar>(
    avg_background: &Grid<[T; 3]>,
    text_color: [u8; 3],
    kernel: &TextKernel<T>,
    surround_margin: usize,
    backend: ConvBackend,
) -> Result<CostMap<T>> {
    valid_dims(avg_background.dims(), kernel.dims())?;
    let diff = replicate_pad(
        &color_difference(avg_background, text_color),
        surround_margin,
    );
    let padded = pad_kernel(kernel, surround_margin);
    let inverted = padded.coverage().map(|v| T::one() - v);
    let surround = cross_correlate(&diff, &inverted, backend)?;
    let (_, max) = surround.min_max();
    Ok(surround.map(|v| (max - v).max(T::zero())))
}

/// Distance to the previous phrase's position, or all zeros without one.
pub fn energy_prv<T: Scalar>(prev: Option<PixelCoord>, valid: (usize, usize)) -> CostMap<T> {
    match prev {
        None => Grid::filled(valid.0, valid.1, T::zero()),
        Some(p) => {
            let (px, py) = (T::of(p.x as f64), T::of(p.y as f64));
            Grid::from_fn(valid.0, valid.1, |x, y| {
                (T::of(x as f64) - px).hypot(T::of(y as f64) - py)
            })
        }
    }
}

/// Min-max rescale into `[0, 1]`; constant maps become all zeros.
pub fn normalize_map<T: Scalar>(map: &CostMap<T>) -> CostMap<T> {
    let (lo, hi) = map.min_max();
    let range = hi - lo;
    if range.is_nan() || range <= T::zero() {
        return map.map(|_| T::zero());
    }
    map.map(|v| (v - lo) / range)
}

/// Per-term energy values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermValues<T> {
    pub fcs: T,
    pub fgd: T,
    pub cnt: T,
    pub prv: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementResult<T> {
    pub position: PixelCoord,
    /// Term values at `position`, normalized when normalization is on.
    pub terms: TermValues<T>,
    pub combined: T,
}

/// The four term maps (post-normalization when enabled) and their weighted sum.
#[derive(Debug, Clone)]
pub struct EnergyMaps<T> {
    pub fcs: CostMap<T>,
    pub fgd: CostMap<T>,
    pub cnt: CostMap<T>,
    pub prv: CostMap<T>,
    pub combined: CostMap<T>,
}

impl<T: Scalar> EnergyMaps<T> {
    pub fn terms_at(&self, p: PixelCoord) -> TermValues<T> {
        TermValues {
            fcs: self.fcs.get(p.x, p.y),
            fgd: self.fgd.get(p.x, p.y),
            cnt: self.cnt.get(p.x, p.y),
            prv: self.prv.get(p.x, p.y),
        }
    }

    pub fn result_at(&self, p: PixelCoord) -> PlacementResult<T> {
        PlacementResult {
            position: p,
            terms: self.terms_at(p),
            combined: self.combined.get(p.x, p.y),
        }
    }

    pub fn argmin(&self) -> PlacementResult<T> {
        let (x, y) = self.combined.argmin();
        self.result_at(PixelCoord::new(x, y))
    }
}

pub fn energy_maps<T: Scalar>(
    ctx: &PhraseContext<T>,
    kernel: &TextKernel<T>,
    weights: &EnergyWeights<T>,
    prev: Option<PixelCoord>,
    cfg: &PlacementConfig,
) -> Result<EnergyMaps<T>> {
    weights.validate()?;
    let valid = valid_dims(ctx.dims(), kernel.dims())?;
    let raw = [
        energy_fcs(&ctx.avg_focus, valid, cfg.anchor)?,
        energy_fgd(&ctx.avg_foreground, kernel, cfg.backend)?,
        energy_cnt(
            &ctx.avg_background,
            cfg.text_color,
            kernel,
            cfg.surround_margin,
            cfg.backend,
        )?,
        energy_prv(prev, valid),
    ];
    let [fcs, fgd, cnt, prv] = if cfg.normalize {
        raw.map(|m| normalize_map(&m))
    } else {
        raw
    };
    let w = weights.as_array();
    let mut combined = Grid::filled(valid.0, valid.1, T::zero());
    for (weight, map) in w.iter().zip([&fcs, &fgd, &cnt, &prv]) {
        if *weight == T::zero() {
            continue;
        }
        for (c, &v) in combined.as_mut_slice().iter_mut().zip(map.as_slice()) {
            *c += *weight * v;
        }
    }
    Ok(EnergyMaps {
        fcs,
        fgd,
        cnt,
        prv,
        combined,
    })
}

/// Weighted-energy argmin; ties go to the smallest `y`, then the smallest `x`.
pub fn place_phrase<T: Scalar>(
    ctx: &PhraseContext<T>,
    kernel: &TextKernel<T>,
    weights: &EnergyWeights<T>,
    prev: Option<PixelCoord>,
    cfg: &PlacementConfig,
) -> Result<PlacementResult<T>> {
    Ok(energy_maps(ctx, kernel, weights, prev, cfg)?.argmin())
}

/// Bottom-centered placement used by the subtitle-style baseline.
pub fn bottom_center(
    frame: (usize, usize),
    kernel: (usize, usize),
    bottom_margin: usize,
) -> Result<PixelCoord> {
    let (vw, vh) = valid_dims(frame, kernel)?;
    let x = (vw - 1) / 2;
    let y = (frame.1 - kernel.1)
        .saturating_sub(bottom_margin)
        .min(vh - 1);
    Ok(PixelCoord::new(x, y))
}
