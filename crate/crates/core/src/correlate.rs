//! Valid-mode 2D cross-correlation with a direct and a transform-domain path.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scalar::Scalar;

/// Kernel-area × output-area product above which the FFT path wins.
///
/// Kernel area × output area above which the transform path is used.
///
/// On 320×180 maps (`examples/fft_crossover.rs`) the two paths break even
/// around 1.2e7–2.3e7 multiply-adds; text kernels are mostly empty, which
/// favors the direct path, so the switch sits at the top of that range.
pub const DEFAULT_FFT_CROSSOVER: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvBackend {
    Direct,
    Transform,
    /// Transform when kernel area × output area exceeds the crossover.
    Auto {
        crossover: usize,
    },
}

impl Default for ConvBackend {
    fn default() -> Self {
        ConvBackend::Auto {
            crossover: DEFAULT_FFT_CROSSOVER,
        }
    }
}

/// Output dimensions of a valid-mode correlation.
pub fn valid_dims(image: (usize, usize), kernel: (usize, usize)) -> Result<(usize, usize)> {
    let ((iw, ih), (kw, kh)) = (image, kernel);
    if kw > iw || kh > ih || kw == 0 || kh == 0 {
        return Err(Error::KernelTooLarge {
            kernel_w: kw,
            kernel_h: kh,
            image_w: iw,
            image_h: ih,
        });
    }
    Ok((iw - kw + 1, ih - kh + 1))
}

/// `out(x, y) = Σ image(y + i, x + j) · kernel(i, j)` over the valid region.
pub fn cross_correlate<T: Scalar>(
    image: &Grid<T>,
    kernel: &Grid<T>,
    backend: ConvBackend,
) -> Result<Grid<T>> {
    let (ow, oh) = valid_dims(image.dims(), kernel.dims())?;
    let use_fft = match backend {
        ConvBackend::Direct => false,
        ConvBackend::Transform => true,
        ConvBackend::Auto { crossover } => kernel.as_slice().len() * ow * oh > crossover,
    };
    if use_fft {
        Ok(correlate_fft(image, kernel, ow, oh))
    } else {
        Ok(correlate_direct(image, kernel, ow, oh))
    }
}

fn correlate_direct<T: Scalar>(image: &Grid<T>, kernel: &Grid<T>, ow: usize, oh: usize) -> Grid<T> {
    let (kw, kh) = kernel.dims();
    // Skip zero taps; text kernels are mostly empty.
    let taps: Vec<(usize, usize, T)> = (0..kh)
        .flat_map(|i| (0..kw).map(move |j| (j, i)))
        .map(|(j, i)| (j, i, kernel.get(j, i)))
        .filter(|&(_, _, v)| v != T::zero())
        .collect();
    let mut out = vec![T::zero(); ow * oh];
    out.par_chunks_mut(ow).enumerate().for_each(|(y, row)| {
        for &(j, i, kv) in &taps {
            let src = &image.row(y + i)[j..j + ow];
            for (o, &s) in row.iter_mut().zip(src) {
                *o += s * kv;
            }
        }
    });
    Grid::new(ow, oh, out).expect("valid dims")
}

/// Circular correlation at the image size; the valid region never wraps.
fn correlate_fft<T: Scalar>(image: &Grid<T>, kernel: &Grid<T>, ow: usize, oh: usize) -> Grid<T> {
    let (w, h) = image.dims();
    let (kw, kh) = kernel.dims();
    let mut planner = FftPlanner::<T>::new();

    let mut img: Vec<Complex<T>> = image
        .as_slice()
        .iter()
        .map(|&v| Complex::new(v, T::zero()))
        .collect();
    let mut ker = vec![Complex::new(T::zero(), T::zero()); w * h];
    for i in 0..kh {
        for j in 0..kw {
            ker[i * w + j].re = kernel.get(j, i);
        }
    }
    fft_2d(&mut planner, &mut img, w, h, FftDirection::Forward);
    fft_2d(&mut planner, &mut ker, w, h, FftDirection::Forward);
    for (a, b) in img.iter_mut().zip(&ker) {
        *a *= b.conj();
    }
    fft_2d(&mut planner, &mut img, w, h, FftDirection::Inverse);

    let scale = T::one() / T::of((w * h) as f64);
    Grid::from_fn(ow, oh, |x, y| img[y * w + x].re * scale)
}

fn fft_2d<T: Scalar>(
    planner: &mut FftPlanner<T>,
    data: &mut [Complex<T>],
    w: usize,
    h: usize,
    dir: FftDirection,
) {
    let rows = planner.plan_fft(w, dir);
    rows.process(data);

    let cols = planner.plan_fft(h, dir);
    let mut transposed = vec![Complex::new(T::zero(), T::zero()); w * h];
    for y in 0..h {
        for x in 0..w {
            transposed[x * h + y] = data[y * w + x];
        }
    }
    cols.process(&mut transposed);
    for x in 0..w {
        for y in 0..h {
            data[y * w + x] = transposed[x * h + y];
        }
    }
}
