//! Times direct vs transform correlation over kernel sizes on a 320×180 map.
//!
//! `cargo run --release --example fft_crossover`

use std::time::Instant;

use lyricvid::correlate::{cross_correlate, ConvBackend};
use lyricvid::Grid;

fn time(img: &Grid<f64>, k: &Grid<f64>, backend: ConvBackend) -> f64 {
    let reps = 5;
    let start = Instant::now();
    for _ in 0..reps {
        std::hint::black_box(cross_correlate(img, k, backend).unwrap());
    }
    start.elapsed().as_secs_f64() * 1e3 / reps as f64
}

fn main() {
    let (w, h) = (320, 180);
    let img = Grid::from_fn(w, h, |x, y| ((x * 31 + y * 17) % 97) as f64 / 97.0);
    println!("kernel\twork\tdirect_ms\ttransform_ms");
    for (kw, kh) in [
        (2, 2),
        (4, 4),
        (6, 6),
        (8, 8),
        (12, 8),
        (16, 10),
        (24, 10),
        (40, 12),
        (60, 14),
        (100, 20),
        (160, 40),
    ] {
        let k = Grid::from_fn(kw, kh, |x, y| ((x + y) % 3) as f64 / 2.0);
        let work = kw * kh * (w - kw + 1) * (h - kh + 1);
        println!(
            "{kw}x{kh}\t{work}\t{:.2}\t{:.2}",
            time(&img, &k, ConvBackend::Direct),
            time(&img, &k, ConvBackend::Transform)
        );
    }
}
