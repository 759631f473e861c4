//! Cached 3-D complex FFTs built from per-axis 1-D transforms.
//!
//! Plans are cached process-wide per grid size. The 3-D transform applies the
//! 1-D FFT along each axis in turn; every line is gathered into a contiguous
//! scratch buffer, transformed, and scattered back. Lines are independent, so
//! the parallel loop below is bitwise deterministic for any thread count.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLAN_CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();

fn plans_for(n: usize) -> Arc<Plans> {
    let cache = PLAN_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("FFT plan cache mutex poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

/// Applies the 1-D FFT along `axis` (0, 1 or 2) to every line of `data`.
fn fft_axis(grid: &Grid, data: &mut [Complex64], axis: usize, dir: Direction) {
    let n = grid.n();
    let plans = plans_for(n);
    let fft = match dir {
        Direction::Forward => &plans.forward,
        Direction::Inverse => &plans.inverse,
    };

    // Stride between consecutive elements of a line, and the enumeration of
    // line start offsets, for each axis of the (i, j, l) row-major layout.
    let (stride, starts): (usize, Vec<usize>) = match axis {
        0 => (
            n * n,
            (0..n * n).collect(), // start = j*n + l
        ),
        1 => (
            n,
            (0..n * n)
                .map(|t| {
                    let (i, l) = (t / n, t % n);
                    i * n * n + l
                })
                .collect(),
        ),
        2 => (
            1,
            (0..n * n).map(|t| t * n).collect(), // start = (i*n + j)*n
        ),
        _ => unreachable!("axis must be 0, 1 or 2"),
    };

    let data_ptr = SendPtr(data.as_mut_ptr());
    starts.par_iter().for_each_init(
        || vec![Complex64::default(); n],
        |line, &start| {
            let ptr = data_ptr;
            // Lines never overlap: each (start, stride) pair addresses a
            // disjoint set of indices.
            unsafe {
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = *ptr.0.add(start + t * stride);
                }
                fft.process(line);
                for (t, slot) in line.iter().enumerate() {
                    *ptr.0.add(start + t * stride) = *slot;
                }
            }
        },
    );
}

#[derive(Clone, Copy)]
struct SendPtr(*mut Complex64);
unsafe impl Send for SendPtr {}
unsafe impl Sync for SendPtr {}

/// In-place forward DFT, then scales by `1/N³` so coefficients are the
/// Fourier-series coefficients of the sampled function: a constant field `c`
/// transforms to `c` at `k = 0`, and `sin(x₁)` to `∓i/2` at `k₁ = ±1`.
pub(crate) fn forward(grid: &Grid, data: &mut [Complex64]) {
    debug_assert_eq!(data.len(), grid.len());
    for axis in 0..3 {
        fft_axis(grid, data, axis, Direction::Forward);
    }
    let scale = 1.0 / grid.len() as f64;
    data.par_iter_mut().for_each(|c| *c *= scale);
}

/// In-place inverse DFT (`f(x) = Σ_k û(k) e^{i k·x}`, no further scaling).
pub(crate) fn inverse(grid: &Grid, data: &mut [Complex64]) {
    debug_assert_eq!(data.len(), grid.len());
    for axis in 0..3 {
        fft_axis(grid, data, axis, Direction::Inverse);
    }
}
