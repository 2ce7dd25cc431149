//! Two-dimensional FFTs over row-major grids, with a process-wide plan cache.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

type Plan = Arc<dyn Fft<f64>>;
type PlanCache = Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Plan>)>;

fn plan(len: usize, direction: FftDirection) -> Plan {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    let (planner, plans) = &mut *guard;
    let key = (len, direction == FftDirection::Forward);
    plans
        .entry(key)
        .or_insert_with(|| planner.plan_fft(len, direction))
        .clone()
}

/// Transforms every length-`n` row of `data`, one scratch buffer per worker.
fn rows(data: &mut [Complex64], n: usize, fft: &Plan) {
    let workers = rayon::current_num_threads();
    let count = data.len() / n;
    if workers <= 1 || count < 2 * workers || data.len() < 64 * 64 {
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(data, &mut scratch);
        return;
    }
    let per = count.div_ceil(workers) * n;
    data.par_chunks_mut(per).for_each(|chunk| {
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(chunk, &mut scratch);
    });
}

/// Out-of-place transpose in cache-sized tiles.
fn transpose(src: &[Complex64], dst: &mut [Complex64], n1: usize, n2: usize) {
    const TILE: usize = 16;
    for b1 in (0..n1).step_by(TILE) {
        let e1 = (b1 + TILE).min(n1);
        for b2 in (0..n2).step_by(TILE) {
            let e2 = (b2 + TILE).min(n2);
            for j1 in b1..e1 {
                let row = &src[j1 * n2 + b2..j1 * n2 + e2];
                for (j2, v) in (b2..e2).zip(row) {
                    dst[j2 * n1 + j1] = *v;
                }
            }
        }
    }
}

/// Unnormalized 2-D transform in place; `data[j1 * n2 + j2]`.
pub fn fft2(data: &mut [Complex64], n1: usize, n2: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), n1 * n2);
    rows(data, n2, &plan(n2, direction));
    let mut t = vec![Complex64::default(); data.len()];
    transpose(data, &mut t, n1, n2);
    rows(&mut t, n1, &plan(n1, direction));
    transpose(&t, data, n2, n1);
}

/// Unnormalized 1-D transform in place.
pub fn fft1(data: &mut [Complex64], direction: FftDirection) {
    plan(data.len(), direction).process(data);
}

/// Signed frequency of FFT bin `b` on an axis of length `n`.
#[inline]
pub fn freq(b: usize, n: usize) -> i64 {
    if b < n / 2 {
        b as i64
    } else {
        b as i64 - n as i64
    }
}

/// Bin holding signed frequency `m` on an axis of length `n`.
#[inline]
pub fn bin(m: i64, n: usize) -> usize {
    m.rem_euclid(n as i64) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_then_inverse_is_identity_up_to_scale() {
        let (n1, n2) = (6, 8);
        let orig: Vec<Complex64> = (0..n1 * n2)
            .map(|k| Complex64::new((k as f64).sin(), (k as f64 * 0.3).cos()))
            .collect();
        let mut d = orig.clone();
        fft2(&mut d, n1, n2, FftDirection::Forward);
        fft2(&mut d, n1, n2, FftDirection::Inverse);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a / (n1 * n2) as f64 - b).norm() < 1e-13);
        }
    }

    #[test]
    fn single_mode_lands_in_its_bin() {
        let (n1, n2) = (8, 4);
        let mut d: Vec<Complex64> = (0..n1 * n2)
            .map(|k| {
                let (j1, j2) = (k / n2, k % n2);
                let ph = 2.0
                    * std::f64::consts::PI
                    * (-3.0 * j1 as f64 / n1 as f64 + j2 as f64 / n2 as f64);
                Complex64::from_polar(1.0, ph)
            })
            .collect();
        fft2(&mut d, n1, n2, FftDirection::Forward);
        let peak = bin(-3, n1) * n2 + bin(1, n2);
        assert!((d[peak].re - (n1 * n2) as f64).abs() < 1e-10);
        assert_eq!(freq(bin(-3, 8), 8), -3);
    }
}
