//! Unnormalized forward / `1/n^dim`-normalized inverse FFTs applied axis by
//! axis over n-dimensional complex arrays. Plans are cached per length and
//! direction for the lifetime of the process.

use ndarray::ArrayD;
use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

fn plan(n: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, dir == FftDirection::Forward);
    let mut map = cache.lock().unwrap();
    map.entry(key)
        .or_insert_with(|| FftPlanner::new().plan_fft(n, dir))
        .clone()
}

fn transform_axis(data: &mut ArrayD<Complex64>, axis: usize, dir: FftDirection) {
    let shape = data.shape().to_vec();
    let n = shape[axis];
    let fft = plan(n, dir);
    let slice = data.as_slice_mut().expect("standard layout");
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let stride: usize = shape[axis + 1..].iter().product();
    if stride == 1 {
        // Contiguous lanes: one call transforms every length-n chunk.
        fft.process_with_scratch(slice, &mut scratch);
        return;
    }
    // Strided lanes: gather/scatter through a small buffer with direct
    // index arithmetic (standard layout).
    let block = n * stride;
    let nblocks = slice.len() / block;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for b in 0..nblocks {
        let base = b * block;
        for s in 0..stride {
            let start = base + s;
            for (i, v) in buf.iter_mut().enumerate() {
                *v = slice[start + i * stride];
            }
            fft.process_with_scratch(&mut buf, &mut scratch);
            for (i, v) in buf.iter().enumerate() {
                slice[start + i * stride] = *v;
            }
        }
    }
}

/// Forward transform along every axis, unscaled.
pub(crate) fn forward_nd(data: &mut ArrayD<Complex64>) {
    for axis in 0..data.ndim() {
        transform_axis(data, axis, FftDirection::Forward);
    }
}

/// Inverse transform along every axis, scaled by `1/len` overall so that
/// `inverse(forward(x)) == x`.
pub(crate) fn inverse_nd(data: &mut ArrayD<Complex64>) {
    for axis in 0..data.ndim() {
        transform_axis(data, axis, FftDirection::Inverse);
    }
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::IxDyn;

    #[test]
    fn round_trip_2d() {
        let shape = IxDyn(&[8, 8]);
        let mut data = ArrayD::from_shape_fn(shape, |ix| {
            Complex64::new((ix[0] * 3 + ix[1]) as f64, (ix[1] * 7) as f64 * 0.25)
        });
        let orig = data.clone();
        forward_nd(&mut data);
        inverse_nd(&mut data);
        let max_err = data
            .iter()
            .zip(orig.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max);
        assert!(max_err < 1e-12, "round-trip error {max_err}");
    }

    #[test]
    fn single_mode_forward() {
        // e^{2πi x} sampled on 8 points -> coefficient n at frequency index 1.
        let n = 8;
        let mut data = ArrayD::from_shape_fn(IxDyn(&[n]), |ix| {
            let x = ix[0] as f64 / n as f64;
            Complex64::new(
                (2.0 * std::f64::consts::PI * x).cos(),
                (2.0 * std::f64::consts::PI * x).sin(),
            )
        });
        forward_nd(&mut data);
        assert!((data[IxDyn(&[1])] - Complex64::new(n as f64, 0.0)).norm() < 1e-12);
        assert!(data[IxDyn(&[0])].norm() < 1e-12);
    }
}
