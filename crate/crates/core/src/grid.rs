//! Periodic-box grid metadata: wavenumbers, Stokes-eigenvalue shells, and the
//! per-mode lookup tables shared by all spectral operators.

use crate::error::{Error, Result};
use ndarray::{ArrayD, IxDyn};
use std::collections::BTreeSet;

/// Largest supported number of grid points (`n^dim`). Guards against
/// accidentally building per-mode tables for resolutions far beyond what a
/// single workstation can hold in memory.
pub const MAX_POINTS: usize = 1 << 26;

/// Distinct values of `f1^2 + ... + fd^2` representable on an `n`-per-axis
/// grid (per-axis integer frequencies up to `n/2`), in increasing order.
/// The `m`-th Stokes eigenvalue of the box is `(2pi/L)^2` times entry `m`.
pub fn shell_table(dim: usize, n: usize) -> Vec<u64> {
    let half = (n / 2) as u64;
    let max_s = (dim as u64) * half * half;
    let mut seen = vec![false; (max_s + 1) as usize];
    match dim {
        2 => {
            for a in 0..=half {
                for b in 0..=a {
                    seen[(a * a + b * b) as usize] = true;
                }
            }
        }
        3 => {
            for a in 0..=half {
                for b in 0..=a {
                    let ab = a * a + b * b;
                    for c in 0..=b {
                        seen[(ab + c * c) as usize] = true;
                    }
                }
            }
        }
        _ => panic!("shell_table: dim must be 2 or 3"),
    }
    seen.iter()
        .enumerate()
        .filter_map(|(s, &hit)| hit.then_some(s as u64))
        .collect()
}

/// Periodic box `[0, L]^dim` sampled with `n` points per axis, plus cached
/// per-mode tables (wavenumbers, eigenvalue shells, dealiasing and Nyquist
/// masks) used by the spectral operators.
#[derive(Debug)]
pub struct Grid {
    dim: usize,
    n: usize,
    length: f64,
    /// Per-axis integer frequencies in DFT order: `[0, 1, ..., n/2, -(n/2-1), ..., -1]`.
    freq: Vec<i64>,
    /// Distinct `|f|^2` values in increasing order; `shells_s[0] == 0`.
    shells_s: Vec<u64>,
    /// `|k|^2` per mode, `k = (2pi/L) f`.
    ksq: ArrayD<f64>,
    /// `|f|^2` per mode (integer-exact shell membership tests).
    s_int: ArrayD<u64>,
    /// Wavenumber component `k_a` per mode, one array per axis.
    kvec: Vec<ArrayD<f64>>,
    /// True where every axis satisfies `3|f_a| <= n` (the 2/3 rule).
    dealias_keep: ArrayD<bool>,
    /// True where some axis carries the Nyquist frequency `n/2`.
    nyquist: ArrayD<bool>,
    /// `round(|f|)` per mode, for shell-binned spectra.
    shell_bin: ArrayD<u32>,
}

impl Grid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Grid> {
        if dim != 2 && dim != 3 {
            return Err(Error::Grid(format!("dim must be 2 or 3, got {dim}")));
        }
        if n < 4 || n % 2 != 0 {
            return Err(Error::Grid(format!("n must be even and >= 4, got {n}")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::Grid(format!("box side must be positive, got {length}")));
        }
        let points = n.checked_pow(dim as u32).filter(|&p| p <= MAX_POINTS);
        let total = points.ok_or_else(|| {
            Error::Grid(format!("{n}^{dim} points exceed the supported maximum {MAX_POINTS}"))
        })?;

        let freq: Vec<i64> = (0..n)
            .map(|i| if i <= n / 2 { i as i64 } else { i as i64 - n as i64 })
            .collect();
        let k_base = 2.0 * std::f64::consts::PI / length;

        let shape = IxDyn(&vec![n; dim]);
        let mut ksq = vec![0.0; total];
        let mut s_int = vec![0u64; total];
        let mut kvec = vec![vec![0.0; total]; dim];
        let mut dealias_keep = vec![false; total];
        let mut nyquist = vec![false; total];
        let mut shell_bin = vec![0u32; total];

        // Row-major index decomposition: axis 0 is the slowest.
        let mut idx = vec![0usize; dim];
        for flat in 0..total {
            let mut rem = flat;
            for a in (0..dim).rev() {
                idx[a] = rem % n;
                rem /= n;
            }
            let mut s = 0u64;
            let mut keep = true;
            let mut nyq = false;
            for a in 0..dim {
                let f = freq[idx[a]];
                s += (f * f) as u64;
                kvec[a][flat] = k_base * f as f64;
                if 3 * f.unsigned_abs() > n as u64 {
                    keep = false;
                }
                if f.unsigned_abs() == (n / 2) as u64 {
                    nyq = true;
                }
            }
            ksq[flat] = k_base * k_base * s as f64;
            s_int[flat] = s;
            dealias_keep[flat] = keep;
            nyquist[flat] = nyq;
            shell_bin[flat] = (s as f64).sqrt().round() as u32;
        }

        let mk_f64 = |v: Vec<f64>| ArrayD::from_shape_vec(shape.clone(), v).unwrap();
        Ok(Grid {
            dim,
            n,
            length,
            freq,
            shells_s: shell_table(dim, n),
            ksq: mk_f64(ksq),
            s_int: ArrayD::from_shape_vec(shape.clone(), s_int).unwrap(),
            kvec: kvec.into_iter().map(mk_f64).collect(),
            dealias_keep: ArrayD::from_shape_vec(shape.clone(), dealias_keep).unwrap(),
            nyquist: ArrayD::from_shape_vec(shape.clone(), nyquist).unwrap(),
            shell_bin: ArrayD::from_shape_vec(shape.clone(), shell_bin).unwrap(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Per-axis integer frequencies in DFT order.
    pub fn frequencies(&self) -> &[i64] {
        &self.freq
    }

    /// `2pi/L`, the wavenumber of the first mode.
    pub fn k_base(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length
    }

    /// Smallest positive Stokes eigenvalue `(2pi/L)^2`.
    pub fn lambda1(&self) -> f64 {
        let k = self.k_base();
        k * k
    }

    /// `m`-th Stokes-eigenvalue shell `(2pi/L)^2 s_m`, where `s_m` is the
    /// `m`-th distinct `|f|^2` value. Clamped to the last shell for `m`
    /// beyond the representable range.
    pub fn lambda_of(&self, m: usize) -> f64 {
        let s = self.shells_s[m.min(self.shells_s.len() - 1)];
        self.lambda1() * s as f64
    }

    /// Eigenvalue of the first shell *not* retained by a cutoff at `m`
    /// (`lambda_{m+1}`), or `None` when `m` already covers every shell.
    pub fn next_lambda(&self, m: usize) -> Option<f64> {
        self.shells_s
            .get(m + 1)
            .map(|&s| self.lambda1() * s as f64)
    }

    /// Number of distinct eigenvalue shells, including the zero shell.
    pub fn shell_count(&self) -> usize {
        self.shells_s.len()
    }

    /// Integer `|f|^2` threshold of shell `m` (clamped).
    pub fn shell_s(&self, m: usize) -> u64 {
        self.shells_s[m.min(self.shells_s.len() - 1)]
    }

    /// Shell index whose `|f|^2` equals `s`, if representable.
    pub fn shell_index_of_s(&self, s: u64) -> Option<usize> {
        self.shells_s.binary_search(&s).ok()
    }

    /// Largest `round(|f|)` bin on this grid.
    pub fn max_shell_bin(&self) -> usize {
        let half = (self.n / 2) as f64;
        ((self.dim as f64).sqrt() * half).round() as usize
    }

    pub(crate) fn ksq(&self) -> &ArrayD<f64> {
        &self.ksq
    }

    pub(crate) fn s_int(&self) -> &ArrayD<u64> {
        &self.s_int
    }

    pub(crate) fn kvec(&self, axis: usize) -> &ArrayD<f64> {
        &self.kvec[axis]
    }

    pub(crate) fn dealias_keep(&self) -> &ArrayD<bool> {
        &self.dealias_keep
    }

    pub(crate) fn nyquist(&self) -> &ArrayD<bool> {
        &self.nyquist
    }

    pub(crate) fn shell_bin(&self) -> &ArrayD<u32> {
        &self.shell_bin
    }

    /// Flat index of the mode with integer frequency vector `f`.
    pub fn index_of(&self, f: &[i64]) -> Option<usize> {
        if f.len() != self.dim {
            return None;
        }
        let mut flat = 0usize;
        for &fa in f {
            let half = (self.n / 2) as i64;
            if fa > half || fa < -(half - 1) {
                return None;
            }
            let i = if fa >= 0 { fa as usize } else { (fa + self.n as i64) as usize };
            flat = flat * self.n + i;
        }
        Some(flat)
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.length == other.length
    }
}

/// Sanity helper used by tests: the achievable `|f|^2` values as a set.
#[allow(dead_code)]
pub(crate) fn shell_set(dim: usize, n: usize) -> BTreeSet<u64> {
    shell_table(dim, n).into_iter().collect()
}
