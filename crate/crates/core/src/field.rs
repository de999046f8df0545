//! Complex Fourier coefficients of vector fields on a periodic box, plus the
//! core spectral operators: Leray projection, modal projections, dealiased
//! convective nonlinearity, norms, and shell spectra.
//!
//! Transform normalization: the forward transform is unscaled and the inverse
//! carries the full `1/n^dim` factor, so a physical amplitude `a` at integer
//! frequency `f` is stored as the coefficient `a * n^dim`. All norm formulas
//! below are written against this convention; `norms().l2` equals the
//! continuum `L^2` norm of the represented field.

use crate::fft;
use crate::grid::Grid;
use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;

/// Compensated (Kahan) accumulator; keeps reductions reproducible and
/// accurate independent of array size.
#[derive(Clone, Copy, Default)]
pub(crate) struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum
    }
}

/// `L^2`, `H^1` (gradient), and `L^2`-of-Laplacian norms of a field.
#[derive(Debug, Clone, Copy)]
pub struct Norms {
    pub l2: f64,
    pub h1: f64,
    pub l2_of_laplacian: f64,
}

/// A zero-mean vector (or scalar) field stored as complex Fourier
/// coefficients, one component array per spatial dimension.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Arc<Grid>,
    comps: Vec<ArrayD<Complex64>>,
    solenoidal: bool,
}

impl SpectralField {
    /// Zero velocity field (`dim` components).
    pub fn zeros(grid: &Arc<Grid>) -> SpectralField {
        Self::zeros_with_comps(grid, grid.dim())
    }

    /// Zero field with an explicit component count (1 for scalars).
    pub fn zeros_with_comps(grid: &Arc<Grid>, ncomp: usize) -> SpectralField {
        let shape = IxDyn(&vec![grid.n(); grid.dim()]);
        let comps = (0..ncomp)
            .map(|_| ArrayD::from_elem(shape.clone(), Complex64::new(0.0, 0.0)))
            .collect();
        SpectralField {
            grid: grid.clone(),
            comps,
            solenoidal: true,
        }
    }

    /// Build from physical samples: forward transform, Nyquist coefficients
    /// zeroed, mean removed. The result is *not* marked solenoidal.
    pub fn from_physical(grid: &Arc<Grid>, phys: &[ArrayD<f64>]) -> SpectralField {
        let mut out = Self::from_physical_raw(grid, phys);
        out.remove_mean();
        out
    }

    /// As [`Self::from_physical`] but keeping the mean mode; for scalar
    /// diagnostics (vorticity magnitude) rather than velocity fields.
    pub fn from_physical_raw(grid: &Arc<Grid>, phys: &[ArrayD<f64>]) -> SpectralField {
        let comps = phys
            .iter()
            .map(|p| {
                let mut c = p.mapv(|x| Complex64::new(x, 0.0));
                fft::forward_nd(&mut c);
                c
            })
            .collect();
        let mut out = SpectralField {
            grid: grid.clone(),
            comps,
            solenoidal: false,
        };
        out.zero_nyquist();
        out
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    pub fn is_solenoidal(&self) -> bool {
        self.solenoidal
    }

    pub(crate) fn comp(&self, i: usize) -> &ArrayD<Complex64> {
        &self.comps[i]
    }

    /// Raw coefficient slice of one component, row-major (axis 0 slowest),
    /// under the `amplitude * n^dim` storage convention.
    pub fn comp_raw(&self, i: usize) -> &[Complex64] {
        self.comps[i].as_slice().expect("standard layout")
    }

    pub(crate) fn comp_mut(&mut self, i: usize) -> &mut ArrayD<Complex64> {
        self.solenoidal = false;
        &mut self.comps[i]
    }

    pub(crate) fn set_solenoidal(&mut self, v: bool) {
        self.solenoidal = v;
    }

    fn comp_slice(&self, i: usize) -> &[Complex64] {
        self.comps[i].as_slice().expect("standard layout")
    }

    fn comp_slice_mut(&mut self, i: usize) -> &mut [Complex64] {
        self.comps[i].as_slice_mut().expect("standard layout")
    }

    /// Add the raw amplitude `a` at integer frequency `f` of component
    /// `comp` (the stored coefficient gains `a * n^dim`). The caller is
    /// responsible for conjugate symmetry; see [`Self::add_conjugate_pair`].
    pub fn add_amplitude(&mut self, f: &[i64], comp: usize, a: Complex64) {
        let flat = self
            .grid
            .index_of(f)
            .unwrap_or_else(|| panic!("frequency {f:?} not representable"));
        let scale = self.grid.points() as f64;
        self.comp_slice_mut(comp)[flat] += a * scale;
        self.solenoidal = false;
    }

    /// Add amplitude `a` at `f` and `conj(a)` at `-f`, keeping the physical
    /// field real. Panics if `f == -f`.
    pub fn add_conjugate_pair(&mut self, f: &[i64], comp: usize, a: Complex64) {
        assert!(f.iter().any(|&x| x != 0), "mean mode has no conjugate pair");
        let neg: Vec<i64> = f.iter().map(|&x| -x).collect();
        self.add_amplitude(f, comp, a);
        self.add_amplitude(&neg, comp, a.conj());
    }

    /// Physical samples of one component (real part of the inverse
    /// transform).
    pub fn to_physical(&self, comp: usize) -> ArrayD<f64> {
        let mut c = self.comps[comp].clone();
        fft::inverse_nd(&mut c);
        c.mapv(|v| v.re)
    }

    pub fn to_physical_all(&self) -> Vec<ArrayD<f64>> {
        (0..self.ncomp()).map(|i| self.to_physical(i)).collect()
    }

    /// Zero the mean (`k = 0`) coefficient of every component.
    pub fn remove_mean(&mut self) {
        for c in &mut self.comps {
            c.as_slice_mut().expect("standard layout")[0] = Complex64::new(0.0, 0.0);
        }
    }

    /// Zero every coefficient carrying a Nyquist frequency on any axis.
    pub fn zero_nyquist(&mut self) {
        let mask = self.grid.clone();
        let nyq = mask.nyquist().as_slice().expect("standard layout");
        for i in 0..self.ncomp() {
            let data = self.comp_slice_mut(i);
            for (v, &is_nyq) in data.iter_mut().zip(nyq) {
                if is_nyq {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Sharp spectral truncation of the 2/3 dealiasing rule: zero every mode
    /// with any per-axis `|f| > n/3`.
    pub fn dealias(&mut self) {
        let grid = self.grid.clone();
        let keep = grid.dealias_keep().as_slice().expect("standard layout");
        for i in 0..self.ncomp() {
            let data = self.comp_slice_mut(i);
            for (v, &k) in data.iter_mut().zip(keep) {
                if !k {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Leray-Helmholtz projection onto divergence-free fields:
    /// `u(k) -> u(k) - k (k.u(k)) / |k|^2`, with the mean mode zeroed.
    pub fn leray_project(&mut self) {
        let dim = self.grid.dim();
        assert_eq!(self.ncomp(), dim, "Leray projection needs a vector field");
        let grid = self.grid.clone();
        let ksq = grid.ksq().as_slice().expect("standard layout");
        let kvecs: Vec<&[f64]> = (0..dim)
            .map(|a| grid.kvec(a).as_slice().expect("standard layout"))
            .collect();
        // Split borrow: operate on raw component slices in lockstep.
        let mut comps: Vec<&mut [Complex64]> = Vec::with_capacity(dim);
        let mut rest = &mut self.comps[..];
        while let Some((head, tail)) = rest.split_first_mut() {
            comps.push(head.as_slice_mut().expect("standard layout"));
            rest = tail;
        }
        for flat in 0..ksq.len() {
            let k2 = ksq[flat];
            if k2 == 0.0 {
                for c in comps.iter_mut() {
                    c[flat] = Complex64::new(0.0, 0.0);
                }
                continue;
            }
            let mut div = Complex64::new(0.0, 0.0);
            for (a, kv) in kvecs.iter().enumerate() {
                div += comps[a][flat] * kv[flat];
            }
            let factor = div / k2;
            for (a, kv) in kvecs.iter().enumerate() {
                comps[a][flat] -= factor * kv[flat];
            }
        }
        self.solenoidal = true;
    }

    /// Projection onto the first `m` eigenvalue shells: retains coefficients
    /// with `|k|^2 <= lambda_of(m)`, zeroes the rest.
    pub fn project_low_modes(&self, m: usize) -> SpectralField {
        self.shell_filtered(m, true)
    }

    /// Complement of [`Self::project_low_modes`]; `P_m u + Q_m u == u`.
    pub fn project_high_modes(&self, m: usize) -> SpectralField {
        self.shell_filtered(m, false)
    }

    fn shell_filtered(&self, m: usize, keep_low: bool) -> SpectralField {
        let s_max = self.grid.shell_s(m);
        let grid = self.grid.clone();
        let s_int = grid.s_int().as_slice().expect("standard layout");
        let mut out = self.clone();
        for i in 0..out.ncomp() {
            let data = out.comp_slice_mut(i);
            for (v, &s) in data.iter_mut().zip(s_int) {
                if (s <= s_max) != keep_low {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
        }
        out.solenoidal = self.solenoidal;
        out
    }

    /// Parseval norms under the documented transform convention.
    pub fn norms(&self) -> Norms {
        let grid = &self.grid;
        let fac = grid.length().powi(grid.dim() as i32)
            / (grid.points() as f64 * grid.points() as f64);
        let ksq = grid.ksq().as_slice().expect("standard layout");
        let (mut l2, mut h1, mut lap) = (Kahan::default(), Kahan::default(), Kahan::default());
        for i in 0..self.ncomp() {
            for (v, &k2) in self.comp_slice(i).iter().zip(ksq) {
                let e = v.norm_sqr();
                l2.add(e);
                h1.add(k2 * e);
                lap.add(k2 * k2 * e);
            }
        }
        Norms {
            l2: (fac * l2.value()).sqrt(),
            h1: (fac * h1.value()).sqrt(),
            l2_of_laplacian: (fac * lap.value()).sqrt(),
        }
    }

    /// Kinetic energy `0.5 ||u||_{L^2}^2`.
    pub fn energy(&self) -> f64 {
        let l2 = self.norms().l2;
        0.5 * l2 * l2
    }

    /// Norms of `self - other` without materializing the difference.
    pub fn error_norms(&self, other: &SpectralField) -> Norms {
        assert_eq!(self.ncomp(), other.ncomp());
        let grid = &self.grid;
        let fac = grid.length().powi(grid.dim() as i32)
            / (grid.points() as f64 * grid.points() as f64);
        let ksq = grid.ksq().as_slice().expect("standard layout");
        let (mut l2, mut h1, mut lap) = (Kahan::default(), Kahan::default(), Kahan::default());
        for i in 0..self.ncomp() {
            for ((a, b), &k2) in self
                .comp_slice(i)
                .iter()
                .zip(other.comp_slice(i))
                .zip(ksq)
            {
                let e = (a - b).norm_sqr();
                l2.add(e);
                h1.add(k2 * e);
                lap.add(k2 * k2 * e);
            }
        }
        Norms {
            l2: (fac * l2.value()).sqrt(),
            h1: (fac * h1.value()).sqrt(),
            l2_of_laplacian: (fac * lap.value()).sqrt(),
        }
    }

    /// Shell-binned kinetic-energy spectrum: `E[s]` sums `0.5 |u(k)|^2` over
    /// modes with `round(|f|) == s`, so `sum(E) == 0.5 l2^2`.
    pub fn energy_spectrum(&self) -> Vec<f64> {
        let grid = &self.grid;
        let fac = 0.5 * grid.length().powi(grid.dim() as i32)
            / (grid.points() as f64 * grid.points() as f64);
        let bins = grid.shell_bin().as_slice().expect("standard layout");
        let mut acc = vec![Kahan::default(); grid.max_shell_bin() + 1];
        for i in 0..self.ncomp() {
            for (v, &b) in self.comp_slice(i).iter().zip(bins) {
                acc[b as usize].add(v.norm_sqr());
            }
        }
        acc.into_iter().map(|k| fac * k.value()).collect()
    }

    /// `L^2` inner product `(self, other)`.
    pub fn inner_l2(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.ncomp(), other.ncomp());
        let grid = &self.grid;
        let fac = grid.length().powi(grid.dim() as i32)
            / (grid.points() as f64 * grid.points() as f64);
        let mut acc = Kahan::default();
        for i in 0..self.ncomp() {
            for (a, b) in self.comp_slice(i).iter().zip(other.comp_slice(i)) {
                acc.add(a.re * b.re + a.im * b.im);
            }
        }
        fac * acc.value()
    }

    /// Inner product against the Stokes operator: `(self, A other)`.
    pub fn inner_l2_stokes(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.ncomp(), other.ncomp());
        let grid = &self.grid;
        let fac = grid.length().powi(grid.dim() as i32)
            / (grid.points() as f64 * grid.points() as f64);
        let ksq = grid.ksq().as_slice().expect("standard layout");
        let mut acc = Kahan::default();
        for i in 0..self.ncomp() {
            for ((a, b), &k2) in self
                .comp_slice(i)
                .iter()
                .zip(other.comp_slice(i))
                .zip(ksq)
            {
                acc.add(k2 * (a.re * b.re + a.im * b.im));
            }
        }
        fac * acc.value()
    }

    /// Largest `|k . u(k)|` over all modes (discrete divergence check).
    pub fn divergence_max(&self) -> f64 {
        let dim = self.grid.dim();
        assert_eq!(self.ncomp(), dim);
        let grid = self.grid.clone();
        let kvecs: Vec<&[f64]> = (0..dim)
            .map(|a| grid.kvec(a).as_slice().expect("standard layout"))
            .collect();
        let slices: Vec<&[Complex64]> = (0..dim).map(|i| self.comp_slice(i)).collect();
        let mut max = 0.0_f64;
        for flat in 0..kvecs[0].len() {
            let mut div = Complex64::new(0.0, 0.0);
            for a in 0..dim {
                div += slices[a][flat] * kvecs[a][flat];
            }
            max = max.max(div.norm());
        }
        max
    }

    /// Largest coefficient magnitude over all components.
    pub fn max_coeff(&self) -> f64 {
        let mut max = 0.0_f64;
        for i in 0..self.ncomp() {
            for v in self.comp_slice(i) {
                max = max.max(v.norm());
            }
        }
        max
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }

    /// Largest pointwise velocity magnitude in physical space.
    pub fn max_velocity(&self) -> f64 {
        let phys = self.to_physical_all();
        let len = phys[0].len();
        let slices: Vec<&[f64]> = phys
            .iter()
            .map(|p| p.as_slice().expect("standard layout"))
            .collect();
        let mut max_sq = 0.0_f64;
        for flat in 0..len {
            let mut m = 0.0;
            for s in &slices {
                m += s[flat] * s[flat];
            }
            max_sq = max_sq.max(m);
        }
        max_sq.sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for i in 0..self.ncomp() {
            for v in self.comp_slice_mut(i) {
                *v *= factor;
            }
        }
    }

    /// `self += factor * other`; preserves solenoidality when both operands
    /// carry it.
    pub fn add_scaled(&mut self, other: &SpectralField, factor: f64) {
        assert_eq!(self.ncomp(), other.ncomp());
        let sol = self.solenoidal && other.solenoidal;
        for i in 0..self.ncomp() {
            let src = other.comps[i].as_slice().expect("standard layout");
            let dst = self.comps[i].as_slice_mut().expect("standard layout");
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s * factor;
            }
        }
        self.solenoidal = sol;
    }

    /// `self - other`.
    pub fn difference(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }

    /// `self += factor * A other` with `A` the Stokes operator (per-mode
    /// `|k|^2` weight); used for the viscous term without an intermediate
    /// field.
    pub fn add_scaled_stokes(&mut self, other: &SpectralField, factor: f64) {
        assert_eq!(self.ncomp(), other.ncomp());
        let sol = self.solenoidal && other.solenoidal;
        let grid = self.grid.clone();
        let ksq = grid.ksq().as_slice().expect("standard layout");
        for i in 0..self.ncomp() {
            let src = other.comps[i].as_slice().expect("standard layout");
            let dst = self.comps[i].as_slice_mut().expect("standard layout");
            for (flat, d) in dst.iter_mut().enumerate() {
                *d += src[flat] * (factor * ksq[flat]);
            }
        }
        self.solenoidal = sol;
    }

    /// Apply the Stokes operator `A = -P_sigma laplacian` (multiply each mode
    /// by `|k|^2`).
    pub fn stokes(&self) -> SpectralField {
        let grid = self.grid.clone();
        let ksq = grid.ksq().as_slice().expect("standard layout");
        let mut out = self.clone();
        let sol = self.solenoidal;
        for i in 0..out.ncomp() {
            for (v, &k2) in out.comp_slice_mut(i).iter_mut().zip(ksq) {
                *v *= k2;
            }
        }
        out.solenoidal = sol;
        out
    }

    /// Dealiased pseudospectral evaluation of the convective term
    /// `P_sigma((u . grad) u)`: differentiate spectrally, multiply pointwise
    /// in physical space, transform back, truncate by the 2/3 rule, project.
    pub fn nonlinear_term(&self) -> SpectralField {
        let dim = self.grid.dim();
        assert_eq!(self.ncomp(), dim);
        let grid = self.grid.clone();
        let kvecs: Vec<&[f64]> = (0..dim)
            .map(|a| grid.kvec(a).as_slice().expect("standard layout"))
            .collect();
        let total = grid.points();

        let phys: Vec<ArrayD<f64>> = self.to_physical_all();
        let phys_slices: Vec<&[f64]> = phys
            .iter()
            .map(|p| p.as_slice().expect("standard layout"))
            .collect();

        let shape = IxDyn(&vec![grid.n(); dim]);
        let mut scratch = ArrayD::from_elem(shape.clone(), Complex64::new(0.0, 0.0));
        let mut out = SpectralField::zeros(&self.grid);

        for i in 0..dim {
            let mut conv = vec![0.0_f64; total];
            for j in 0..dim {
                // d_j u_i in spectral space, then to physical.
                {
                    let s = scratch.as_slice_mut().expect("standard layout");
                    for (flat, v) in self.comp_slice(i).iter().enumerate() {
                        s[flat] = Complex64::new(0.0, kvecs[j][flat]) * v;
                    }
                }
                fft::inverse_nd(&mut scratch);
                let s = scratch.as_slice().expect("standard layout");
                let uj = phys_slices[j];
                for flat in 0..total {
                    conv[flat] += uj[flat] * s[flat].re;
                }
            }
            {
                let s = scratch.as_slice_mut().expect("standard layout");
                for (flat, &c) in conv.iter().enumerate() {
                    s[flat] = Complex64::new(c, 0.0);
                }
            }
            fft::forward_nd(&mut scratch);
            out.comps[i].assign(&scratch);
        }
        out.dealias();
        out.leray_project();
        out
    }

    /// Physical-space vorticity magnitude: `|curl u|` in 3D, `|w|` with
    /// `w = d_x u_2 - d_y u_1` in 2D.
    pub fn vorticity_magnitude(&self) -> ArrayD<f64> {
        let dim = self.grid.dim();
        assert_eq!(self.ncomp(), dim);
        let grid = self.grid.clone();
        let kv: Vec<&[f64]> = (0..dim)
            .map(|a| grid.kvec(a).as_slice().expect("standard layout"))
            .collect();
        let shape = IxDyn(&vec![grid.n(); dim]);
        let total = grid.points();

        let curl_comp = |a: usize, b: usize, ua: usize, ub: usize| -> ArrayD<f64> {
            // d_a u_ub - d_b u_ua
            let mut c = ArrayD::from_elem(shape.clone(), Complex64::new(0.0, 0.0));
            {
                let s = c.as_slice_mut().expect("standard layout");
                let fa = self.comp_slice(ub);
                let fb = self.comp_slice(ua);
                for flat in 0..total {
                    s[flat] = Complex64::new(0.0, kv[a][flat]) * fa[flat]
                        - Complex64::new(0.0, kv[b][flat]) * fb[flat];
                }
            }
            fft::inverse_nd(&mut c);
            c.mapv(|v| v.re)
        };

        if dim == 2 {
            let w = curl_comp(0, 1, 0, 1);
            w.mapv(f64::abs)
        } else {
            let wx = curl_comp(1, 2, 1, 2);
            let wy = curl_comp(2, 0, 2, 0);
            let wz = curl_comp(0, 1, 0, 1);
            let mut out = ArrayD::zeros(shape);
            {
                let o = out.as_slice_mut().expect("standard layout");
                let (x, y, z) = (
                    wx.as_slice().unwrap(),
                    wy.as_slice().unwrap(),
                    wz.as_slice().unwrap(),
                );
                for flat in 0..total {
                    o[flat] = (x[flat] * x[flat] + y[flat] * y[flat] + z[flat] * z[flat]).sqrt();
                }
            }
            out
        }
    }
}

/// Random zero-mean solenoidal field: white physical noise shaped in spectral
/// space by `exp(-(|f|/k0)^2)`, dealiased and Leray-projected. Deterministic
/// for a given RNG state (components and points drawn in memory order).
pub fn random_solenoidal<R: Rng>(grid: &Arc<Grid>, rng: &mut R, k0: f64) -> SpectralField {
    let total = grid.points();
    let phys: Vec<ArrayD<f64>> = (0..grid.dim())
        .map(|_| {
            let data: Vec<f64> = (0..total).map(|_| rng.sample(StandardNormal)).collect();
            ArrayD::from_shape_vec(IxDyn(&vec![grid.n(); grid.dim()]), data).unwrap()
        })
        .collect();
    let mut field = SpectralField::from_physical(grid, &phys);
    let s_int = grid.s_int().as_slice().expect("standard layout").to_vec();
    let inv_k0_sq = 1.0 / (k0 * k0);
    for i in 0..field.ncomp() {
        let data = field.comp_slice_mut(i);
        for (v, &s) in data.iter_mut().zip(&s_int) {
            *v *= (-(s as f64) * inv_k0_sq).exp();
        }
    }
    field.dealias();
    field.remove_mean();
    field.leray_project();
    field
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid2(n: usize) -> Arc<Grid> {
        Arc::new(Grid::new(2, n, 1.0).unwrap())
    }

    #[test]
    fn round_trip_spectral_physical_spectral() {
        let g = grid2(16);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_solenoidal(&g, &mut rng, 4.0);
        let phys = f.to_physical_all();
        let back = {
            let mut b = SpectralField::from_physical(&g, &phys);
            b.set_solenoidal(true);
            b
        };
        let rel = f.error_norms(&back).l2 / f.norms().l2;
        assert!(rel < 1e-13, "round-trip relative error {rel}");
    }

    #[test]
    fn leray_annihilates_gradient_mode() {
        // Single mode along k = (2pi, 0) with amplitude parallel to k.
        let g = grid2(8);
        let mut f = SpectralField::zeros(&g);
        f.add_conjugate_pair(&[1, 0], 0, Complex64::new(1.0, 0.0));
        f.leray_project();
        assert!(f.max_coeff() < 1e-14);
    }

    #[test]
    fn leray_keeps_orthogonal_mode() {
        let g = grid2(8);
        let mut f = SpectralField::zeros(&g);
        f.add_conjugate_pair(&[1, 0], 1, Complex64::new(0.0, -0.5));
        let before = f.clone();
        f.leray_project();
        let rel = f.error_norms(&before).l2;
        assert!(rel < 1e-14);
    }

    #[test]
    fn leray_projects_diagonal_direction() {
        // k direction (1,1), amplitude (1,0) -> (1/2, -1/2).
        let g = grid2(8);
        let mut f = SpectralField::zeros(&g);
        f.add_conjugate_pair(&[1, 1], 0, Complex64::new(1.0, 0.0));
        f.leray_project();
        let flat = g.index_of(&[1, 1]).unwrap();
        let scale = g.points() as f64;
        let c0 = f.comp(0).as_slice().unwrap()[flat] / scale;
        let c1 = f.comp(1).as_slice().unwrap()[flat] / scale;
        assert!((c0 - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((c1 - Complex64::new(-0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn leray_idempotent_and_nonincreasing() {
        let g = grid2(12);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // Raw (non-solenoidal) random field.
        let total = g.points();
        let phys: Vec<ArrayD<f64>> = (0..2)
            .map(|_| {
                let data: Vec<f64> = (0..total).map(|_| rng.sample(StandardNormal)).collect();
                ArrayD::from_shape_vec(IxDyn(&[12, 12]), data).unwrap()
            })
            .collect();
        let raw = SpectralField::from_physical(&g, &phys);
        let mut once = raw.clone();
        once.leray_project();
        let mut twice = once.clone();
        twice.leray_project();
        let rel = once.error_norms(&twice).l2 / once.norms().l2.max(1e-300);
        assert!(rel < 1e-13, "not idempotent: {rel}");
        assert!(once.norms().l2 <= raw.norms().l2 * (1.0 + 1e-13));
        assert!(once.divergence_max() <= 1e-12 * raw.max_coeff().max(1.0));
    }

    #[test]
    fn norms_of_sine_mode() {
        // u = (sin 2 pi x, 0) on the unit box: l2^2 = 1/2, h1^2 = (2pi)^2 / 2.
        let g = grid2(16);
        let mut f = SpectralField::zeros(&g);
        // sin(2 pi x) = -i/2 e^{i 2 pi x} + i/2 e^{-i 2 pi x}
        f.add_conjugate_pair(&[1, 0], 0, Complex64::new(0.0, -0.5));
        let n = f.norms();
        assert!((n.l2 * n.l2 - 0.5).abs() < 1e-13);
        let two_pi_sq = (2.0 * std::f64::consts::PI).powi(2);
        assert!((n.h1 * n.h1 - two_pi_sq * 0.5).abs() < 1e-11);
        assert!((n.l2_of_laplacian.powi(2) - two_pi_sq * two_pi_sq * 0.5).abs() < 1e-9);
    }

    #[test]
    fn norms_of_zero_field() {
        let g = grid2(8);
        let f = SpectralField::zeros(&g);
        let n = f.norms();
        assert_eq!(n.l2, 0.0);
        assert_eq!(n.h1, 0.0);
        assert_eq!(n.l2_of_laplacian, 0.0);
    }

    #[test]
    fn spectrum_single_shell() {
        // One mode at shell 3 with l2^2 = 1 -> E[3] = 1/2.
        let g = grid2(16);
        let mut f = SpectralField::zeros(&g);
        // amplitude pair a, conj(a) with |a|^2 * 2 = 1
        let a = Complex64::new(0.5_f64.sqrt(), 0.0);
        f.add_conjugate_pair(&[3, 0], 1, a);
        let n = f.norms();
        assert!((n.l2 * n.l2 - 1.0).abs() < 1e-13);
        let spec = f.energy_spectrum();
        assert!((spec[3] - 0.5).abs() < 1e-13);
        for (s, &e) in spec.iter().enumerate() {
            if s != 3 {
                assert_eq!(e, 0.0);
            }
        }
    }

    #[test]
    fn spectrum_sums_to_half_l2_squared() {
        let g = grid2(24);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_solenoidal(&g, &mut rng, 6.0);
        let total: f64 = f.energy_spectrum().iter().sum();
        let half_l2sq = 0.5 * f.norms().l2.powi(2);
        assert!(
            (total - half_l2sq).abs() <= 1e-13 * half_l2sq,
            "sum {total} vs {half_l2sq}"
        );
    }

    #[test]
    fn projection_split_is_orthogonal() {
        let g = grid2(16);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_solenoidal(&g, &mut rng, 5.0);
        let m = 4;
        let low = f.project_low_modes(m);
        let high = f.project_high_modes(m);
        let mut sum = low.clone();
        sum.add_scaled(&high, 1.0);
        assert!(sum.error_norms(&f).l2 < 1e-14 * f.norms().l2.max(1.0));
        let l2sq = f.norms().l2.powi(2);
        let split = low.norms().l2.powi(2) + high.norms().l2.powi(2);
        assert!((l2sq - split).abs() < 1e-13 * l2sq);
    }

    #[test]
    fn projection_edge_cases() {
        let g = grid2(8);
        let mut f = SpectralField::zeros(&g);
        f.add_conjugate_pair(&[2, 1], 0, Complex64::new(0.3, 0.1));
        f.leray_project();
        // m = 0 keeps only the (zero) mean: zero field.
        assert_eq!(f.project_low_modes(0).max_coeff(), 0.0);
        // m beyond every shell: identity.
        let all = f.project_low_modes(g.shell_count() + 5);
        assert!(all.error_norms(&f).l2 < 1e-15);
        // Mode above cutoff vanishes under P_m, survives under Q_m.
        let m1 = 1; // shell s = 1 only
        assert_eq!(f.project_low_modes(m1).max_coeff(), 0.0);
        assert!(f.project_high_modes(m1).error_norms(&f).l2 < 1e-15);
    }

    #[test]
    fn poincare_holds_shellwise() {
        let g = grid2(16);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_solenoidal(&g, &mut rng, 4.0);
        let n = f.norms();
        assert!(g.lambda1() * n.l2 * n.l2 <= n.h1 * n.h1 * (1.0 + 1e-13));
    }

    #[test]
    fn nonlinear_zero_on_zero_field() {
        let g = grid2(8);
        let f = SpectralField::zeros(&g);
        assert_eq!(f.nonlinear_term().max_coeff(), 0.0);
    }

    #[test]
    fn nonlinear_annihilates_taylor_green_vortex() {
        // u = (sin 2pix cos 2piy, -cos 2pix sin 2piy): (u.grad)u is a pure
        // gradient, so the projected convective term vanishes.
        let g = grid2(16);
        let mut f = SpectralField::zeros(&g);
        for s1 in [-1i64, 1] {
            for s2 in [-1i64, 1] {
                // sin a cos b -> amplitude -s1*i/4 at (s1, s2)
                f.add_amplitude(&[s1, s2], 0, Complex64::new(0.0, -(s1 as f64) / 4.0));
                // -cos a sin b -> amplitude s2*i/4 at (s1, s2)
                f.add_amplitude(&[s1, s2], 1, Complex64::new(0.0, s2 as f64 / 4.0));
            }
        }
        f.set_solenoidal(true);
        assert!(f.divergence_max() < 1e-12 * f.max_coeff());
        let b = f.nonlinear_term();
        let scale = f.norms().l2;
        assert!(
            b.norms().l2 <= 1e-12 * scale,
            "convective term {} not annihilated",
            b.norms().l2
        );
    }

    #[test]
    fn energy_flux_of_convection_vanishes() {
        // <B(u,u), u> = 0 on dealiased fields. n is kept indivisible by 3 so
        // the truncation boundary is alias-free.
        let g = grid2(32);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = random_solenoidal(&g, &mut rng, 5.0);
        let b = f.nonlinear_term();
        let ip = b.inner_l2(&f);
        let n = f.norms();
        let scale = n.h1 * n.h1 * n.l2;
        assert!(ip.abs() <= 1e-12 * scale, "<B,u> = {ip}, scale {scale}");
    }

    #[test]
    fn enstrophy_flux_vanishes_in_2d() {
        // <B(w,w), Aw> = 0 for 2D dealiased fields (n indivisible by 3).
        let g = grid2(32);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = random_solenoidal(&g, &mut rng, 5.0);
        let b = w.nonlinear_term();
        let ip = b.inner_l2_stokes(&w);
        let n = w.norms();
        let scale = n.h1 * n.h1 * n.l2_of_laplacian;
        assert!(ip.abs() <= 1e-12 * scale, "<B,Aw> = {ip}, scale {scale}");
    }

    #[test]
    fn random_field_is_deterministic() {
        let g = grid2(16);
        let mut r1 = ChaCha8Rng::seed_from_u64(42);
        let mut r2 = ChaCha8Rng::seed_from_u64(42);
        let a = random_solenoidal(&g, &mut r1, 4.0);
        let b = random_solenoidal(&g, &mut r2, 4.0);
        assert_eq!(a.error_norms(&b).l2, 0.0);
    }
}
