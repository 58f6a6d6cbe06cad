//! Periodic M x M complex fields in lattice coordinates with FFT-backed
//! spectral calculus: derivatives, the Green solve, exact Fourier point
//! evaluation, and periodic bicubic interpolation.
//!
//! Sample `(i, j)` sits at lattice coordinates `(s, t) = (i/M, j/M)` and the
//! layout is row-major in `t`: `data[j * m + i]`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::geometry::TorusGeometry;
use crate::theta;
use crate::{Result, TorusError};

#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    m: usize,
    data: Vec<Complex64>,
}

impl GridField {
    pub fn zeros(m: usize) -> Self {
        GridField { m, data: vec![Complex64::new(0.0, 0.0); m * m] }
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(m * m);
        for j in 0..m {
            for i in 0..m {
                data.push(f(i as f64 / m as f64, j as f64 / m as f64));
            }
        }
        GridField { m, data }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[j * self.m + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[j * self.m + i] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn check_finite(&self) -> Result<()> {
        for (k, v) in self.data.iter().enumerate() {
            if !v.is_finite() {
                return Err(TorusError::NonFinite(format!(
                    "grid index ({}, {})",
                    k % self.m,
                    k / self.m
                )));
            }
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridField {
        GridField { m: self.m, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip(&self, rhs: &GridField, f: impl Fn(Complex64, Complex64) -> Complex64) -> GridField {
        assert_eq!(self.m, rhs.m);
        GridField {
            m: self.m,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> GridField {
        self.map(|v| v * c)
    }

    pub fn add(&self, rhs: &GridField) -> GridField {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &GridField) -> GridField {
        self.zip(rhs, |a, b| a - b)
    }

    pub fn mul_pointwise(&self, rhs: &GridField) -> GridField {
        self.zip(rhs, |a, b| a * b)
    }

    /// Mean of samples = integral against `ds dt`.
    pub fn mean(&self) -> Complex64 {
        let s: Complex64 = self.data.iter().sum();
        s / self.data.len() as f64
    }

    /// L2 norm over samples where `mask` is true (normalized by count).
    pub fn l2_masked(&self, mask: impl Fn(usize, usize) -> bool) -> f64 {
        let mut acc = 0.0;
        let mut n = 0usize;
        for j in 0..self.m {
            for i in 0..self.m {
                if mask(i, j) {
                    acc += self.at(i, j).norm_sqr();
                    n += 1;
                }
            }
        }
        if n == 0 {
            0.0
        } else {
            (acc / n as f64).sqrt()
        }
    }

    pub fn max_masked(&self, mask: impl Fn(usize, usize) -> bool) -> f64 {
        let mut acc: f64 = 0.0;
        for j in 0..self.m {
            for i in 0..self.m {
                if mask(i, j) {
                    acc = acc.max(self.at(i, j).norm());
                }
            }
        }
        acc
    }

    /// Periodic bicubic (Catmull-Rom) interpolation at lattice coordinates.
    pub fn interp(&self, s: f64, t: f64) -> Complex64 {
        let m = self.m as f64;
        let x = (s.rem_euclid(1.0)) * m;
        let y = (t.rem_euclid(1.0)) * m;
        let i0 = x.floor() as isize;
        let j0 = y.floor() as isize;
        let fx = x - i0 as f64;
        let fy = y - j0 as f64;
        let wrap = |k: isize| -> usize { (k.rem_euclid(self.m as isize)) as usize };
        let mut rows = [Complex64::new(0.0, 0.0); 4];
        for (r, row) in rows.iter_mut().enumerate() {
            let j = wrap(j0 + r as isize - 1);
            let p: Vec<Complex64> = (-1..3)
                .map(|di| self.at(wrap(i0 + di), j))
                .collect();
            *row = catmull(p[0], p[1], p[2], p[3], fx);
        }
        catmull(rows[0], rows[1], rows[2], rows[3], fy)
    }
}

fn catmull(p0: Complex64, p1: Complex64, p2: Complex64, p3: Complex64, u: f64) -> Complex64 {
    let u2 = u * u;
    let u3 = u2 * u;
    0.5 * ((2.0 * p1)
        + (-p0 + p2) * u
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u2
        + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u3)
}

/// Spectral context: geometry plus cached FFT plans and symbol tables.
pub struct Spectral {
    pub geom: TorusGeometry,
    fwd: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inv: std::sync::Arc<dyn rustfft::Fft<f64>>,
    /// signed frequency per index
    freq: Vec<i64>,
}

impl Spectral {
    pub fn new(geom: TorusGeometry) -> Self {
        let m = geom.m;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let freq = (0..m)
            .map(|k| if k <= m / 2 { k as i64 } else { k as i64 - m as i64 })
            .collect();
        Spectral { geom, fwd, inv, freq }
    }

    pub fn m(&self) -> usize {
        self.geom.m
    }

    /// Forward 2-D FFT, normalized so `coef(0,0)` is the field mean.
    pub fn fft2(&self, f: &GridField) -> Vec<Complex64> {
        let m = self.m();
        let mut data = f.data.clone();
        // rows (s-direction)
        for j in 0..m {
            self.fwd.process(&mut data[j * m..(j + 1) * m]);
        }
        // columns (t-direction)
        let mut col = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..m {
            for j in 0..m {
                col[j] = data[j * m + i];
            }
            self.fwd.process(&mut col);
            for j in 0..m {
                data[j * m + i] = col[j];
            }
        }
        let scale = 1.0 / (m * m) as f64;
        for v in &mut data {
            *v *= scale;
        }
        data
    }

    pub fn ifft2(&self, coefs: &[Complex64]) -> GridField {
        let m = self.m();
        let mut data = coefs.to_vec();
        for j in 0..m {
            self.inv.process(&mut data[j * m..(j + 1) * m]);
        }
        let mut col = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..m {
            for j in 0..m {
                col[j] = data[j * m + i];
            }
            self.inv.process(&mut col);
            for j in 0..m {
                data[j * m + i] = col[j];
            }
        }
        GridField { m, data }
    }

    /// Exact Fourier evaluation of a spectral representation at `(s, t)`.
    pub fn eval_at(&self, coefs: &[Complex64], s: f64, t: f64) -> Complex64 {
        let m = self.m();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let kt = self.freq[j] as f64;
            for i in 0..m {
                let ks = self.freq[i] as f64;
                let phase = 2.0 * std::f64::consts::PI * (ks * s + kt * t);
                acc += coefs[j * m + i] * Complex64::new(0.0, phase).exp();
            }
        }
        acc
    }

    /// `d/dz` symbol at index pair `(i, j)`.
    pub fn sym_dz(&self, i: usize, j: usize) -> Complex64 {
        let ks = self.freq[i] as f64;
        let kt = self.freq[j] as f64;
        let tau = self.geom.tau;
        std::f64::consts::PI * (Complex64::new(kt, 0.0) - tau.conj() * ks) / tau.im
    }

    /// `d/dzbar` symbol at index pair `(i, j)`.
    pub fn sym_dzb(&self, i: usize, j: usize) -> Complex64 {
        let ks = self.freq[i] as f64;
        let kt = self.freq[j] as f64;
        let tau = self.geom.tau;
        std::f64::consts::PI * (tau * ks - Complex64::new(kt, 0.0)) / tau.im
    }

    fn is_nyquist(&self, i: usize) -> bool {
        self.m() % 2 == 0 && i == self.m() / 2
    }

    pub fn is_nyquist_pub(&self, i: usize) -> bool {
        self.is_nyquist(i)
    }

    /// Applies a per-mode symbol, zeroing the Nyquist rows/columns.
    fn apply_symbol(&self, coefs: &[Complex64], sym: impl Fn(usize, usize) -> Complex64) -> Vec<Complex64> {
        let m = self.m();
        let mut out = vec![Complex64::new(0.0, 0.0); m * m];
        for j in 0..m {
            for i in 0..m {
                if self.is_nyquist(i) || self.is_nyquist(j) {
                    continue;
                }
                out[j * m + i] = coefs[j * m + i] * sym(i, j);
            }
        }
        out
    }

    pub fn dz(&self, f: &GridField) -> GridField {
        let c = self.fft2(f);
        self.ifft2(&self.apply_symbol(&c, |i, j| self.sym_dz(i, j)))
    }

    pub fn dzbar(&self, f: &GridField) -> GridField {
        let c = self.fft2(f);
        self.ifft2(&self.apply_symbol(&c, |i, j| self.sym_dzb(i, j)))
    }

    /// Spectral solve of the pointed Poisson problem
    /// `d*d phi = Omega - (int Omega) delta_0` for a density grid `Omega`
    /// (with respect to `ds dt`). Returns the non-delta part `phi_s`
    /// (zero mode fixed so the smooth remainder vanishes at `P_0`) together
    /// with the delta coefficient `int Omega`; the delta part itself is the
    /// closed-form `green_b(z - z_0)` carried separately by callers.
    pub fn green_solve(&self, density: &GridField) -> Result<(GridField, Complex64)> {
        density.check_finite()?;
        let m = self.m();
        let tau = self.geom.tau;
        let coefs = self.fft2(density);
        let c_delta = coefs[0];
        let mut phi = vec![Complex64::new(0.0, 0.0); m * m];
        for j in 0..m {
            for i in 0..m {
                if i == 0 && j == 0 {
                    continue;
                }
                let lam = 4.0 * tau.im * self.sym_dz(i, j) * self.sym_dzb(i, j);
                phi[j * m + i] = coefs[j * m + i] / lam;
            }
        }
        // normalization: smooth remainder vanishes at P_0
        let (s0, t0) = self.geom.p0;
        let at_p0 = self.eval_at(&phi, s0, t0)
            + c_delta * theta::green_b_smooth_at_zero(tau);
        phi[0] = -at_p0;
        Ok((self.ifft2(&phi), c_delta))
    }

    /// Excision mask: true when the sample is at least `cells / M` away from
    /// the puncture in the `z`-metric (distance through the lattice).
    pub fn off_excision(&self, cells: f64) -> impl Fn(usize, usize) -> bool + '_ {
        let m = self.m();
        let geom = self.geom;
        let r_cut = cells / m as f64;
        move |i: usize, j: usize| {
            let z = geom.z_of(i as f64 / m as f64, j as f64 / m as f64);
            geom.dist_p0(z) >= r_cut
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(m: usize) -> Spectral {
        Spectral::new(
            TorusGeometry::new(
                Complex64::new(0.3, 1.1),
                (0.41, 0.27),
                Complex64::new(1.0, 0.0),
                m,
            )
            .unwrap(),
        )
    }

    #[test]
    fn fft_round_trip() {
        let c = ctx(32);
        let f = GridField::from_fn(32, |s, t| {
            Complex64::new((2.0 * std::f64::consts::PI * s).sin(), (4.0 * std::f64::consts::PI * t).cos())
        });
        let back = c.ifft2(&c.fft2(&f));
        let err = f.sub(&back).max_masked(|_, _| true);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn spectral_derivative_of_wave() {
        let c = ctx(64);
        // f = exp(2 pi i s): z = s + tau t => s = (tau zbar - taubar z)/(tau - taubar)
        // d/dz s = -taubar/(2 i tau2)
        let f = GridField::from_fn(64, |s, _| (Complex64::new(0.0, 2.0 * std::f64::consts::PI * s)).exp());
        let dz = c.dz(&f);
        let tau = c.geom.tau;
        let factor = Complex64::new(0.0, 2.0 * std::f64::consts::PI)
            * (-tau.conj() / Complex64::new(0.0, 2.0 * tau.im));
        let expect = f.scale(factor);
        let err = dz.sub(&expect).max_masked(|_, _| true);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn green_solve_zero_mean_smooth() {
        let c = ctx(64);
        let dens = GridField::from_fn(64, |s, t| {
            Complex64::new(
                (2.0 * std::f64::consts::PI * s).cos() * (2.0 * std::f64::consts::PI * t).sin(),
                0.0,
            )
        });
        let (phi, cd) = c.green_solve(&dens).unwrap();
        assert!(cd.norm() < 1e-13);
        // d*d phi recovers the density: check via spectral laplacian
        let lap = {
            let co = c.fft2(&phi);
            let tau = c.geom.tau;
            let sym = |i: usize, j: usize| 4.0 * tau.im * c.sym_dz(i, j) * c.sym_dzb(i, j);
            c.ifft2(&c.apply_symbol(&co, sym))
        };
        let err = lap.sub(&dens).max_masked(|_, _| true);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn green_solve_uniform_matches_theta_green() {
        // Phi(B) from the spectral formula equals green_b + const; compare
        // gradients off the excision disk at two resolutions
        for (m, tol) in [(64usize, 2e-2), (128, 1e-2)] {
            let c = ctx(m);
            let ones = GridField::from_fn(m, |_, _| Complex64::new(1.0, 0.0));
            let (phi, cd) = c.green_solve(&ones).unwrap();
            assert!((cd - Complex64::new(1.0, 0.0)).norm() < 1e-13);
            let z0 = c.geom.z0();
            let total = GridField::from_fn(m, |s, t| {
                let z = c.geom.z_of(s, t);
                phi.interp(s, t) + Complex64::new(theta::green_b(z - z0, c.geom.tau), 0.0)
            });
            // total should equal green_b up to a constant: compare variation
            let probe = |s: f64, t: f64| {
                let z = c.geom.z_of(s, t);
                total.interp(s, t) - Complex64::new(theta::green_b(z - z0, c.geom.tau), 0.0)
            };
            // here phi should be nearly constant == normalization constant
            let a = probe(0.1, 0.1);
            let b = probe(0.7, 0.6);
            assert!((a - b).norm() < tol, "m={m}: {}", (a - b).norm());
        }
    }

    #[test]
    fn translation_equivariance() {
        // shifting the density and P0 by the same lattice offset shifts phi
        let m = 64;
        let g1 = TorusGeometry::new(Complex64::new(0.3, 1.1), (0.41, 0.27), Complex64::new(1.0, 0.0), m).unwrap();
        let shift = (8usize, 4usize);
        let g2 = TorusGeometry::new(
            Complex64::new(0.3, 1.1),
            (0.41 + shift.0 as f64 / m as f64, 0.27 + shift.1 as f64 / m as f64),
            Complex64::new(1.0, 0.0),
            m,
        )
        .unwrap();
        let c1 = Spectral::new(g1);
        let c2 = Spectral::new(g2);
        let dens1 = GridField::from_fn(m, |s, t| {
            Complex64::new(
                (2.0 * std::f64::consts::PI * s).cos() + 0.3 * (2.0 * std::f64::consts::PI * (s + 2.0 * t)).sin(),
                0.0,
            )
        });
        let dens2 = GridField::from_fn(m, |s, t| {
            dens1.interp(s - shift.0 as f64 / m as f64, t - shift.1 as f64 / m as f64)
        });
        let (p1, _) = c1.green_solve(&dens1).unwrap();
        let (p2, _) = c2.green_solve(&dens2).unwrap();
        let mut err: f64 = 0.0;
        for j in 0..m {
            for i in 0..m {
                let v = p2.at((i + shift.0) % m, (j + shift.1) % m) - p1.at(i, j);
                err = err.max(v.norm());
            }
        }
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn bicubic_interpolates_smooth_fields() {
        let f = GridField::from_fn(64, |s, t| {
            Complex64::new((2.0 * std::f64::consts::PI * s).sin() * (2.0 * std::f64::consts::PI * t).cos(), 0.0)
        });
        let exact = |s: f64, t: f64| (2.0 * std::f64::consts::PI * s).sin() * (2.0 * std::f64::consts::PI * t).cos();
        for (s, t) in [(0.111, 0.222), (0.333, 0.777), (0.999, 0.001)] {
            let got = f.interp(s, t).re;
            assert!((got - exact(s, t)).abs() < 5e-5, "{s} {t}");
        }
    }
}
