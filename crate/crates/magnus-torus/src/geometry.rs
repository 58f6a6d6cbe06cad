//! A pointed flat torus `C = C/(Z + tau Z)` with a tangential basepoint:
//! the modulus `tau`, the puncture `P_0` (in lattice coordinates), a nonzero
//! direction `v`, and the spectral grid size.
//!
//! Lattice coordinates `(s, t) in [0,1)^2` correspond to `z = s + tau t`;
//! the complex orientation is `dx ^ dy = Im(tau) ds ^ dt`.

use num_complex::Complex64;

use crate::{Result, TorusError};

#[derive(Clone, Copy, Debug)]
pub struct TorusGeometry {
    pub tau: Complex64,
    /// Puncture in lattice coordinates `(s_0, t_0)`.
    pub p0: (f64, f64),
    /// Tangential basepoint direction in the `z`-plane.
    pub v: Complex64,
    /// Grid size per axis (a power of two).
    pub m: usize,
}

impl TorusGeometry {
    pub fn new(tau: Complex64, p0: (f64, f64), v: Complex64, m: usize) -> Result<Self> {
        if tau.im <= 0.0 {
            return Err(TorusError::Geometry("Im(tau) must be positive".into()));
        }
        if v.norm() == 0.0 {
            return Err(TorusError::Geometry("v must be nonzero".into()));
        }
        if m < 8 || !m.is_power_of_two() {
            return Err(TorusError::Geometry("grid size must be a power of two >= 8".into()));
        }
        if !(tau.is_finite() && p0.0.is_finite() && p0.1.is_finite() && v.is_finite()) {
            return Err(TorusError::Geometry("non-finite parameter".into()));
        }
        Ok(TorusGeometry {
            tau,
            p0: (p0.0.rem_euclid(1.0), p0.1.rem_euclid(1.0)),
            v,
            m,
        })
    }

    /// `z = s + tau t`.
    pub fn z_of(&self, s: f64, t: f64) -> Complex64 {
        Complex64::new(s, 0.0) + self.tau * t
    }

    pub fn z0(&self) -> Complex64 {
        self.z_of(self.p0.0, self.p0.1)
    }

    /// Lattice coordinates of a point in the `z`-plane (not reduced).
    pub fn lattice_of(&self, z: Complex64) -> (f64, f64) {
        let t = z.im / self.tau.im;
        let s = z.re - self.tau.re * t;
        (s, t)
    }

    /// Displacement to the nearest lattice translate of `z0() `from `z`.
    pub fn sep_from_p0(&self, z: Complex64) -> Complex64 {
        let w = z - self.z0();
        let (s, t) = self.lattice_of(w);
        let sr = s - s.round();
        let tr = t - t.round();
        Complex64::new(sr, 0.0) + self.tau * tr
    }

    /// Distance to the puncture through the lattice.
    pub fn dist_p0(&self, z: Complex64) -> f64 {
        self.sep_from_p0(z).norm()
    }

    /// Harmonic basis in `(dz, dzbar)` components: returns `(alpha, beta)`
    /// where `alpha = ds`, `beta = dt` have unit periods over the 1- and
    /// tau-loops; the `dzbar` component is the conjugate of the `dz` one.
    pub fn harmonic_basis_dz(&self) -> (Complex64, Complex64) {
        let two_i_t2 = Complex64::new(0.0, 2.0 * self.tau.im);
        let alpha = -self.tau.conj() / two_i_t2;
        let beta = Complex64::new(1.0, 0.0) / two_i_t2;
        (alpha, beta)
    }

    /// Area form scale: `dx ^ dy = Im(tau) ds ^ dt`.
    pub fn area_scale(&self) -> f64 {
        self.tau.im
    }
}
