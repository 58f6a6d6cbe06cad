//! Jacobi theta machinery for the flat-torus Green function.
//!
//! `theta1(w | tau)` has simple zeros exactly on the lattice `Z + tau Z`, so
//! `G(w) = (1/2pi) log|theta1(w)| - (Im w)^2 / (2 Im tau)` is lattice-periodic
//! with `Laplacian G = delta - 1/Im(tau)` in the `dx dy` density. The Green
//! potential of the uniform density `B = ds dt` used by the connection-form
//! recursion is `-G` up to the basepoint normalization constant.

use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `theta1(w | tau) = 2 sum (-1)^n q^{(n+1/2)^2} sin((2n+1) pi w)`.
pub fn theta1(w: Complex64, tau: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..24u32 {
        let a = n as f64 + 0.5;
        // q^{a^2} = exp(i pi tau a^2)
        let qa = (I * std::f64::consts::PI * tau * a * a).exp();
        let s = (std::f64::consts::PI * (2.0 * n as f64 + 1.0) * w).sin();
        let term = qa * s;
        acc += if n % 2 == 0 { term } else { -term };
        if qa.norm() < 1e-19 {
            break;
        }
    }
    2.0 * acc
}

/// Derivative `theta1'(w | tau)` in `w`.
pub fn theta1_prime(w: Complex64, tau: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..24u32 {
        let a = n as f64 + 0.5;
        let qa = (I * std::f64::consts::PI * tau * a * a).exp();
        let k = 2.0 * n as f64 + 1.0;
        let c = (std::f64::consts::PI * k * w).cos();
        let term = qa * c * (std::f64::consts::PI * k);
        acc += if n % 2 == 0 { term } else { -term };
        if qa.norm() < 1e-19 {
            break;
        }
    }
    2.0 * acc
}

/// Reduces `w` modulo `Z + tau Z` to lattice coordinates in `[-1/2, 1/2)`.
pub fn reduce(w: Complex64, tau: Complex64) -> Complex64 {
    let t = w.im / tau.im;
    let s = w.re - tau.re * t;
    let sr = s - s.round();
    let tr = t - t.round();
    Complex64::new(sr, 0.0) + tau * tr
}

/// Green potential of the uniform density: `green_b = -G`, satisfying
/// `tau_2 Lap green_b = 1 - delta^{(s,t)}`; behaves like
/// `-(1/2pi) log|w| + smooth` at the lattice.
pub fn green_b(w: Complex64, tau: Complex64) -> f64 {
    let wr = reduce(w, tau);
    let th = theta1(wr, tau);
    -(th.norm().ln()) / (2.0 * std::f64::consts::PI) + wr.im * wr.im / (2.0 * tau.im)
}

/// `d/dw` of `green_b` (periodic; evaluated at the reduced point).
pub fn green_b_dw(w: Complex64, tau: Complex64) -> Complex64 {
    let wr = reduce(w, tau);
    let ratio = theta1_prime(wr, tau) / theta1(wr, tau);
    -ratio / (4.0 * std::f64::consts::PI) - I * wr.im / (2.0 * tau.im)
}

/// Value at the singular point of the smooth remainder
/// `green_b(w) + (1/2pi) log|w|` as `w -> 0`.
pub fn green_b_smooth_at_zero(tau: Complex64) -> f64 {
    let tp = theta1_prime(Complex64::new(0.0, 0.0), tau);
    -(tp.norm().ln()) / (2.0 * std::f64::consts::PI)
}

/// The `dz`-component of the degree-two carrier `*d(green_b(z - z0))`:
/// `-i d/dz green_b`, approaching `i / (4 pi (z - z0))` at the puncture
/// (that is, `-(1/2pi) d arg(z - z0)` as a 1-form).
pub fn carrier_dz(z: Complex64, z0: Complex64, tau: Complex64) -> Complex64 {
    -I * green_b_dw(z - z0, tau)
}

/// Carrier component for an already-reduced separation `w` (callers near
/// the puncture supply an exactly computed small separation; running it
/// through the lattice reduction would re-introduce rounding noise that the
/// `1/w` pole amplifies).
pub fn carrier_dz_sep(w: Complex64, tau: Complex64) -> Complex64 {
    let ratio = theta1_prime(w, tau) / theta1(w, tau);
    -I * (-ratio / (4.0 * std::f64::consts::PI) - I * w.im / (2.0 * tau.im))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU: Complex64 = Complex64::new(0.3, 1.1);

    #[test]
    fn theta1_quasi_periodicity() {
        let w = Complex64::new(0.31, 0.17);
        let a = theta1(w + Complex64::new(1.0, 0.0), TAU);
        assert!((a + theta1(w, TAU)).norm() < 1e-12);
        // theta1(w + tau) = -q^{-1} e^{-2 pi i w} theta1(w), q = e^{i pi tau}
        let q = (I * std::f64::consts::PI * TAU).exp();
        let b = theta1(w + TAU, TAU);
        let expect = -theta1(w, TAU) / q * (-2.0 * std::f64::consts::PI * I * w).exp();
        assert!((b - expect).norm() / expect.norm() < 1e-11);
    }

    #[test]
    fn green_b_is_periodic() {
        let w = Complex64::new(0.21, 0.4);
        let g0 = green_b(w, TAU);
        assert!((green_b(w + Complex64::new(1.0, 0.0), TAU) - g0).abs() < 1e-12);
        assert!((green_b(w + TAU, TAU) - g0).abs() < 1e-12);
    }

    #[test]
    fn green_b_log_singularity() {
        // green_b(w) + (1/2pi) log|w| tends to the smooth value at 0
        let c = green_b_smooth_at_zero(TAU);
        for r in [1e-3, 1e-4, 1e-5] {
            let w = Complex64::new(r, 0.4 * r);
            let v = green_b(w, TAU) + w.norm().ln() / (2.0 * std::f64::consts::PI);
            assert!((v - c).abs() < 1e-5, "r={r}: {v} vs {c}");
        }
    }

    #[test]
    fn green_b_solves_poisson_numerically() {
        // tau2 * Lap green_b = 1 away from the lattice (5-point stencil)
        let h = 1e-4;
        for w in [Complex64::new(0.37, 0.52), Complex64::new(-0.21, 0.33)] {
            let f = |z: Complex64| green_b(z, TAU);
            let lap = (f(w + Complex64::new(h, 0.0))
                + f(w - Complex64::new(h, 0.0))
                + f(w + Complex64::new(0.0, h))
                + f(w - Complex64::new(0.0, h))
                - 4.0 * f(w))
                / (h * h);
            assert!((TAU.im * lap - 1.0).abs() < 1e-4, "lap residual {}", TAU.im * lap - 1.0);
        }
    }

    #[test]
    fn carrier_matches_arg_form_near_puncture() {
        let z0 = Complex64::new(0.41, 0.27);
        for r in [1e-3, 1e-4] {
            let z = z0 + Complex64::new(r, -0.3 * r);
            let w = z - z0;
            let model = I / (4.0 * std::f64::consts::PI * w);
            let got = carrier_dz(z, z0, TAU);
            assert!((got - model).norm() * w.norm() < 1e-4, "r={r}");
        }
    }

    #[test]
    fn derivative_consistency() {
        let w = Complex64::new(0.23, 0.41);
        let h = 1e-6;
        let fd = (green_b(w + Complex64::new(h, 0.0), TAU) - green_b(w - Complex64::new(h, 0.0), TAU))
            / (2.0 * h);
        let fdi = (green_b(w + Complex64::new(0.0, h), TAU) - green_b(w - Complex64::new(0.0, h), TAU))
            / (2.0 * h);
        // d/dw = (d/dx - i d/dy)/2 on real-valued functions
        let dw = Complex64::new(fd, -fdi) / 2.0;
        assert!((dw - green_b_dw(w, TAU)).norm() < 1e-7);
    }
}
