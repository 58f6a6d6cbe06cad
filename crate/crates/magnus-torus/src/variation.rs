//! First-order quasiconformal variation: Beltrami fields vanishing at the
//! puncture, the pairing integral
//! `h = int_C 2 Re((N(omega' omega') - 2 omega'_1 omega'_1) mudot)`,
//! the prediction `thetadot(gamma) = interior(h) theta(gamma)`, and the
//! first-order marking family used for finite-difference cross-checks.

use num_complex::Complex64;

use magnus_core::scalar::{Mode, Scalar};
use magnus_core::symplectic::SymplecticStructure;
use magnus_core::tensor::TensorSeries;

use crate::connection::{build_connection, ConnectionForm};
use crate::expansion::loop_transport;
use crate::geometry::TorusGeometry;
use crate::grid::{GridField, Spectral};
use crate::integrate::TransportOpts;
use crate::loops::TangentialLoop;
use crate::quaddiff::{quad_differential, QuadDifferential};
use crate::{Result, TorusError};

/// Infinitesimal Beltrami differential `mudot d/dz (x) dzbar` on the grid.
#[derive(Clone, Debug)]
pub struct BeltramiField {
    pub samples: GridField,
    pub vanishes_at_p0: bool,
}

/// `C^infty` cutoff: 1 on `r <= rho/2`, 0 on `r >= rho`.
fn bump(r: f64, rho: f64) -> f64 {
    if r <= rho / 2.0 {
        return 1.0;
    }
    if r >= rho {
        return 0.0;
    }
    let x = (r - rho / 2.0) / (rho / 2.0); // in (0,1)
    let f = |y: f64| if y > 0.0 { (-1.0 / y).exp() } else { 0.0 };
    f(1.0 - x) / (f(1.0 - x) + f(x))
}

/// `mudot = mu_const (1 - chi_rho(z - P0))`: constant away from the
/// puncture, vanishing to all orders at it. `rho = 0` gives the constant
/// family (no vanishing flag).
pub fn bump_beltrami(geom: &TorusGeometry, mu_const: Complex64, rho: f64) -> BeltramiField {
    let m = geom.m;
    let samples = GridField::from_fn(m, |s, t| {
        if rho == 0.0 {
            mu_const
        } else {
            let r = geom.dist_p0(geom.z_of(s, t));
            mu_const * (1.0 - bump(r, rho))
        }
    });
    BeltramiField { samples, vanishes_at_p0: rho > 0.0 }
}

/// `int_C q mudot` for a `dz^2`-coefficient grid `q`: the pairing density is
/// `q mudot dz ^ dzbar = -2 i tau_2 q mudot ds dt`.
fn pair_quad_beltrami(geom: &TorusGeometry, q: &GridField, mu: &GridField) -> Complex64 {
    let prod = q.mul_pointwise(mu);
    prod.mean() * Complex64::new(0.0, -2.0 * geom.tau.im)
}

/// The variation tensor `h` in degrees `3..=max_deg`, stored in a series of
/// truncation `max_deg`.
pub fn variation_tensor(
    cf: &ConnectionForm,
    q: &QuadDifferential,
    mu: &BeltramiField,
    max_deg: usize,
) -> Result<TensorSeries> {
    if !mu.vanishes_at_p0 {
        return Err(TorusError::pre(
            "variation needs a Beltrami field vanishing at the puncture",
        ));
    }
    if cf.n_deg < 3 {
        return Err(TorusError::pre("connection must be built to degree >= 3"));
    }
    let geom = &cf.geom;
    let mut h = TensorSeries::zero(2, max_deg, Mode::Float);
    for m in 3..=max_deg {
        if let Some((words, fields)) = q.degree(m) {
            for (w, f) in words.iter().zip(fields) {
                let val = pair_quad_beltrami(geom, f, &mu.samples);
                // 2 Re(...) of the complex pairing
                let re = 2.0 * val.re;
                if re != 0.0 {
                    h.insert(w.clone(), Scalar::Float(re));
                }
            }
        }
    }
    Ok(h)
}

/// `thetadot(gamma) = interior(h) theta(gamma)` (the degree-2 Rauch part is
/// subtracted exactly, so `h` starts in degree 3 and the output's degrees
/// 0 and 1 vanish).
pub fn variation_predict(h: &TensorSeries, theta_gamma: &TensorSeries) -> Result<TensorSeries> {
    let sympl = SymplecticStructure::new(1)?;
    let out = sympl.interior_apply(h, theta_gamma)?;
    Ok(out)
}

/// First-order marking data of the family `f^t = id + t V` with
/// `dbar V = mudot` and `V = c zbar + periodic`, `c = mean(mudot)`.
#[derive(Clone, Debug)]
pub struct FamilyMarking {
    pub c_mean: Complex64,
    /// Periodic part of `V` on the grid.
    pub v_periodic: GridField,
    /// `d_z V` on the grid (periodic part; the `c zbar` term has none).
    pub v_z: GridField,
    pub geom: TorusGeometry,
}

pub fn family_marking(geom: &TorusGeometry, mu: &BeltramiField) -> Result<FamilyMarking> {
    let ctx = Spectral::new(*geom);
    let coefs = ctx.fft2(&mu.samples);
    let c_mean = coefs[0];
    let m = geom.m;
    let mut vout = vec![Complex64::new(0.0, 0.0); m * m];
    for j in 0..m {
        for i in 0..m {
            if i == 0 && j == 0 {
                continue;
            }
            if (m % 2 == 0) && (i == m / 2 || j == m / 2) {
                continue;
            }
            let sym = ctx.sym_dzb(i, j);
            vout[j * m + i] = coefs[j * m + i] / sym;
        }
    }
    let v_periodic = ctx.ifft2(&vout);
    let v_z = ctx.dz(&v_periodic);
    Ok(FamilyMarking { c_mean, v_periodic, v_z, geom: *geom })
}

impl FamilyMarking {
    /// `V(z) = c zbar + periodic(z)`.
    pub fn v_at(&self, z: Complex64) -> Complex64 {
        let (s, t) = self.geom.lattice_of(z);
        self.c_mean * z.conj() + self.v_periodic.interp(s, t)
    }

    pub fn v_z_at(&self, z: Complex64) -> Complex64 {
        let (s, t) = self.geom.lattice_of(z);
        self.v_z.interp(s, t)
    }

    /// Deformed modulus to first order: lattice `(1 + t c, tau + t c conj(tau))`
    /// normalized to `(1, tau_t)`.
    pub fn tau_t(&self, t: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0) + self.c_mean * t;
        (self.geom.tau + self.c_mean * t * self.geom.tau.conj()) / one
    }

    /// `taudot = c (conj(tau) - tau) = -2 i tau_2 c`.
    pub fn tau_dot(&self) -> Complex64 {
        self.c_mean * (self.geom.tau.conj() - self.geom.tau)
    }

    /// Deformed geometry at parameter `t`: new modulus, mapped puncture and
    /// tangential direction (condition (7.1) holds since `mudot(P0) = 0`).
    pub fn geometry_t(&self, t: f64, mu: &BeltramiField) -> Result<TorusGeometry> {
        let scale = Complex64::new(1.0, 0.0) + self.c_mean * t;
        let z0 = self.geom.z0();
        let z0_t = (z0 + self.v_at(z0) * t) / scale;
        let tau_t = self.tau_t(t);
        // lattice coordinates of the new puncture with respect to (1, tau_t)
        let t0 = z0_t.im / tau_t.im;
        let s0 = z0_t.re - tau_t.re * t0;
        let mut vdot = self.v_z_at(z0);
        if !mu.vanishes_at_p0 {
            // the affine family has dbar f = t mu everywhere; at P0 the
            // tangential direction still maps by df = (1 + t V_z) v + t mu conj(v)
            vdot += mu.samples.interp(self.geom.p0.0, self.geom.p0.1)
                * (self.geom.v.conj() / self.geom.v);
        }
        let v_t = self.geom.v * (Complex64::new(1.0, 0.0) + vdot * t) / scale;
        TorusGeometry::new(tau_t, (s0, t0), v_t, self.geom.m)
    }

    /// Maps a loop through `f^t` into the deformed torus (same knot
    /// structure; velocities pushed by `df^t`). Endpoints and endpoint
    /// velocities are snapped exactly onto the deformed geometry's puncture,
    /// lattice and tangential direction: the pullback of the singular model
    /// divides by the distance to the puncture, so even rounding-level
    /// endpoint mismatches blow up the integrand on the graded mesh.
    pub fn map_loop(
        &self,
        lp: &TangentialLoop,
        t: f64,
        mu: &BeltramiField,
        geom_t: &TorusGeometry,
    ) -> Result<TangentialLoop> {
        let scale = Complex64::new(1.0, 0.0) + self.c_mean * t;
        let (knots, vels) = lp.knots_vels();
        let mut mapped_knots: Vec<Complex64> = knots
            .iter()
            .map(|&k| (k + self.v_at(k) * t) / scale)
            .collect();
        let mut mapped_vels: Vec<Complex64> = knots
            .iter()
            .zip(vels)
            .map(|(&k, &v)| {
                let (s, tt) = self.geom.lattice_of(k);
                let mudot = mu.samples.interp(s, tt);
                (v + (self.v_z_at(k) * v + mudot * v.conj()) * t) / scale
            })
            .collect();

        // snap: translate so the start is exactly the new puncture, and pin
        // the end to the exact lattice translate of the original class
        let n = mapped_knots.len();
        let shift = geom_t.z0() - mapped_knots[0];
        for k in mapped_knots.iter_mut() {
            *k += shift;
        }
        let (ds, dt) = self.geom.lattice_of(lp.displacement());
        let disp_t = Complex64::new(ds.round(), 0.0) + geom_t.tau * dt.round();
        mapped_knots[n - 1] = mapped_knots[0] + disp_t;
        let nseg = (n - 1) as f64;
        mapped_vels[0] = geom_t.v / nseg;
        mapped_vels[n - 1] = -geom_t.v / nseg;
        TangentialLoop::from_knots(&lp.label, mapped_knots, mapped_vels)
    }
}

/// Central-difference derivative of the harmonic expansion along the family,
/// per word value.
pub struct VariationRun {
    pub predicted: Vec<(String, TensorSeries)>,
    pub measured: Vec<(String, TensorSeries)>,
    pub tau_dot_fd: Complex64,
    pub tau_dot_rauch: Complex64,
}

/// Runs the full finite-difference harness: builds the deformed geometry at
/// `t = -h, +h`, re-runs the expansion on mapped loops, and differences.
#[allow(clippy::too_many_arguments)]
pub fn variation_run(
    geom: &TorusGeometry,
    cf: &ConnectionForm,
    a: &TangentialLoop,
    b: &TangentialLoop,
    mu_const: Complex64,
    rho: f64,
    h_step: f64,
    words: &[(&str, Vec<i32>)],
    opts: &TransportOpts,
) -> Result<VariationRun> {
    let mu = bump_beltrami(geom, mu_const, rho);
    let marking = family_marking(geom, &mu)?;
    let q = quad_differential(cf, cf.n_deg + 1)?;
    let h_tensor = variation_tensor(cf, &q, &mu, cf.n_deg + 1)?;

    // base values
    let base_a = loop_transport(cf, a, opts)?;
    let base_b = loop_transport(cf, b, opts)?;
    let eval_word = |ta: &TensorSeries, tb: &TensorSeries, word: &[i32]| -> Result<TensorSeries> {
        let mut acc = TensorSeries::one(2, cf.n_deg, Mode::Float);
        let ta_inv = ta.group_inverse()?;
        let tb_inv = tb.group_inverse()?;
        for &l in word {
            let f = match l {
                1 => ta,
                -1 => &ta_inv,
                2 => tb,
                -2 => &tb_inv,
                _ => return Err(TorusError::pre("bad letter")),
            };
            acc = acc.mul(f)?;
        }
        Ok(acc)
    };

    let mut predicted = Vec::new();
    for (label, word) in words {
        let theta_gamma = eval_word(&base_a, &base_b, word)?.with_trunc(cf.n_deg + 1);
        let p = variation_predict(&h_tensor, &theta_gamma)?.with_trunc(cf.n_deg);
        predicted.push((label.to_string(), p));
    }

    // finite differences over the marking family
    let side = |t: f64| -> Result<Vec<TensorSeries>> {
        let geom_t = marking.geometry_t(t, &mu)?;
        let cf_t = build_connection(&geom_t, cf.n_deg)?;
        let a_t = marking.map_loop(a, t, &mu, &geom_t)?;
        let b_t = marking.map_loop(b, t, &mu, &geom_t)?;
        let ta = loop_transport(&cf_t, &a_t, opts)?;
        let tb = loop_transport(&cf_t, &b_t, opts)?;
        words
            .iter()
            .map(|(_, w)| eval_word(&ta, &tb, w))
            .collect()
    };
    let plus = side(h_step)?;
    let minus = side(-h_step)?;
    let measured = words
        .iter()
        .zip(plus.iter().zip(&minus))
        .map(|((label, _), (p, m))| {
            let diff = p.sub(m).expect("compat").scale(&Scalar::Float(1.0 / (2.0 * h_step)));
            (label.to_string(), diff)
        })
        .collect();

    // Rauch cross-check data for the same family
    let tau_dot_fd = (marking.tau_t(h_step) - marking.tau_t(-h_step)) / (2.0 * h_step);
    let tau_dot_rauch = mu
        .samples
        .mean()
        * Complex64::new(0.0, -2.0 * geom.tau.im);

    Ok(VariationRun { predicted, measured, tau_dot_fd, tau_dot_rauch })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(m: usize) -> TorusGeometry {
        TorusGeometry::new(
            Complex64::new(0.3, 1.1),
            (0.41, 0.27),
            Complex64::new(1.0, 0.0),
            m,
        )
        .unwrap()
    }

    #[test]
    fn bump_is_smooth_partition() {
        assert_eq!(bump(0.0, 0.1), 1.0);
        assert_eq!(bump(0.2, 0.1), 0.0);
        let mid = bump(0.075, 0.1);
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn constant_family_tau_dot() {
        let g = geom(32);
        let mu = bump_beltrami(&g, Complex64::new(0.05, 0.0), 0.0);
        let mk = family_marking(&g, &mu).unwrap();
        // tau_t = (tau + t mu conj(tau)) / (1 + t mu): taudot = mu(conj(tau)-tau)
        let expect = Complex64::new(0.05, 0.0) * (g.tau.conj() - g.tau);
        assert!((mk.tau_dot() - expect).norm() < 1e-12);
        let fd = (mk.tau_t(1e-5) - mk.tau_t(-1e-5)) / 2e-5;
        assert!((fd - expect).norm() < 1e-7);
        // Rauch pairing: int mu dz^2 = mean(mu) * (-2 i tau2)
        let rauch = mu.samples.mean() * Complex64::new(0.0, -2.0 * g.tau.im);
        assert!((rauch - expect).norm() < 1e-12);
    }

    #[test]
    fn marking_solves_dbar_problem() {
        let g = geom(64);
        let mu = bump_beltrami(&g, Complex64::new(0.05, 0.02), 0.12);
        let mk = family_marking(&g, &mu).unwrap();
        // check dbar V = mudot at a few interior points by finite differences
        for (s, t) in [(0.13, 0.71), (0.66, 0.52)] {
            let z = g.z_of(s, t);
            let h = 1e-4;
            let vx = (mk.v_at(z + Complex64::new(h, 0.0)) - mk.v_at(z - Complex64::new(h, 0.0)))
                / (2.0 * h);
            let vy = (mk.v_at(z + Complex64::new(0.0, h)) - mk.v_at(z - Complex64::new(0.0, h)))
                / (2.0 * h);
            let dbar = (vx + Complex64::new(0.0, 1.0) * vy) / 2.0;
            let want = mu.samples.interp(s, t);
            assert!((dbar - want).norm() < 1e-3, "{dbar} vs {want}");
        }
    }

    #[test]
    fn beltrami_vanishes_on_plateau() {
        let g = geom(64);
        let mu = bump_beltrami(&g, Complex64::new(0.05, 0.0), 0.1);
        assert!(mu.vanishes_at_p0);
        let v = mu.samples.interp(g.p0.0, g.p0.1);
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn variation_requires_vanishing_beltrami() {
        let g = geom(64);
        let cf = crate::connection::build_connection(&g, 3).unwrap();
        let q = crate::quaddiff::quad_differential(&cf, 4).unwrap();
        let constant = bump_beltrami(&g, Complex64::new(0.05, 0.0), 0.0);
        assert!(variation_tensor(&cf, &q, &constant, 4).is_err());
        let bumped = bump_beltrami(&g, Complex64::new(0.05, 0.0), 0.1);
        let h = variation_tensor(&cf, &q, &bumped, 4).unwrap();
        // degrees 0..2 of the variation tensor vanish; the prediction's
        // low degrees then vanish as well
        assert!(h.degree_part(0).is_zero() && h.degree_part(1).is_zero() && h.degree_part(2).is_zero());
        let theta_gamma = magnus_core::tensor::TensorSeries::one(2, 4, magnus_core::scalar::Mode::Float)
            .add(&magnus_core::tensor::TensorSeries::generator(2, 4, magnus_core::scalar::Mode::Float, 1))
            .unwrap();
        let out = variation_predict(&h, &theta_gamma).unwrap();
        assert!(out.degree_part(0).is_zero() && out.degree_part(1).is_zero());
    }
}
