//! Piecewise-cubic tangential loops on the punctured torus: based at the
//! puncture, departing with velocity `v` and returning with `-v`, interior
//! clear of the puncture's lattice translates outside small endpoint cones.
//!
//! Generator loops run out along the `v`-ray to a clearance radius, travel
//! to the translated ray, and come back in radially; when the displacement
//! is parallel to `v` the mid segment bulges to the left of `v`.

use num_complex::Complex64;

use crate::geometry::TorusGeometry;
use crate::{Result, TorusError};

/// A `C^1` Hermite spline path in the `z`-plane (universal cover); loops on
/// the torus go from `z_0` to `z_0 + displacement`.
#[derive(Clone, Debug)]
pub struct TangentialLoop {
    pub label: String,
    knots: Vec<Complex64>,
    /// Velocities in per-segment units (`du`, each segment `u in [0,1]`).
    vels: Vec<Complex64>,
}

impl TangentialLoop {
    pub fn from_knots(label: &str, knots: Vec<Complex64>, vels: Vec<Complex64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != vels.len() {
            return Err(TorusError::Loop("need matching knots and velocities".into()));
        }
        Ok(TangentialLoop { label: label.into(), knots, vels })
    }

    pub fn segments(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn start(&self) -> Complex64 {
        self.knots[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.knots.last().unwrap()
    }

    pub fn displacement(&self) -> Complex64 {
        self.end() - self.start()
    }

    /// Position at `t in [0, 1]`.
    pub fn pos(&self, t: f64) -> Complex64 {
        let (seg, u) = self.locate(t);
        let (p0, p1) = (self.knots[seg], self.knots[seg + 1]);
        let (m0, m1) = (self.vels[seg], self.vels[seg + 1]);
        let u2 = u * u;
        let u3 = u2 * u;
        p0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + m0 * (u3 - 2.0 * u2 + u)
            + p1 * (-2.0 * u3 + 3.0 * u2)
            + m1 * (u3 - u2)
    }

    /// Velocity `dz/dt` at `t in [0, 1]`.
    pub fn vel(&self, t: f64) -> Complex64 {
        let n = self.segments() as f64;
        let (seg, u) = self.locate(t);
        let (p0, p1) = (self.knots[seg], self.knots[seg + 1]);
        let (m0, m1) = (self.vels[seg], self.vels[seg + 1]);
        let u2 = u * u;
        let dp = p0 * (6.0 * u2 - 6.0 * u)
            + m0 * (3.0 * u2 - 4.0 * u + 1.0)
            + p1 * (-6.0 * u2 + 6.0 * u)
            + m1 * (3.0 * u2 - 2.0 * u);
        dp * n
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.segments();
        let x = (t.clamp(0.0, 1.0)) * n as f64;
        let seg = (x.floor() as usize).min(n - 1);
        (seg, x - seg as f64)
    }

    /// Displacement `pos(t) - start()` for `t` in the first segment,
    /// evaluated in a difference form free of catastrophic cancellation
    /// (needed when dividing by the distance to the basepoint).
    pub fn sep_from_start(&self, t: f64) -> Complex64 {
        let (seg, u) = self.locate(t);
        debug_assert_eq!(seg, 0);
        let (p0, p1) = (self.knots[0], self.knots[1]);
        let (m0, m1) = (self.vels[0], self.vels[1]);
        let u2 = u * u;
        let u3 = u2 * u;
        (p1 - p0) * (3.0 * u2 - 2.0 * u3)
            + m0 * (u3 - 2.0 * u2 + u)
            + m1 * (u3 - u2)
    }

    /// Displacement `pos(t) - end()` for `t` in the last segment, in the
    /// same cancellation-free form.
    pub fn sep_from_end(&self, t: f64) -> Complex64 {
        let (seg, u) = self.locate(t);
        debug_assert_eq!(seg, self.segments() - 1);
        let n = self.knots.len();
        let (p0, p1) = (self.knots[n - 2], self.knots[n - 1]);
        let (m0, m1) = (self.vels[n - 2], self.vels[n - 1]);
        let u2 = u * u;
        let u3 = u2 * u;
        (p0 - p1) * (2.0 * u3 - 3.0 * u2 + 1.0)
            + m0 * (u3 - 2.0 * u2 + u)
            + m1 * (u3 - u2)
    }

    /// The reversed path (the inverse loop).
    pub fn reversed(&self) -> TangentialLoop {
        TangentialLoop {
            label: format!("{}^-1", self.label),
            knots: self.knots.iter().rev().cloned().collect(),
            vels: self.vels.iter().rev().map(|&v| -v).collect(),
        }
    }

    /// Knots and velocities, for mapping the loop through a marking.
    pub fn knots_vels(&self) -> (&[Complex64], &[Complex64]) {
        (&self.knots, &self.vels)
    }

    /// Checks the tangential endpoint conditions and interior clearance.
    pub fn validate(&self, geom: &TorusGeometry, rho_min: f64) -> Result<()> {
        let v = geom.v;
        if (self.vel(0.0) - v).norm() > 1e-10 {
            return Err(TorusError::Loop(format!(
                "{}: start velocity {} != v",
                self.label,
                self.vel(0.0)
            )));
        }
        if (self.vel(1.0) + v).norm() > 1e-10 {
            return Err(TorusError::Loop(format!(
                "{}: end velocity {} != -v",
                self.label,
                self.vel(1.0)
            )));
        }
        let samples = 4000;
        let t_cone = 1.0 / self.segments() as f64;
        for k in 1..samples {
            let t = k as f64 / samples as f64;
            if t < t_cone || t > 1.0 - t_cone {
                continue;
            }
            let d = geom.dist_p0(self.pos(t));
            if d < rho_min {
                return Err(TorusError::Loop(format!(
                    "{}: clearance {d:.4} < {rho_min} at t={t:.3}",
                    self.label
                )));
            }
        }
        Ok(())
    }
}

/// Parameters of the canonical generator loops.
#[derive(Clone, Copy, Debug)]
pub struct LoopParams {
    /// Clearance radius of the radial stubs.
    pub rho: f64,
    /// Bulge height used when the displacement is parallel to `v`.
    pub bulge: f64,
}

impl Default for LoopParams {
    fn default() -> Self {
        LoopParams { rho: 0.06, bulge: 0.22 }
    }
}

/// Canonical loop for a lattice displacement (`1` for the a-loop, `tau` for
/// the b-loop): radial departure along `v`, travel to the translated ray,
/// radial return.
pub fn generator_loop(geom: &TorusGeometry, label: &str, disp: Complex64, params: &LoopParams) -> Result<TangentialLoop> {
    let z0 = geom.z0();
    let vhat = geom.v / geom.v.norm();
    let rho = params.rho;
    // bulge sideways (left of v) when the displacement runs along the v-ray
    let ratio = disp / geom.v;
    let parallel = ratio.im.abs() < 0.2 * ratio.norm();
    let n_hat = Complex64::new(0.0, 1.0) * vhat;
    let bulge = if parallel { params.bulge } else { 0.0 };

    let k_out = z0 + vhat * rho;
    let k_in = z0 + disp + vhat * rho;
    let mid1 = z0 + disp * 0.32 + vhat * rho + n_hat * bulge;
    let mid2 = z0 + disp * 0.68 + vhat * rho + n_hat * bulge;
    let knots = vec![z0, k_out, mid1, mid2, k_in, z0 + disp];
    let nseg = (knots.len() - 1) as f64;

    let mut vels = Vec::with_capacity(knots.len());
    for (i, _) in knots.iter().enumerate() {
        if i == 0 {
            vels.push(geom.v / nseg);
        } else if i == knots.len() - 1 {
            vels.push(-geom.v / nseg);
        } else {
            let prev = knots[i - 1];
            let next = knots[i + 1];
            vels.push((next - prev) * 0.5);
        }
    }
    let lp = TangentialLoop::from_knots(label, knots, vels)?;
    lp.validate(geom, rho * 0.5)?;
    Ok(lp)
}

/// The canonical `(a, b)` pair: displacements `1` and `tau`.
pub fn canonical_loops(geom: &TorusGeometry, params: &LoopParams) -> Result<(TangentialLoop, TangentialLoop)> {
    let a = generator_loop(geom, "a", Complex64::new(1.0, 0.0), params)?;
    let b = generator_loop(geom, "b", geom.tau, params)?;
    Ok((a, b))
}

/// A loop through the given polyline vertices (lattice coordinates), with
/// tangential endpoint stubs attached; used by the CLI loops-file format.
pub fn loop_from_polyline(
    geom: &TorusGeometry,
    label: &str,
    points_lattice: &[(f64, f64)],
    params: &LoopParams,
) -> Result<TangentialLoop> {
    if points_lattice.len() < 2 {
        return Err(TorusError::Loop("polyline needs at least two points".into()));
    }
    let z0 = geom.z0();
    let vhat = geom.v / geom.v.norm();
    let mut knots = vec![z0, z0 + vhat * params.rho];
    // last point is the displaced basepoint; earlier points are waypoints
    let (end_pt, waypoints) = points_lattice.split_last().unwrap();
    for &(s, t) in waypoints {
        knots.push(geom.z_of(s, t));
    }
    let end = geom.z_of(end_pt.0, end_pt.1);
    // land on the v-ray of the endpoint translate, then come in radially
    knots.push(end + vhat * params.rho);
    knots.push(end);
    // middle knots as given; endpoint velocities tangential
    let nseg = (knots.len() - 1) as f64;
    let mut vels = Vec::with_capacity(knots.len());
    for i in 0..knots.len() {
        if i == 0 {
            vels.push(geom.v / nseg);
        } else if i == knots.len() - 1 {
            vels.push(-geom.v / nseg);
        } else {
            vels.push((knots[(i + 1).min(knots.len() - 1)] - knots[i - 1]) * 0.5);
        }
    }
    TangentialLoop::from_knots(label, knots, vels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> TorusGeometry {
        TorusGeometry::new(
            Complex64::new(0.3, 1.1),
            (0.41, 0.27),
            Complex64::new(1.0, 0.0),
            64,
        )
        .unwrap()
    }

    #[test]
    fn canonical_loops_are_tangential() {
        let g = geom();
        let (a, b) = canonical_loops(&g, &LoopParams::default()).unwrap();
        assert!((a.vel(0.0) - g.v).norm() < 1e-10);
        assert!((a.vel(1.0) + g.v).norm() < 1e-10);
        assert!((a.displacement() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((b.displacement() - g.tau).norm() < 1e-12);
    }

    #[test]
    fn reversal_swaps_endpoints_and_velocities() {
        let g = geom();
        let (a, _) = canonical_loops(&g, &LoopParams::default()).unwrap();
        let r = a.reversed();
        assert!((r.pos(0.0) - a.pos(1.0)).norm() < 1e-12);
        for t in [0.12, 0.5, 0.81] {
            assert!((r.pos(t) - a.pos(1.0 - t)).norm() < 1e-9);
        }
    }

    #[test]
    fn clearance_violation_detected() {
        let g = geom();
        let z0 = g.z0();
        let knots = vec![
            z0,
            z0 + Complex64::new(0.3, 0.0),
            z0 + Complex64::new(0.6, 0.2),
            z0 + Complex64::new(1.0, 0.0),
        ];
        let n = (knots.len() - 1) as f64;
        let mut vels = vec![g.v / n];
        for i in 1..knots.len() - 1 {
            vels.push((knots[i + 1] - knots[i - 1]) * 0.5);
        }
        vels.push(-g.v / n);
        let tight = TangentialLoop::from_knots("tight", knots, vels).unwrap();
        // demanding more clearance than the path keeps must fail
        assert!(tight.validate(&g, 0.4).is_err());
    }
}
