//! The cyclically symmetrized square `N(omega' omega')` of the `(1,0)`-part
//! of the connection form: a quadratic differential with coefficients in
//! tensor degrees >= 2, holomorphic away from the puncture with a pole of
//! order <= 1 there (<= 2 in degree 4), whose degree-2 part is the Rauch
//! kernel `2 omega'_1 omega'_1`.

use num_complex::Complex64;

use magnus_core::tensor::Word;

use crate::connection::{fd_dz, fd_dzbar, ConnectionForm};
use crate::grid::{GridField, Spectral};
use crate::{Result, TorusError};

/// Per-degree sparse `dz^2`-coefficient grids.
#[derive(Clone, Debug)]
pub struct QuadDifferential {
    pub geom: crate::geometry::TorusGeometry,
    /// degree -> (words, coefficient grids); degrees 2..=n_deg+1
    pub degrees: Vec<(usize, Vec<Word>, Vec<GridField>)>,
}

/// Assembles `N(omega' omega')` through tensor degree `max_deg`.
pub fn quad_differential(cf: &ConnectionForm, max_deg: usize) -> Result<QuadDifferential> {
    if cf.n_deg < 2 {
        return Err(TorusError::pre("connection must be built to degree >= 2"));
    }
    let geom = &cf.geom;
    let m_grid = geom.m;
    let mut degrees = Vec::new();
    let grids: Vec<Vec<GridField>> = cf.degs.iter().map(|d| d.dz_grids(geom)).collect();

    for m in 2..=max_deg.min(cf.n_deg + cf.n_deg) {
        let mut words: Vec<Word> = Vec::new();
        let mut fields: Vec<GridField> = Vec::new();
        for p in 1..m {
            let q = m - p;
            if p > cf.n_deg || q > cf.n_deg {
                continue;
            }
            for (i1, w1) in cf.degs[p - 1].words.iter().enumerate() {
                for (i2, w2) in cf.degs[q - 1].words.iter().enumerate() {
                    let mut word = w1.clone();
                    word.extend_from_slice(w2);
                    let prod = grids[p - 1][i1].mul_pointwise(&grids[q - 1][i2]);
                    match words.iter().position(|w| w == &word) {
                        Some(k) => fields[k] = fields[k].add(&prod),
                        None => {
                            words.push(word);
                            fields.push(prod);
                        }
                    }
                }
            }
        }
        if words.is_empty() {
            continue;
        }
        // apply N = 1 + eps + ... + eps^{m-1} by word rotation
        let mut n_words: Vec<Word> = Vec::new();
        let mut n_fields: Vec<GridField> = Vec::new();
        for (w, f) in words.iter().zip(&fields) {
            for k in 0..m {
                let rotated = rotate(w, k);
                match n_words.iter().position(|x| x == &rotated) {
                    Some(idx) => n_fields[idx] = n_fields[idx].add(f),
                    None => {
                        n_words.push(rotated);
                        n_fields.push(f.clone());
                    }
                }
            }
        }
        // drop numerically-zero words
        let mut kept_w = Vec::new();
        let mut kept_f = Vec::new();
        let scale: f64 = n_fields
            .iter()
            .map(|f| f.l2_masked(|_, _| true))
            .fold(0.0, f64::max);
        for (w, f) in n_words.into_iter().zip(n_fields) {
            if f.l2_masked(|_, _| true) > 1e-13 * scale.max(1e-300) {
                kept_w.push(w);
                kept_f.push(f);
            }
        }
        let _ = m_grid;
        degrees.push((m, kept_w, kept_f));
    }
    // drop degrees that cancel identically (roundoff relative to the rest);
    // at genus 1 every odd degree does
    let overall: f64 = degrees
        .iter()
        .flat_map(|(_, _, f)| f.iter())
        .map(|f| f.l2_masked(|_, _| true))
        .fold(0.0, f64::max);
    for (_, words, fields) in degrees.iter_mut() {
        let scale: f64 = fields.iter().map(|f| f.l2_masked(|_, _| true)).fold(0.0, f64::max);
        if scale < 1e-12 * overall {
            words.clear();
            fields.clear();
        }
    }
    degrees.retain(|(_, w, _)| !w.is_empty());
    Ok(QuadDifferential { geom: *geom, degrees })
}

/// Rotates a word by `k` last-to-front steps (the epsilon action).
fn rotate(w: &[u8], k: usize) -> Word {
    let m = w.len();
    if m <= 1 || k == 0 {
        return w.to_vec();
    }
    let cut = m - (k % m);
    let mut out = Vec::with_capacity(m);
    out.extend_from_slice(&w[cut..]);
    out.extend_from_slice(&w[..cut]);
    out
}

impl QuadDifferential {
    pub fn degree(&self, m: usize) -> Option<(&[Word], &[GridField])> {
        self.degrees
            .iter()
            .find(|(d, _, _)| *d == m)
            .map(|(_, w, f)| (w.as_slice(), f.as_slice()))
    }

    /// Relative dbar residual of the degree-`m` component off the excision
    /// disk: `||dbar Q||_2 / ||dz Q||_2` by 4th-order local differences.
    /// `None` when the component is absent or has no derivative content to
    /// compare against (constant or identically-zero coefficients).
    pub fn dbar_residual(&self, m: usize, excise_cells: f64) -> Option<f64> {
        let (_, fields) = self.degree(m)?;
        let ctx = Spectral::new(self.geom);
        let mask = ctx.off_excision(excise_cells);
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        let mut scale = 0.0f64;
        for f in fields {
            let db = fd_dzbar(&self.geom, f);
            let dz = fd_dz(&self.geom, f);
            num += db.l2_masked(&mask).powi(2);
            den += dz.l2_masked(&mask).powi(2);
            scale = scale.max(f.l2_masked(&mask));
        }
        if den.sqrt() < 1e-9 * scale.max(1e-300) {
            return None;
        }
        Some((num / den).sqrt())
    }

    /// Norm of the degree-`m` component off the excision disk.
    pub fn norm_off(&self, m: usize, excise_cells: f64) -> f64 {
        let ctx = Spectral::new(self.geom);
        let mask = ctx.off_excision(excise_cells);
        match self.degree(m) {
            Some((_, fields)) => fields
                .iter()
                .map(|f| f.l2_masked(&mask))
                .fold(0.0, f64::max),
            None => 0.0,
        }
    }

    /// Pole order estimate at the puncture: slope of `log max|Q|` against
    /// `log r` over shrinking annuli.
    pub fn pole_order(&self, m: usize) -> Option<f64> {
        let (_, fields) = self.degree(m)?;
        let geom = &self.geom;
        let mm = geom.m;
        let radii: Vec<f64> = (0..3).map(|j| (8.0 / mm as f64) * 2f64.powi(j)).collect();
        let mut maxima = vec![0.0f64; radii.len()];
        for j in 0..mm {
            for i in 0..mm {
                let z = geom.z_of(i as f64 / mm as f64, j as f64 / mm as f64);
                let r = geom.dist_p0(z);
                for (k, &rk) in radii.iter().enumerate() {
                    if r >= rk && r < rk * 1.3 {
                        for f in fields {
                            maxima[k] = maxima[k].max(f.at(i, j).norm());
                        }
                    }
                }
            }
        }
        if maxima.iter().any(|&x| x == 0.0) {
            return None;
        }
        // least-squares slope
        let n = radii.len() as f64;
        let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> = maxima.iter().map(|v| v.ln()).collect();
        let xb = xs.iter().sum::<f64>() / n;
        let yb = ys.iter().sum::<f64>() / n;
        let slope = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - xb) * (y - yb))
            .sum::<f64>()
            / xs.iter().map(|x| (x - xb).powi(2)).sum::<f64>();
        Some(-slope)
    }

    /// Max pointwise deviation of the degree-2 part from the Rauch kernel
    /// `2 omega'_1 omega'_1` (an algebraic identity).
    pub fn rauch_identity_error(&self, cf: &ConnectionForm) -> f64 {
        let (words, fields) = match self.degree(2) {
            Some(x) => x,
            None => return f64::INFINITY,
        };
        let geom = &self.geom;
        let g1 = cf.degree(1).dz_grids(geom);
        let mut worst = 0.0f64;
        for (i1, w1) in cf.degree(1).words.iter().enumerate() {
            for (i2, w2) in cf.degree(1).words.iter().enumerate() {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                let expect = g1[i1].mul_pointwise(&g1[i2]).scale(Complex64::new(2.0, 0.0));
                let got = words
                    .iter()
                    .position(|x| x == &w)
                    .map(|k| fields[k].clone())
                    .unwrap_or_else(|| GridField::zeros(geom.m));
                worst = worst.max(got.sub(&expect).max_masked(|_, _| true));
            }
        }
        worst
    }

    /// Max relative deviation of `eps . Q` from `Q` per degree (exact up to
    /// float roundoff by the cyclic structure of `N`).
    pub fn epsilon_invariance_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (m, words, fields) in &self.degrees {
            let scale = fields
                .iter()
                .map(|f| f.max_masked(|_, _| true))
                .fold(1e-300, f64::max);
            let _ = m;
            for (w, f) in words.iter().zip(fields) {
                let rw = rotate(w, 1);
                let rf = words
                    .iter()
                    .position(|x| x == &rw)
                    .map(|k| fields[k].clone())
                    .unwrap_or_else(|| GridField::zeros(self.geom.m));
                worst = worst.max(rf.sub(f).max_masked(|_, _| true) / scale);
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::build_connection;
    use crate::geometry::TorusGeometry;

    fn cf(m: usize, n_deg: usize) -> ConnectionForm {
        let g = TorusGeometry::new(
            Complex64::new(0.3, 1.1),
            (0.41, 0.27),
            Complex64::new(1.0, 0.0),
            m,
        )
        .unwrap();
        build_connection(&g, n_deg).unwrap()
    }

    #[test]
    fn rauch_term_exact() {
        let c = cf(64, 3);
        let q = quad_differential(&c, 4).unwrap();
        assert!(q.rauch_identity_error(&c) < 1e-12);
    }

    #[test]
    fn degree_three_vanishes_identically() {
        // at genus 1 the degree-2 component is proportional to I, and
        // N(WI + IW) = 0 for every W in the two-dimensional H
        let c = cf(64, 3);
        let q = quad_differential(&c, 4).unwrap();
        let n3 = q.norm_off(3, 8.0);
        // compare against the unsymmetrized product scale
        let g1 = c.degree(1).dz_grids(&c.geom);
        let g2 = c.degree(2).dz_grids(&c.geom);
        let scale = g1[0].mul_pointwise(&g2[0]).l2_masked(|_, _| true);
        assert!(n3 <= 1e-12 * scale.max(1.0), "n3={n3} scale={scale}");
    }

    #[test]
    fn epsilon_invariance() {
        let c = cf(64, 4);
        let q = quad_differential(&c, 5).unwrap();
        assert!(q.epsilon_invariance_error() < 1e-12);
    }

    #[test]
    fn dbar_residual_small_for_degree_four() {
        let c = cf(128, 4);
        let q = quad_differential(&c, 5).unwrap();
        let r = q.dbar_residual(4, 8.0).unwrap();
        assert!(r < 5e-3, "dbar residual {r}");
    }
}
