//! The harmonic Magnus expansion: pull the connection form back along
//! tangential loops and transport it, giving the generator values of a
//! float-mode Magnus expansion of `pi_1` of the punctured torus.
//!
//! A word maps to the concatenated path traversed right to left (the
//! transport of `l1 . l0` is `T(l1) T(l0)`), so word evaluation multiplies
//! the per-letter transports in written order.

use magnus_core::magnus::MagnusExpansion;
use magnus_core::scalar::{Mode, Scalar};
use magnus_core::tensor::TensorSeries;

use crate::connection::ConnectionForm;
use crate::integrate::{EndpointClass, SampledForm, TransportOpts};
use crate::loops::TangentialLoop;
use crate::Result;

/// The pullback of the connection form along a loop, as a sampled 1-form.
///
/// Near the endpoints the degree-2 carrier is evaluated on the exact
/// Hermite separation from the endpoint knot: its `1/w` pole would amplify
/// the rounding noise of `pos(t) - P0` into the graded endpoint cells.
pub fn pullback_form<'a>(cf: &'a ConnectionForm, path: &'a TangentialLoop) -> SampledForm<'a> {
    let geom = cf.geom;
    let n_deg = cf.n_deg;
    let max_log = (n_deg.saturating_sub(1)) / 2;
    let seg_width = 1.0 / path.segments() as f64;
    SampledForm::new(
        move |t: f64| {
            let z = path.pos(t);
            let dz = path.vel(t);
            let mut out = TensorSeries::zero(2, n_deg, Mode::Float);
            let sep = if t < seg_width {
                Some(path.sep_from_start(t))
            } else if t > 1.0 - seg_width {
                Some(path.sep_from_end(t))
            } else {
                None
            };
            for m in 1..=n_deg {
                let deg = cf.degree(m);
                let coeffs = match sep {
                    Some(w) => deg.dz_at_with_sep(&geom, z, w),
                    None => deg.dz_at(&geom, z),
                };
                for (w, p) in deg.words.iter().zip(coeffs) {
                    // real 1-form on d/dt: P zdot + conj(P zdot)
                    let val = 2.0 * (p * dz).re;
                    if val != 0.0 {
                        out.insert(w.clone(), Scalar::Float(val));
                    }
                }
            }
            out
        },
        EndpointClass::LogPower(max_log),
    )
}

/// Transport of the connection along one loop; the spline's knot times are
/// pinned as mesh breakpoints (the path is only `C^1` there).
pub fn loop_transport(
    cf: &ConnectionForm,
    path: &TangentialLoop,
    opts: &TransportOpts,
) -> Result<TensorSeries> {
    let form = pullback_form(cf, path);
    let n = path.segments();
    let breaks: Vec<f64> = (1..n).map(|k| k as f64 / n as f64).collect();
    crate::integrate::transport_piecewise(&form, 2, cf.n_deg, opts, &breaks)
}

/// The harmonic expansion on the generator loops `a`, `b`.
pub fn harmonic_expansion(
    cf: &ConnectionForm,
    a: &TangentialLoop,
    b: &TangentialLoop,
    opts: &TransportOpts,
) -> Result<MagnusExpansion> {
    a.validate(&cf.geom, 1.0 / cf.geom.m as f64)?;
    b.validate(&cf.geom, 1.0 / cf.geom.m as f64)?;
    let ta = loop_transport(cf, a, opts)?;
    let tb = loop_transport(cf, b, opts)?;
    MagnusExpansion::new_with_tol(vec![ta, tb], 1e-5).map_err(Into::into)
}

/// Direct transport of a word path: each letter's loop is traversed in
/// right-to-left written order and the per-letter transports multiply in
/// written order. Independent quadrature options make this a genuine check
/// against products of separately computed generator values.
pub fn word_transport(
    cf: &ConnectionForm,
    a: &TangentialLoop,
    b: &TangentialLoop,
    word: &[i32],
    opts: &TransportOpts,
) -> Result<TensorSeries> {
    let mut acc = TensorSeries::one(2, cf.n_deg, Mode::Float);
    for &letter in word {
        let path = match letter {
            1 => a.clone(),
            -1 => a.reversed(),
            2 => b.clone(),
            -2 => b.reversed(),
            other => {
                return Err(crate::TorusError::pre(format!(
                    "word letter {other} outside {{±1, ±2}}"
                )))
            }
        };
        let t = loop_transport(cf, &path, opts)?;
        acc = acc.mul(&t)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::build_connection;
    use crate::geometry::TorusGeometry;
    use crate::loops::{canonical_loops, LoopParams};
    use num_complex::Complex64;

    fn setup(m: usize, n_deg: usize) -> (ConnectionForm, TangentialLoop, TangentialLoop) {
        let g = TorusGeometry::new(
            Complex64::new(0.3, 1.1),
            (0.41, 0.27),
            Complex64::new(1.0, 0.0),
            m,
        )
        .unwrap();
        let cf = build_connection(&g, n_deg).unwrap();
        let (a, b) = canonical_loops(&g, &LoopParams::default()).unwrap();
        (cf, a, b)
    }

    #[test]
    fn degree_one_parts_are_homology_classes() {
        let (cf, a, b) = setup(64, 2);
        let opts = TransportOpts::default();
        let ta = loop_transport(&cf, &a, &opts).unwrap();
        let tb = loop_transport(&cf, &b, &opts).unwrap();
        assert!((ta.coeff(&[1]).abs_f64() - 1.0).abs() < 1e-8);
        assert!(ta.coeff(&[2]).abs_f64() < 1e-8);
        assert!(tb.coeff(&[1]).abs_f64() < 1e-8);
        assert!((tb.coeff(&[2]).abs_f64() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn inverse_loop_transport_is_group_inverse() {
        let (cf, a, _) = setup(64, 3);
        let opts = TransportOpts::default();
        let ta = loop_transport(&cf, &a, &opts).unwrap();
        let tainv = loop_transport(&cf, &a.reversed(), &opts).unwrap();
        let prod = ta.mul(&tainv).unwrap();
        let one = TensorSeries::one(2, 3, Mode::Float);
        assert!(prod.dist_max(&one) < 1e-6, "{}", prod.dist_max(&one));
    }
}
