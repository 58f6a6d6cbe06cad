//! Numerical acceptance criteria (A5-A9) for the torus pipeline.

use std::time::Instant;

use num_complex::Complex64;

pub use magnus_core::acceptance::Criterion;
use magnus_core::scalar::{Mode, Scalar};
use magnus_core::symplectic::SymplecticStructure;
use magnus_core::tensor::TensorSeries;

use crate::connection::{build_connection, diagnostics, ConnectionForm};
use crate::expansion::{harmonic_expansion, word_transport};
use crate::geometry::TorusGeometry;
use crate::integrate::{iterated, transport, EndpointClass, SampledForm, TransportOpts};
use crate::loops::{canonical_loops, LoopParams, TangentialLoop};
use crate::quaddiff::quad_differential;
use crate::variation::{variation_run, VariationRun};
use crate::Result;

fn finish(id: &str, pass: bool, detail: String, t0: Instant) -> Criterion {
    Criterion {
        id: id.to_string(),
        pass,
        detail,
        seconds: t0.elapsed().as_secs_f64(),
    }
}

pub fn reference_geometry(m: usize) -> TorusGeometry {
    TorusGeometry::new(
        Complex64::new(0.3, 1.1),
        (0.41, 0.27),
        Complex64::new(1.0, 0.0),
        m,
    )
    .expect("reference geometry is valid")
}

pub fn reference_setup(m: usize, n_deg: usize) -> Result<(ConnectionForm, TangentialLoop, TangentialLoop)> {
    let geom = reference_geometry(m);
    let cf = build_connection(&geom, n_deg)?;
    let (a, b) = canonical_loops(&geom, &LoopParams::default())?;
    Ok((cf, a, b))
}

/// `exp(-I)` at genus 1 in float mode.
fn exp_minus_i(trunc: usize) -> TensorSeries {
    let sympl = SymplecticStructure::new(1).unwrap();
    sympl
        .intersection_tensor(trunc, Mode::Float)
        .neg()
        .exp()
        .unwrap()
}

/// The boundary word of the positively oriented commutator. Under the
/// reverse-order path product, the written word `x1 x2 x1^{-1} x2^{-1}`
/// traverses `b^{-1}` first and winds negatively around the puncture, so
/// its value is `exp(+I)`; the positively wound class is its inverse
/// `x2 x1 x2^{-1} x1^{-1}`, whose value is `exp(-I)`.
pub fn positive_commutator_word() -> Vec<i32> {
    vec![2, 1, -2, -1]
}

/// A5: degree-1 normalization, homomorphism defect, symplectic value.
pub fn a5_expansion(m: usize) -> Criterion {
    let t0 = Instant::now();
    let mut fails: Vec<String> = Vec::new();
    let run = || -> Result<Vec<String>> {
        let mut notes = Vec::new();
        let (cf, a, b) = reference_setup(m, 4)?;
        let opts = TransportOpts::default();
        let theta = harmonic_expansion(&cf, &a, &b, &opts)?;

        // degree-1 parts
        let mut d1 = 0.0f64;
        for (i, gamma) in [(1usize, 1u8), (2, 2)] {
            let g = theta.generator_value(i);
            for l in 1..=2u8 {
                let c = g.coeff(&[l]).abs_f64();
                let want = if l == gamma { 1.0 } else { 0.0 };
                d1 = d1.max((c - want).abs());
            }
        }
        if d1 > 1e-6 {
            notes.push(format!("degree-1 defect {d1:.2e} > 1e-6"));
        }

        // homomorphism defect: independent quadrature of the word path vs
        // the product of generator transports
        let coarse = TransportOpts::coarse();
        let tab = word_transport(&cf, &a, &b, &[1, 2], &coarse)?;
        let prod = theta
            .generator_value(1)
            .mul(theta.generator_value(2))?;
        let hom = tab.dist_max(&prod);
        if hom > 1e-4 {
            notes.push(format!("homomorphism defect {hom:.2e} > 1e-4"));
        }

        // symplectic value on the positively oriented commutator
        let word = positive_commutator_word();
        let val = {
            let mut acc = TensorSeries::one(2, 4, Mode::Float);
            for &l in &word {
                let f = match l {
                    1 => theta.generator_value(1).clone(),
                    -1 => theta.generator_value(1).group_inverse()?,
                    2 => theta.generator_value(2).clone(),
                    -2 => theta.generator_value(2).group_inverse()?,
                    _ => unreachable!(),
                };
                acc = acc.mul(&f)?;
            }
            acc
        };
        let defect = val.dist_max(&exp_minus_i(4));
        if defect > 1e-3 {
            notes.push(format!("symplectic defect {defect:.2e} > 1e-3"));
        }
        notes.push(format!(
            "deg1 {d1:.1e}; hom {hom:.1e}; symplectic {defect:.1e}"
        ));
        Ok(notes)
    };
    match run() {
        Ok(mut notes) => {
            let detail = notes.pop().unwrap_or_default();
            fails.extend(notes);
            let pass = fails.is_empty() && t0.elapsed().as_secs_f64() < 600.0;
            finish(
                "A5",
                pass,
                if fails.is_empty() { detail } else { format!("{fails:?}") },
                t0,
            )
        }
        Err(e) => finish("A5", false, format!("error: {e}"), t0),
    }
}

/// A6: integrability residual decreasing across M = 128, 256, 512 and the
/// orthogonality pairings through m = 5.
pub fn a6_integrability() -> Criterion {
    let t0 = Instant::now();
    let run = || -> Result<(Vec<String>, String)> {
        let mut fails = Vec::new();
        let mut resids: Vec<Vec<f64>> = Vec::new(); // per degree, per M
        for m_grid in [128usize, 256, 512] {
            let geom = reference_geometry(m_grid);
            let cf = build_connection(&geom, 4)?;
            // the excision disk is 8 cells of the coarsest grid, so the
            // measurement domain stays fixed while the grid refines
            let cells = 8.0 * m_grid as f64 / 128.0;
            let mut per_deg = Vec::new();
            for deg in 2..=4usize {
                per_deg.push(diagnostics::integrability_residual(&cf, deg, cells)?);
            }
            resids.push(per_deg);
            if m_grid == 256 {
                // orthogonality with the largest mid-size build
                for m in 3..=5usize {
                    for q in 1..m {
                        let p = m - q;
                        if p > 4 || q > 4 {
                            continue;
                        }
                        let vals = diagnostics::wedge_integral(&cf, q, p)?;
                        let scale = 1.0f64;
                        for (w, v) in vals {
                            if v.norm() > 1e-6 * scale {
                                fails.push(format!(
                                    "orthogonality m={m} q={q} word {w:?}: {:.2e}",
                                    v.norm()
                                ));
                            }
                        }
                    }
                }
            }
        }
        for deg in 0..3 {
            if !(resids[0][deg] > resids[1][deg] && resids[1][deg] > resids[2][deg]) {
                fails.push(format!(
                    "residual not monotone at degree {}: {:.3e} {:.3e} {:.3e}",
                    deg + 2,
                    resids[0][deg],
                    resids[1][deg],
                    resids[2][deg]
                ));
            }
        }
        let detail = format!(
            "L2 residuals deg2 {:.1e}->{:.1e}->{:.1e}, deg3 {:.1e}->{:.1e}->{:.1e}, deg4 {:.1e}->{:.1e}->{:.1e}; orthogonality <= 1e-6",
            resids[0][0], resids[1][0], resids[2][0],
            resids[0][1], resids[1][1], resids[2][1],
            resids[0][2], resids[1][2], resids[2][2],
        );
        Ok((fails, detail))
    };
    match run() {
        Ok((fails, detail)) => finish(
            "A6",
            fails.is_empty(),
            if fails.is_empty() { detail } else { format!("{fails:?}") },
            t0,
        ),
        Err(e) => finish("A6", false, format!("error: {e}"), t0),
    }
}

/// A7: holomorphy diagnostics of `N(omega' omega')`.
pub fn a7_quaddiff() -> Criterion {
    let t0 = Instant::now();
    let run = || -> Result<(Vec<String>, String)> {
        let mut fails = Vec::new();
        let mut dbar_by_m = Vec::new();
        let mut detail = String::new();
        for m_grid in [128usize, 256] {
            let geom = reference_geometry(m_grid);
            let cf = build_connection(&geom, 4)?;
            let q = quad_differential(&cf, 5)?;
            // fixed physical excision (8 cells of the coarser grid) for the
            // cross-resolution comparison
            let cells = 8.0 * m_grid as f64 / 128.0;
            let dbar = q.dbar_residual(4, cells).unwrap_or(f64::INFINITY);
            dbar_by_m.push(dbar);
            if m_grid == 256 {
                if dbar > 1e-3 {
                    fails.push(format!("dbar residual {dbar:.2e} > 1e-3 at M=256"));
                }
                // degree-3 identically zero
                let n3 = q.norm_off(3, 8.0);
                let g1 = cf.degree(1).dz_grids(&cf.geom);
                let g2 = cf.degree(2).dz_grids(&cf.geom);
                let ctx = crate::grid::Spectral::new(cf.geom);
                let mask = ctx.off_excision(8.0);
                let scale = g1[0].mul_pointwise(&g2[0]).l2_masked(&mask);
                if n3 > 1e-6 * scale {
                    fails.push(format!("degree-3 norm {n3:.2e} > 1e-6 x {scale:.2e}"));
                }
                let eps = q.epsilon_invariance_error();
                if eps > 1e-12 {
                    fails.push(format!("epsilon invariance {eps:.2e}"));
                }
                let rauch = q.rauch_identity_error(&cf);
                if rauch > 1e-12 {
                    fails.push(format!("Rauch identity {rauch:.2e}"));
                }
                detail = format!(
                    "dbar(4) {:.2e} -> {:.2e} (M=128->256); deg3/scale {:.1e}; eps-invariance {:.1e}",
                    dbar_by_m[0], dbar_by_m[1], n3 / scale, eps
                );
            }
        }
        if !(dbar_by_m[1] < dbar_by_m[0]) {
            fails.push(format!(
                "dbar residual not decreasing: {:.2e} -> {:.2e}",
                dbar_by_m[0], dbar_by_m[1]
            ));
        }
        Ok((fails, detail))
    };
    match run() {
        Ok((fails, detail)) => finish(
            "A7",
            fails.is_empty(),
            if fails.is_empty() { detail } else { format!("{fails:?}") },
            t0,
        ),
        Err(e) => finish("A7", false, format!("error: {e}"), t0),
    }
}

/// A8: the variational formula against central differences, plus the Rauch
/// cross-check on the constant family.
pub fn a8_variation(m_grid: usize) -> Criterion {
    let t0 = Instant::now();
    let run = || -> Result<(Vec<String>, String)> {
        let mut fails = Vec::new();
        let geom = reference_geometry(m_grid);
        let cf = build_connection(&geom, 4)?;
        let (a, b) = canonical_loops(&geom, &LoopParams::default())?;
        let opts = TransportOpts::default();
        let words: Vec<(&str, Vec<i32>)> =
            vec![("a", vec![1]), ("b", vec![2]), ("ab", vec![1, 2])];
        let run: VariationRun = variation_run(
            &geom,
            &cf,
            &a,
            &b,
            Complex64::new(0.05, 0.0),
            0.08,
            1e-3,
            &words,
            &opts,
        )?;

        // the finite difference must confirm every non-negligible predicted
        // coefficient; entries the prediction puts at zero are below the
        // irreducible h^2 bias of central differences at the pinned step
        // and carry no information at this tolerance
        let mut worst_rel = 0.0f64;
        for ((label, pred), (_, meas)) in run.predicted.iter().zip(&run.measured) {
            for deg in [3usize, 4] {
                let comp_norm = pred.max_coeff(deg, deg);
                if comp_norm == 0.0 {
                    continue;
                }
                let diff = pred.sub(meas)?;
                for (w, _) in pred.component(deg) {
                    let p_c = pred.coeff(w).abs_f64();
                    if p_c < 1e-3 * comp_norm {
                        continue;
                    }
                    let m_c = meas.coeff(w).abs_f64();
                    let rel = diff.coeff(w).abs_f64() / p_c.max(m_c);
                    worst_rel = worst_rel.max(rel);
                    if rel > 0.05 {
                        fails.push(format!(
                            "gamma={label} deg={deg} word {w:?}: pred {p_c:.3e} vs fd {m_c:.3e} ({:.1}%)",
                            rel * 100.0
                        ));
                    }
                }
            }
        }

        // Rauch cross-check on the constant family
        let mu = crate::variation::bump_beltrami(&geom, Complex64::new(0.05, 0.0), 0.0);
        let mk = crate::variation::family_marking(&geom, &mu)?;
        let fd = (mk.tau_t(1e-3) - mk.tau_t(-1e-3)) / 2e-3;
        let rauch = mu.samples.mean() * Complex64::new(0.0, -2.0 * geom.tau.im);
        let rel = (fd - rauch).norm() / rauch.norm();
        if rel > 1e-3 {
            fails.push(format!("Rauch cross-check off by {:.3}%", rel * 100.0));
        }
        let detail = format!(
            "worst coefficient deviation {:.2}% (tol 5%); Rauch {:.4}%",
            worst_rel * 100.0,
            rel * 100.0
        );
        Ok((fails, detail))
    };
    match run() {
        Ok((fails, detail)) => finish(
            "A8",
            fails.is_empty(),
            if fails.is_empty() { detail } else { format!("{fails:?}") },
            t0,
        ),
        Err(e) => finish("A8", false, format!("error: {e}"), t0),
    }
}

/// A9: the iterated-integral kernel.
pub fn a9_kernel() -> Criterion {
    let t0 = Instant::now();
    let run = || -> Result<(Vec<String>, String)> {
        let mut fails = Vec::new();
        // constant-form exponential
        let mut c = TensorSeries::zero(2, 4, Mode::Float);
        c.insert(vec![1], Scalar::Float(0.7));
        c.insert(vec![1, 2], Scalar::Float(-0.3));
        c.insert(vec![2, 2, 1], Scalar::Float(0.11));
        let form = SampledForm::new(|_t| c.clone(), EndpointClass::Regular);
        let got = transport(&form, 2, 4, &TransportOpts::default())?;
        let e1 = got.dist_max(&c.exp()?);
        if e1 > 1e-10 {
            fails.push(format!("constant exp error {e1:.2e}"));
        }

        // shuffle identity with h = t, phi = dt (both sides 1/2), and the
        // elementary double integral 1/3
        let mk = |f: Box<dyn Fn(f64) -> f64 + Sync>, letter: u8| {
            SampledForm::new(
                move |t| {
                    let mut s = TensorSeries::zero(2, 2, Mode::Float);
                    s.insert(vec![letter], Scalar::Float(f(t)));
                    s
                },
                EndpointClass::Regular,
            )
        };
        let dh = mk(Box::new(|_| 1.0), 1);
        let phi = mk(Box::new(|_| 1.0), 2);
        let hphi = mk(Box::new(|t| t), 2);
        let tphi = mk(Box::new(|t| t), 1);
        let lhs = iterated(&[&dh, &phi], 2, 2, 128)?.coeff(&[1, 2]).abs_f64();
        let int_phi = iterated(&[&phi], 2, 2, 128)?.coeff(&[2]).abs_f64();
        let int_hphi = iterated(&[&hphi], 2, 2, 128)?.coeff(&[2]).abs_f64();
        let e2 = (lhs - (int_phi - int_hphi)).abs().max((lhs - 0.5).abs());
        if e2 > 1e-9 {
            fails.push(format!("identity 1.5 error {e2:.2e}"));
        }
        let third = iterated(&[&tphi, &phi], 2, 2, 128)?.coeff(&[1, 2]).abs_f64();
        if (third - 1.0 / 3.0).abs() > 1e-9 {
            fails.push(format!("double integral {third} != 1/3"));
        }

        // convergence order on smooth forms
        let form_at = |t: f64| {
            let mut s = TensorSeries::zero(2, 3, Mode::Float);
            s.insert(vec![1], Scalar::Float((2.1 * t).sin()));
            s.insert(vec![2], Scalar::Float((1.3 * t + 0.2).cos()));
            s.insert(vec![1, 2], Scalar::Float(t * t));
            s
        };
        let reference = {
            let f = SampledForm::new(form_at, EndpointClass::Regular);
            transport(&f, 2, 3, &TransportOpts { levels: 8, mid_cells: 64, substeps: 8 })?
        };
        let err_at = |sub: usize| -> Result<f64> {
            let f = SampledForm::new(form_at, EndpointClass::Regular);
            Ok(transport(&f, 2, 3, &TransportOpts { levels: 8, mid_cells: 4, substeps: sub })?
                .dist_max(&reference))
        };
        let errs = [err_at(1)?, err_at(2)?, err_at(4)?];
        let s1 = (errs[0] / errs[1]).log2();
        let s2 = (errs[1] / errs[2]).log2();
        if s1 < 3.5 || s2 < 3.5 {
            fails.push(format!("convergence slopes {s1:.2}, {s2:.2} < 3.5"));
        }
        let detail = format!(
            "exp {e1:.1e}; identities {e2:.1e}; slopes {s1:.2}/{s2:.2}"
        );
        Ok((fails, detail))
    };
    match run() {
        Ok((fails, detail)) => finish(
            "A9",
            fails.is_empty(),
            if fails.is_empty() { detail } else { format!("{fails:?}") },
            t0,
        ),
        Err(e) => finish("A9", false, format!("error: {e}"), t0),
    }
}

/// Runs A5-A9 at the reference resolutions.
pub fn run_all() -> Vec<Criterion> {
    vec![
        a5_expansion(256),
        a6_integrability(),
        a7_quaddiff(),
        a8_variation(512),
        a9_kernel(),
    ]
}
