//! Chen iterated integrals of truncated-tensor-valued 1-forms on `[0, 1]`:
//! the transport ODE `F' = f(t) F, F(0) = 1` solved with classical RK4 on a
//! mesh geometrically refined toward both endpoints (forms pulled back to
//! tangential loops may grow like a power of `|log t|` there), plus nested
//! simplex quadrature for property tests.
//!
//! Path products compose in reverse order: the transport of `l2 . l1`
//! (traverse `l1` first) is `transport(l2) * transport(l1)`.

use magnus_core::scalar::{Mode, Scalar};
use magnus_core::tensor::TensorSeries;

use crate::{Result, TorusError};

/// Endpoint behaviour of a pulled-back form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndpointClass {
    Regular,
    /// Bounded by `C |log min(t, 1-t)|^k` near the endpoints.
    LogPower(usize),
}

/// A `T_1`-valued 1-form on `[0, 1]`, sampled through a closure.
pub struct SampledForm<'a> {
    pub f: Box<dyn Fn(f64) -> TensorSeries + Sync + 'a>,
    pub endpoint: EndpointClass,
}

impl<'a> SampledForm<'a> {
    pub fn new(
        f: impl Fn(f64) -> TensorSeries + Sync + 'a,
        endpoint: EndpointClass,
    ) -> Self {
        SampledForm { f: Box::new(f), endpoint }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TransportOpts {
    /// Geometric refinement depth toward each endpoint (first cell width
    /// `2^-levels`).
    pub levels: u32,
    /// Uniform cells across the middle half of the interval.
    pub mid_cells: usize,
    /// RK4 steps per cell.
    pub substeps: usize,
}

impl Default for TransportOpts {
    fn default() -> Self {
        TransportOpts { levels: 40, mid_cells: 16, substeps: 6 }
    }
}

impl TransportOpts {
    /// A deliberately different quadrature, for cross-checking transports
    /// against products of independently computed ones.
    pub fn coarse() -> Self {
        TransportOpts { levels: 36, mid_cells: 9, substeps: 4 }
    }
}

/// Mesh nodes on `[0, 1]` honoring interior breakpoints (integrands are
/// typically only piecewise smooth across them): geometric refinement into
/// the first and last pieces, uniform cells elsewhere.
fn graded_mesh(opts: &TransportOpts, breaks: &[f64]) -> Vec<f64> {
    let mut bounds: Vec<f64> = vec![0.0, 1.0];
    for &b in breaks {
        if b > 1e-12 && b < 1.0 - 1e-12 {
            bounds.push(b);
        }
    }
    bounds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bounds.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let mut nodes = vec![0.0];
    let nseg = bounds.len() - 1;
    let cells = opts.mid_cells.max(2);
    for w in 0..nseg {
        let (l, r) = (bounds[w], bounds[w + 1]);
        let width = r - l;
        let left_graded = w == 0;
        let right_graded = w == nseg - 1;
        let u_start = if left_graded { l + width * 0.25 } else { l };
        let u_end = if right_graded { r - width * 0.25 } else { r };
        if left_graded {
            for j in (2..=opts.levels).rev() {
                nodes.push(l + width * 2f64.powi(-(j as i32)));
            }
        }
        for k in 1..=cells {
            nodes.push(u_start + (u_end - u_start) * k as f64 / cells as f64);
        }
        if right_graded {
            // ascending toward r: r - width/4, r - width/8, ...
            for j in 2..=opts.levels {
                let y = r - width * 2f64.powi(-(j as i32));
                if y > *nodes.last().unwrap() {
                    nodes.push(y);
                }
            }
            nodes.push(r);
        }
    }
    nodes.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    nodes
}

/// Transport `F(1)` of `F' = f F, F(0) = 1`, truncated at `trunc`.
pub fn transport(form: &SampledForm, dim_h: usize, trunc: usize, opts: &TransportOpts) -> Result<TensorSeries> {
    transport_piecewise(form, dim_h, trunc, opts, &[])
}

/// Transport with interior breakpoints pinned to mesh nodes.
pub fn transport_piecewise(
    form: &SampledForm,
    dim_h: usize,
    trunc: usize,
    opts: &TransportOpts,
    breaks: &[f64],
) -> Result<TensorSeries> {
    let sample = |t: f64| -> Result<TensorSeries> {
        let v = (form.f)(t);
        if !v.coeff(&[]).is_zero() {
            return Err(TorusError::pre("form must have zero degree-0 part"));
        }
        Ok(v)
    };
    let one = TensorSeries::one(dim_h, trunc, Mode::Float);
    let mut state = one;
    let nodes = graded_mesh(opts, breaks);
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = (b - a) / opts.substeps as f64;
        for k in 0..opts.substeps {
            let t0 = a + k as f64 * h;
            let boundary = (t0 == 0.0 && k == 0) || (b == 1.0 && k == opts.substeps - 1);
            if boundary && matches!(form.endpoint, EndpointClass::LogPower(_)) {
                // open midpoint-exponential step: avoids sampling the
                // singular endpoint itself; the cell is 2^-levels wide so
                // the local error is negligible
                let fm = sample(t0 + 0.5 * h)?;
                let step = fm.scale(&Scalar::Float(h)).exp()?;
                state = step.mul(&state)?;
                continue;
            }
            let f0 = sample(t0)?;
            let fm = sample(t0 + 0.5 * h)?;
            let f1 = sample(t0 + h)?;
            state = rk4_step(&state, &f0, &fm, &f1, h)?;
        }
    }
    state.check_finite_all()?;
    Ok(state)
}

fn rk4_step(
    state: &TensorSeries,
    f0: &TensorSeries,
    fm: &TensorSeries,
    f1: &TensorSeries,
    h: f64,
) -> Result<TensorSeries> {
    let k1 = f0.mul(state)?;
    let k2 = fm.mul(&state.add(&k1.scale(&Scalar::Float(h / 2.0)))?)?;
    let k3 = fm.mul(&state.add(&k2.scale(&Scalar::Float(h / 2.0)))?)?;
    let k4 = f1.mul(&state.add(&k3.scale(&Scalar::Float(h)))?)?;
    let incr = k1
        .add(&k2.scale(&Scalar::Float(2.0)).add(&k3.scale(&Scalar::Float(2.0)))?)?
        .add(&k4)?
        .scale(&Scalar::Float(h / 6.0));
    state.add(&incr).map_err(Into::into)
}

/// The simplex integral `int_{1 >= t_1 >= ... >= t_q >= 0} f_1(t_1)...f_q(t_q)`
/// by cumulative composite Simpson quadrature on `n` panels, innermost first.
pub fn iterated(forms: &[&SampledForm], dim_h: usize, trunc: usize, n: usize) -> Result<TensorSeries> {
    let q = forms.len();
    if q == 0 {
        return Ok(TensorSeries::one(dim_h, trunc, Mode::Float));
    }
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = 1.0 / n as f64;
    // g_k(t) = int_0^t f_k(u) g_{k+1}(u) du with g_{q+1} = 1
    let mut g: Vec<TensorSeries> =
        vec![TensorSeries::one(dim_h, trunc, Mode::Float); n + 1];
    for k in (0..q).rev() {
        let samples: Vec<TensorSeries> = (0..=n)
            .map(|i| (forms[k].f)(i as f64 * h))
            .collect();
        let integrand: Vec<TensorSeries> = samples
            .iter()
            .zip(&g)
            .map(|(f, gg)| f.mul(gg).expect("compat"))
            .collect();
        let mut acc = TensorSeries::zero(dim_h, trunc, Mode::Float);
        let mut next = vec![acc.clone()];
        // composite Simpson over pairs of panels
        for i in (0..n).step_by(2) {
            let chunk = integrand[i]
                .add(&integrand[i + 1].scale(&Scalar::Float(4.0)))?
                .add(&integrand[i + 2])?
                .scale(&Scalar::Float(h / 3.0));
            // cumulative values at i+1 (trapezoid-corrected midpoint) and i+2
            let mid = integrand[i]
                .scale(&Scalar::Float(5.0 * h / 12.0))
                .add(&integrand[i + 1].scale(&Scalar::Float(8.0 * h / 12.0)))?
                .sub(&integrand[i + 2].scale(&Scalar::Float(h / 12.0)))?;
            next.push(acc.add(&mid)?);
            acc = acc.add(&chunk)?;
            next.push(acc.clone());
        }
        g = next;
    }
    Ok(g.last().unwrap().clone())
}

trait FiniteCheck {
    fn check_finite_all(&self) -> Result<()>;
}

impl FiniteCheck for TensorSeries {
    fn check_finite_all(&self) -> Result<()> {
        for m in 0..=self.trunc() {
            for (w, c) in self.component(m) {
                if let Scalar::Float(x) = c {
                    if !x.is_finite() {
                        return Err(TorusError::NonFinite(format!("coefficient of {w:?}")));
                    }
                }
            }
        }
        Ok(())
    }
}
