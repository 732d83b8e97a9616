//! Fixed-step RK4 and adaptive Dormand–Prince RK45 over complex state vectors.

use crate::error::{Error, Result};
use crate::C64;

use super::{IntegratorConfig, Method, Sampling};

pub trait OdeSystem {
    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]);
}

#[derive(Debug, Clone, Copy)]
struct Stop {
    t: f64,
    sample: bool,
    reset: bool,
}

fn build_stops(t0: f64, t1: f64, cfg: &IntegratorConfig) -> Vec<Stop> {
    let mut stops: Vec<Stop> = Vec::new();
    let inside = |t: f64| t > t0 && t < t1;
    match &cfg.sampling {
        Sampling::Uniform(n) => {
            let n = (*n).max(2);
            for k in 1..n - 1 {
                let t = t0 + (t1 - t0) * k as f64 / (n - 1) as f64;
                stops.push(Stop { t, sample: true, reset: false });
            }
        }
        Sampling::Times(ts) => {
            for &t in ts {
                if inside(t) {
                    stops.push(Stop { t, sample: true, reset: false });
                }
            }
        }
        Sampling::Stride(_) => {}
    }
    for &t in &cfg.breakpoints {
        if inside(t) {
            stops.push(Stop { t, sample: false, reset: true });
        }
    }
    stops.sort_by(|a, b| a.t.total_cmp(&b.t));
    let eps = 1e-12 * (t1 - t0).abs().max(1.0);
    let mut merged: Vec<Stop> = Vec::with_capacity(stops.len() + 1);
    for s in stops.into_iter().filter(|s| s.t - t0 > eps && t1 - s.t > eps) {
        match merged.last_mut() {
            Some(last) if (s.t - last.t).abs() <= eps => {
                last.sample |= s.sample;
                last.reset |= s.reset;
            }
            _ => merged.push(s),
        }
    }
    let final_sample = !matches!(&cfg.sampling, Sampling::Times(ts) if !ts.iter().any(|&t| (t - t1).abs() <= eps));
    merged.push(Stop { t: t1, sample: final_sample, reset: false });
    merged
}

/// Integrate from `t0` to `t1`, calling `on_sample(t, y)` at the sampling
/// points selected by `cfg`. Returns the final state.
pub fn integrate<S: OdeSystem>(
    sys: &S,
    mut y: Vec<C64>,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
    mut on_sample: impl FnMut(f64, &[C64]) -> Result<()>,
) -> Result<Vec<C64>> {
    if !(t0.is_finite() && t1.is_finite()) || t1 < t0 {
        return Err(Error::InvalidParameter(format!("invalid time span [{t0}, {t1}]")));
    }
    cfg.validate()?;
    let sample_start = match &cfg.sampling {
        Sampling::Times(ts) => ts.iter().any(|&t| (t - t0).abs() <= 1e-12 * (t1 - t0).abs().max(1.0)),
        _ => true,
    };
    if sample_start {
        on_sample(t0, &y)?;
    }
    if t1 == t0 {
        return Ok(y);
    }
    let stride = match cfg.sampling {
        Sampling::Stride(k) => Some(k.max(1)),
        _ => None,
    };
    let stops = build_stops(t0, t1, cfg);
    let mut work = Workspace::new(y.len());
    let mut t = t0;
    let mut steps = 0usize;
    let mut h_prev: Option<f64> = None;
    let mut reset = true;
    for stop in stops {
        let mut on_step = |t: f64, y: &[C64], last: bool| -> Result<()> {
            steps += 1;
            if steps > cfg.max_steps {
                return Err(Error::TooManySteps { steps: cfg.max_steps, t });
            }
            if let Some(k) = stride {
                if steps.is_multiple_of(k) && !last {
                    on_sample(t, y)?;
                }
            }
            Ok(())
        };
        match cfg.method {
            Method::Rk4 { dt } => {
                let n = ((stop.t - t) / dt - 1e-9).ceil().max(1.0) as usize;
                let h = (stop.t - t) / n as f64;
                for k in 0..n {
                    rk4_step(sys, t, h, &mut y, &mut work);
                    t = if k + 1 == n { stop.t } else { t + h };
                    on_step(t, &y, k + 1 == n)?;
                }
            }
            Method::Rk45 { rel_tol, abs_tol } => {
                let h0 = if reset { None } else { h_prev };
                h_prev = Some(dopri_segment(sys, &mut t, stop.t, &mut y, h0, rel_tol, abs_tol, cfg.max_step, &mut work, &mut on_step)?);
            }
        }
        if y.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite state at t = {t} µs")));
        }
        let final_stop = stop.t == t1;
        if stop.sample || (final_stop && stride.is_some()) {
            on_sample(t, &y)?;
        }
        reset = stop.reset;
    }
    Ok(y)
}

struct Workspace {
    k: [Vec<C64>; 7],
    tmp: Vec<C64>,
    ynew: Vec<C64>,
    fsal_valid: bool,
}

impl Workspace {
    fn new(n: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Self {
            k: [z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z.clone(),
            ynew: z,
            fsal_valid: false,
        }
    }
}

fn eval<S: OdeSystem>(sys: &S, t: f64, y: &[C64], out: &mut [C64]) {
    out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
    sys.rhs(t, y, out);
}

fn rk4_step<S: OdeSystem>(sys: &S, t: f64, h: f64, y: &mut [C64], w: &mut Workspace) {
    let [k1, k2, k3, k4, ..] = &mut w.k;
    let tmp = &mut w.tmp;
    eval(sys, t, y, k1);
    for i in 0..y.len() {
        tmp[i] = y[i] + k1[i] * (0.5 * h);
    }
    eval(sys, t + 0.5 * h, tmp, k2);
    for i in 0..y.len() {
        tmp[i] = y[i] + k2[i] * (0.5 * h);
    }
    eval(sys, t + 0.5 * h, tmp, k3);
    for i in 0..y.len() {
        tmp[i] = y[i] + k3[i] * h;
    }
    eval(sys, t + h, tmp, k4);
    for i in 0..y.len() {
        y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
    }
    w.fsal_valid = false;
}

// Dormand–Prince 5(4) tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn scaled_norm(a: &[C64], y: &[C64], ynew: &[C64], rtol: f64, atol: f64) -> f64 {
    let s: f64 = a
        .iter()
        .zip(y.iter().zip(ynew))
        .map(|(e, (y0, y1))| {
            let sc = atol + rtol * y0.norm().max(y1.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (s / a.len().max(1) as f64).sqrt()
}

fn initial_step<S: OdeSystem>(sys: &S, t: f64, y: &[C64], span: f64, rtol: f64, atol: f64, w: &mut Workspace) -> f64 {
    let [f0, f1, ..] = &mut w.k;
    eval(sys, t, y, f0);
    let d0 = scaled_norm(y, y, y, rtol, atol);
    let d1 = scaled_norm(f0, y, y, rtol, atol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span.max(1e-6) } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    for i in 0..y.len() {
        w.tmp[i] = y[i] + f0[i] * h0;
    }
    eval(sys, t + h0, &w.tmp, f1);
    let diff: Vec<C64> = f1.iter().zip(f0.iter()).map(|(a, b)| (a - b) / h0).collect();
    let d2 = scaled_norm(&diff, y, y, rtol, atol);
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    w.fsal_valid = false;
    (100.0 * h0).min(h1).min(span)
}

#[allow(clippy::too_many_arguments)]
fn dopri_segment<S: OdeSystem>(
    sys: &S,
    t: &mut f64,
    t_end: f64,
    y: &mut Vec<C64>,
    h_start: Option<f64>,
    rtol: f64,
    atol: f64,
    max_step: Option<f64>,
    w: &mut Workspace,
    on_step: &mut impl FnMut(f64, &[C64], bool) -> Result<()>,
) -> Result<f64> {
    let span = t_end - *t;
    let hmax = max_step.unwrap_or(f64::INFINITY).min(span);
    let mut h = match h_start {
        Some(h) => h.min(hmax),
        None => initial_step(sys, *t, y, span, rtol, atol, w).min(hmax),
    };
    let mut h_last_ok = h;
    w.fsal_valid = false;
    let n = y.len();
    while *t < t_end {
        let remaining = t_end - *t;
        let last = h >= remaining * (1.0 - 1e-10) || remaining - h <= 1e-11 * t_end.abs().max(1.0);
        if last {
            h = remaining;
        }
        if h <= 1e-13 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t: *t });
        }
        let Workspace { k, tmp, ynew, fsal_valid } = w;
        let [k1, k2, k3, k4, k5, k6, k7] = k;
        if !*fsal_valid {
            eval(sys, *t, y, k1);
        }
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (h * A21);
        }
        eval(sys, *t + C2 * h, tmp, k2);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * h;
        }
        eval(sys, *t + C3 * h, tmp, k3);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * h;
        }
        eval(sys, *t + C4 * h, tmp, k4);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h;
        }
        eval(sys, *t + C5 * h, tmp, k5);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h;
        }
        eval(sys, *t + h, tmp, k6);
        for i in 0..n {
            ynew[i] = y[i] + (k1[i] * B1 + k3[i] * B3 + k4[i] * B4 + k5[i] * B5 + k6[i] * B6) * h;
        }
        eval(sys, *t + h, ynew, k7);
        for i in 0..n {
            tmp[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
        }
        let err = scaled_norm(tmp, y, ynew, rtol, atol);
        if !err.is_finite() {
            *fsal_valid = true;
            h *= 0.2;
            continue;
        }
        if err <= 1.0 {
            *t = if last { t_end } else { *t + h };
            std::mem::swap(y, ynew);
            std::mem::swap(k1, k7);
            *fsal_valid = true;
            h_last_ok = h;
            on_step(*t, y, last)?;
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * fac).min(hmax);
        } else {
            *fsal_valid = true;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    Ok(h_last_ok)
}
