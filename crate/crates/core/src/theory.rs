//! Analytic side: finite-density expectations of the isolated-node count,
//! the asymptotic constants, the pair correlation of isolation events, the
//! Chen–Stein `b1` / `b2` terms and Poisson / total-variation utilities.
//!
//! All neighbourhood integrals are evaluated in coordinates scaled by `r`,
//! with the kernel truncated at its cutoff exactly as the sampler uses it.
//! The Chen–Stein and pair-correlation quantities are finite-density
//! evaluations of expressions whose interest is their large-density limit.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Metric;
use crate::models::{connection_radius, ConnectionModel, ModelKind};
use crate::quadrature::{integrate, integrate_nested, Estimate, Tolerance};

/// Absolute tolerance on exponents `rho * I`.
pub const INNER_ABS: f64 = 1e-9;
/// Relative tolerance on outer integrals.
pub const OUTER_REL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub rho: f64,
    pub b: f64,
    pub metric: Option<Metric>,
    /// Finite-density `E[W]` for `metric`; absent in asymptotic-only reports.
    pub expected_isolated: Option<Estimate>,
    /// `e^{-b}`
    pub asymptotic_mean: f64,
    /// `exp(-e^{-b})`
    pub prob_no_isolated: f64,
    /// `ln rho + b`
    pub mean_degree: f64,
    /// `E[W^S] - E[W^T]`
    pub boundary_excess: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    pmf: Vec<f64>,
    tail_mass: f64,
}

impl DiscreteDistribution {
    pub fn new(pmf: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if pmf.iter().any(|p| !(*p >= 0.0)) || !(tail_mass >= 0.0) {
            return Err(Error::Parameter("probabilities must be non-negative".into()));
        }
        let total: f64 = pmf.iter().sum::<f64>() + tail_mass;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { pmf, tail_mass })
    }

    /// Empirical law of integer observations.
    pub fn from_samples(samples: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut counts: Vec<u64> = Vec::new();
        let mut n = 0u64;
        for k in samples {
            if k >= counts.len() {
                counts.resize(k + 1, 0);
            }
            counts[k] += 1;
            n += 1;
        }
        if n == 0 {
            return Err(Error::Parameter("empirical law of an empty sample".into()));
        }
        Ok(Self {
            pmf: counts.iter().map(|&c| c as f64 / n as f64).collect(),
            tail_mass: 0.0,
        })
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChenSteinParams {
    epsilon: f64,
    pub inner_abs: f64,
    pub outer_rel: f64,
}

impl ChenSteinParams {
    pub const DEFAULT_EPSILON: f64 = 0.25;

    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::Parameter(format!(
                "epsilon must lie in (0, 1/2), got {epsilon}"
            )));
        }
        Ok(Self {
            epsilon,
            inner_abs: INNER_ABS,
            outer_rel: OUTER_REL,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl Default for ChenSteinParams {
    fn default() -> Self {
        Self::new(Self::DEFAULT_EPSILON).expect("default epsilon is in range")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChenSteinTerms {
    pub b1: f64,
    pub b2: f64,
    pub b2_abs_error: f64,
    pub epsilon: f64,
}

struct Scaled<'a> {
    model: &'a ConnectionModel,
    rho: f64,
    r: f64,
    /// `rho r^2`, the factor turning scaled areas into exponents.
    rho_r2: f64,
    /// Truncated `∫ 2 pi s g(s) ds`.
    mass: Estimate,
}

impl<'a> Scaled<'a> {
    fn new(model: &'a ConnectionModel, rho: f64, b: f64) -> Result<Self> {
        model.ensure_usable()?;
        if !model.cutoff().is_finite() {
            return Err(Error::Model("kernel has no finite cutoff".into()));
        }
        let r = connection_radius(model.c(), rho, b)?;
        let rho_r2 = rho * r * r;
        let mass = match model.kind() {
            ModelKind::UnitDisk => Estimate::exact(PI),
            _ => integrate(
                |s| TAU * s * model.g(s),
                0.0,
                model.cutoff(),
                &model.breakpoints(),
                Tolerance::absolute(exponent_tol(rho_r2)),
            )?,
        };
        Ok(Self {
            model,
            rho,
            r,
            rho_r2,
            mass,
        })
    }

    fn cutoff(&self) -> f64 {
        self.model.cutoff()
    }

    fn reach(&self) -> f64 {
        self.r * self.cutoff()
    }

    fn inner_tol(&self) -> Tolerance {
        Tolerance::absolute(exponent_tol(self.rho_r2))
    }

    /// `exp(-rho * I)` for scaled area `area`.
    fn survival(&self, area: f64) -> f64 {
        (-self.rho_r2 * area).exp()
    }
}

fn exponent_tol(rho_r2: f64) -> f64 {
    INNER_ABS / rho_r2.max(1.0)
}

fn outer_tol() -> Tolerance {
    Tolerance::mixed(1e-300, OUTER_REL).with_max_panels(4000)
}

/// Expected number of isolated nodes at finite density.
///
/// Torus: `rho exp(-rho I)` with `I` the kernel mass around a point.
/// Square: `rho ∫ exp(-rho I(y)) dy` over node positions, split into
/// interior, edge strips and corners.
pub fn expected_isolated(
    model: &ConnectionModel,
    rho: f64,
    b: f64,
    metric: Metric,
) -> Result<Estimate> {
    let sc = Scaled::new(model, rho, b)?;
    match metric {
        Metric::Torus => expected_isolated_torus(&sc),
        Metric::Square => expected_isolated_square(&sc),
    }
}

fn expected_isolated_torus(sc: &Scaled) -> Result<Estimate> {
    if sc.r > 0.5 {
        return Err(Error::Parameter(format!(
            "connection radius {} exceeds half the torus period",
            sc.r
        )));
    }
    let area = if sc.reach() <= 0.5 {
        sc.mass
    } else {
        // The kernel wraps: integrate over one period quadrant directly.
        let (r, m) = (sc.r, sc.model);
        let q = integrate_nested(
            |u, v| m.g((u * u + v * v).sqrt() / r),
            (0.0, 0.5),
            |_| (0.0, 0.5),
            |u| circle_crossings(u, &scaled_breaks(sc)),
            &scaled_breaks(sc),
            Tolerance::absolute(exponent_tol(sc.rho_r2) * r * r / 4.0),
            Tolerance::absolute(exponent_tol(sc.rho_r2) * r * r / 8.0),
        )?;
        Estimate {
            value: 4.0 * q.value / (r * r),
            abs_error: 4.0 * q.abs_error / (r * r),
        }
    };
    let value = sc.rho * sc.survival(area.value);
    Ok(Estimate {
        value,
        abs_error: value * sc.rho_r2 * area.abs_error,
    })
}

/// Breakpoints of `g(d / r)` as distances `d`.
fn scaled_breaks(sc: &Scaled) -> Vec<f64> {
    sc.model.breakpoints().into_iter().map(|k| k * sc.r).collect()
}

/// Values of `v` where `sqrt(u^2 + v^2)` crosses one of `radii`.
fn circle_crossings(u: f64, radii: &[f64]) -> Vec<f64> {
    radii
        .iter()
        .filter(|&&k| k > u)
        .map(|&k| (k * k - u * u).sqrt())
        .collect()
}

/// Length of the circle of radius `s` about the origin lying inside the box
/// whose sides are at distances `sides = [right, top, left, bottom]`.
pub fn arc_inside(s: f64, sides: &[f64; 4]) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let w = sides.map(|d| if d >= s { 0.0 } else { (d.max(0.0) / s).acos() });
    // Excluded arcs are centred a quarter turn apart with half-widths at most
    // pi/2, so only neighbours can overlap.
    let mut excluded = 2.0 * w.iter().sum::<f64>();
    for i in 0..4 {
        excluded -= (w[i] + w[(i + 1) % 4] - FRAC_PI_2).max(0.0);
    }
    s * (TAU - excluded).max(0.0)
}

/// Scaled kernel mass seen from a node whose scaled side distances are
/// `sides`.
fn box_mass(sc: &Scaled, sides: &[f64; 4]) -> Result<Estimate> {
    let c = sc.cutoff();
    if sides.iter().all(|&d| d >= c) {
        return Ok(sc.mass);
    }
    let mut breaks = sc.model.breakpoints();
    for i in 0..4 {
        let (d, e) = (sides[i], sides[(i + 1) % 4]);
        breaks.push(d);
        breaks.push(d.hypot(e));
    }
    breaks.retain(|x| x.is_finite() && *x > 0.0 && *x < c);
    let m = sc.model;
    integrate(|s| m.g(s) * arc_inside(s, sides), 0.0, c, &breaks, sc.inner_tol())
}

fn expected_isolated_square(sc: &Scaled) -> Result<Estimate> {
    let r = sc.r;
    let reach = sc.reach();
    let inf = f64::INFINITY;
    let tracked = std::cell::Cell::new(0.0f64);
    let surv = |sides: [f64; 4]| -> f64 {
        match box_mass(sc, &sides) {
            Ok(m) => {
                tracked.set(tracked.get().max(m.abs_error));
                sc.survival(m.value)
            }
            Err(_) => f64::NAN,
        }
    };
    let kernel_breaks = scaled_breaks(sc);

    let est = if reach < 0.5 {
        let e0 = sc.survival(sc.mass.value);
        let edge = integrate(
            |a| surv([a / r, inf, inf, inf]),
            0.0,
            reach,
            &kernel_breaks,
            outer_tol(),
        )?;
        let diag: Vec<f64> = kernel_breaks
            .iter()
            .flat_map(|&k| [k, k / 2f64.sqrt()])
            .collect();
        // Symmetric in the two side distances: twice the lower triangle.
        let corner = integrate_nested(
            |a, b| surv([a / r, b / r, inf, inf]),
            (0.0, reach),
            |a| (0.0, a),
            |a| {
                let mut v = circle_crossings(a, &kernel_breaks);
                v.extend(kernel_breaks.iter().copied());
                v
            },
            &diag,
            outer_tol(),
            Tolerance::mixed(1e-300, OUTER_REL / 10.0),
        )?;
        let w_int = (1.0 - 2.0 * reach).powi(2);
        let w_edge = 4.0 * (1.0 - 2.0 * reach);
        let value = sc.rho * (w_int * e0 + w_edge * edge.value + 8.0 * corner.value);
        let abs_error = sc.rho
            * (w_int * e0 * sc.rho_r2 * sc.mass.abs_error
                + w_edge * edge.abs_error
                + 8.0 * corner.abs_error);
        Estimate { value, abs_error }
    } else {
        // Neighbourhoods reach across the cell: integrate the quadrant directly.
        let q = integrate_nested(
            |y1, y2| surv([(0.5 - y1) / r, (0.5 - y2) / r, (0.5 + y1) / r, (0.5 + y2) / r]),
            (0.0, 0.5),
            |_| (0.0, 0.5),
            |_| Vec::new(),
            &[],
            outer_tol(),
            Tolerance::mixed(1e-300, OUTER_REL / 10.0),
        )?;
        Estimate {
            value: 4.0 * sc.rho * q.value,
            abs_error: 4.0 * sc.rho * q.abs_error,
        }
    };
    if !est.value.is_finite() {
        return Err(Error::Quadrature {
            value: est.value,
            abs_error: f64::INFINITY,
        });
    }
    // Inner-integral error propagated through the exponent.
    let inner = est.value * sc.rho_r2 * tracked.get();
    Ok(Estimate {
        value: est.value,
        abs_error: est.abs_error + inner,
    })
}

/// Expected degree of a node on the torus, `rho I`.
pub fn expected_degree(model: &ConnectionModel, rho: f64, b: f64) -> Result<f64> {
    let sc = Scaled::new(model, rho, b)?;
    Ok(sc.rho_r2 * sc.mass.value)
}

/// Large-density constants only.
pub fn asymptotic_report(rho: f64, b: f64) -> Result<TheoryReport> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Parameter(format!("rho must be positive and finite, got {rho}")));
    }
    let mean_degree = rho.ln() + b;
    if !(mean_degree > 0.0) {
        return Err(Error::Parameter(format!(
            "log rho + b <= 0 (rho = {rho}, b = {b})"
        )));
    }
    let asymptotic_mean = (-b).exp();
    Ok(TheoryReport {
        rho,
        b,
        metric: None,
        expected_isolated: None,
        asymptotic_mean,
        prob_no_isolated: (-asymptotic_mean).exp(),
        mean_degree,
        boundary_excess: None,
    })
}

/// Asymptotic constants plus the finite-density expectation for `metric`
/// and the square-minus-torus boundary excess (when the torus is defined).
pub fn theory_report(
    model: &ConnectionModel,
    rho: f64,
    b: f64,
    metric: Metric,
) -> Result<TheoryReport> {
    let mut rep = asymptotic_report(rho, b)?;
    let on_square = expected_isolated(model, rho, b, Metric::Square)?;
    let on_torus = expected_isolated(model, rho, b, Metric::Torus);
    rep.metric = Some(metric);
    rep.boundary_excess = on_torus.as_ref().ok().map(|t| on_square.value - t.value);
    rep.expected_isolated = Some(match metric {
        Metric::Square => on_square,
        Metric::Torus => on_torus?,
    });
    Ok(rep)
}

/// Scaled plane integral `∫ g(|x|) g(|x - delta u|) dx`.
pub fn cross_integral(model: &ConnectionModel, delta: f64, tol: Tolerance) -> Result<Estimate> {
    let c = model.cutoff();
    if delta >= 2.0 * c {
        return Ok(Estimate::exact(0.0));
    }
    let kb = model.breakpoints();
    let g_at = |s: f64, th: f64| {
        let d2 = s * s + delta * delta - 2.0 * s * delta * th.cos();
        model.g(d2.max(0.0).sqrt())
    };
    let mut s_breaks = kb.clone();
    for &k in &kb {
        s_breaks.push((k - delta).abs());
        s_breaks.push(k + delta);
    }
    let theta_breaks = |s: f64| -> Vec<f64> {
        if s * delta == 0.0 {
            return Vec::new();
        }
        kb.iter()
            .filter_map(|&k| {
                let cos = (s * s + delta * delta - k * k) / (2.0 * s * delta);
                (cos > -1.0 && cos < 1.0).then(|| cos.acos())
            })
            .collect()
    };
    let est = integrate_nested(
        |s, th| 2.0 * s * model.g(s) * g_at(s, th),
        (0.0, c),
        |_| (0.0, PI),
        theta_breaks,
        &s_breaks,
        tol,
        Tolerance::absolute(tol.abs.max(1e-14) / (PI * c * c).max(1.0)),
    )?;
    Ok(est)
}

/// `P(both isolated) / (P(isolated)^2)` for two nodes `d` apart:
/// `(1 - g(d/r)) exp(rho r^2 ∫ g(|x|) g(|x - delta u|) dx)` with `delta = d/r`.
pub fn pair_correlation_factor(model: &ConnectionModel, rho: f64, b: f64, d: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::Parameter(format!("distance must be non-negative, got {d}")));
    }
    let sc = Scaled::new(model, rho, b)?;
    let delta = d / sc.r;
    let direct = 1.0 - model.g(delta);
    if direct == 0.0 {
        return Ok(0.0);
    }
    let cross = cross_integral(model, delta, sc.inner_tol())?;
    Ok(direct * (sc.rho_r2 * cross.value).exp())
}

/// The `b1` and `b2` terms of the Chen–Stein bound for the torus.
///
/// `b1 = 4 pi E^2 r^{2(1-eps)}`,
/// `b2 = rho^2 r^2 ∫_{|y| <= 2 r^{-eps}} (1 - g(|y|)) exp(-rho r^2 (2 M - X(|y|))) dy`
/// where `M` is the kernel mass and `X` the cross integral.
pub fn chen_stein_terms(
    model: &ConnectionModel,
    rho: f64,
    b: f64,
    params: &ChenSteinParams,
) -> Result<ChenSteinTerms> {
    let eps = params.epsilon();
    let sc = Scaled::new(model, rho, b)?;
    let e = expected_isolated_torus(&sc)?.value;
    let b1 = 4.0 * PI * e * e * (sc.r * sc.r).powf(1.0 - eps);

    let neighbourhood = 2.0 * sc.r.powf(1.0 - eps);
    if neighbourhood > 0.5 {
        return Err(Error::Parameter(format!(
            "dependency neighbourhood 2 r^(1 - eps) = {neighbourhood} exceeds half the torus period"
        )));
    }
    let upper = 2.0 * sc.r.powf(-eps);
    let c = sc.cutoff();
    let log_front = 2.0 * rho.ln() + 2.0 * sc.r.ln() - 2.0 * sc.rho_r2 * sc.mass.value;
    let cross_tol = Tolerance::absolute(params.inner_abs / sc.rho_r2.max(1.0));
    let failure = std::cell::RefCell::new(None);
    let integrand = |s: f64| {
        let direct = 1.0 - model.g(s);
        if direct <= 0.0 || s <= 0.0 {
            return 0.0;
        }
        let cross = match cross_integral(model, s, cross_tol) {
            Ok(x) => x.value,
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                return 0.0;
            }
        };
        (log_front + (TAU * s * direct).ln() + sc.rho_r2 * cross).exp()
    };
    let numeric_end = upper.min(2.0 * c);
    let mut breaks = model.breakpoints();
    breaks.push(2.0 * c);
    let near = integrate(
        integrand,
        0.0,
        numeric_end,
        &breaks,
        Tolerance::mixed(1e-300, params.outer_rel),
    );
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let near = near?;
    // Beyond twice the cutoff the kernels no longer overlap and g = 0.
    let far = if upper > numeric_end {
        log_front.exp() * PI * (upper * upper - numeric_end * numeric_end)
    } else {
        0.0
    };
    Ok(ChenSteinTerms {
        b1,
        b2: near.value + far,
        b2_abs_error: near.abs_error,
        epsilon: eps,
    })
}

/// `(b1 + b2) min(1, 1/lambda) + b3 min(1, 1/sqrt(lambda))`.
///
/// `b3` is not evaluated by this crate; pass 0 or an external estimate.
pub fn chen_stein_tv_bound(b1: f64, b2: f64, b3: f64, lambda: f64) -> Result<f64> {
    if !(b1 >= 0.0 && b2 >= 0.0 && b3 >= 0.0) {
        return Err(Error::Parameter("b terms must be non-negative".into()));
    }
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
    }
    Ok((b1 + b2) * (1.0f64).min(1.0 / lambda) + b3 * (1.0f64).min(1.0 / lambda.sqrt()))
}

/// Poisson probabilities for `k = 0..=k_max`; `tail_mass` holds the rest.
pub fn poisson_pmf(lambda: f64, k_max: usize) -> Result<DiscreteDistribution> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
    }
    // Recurrence carried in logs so that large lambda does not underflow at k = 0.
    let ln_lambda = lambda.ln();
    let mut log_p = -lambda;
    let mut pmf = Vec::with_capacity(k_max + 1);
    pmf.push(log_p.exp());
    for k in 1..=k_max {
        log_p += ln_lambda - (k as f64).ln();
        pmf.push(log_p.exp());
    }
    let tail_mass = (1.0 - pmf.iter().sum::<f64>()).max(0.0);
    Ok(DiscreteDistribution { pmf, tail_mass })
}

/// Smallest `k_max` whose Poisson tail is at most `tail`.
pub fn poisson_pmf_to_tail(lambda: f64, tail: f64) -> Result<DiscreteDistribution> {
    let mut k_max = (lambda + 10.0 * lambda.sqrt() + 20.0).ceil() as usize;
    loop {
        let d = poisson_pmf(lambda, k_max)?;
        if d.tail_mass <= tail || k_max > 1 << 24 {
            return Ok(d);
        }
        k_max *= 2;
    }
}

/// Half the L1 distance, counting the tail masses as one extra atom.
pub fn tv_distance(p: &DiscreteDistribution, q: &DiscreteDistribution) -> f64 {
    let n = p.pmf.len().max(q.pmf.len());
    let body: f64 = (0..n).map(|k| (p.prob(k) - q.prob(k)).abs()).sum();
    (0.5 * (body + (p.tail_mass - q.tail_mass).abs())).clamp(0.0, 1.0)
}
