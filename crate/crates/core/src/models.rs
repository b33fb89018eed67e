//! Connection functions `g`, their normalising constant `C = ∫ g(|x|) dx`
//! over the plane, and the connection length scale `r = sqrt((ln rho + b) / (C rho))`.
//!
//! A model may be built even when it violates the conditions a usable
//! connection function must meet (non-increasing, values in `[0, 1]`,
//! finite positive integral, fast enough tail); the failures are recorded in
//! its [`ModelValidationReport`] and every simulation or theory entry point
//! refuses such a model via [`ConnectionModel::ensure_usable`].

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::quadrature::{self, Estimate, Tolerance};

/// `g` is treated as exactly zero beyond the smallest radius where it drops
/// to this level.
pub const TRUNCATION_EPS: f64 = 1e-12;

/// Absolute tolerance for radial integrals of `g`.
pub const INTEGRAL_TOL: f64 = 1e-9;

/// Threshold on `x^2 ln^2(x) g(x)` used by the tail check.
pub const TAIL_TOL: f64 = 1e-6;

const CUTOFF_SEARCH_LIMIT: f64 = 1e12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelKind {
    UnitDisk,
    Gaussian,
    /// Log-normal shadowing around a path-loss law:
    /// `g(x) = Q(10 eta log10(x) / sigma_db)`, with `Q` the standard normal
    /// tail, `eta` the path-loss exponent and `sigma_db` the shadowing
    /// deviation in dB. One common form among several; results that depend
    /// on more than `C` are specific to it.
    LogNormal { sigma_db: f64, eta: f64 },
    /// Linear interpolation between `(radius, value)` knots, clamped to the
    /// end values outside the knot range.
    Table { knots: Vec<(f64, f64)> },
}

impl ModelKind {
    /// Whitespace-free label used in file headers.
    pub fn label(&self) -> String {
        match self {
            ModelKind::UnitDisk => "unit_disk".into(),
            ModelKind::Gaussian => "gaussian".into(),
            ModelKind::LogNormal { sigma_db, eta } => format!("lognormal:{sigma_db}:{eta}"),
            ModelKind::Table { knots } => format!("table:{}", knots.len()),
        }
    }

    fn check_structure(&self) -> Result<()> {
        match self {
            ModelKind::UnitDisk | ModelKind::Gaussian => Ok(()),
            ModelKind::LogNormal { sigma_db, eta } => {
                if !(sigma_db.is_finite() && *sigma_db > 0.0 && eta.is_finite() && *eta > 0.0) {
                    return Err(Error::Model(format!(
                        "log-normal parameters must be positive and finite, got sigma_db={sigma_db}, eta={eta}"
                    )));
                }
                Ok(())
            }
            ModelKind::Table { knots } => {
                if knots.is_empty() {
                    return Err(Error::Model("table has no knots".into()));
                }
                if knots.iter().any(|&(r, v)| !r.is_finite() || !v.is_finite() || r < 0.0) {
                    return Err(Error::Model(
                        "table knots need finite values and non-negative radii".into(),
                    ));
                }
                if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::Model(
                        "table radii must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// `g` without truncation.
    pub fn eval_raw(&self, x: f64) -> f64 {
        match self {
            ModelKind::UnitDisk => {
                if x <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ModelKind::Gaussian => (-x * x).exp(),
            ModelKind::LogNormal { sigma_db, eta } => {
                if x == 0.0 {
                    1.0
                } else {
                    0.5 * erfc(10.0 * eta * x.log10() / (SQRT_2 * sigma_db))
                }
            }
            ModelKind::Table { knots } => interpolate(knots, x),
        }
    }

    /// Radii where `g` has a kink or a jump.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            ModelKind::UnitDisk => vec![1.0],
            ModelKind::Table { knots } => knots.iter().map(|k| k.0).collect(),
            _ => Vec::new(),
        }
    }
}

fn interpolate(knots: &[(f64, f64)], x: f64) -> f64 {
    let (r0, v0) = knots[0];
    let (rn, vn) = knots[knots.len() - 1];
    if x <= r0 {
        return v0;
    }
    if x >= rn {
        return vn;
    }
    let hi = knots.partition_point(|k| k.0 <= x);
    let (ra, va) = knots[hi - 1];
    let (rb, vb) = knots[hi];
    va + (vb - va) * (x - ra) / (rb - ra)
}

/// Parses the two-column table format: `radius value` per line, separated by
/// whitespace or a comma. Blank lines and `#` comments are skipped.
pub fn parse_table(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut knots = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(Error::Parse(format!(
                "table line {}: expected 2 columns, found {}",
                lineno + 1,
                fields.len()
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Parse(format!("table line {}: {s:?}: {e}", lineno + 1)))
        };
        knots.push((parse(fields[0])?, parse(fields[1])?));
    }
    if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Parse("table radii must be strictly increasing".into()));
    }
    Ok(knots)
}

pub fn load_table(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_table(&text)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelValidationReport {
    pub monotone_ok: bool,
    pub range_ok: bool,
    pub integral_finite: bool,
    pub tail_ok: bool,
    /// Largest sampled `x` where `x^2 ln^2(x) g(x)` exceeded [`TAIL_TOL`].
    pub tail_witness: Option<f64>,
}

impl ModelValidationReport {
    pub fn passed(&self) -> bool {
        self.monotone_ok && self.range_ok && self.integral_finite && self.tail_ok
    }

    fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.monotone_ok {
            out.push("g is not non-increasing");
        }
        if !self.range_ok {
            out.push("g leaves [0, 1]");
        }
        if !self.integral_finite {
            out.push("integral of g over the plane is not finite and positive");
        }
        if !self.tail_ok {
            out.push("g does not decay like o(1/(x^2 log^2 x))");
        }
        out
    }
}

impl fmt::Display for ModelValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "monotone_ok     {}", self.monotone_ok)?;
        writeln!(f, "range_ok        {}", self.range_ok)?;
        writeln!(f, "integral_finite {}", self.integral_finite)?;
        writeln!(f, "tail_ok         {}", self.tail_ok)?;
        match self.tail_witness {
            Some(x) => write!(f, "tail_witness    {x}"),
            None => write!(f, "tail_witness    -"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionModel {
    kind: ModelKind,
    c: Estimate,
    cutoff: f64,
    validation: ModelValidationReport,
}

impl ConnectionModel {
    /// Builds a model and validates it on [`ConnectionModel::default_grid`].
    ///
    /// Fails only on structurally malformed input (bad log-normal parameters,
    /// unsorted table radii); violations of the conditions on `g` are
    /// recorded in the validation report instead.
    pub fn new(kind: ModelKind) -> Result<Self> {
        kind.check_structure()?;
        let cutoff = match kind {
            ModelKind::UnitDisk => 1.0,
            _ => find_cutoff(&kind),
        };
        let c = integral_c_of(&kind, cutoff, true);
        let mut model = Self {
            kind,
            c: c.as_ref().copied().unwrap_or(Estimate {
                value: f64::NAN,
                abs_error: f64::INFINITY,
            }),
            cutoff,
            validation: ModelValidationReport {
                monotone_ok: false,
                range_ok: false,
                integral_finite: false,
                tail_ok: false,
                tail_witness: None,
            },
        };
        let grid = model.default_grid();
        model.validation = model.validate(&grid)?;
        Ok(model)
    }

    pub fn unit_disk() -> Self {
        Self::new(ModelKind::UnitDisk).expect("unit disk is well formed")
    }

    pub fn gaussian() -> Self {
        Self::new(ModelKind::Gaussian).expect("gaussian is well formed")
    }

    pub fn log_normal(sigma_db: f64, eta: f64) -> Result<Self> {
        Self::new(ModelKind::LogNormal { sigma_db, eta })
    }

    pub fn table(knots: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(ModelKind::Table { knots })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// `C = ∫ g(|x|) dx` over the plane. `NaN` when the integral diverges.
    pub fn c(&self) -> f64 {
        self.c.value
    }

    pub fn c_estimate(&self) -> Estimate {
        self.c
    }

    /// Radius beyond which `g` evaluates to exactly zero. Infinite when `g`
    /// never drops to [`TRUNCATION_EPS`].
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn validation(&self) -> &ModelValidationReport {
        &self.validation
    }

    pub fn is_usable(&self) -> bool {
        self.validation.passed() && self.cutoff.is_finite()
    }

    pub fn ensure_usable(&self) -> Result<()> {
        if self.is_usable() {
            Ok(())
        } else {
            let mut reasons = self.validation.failures();
            if !self.cutoff.is_finite() {
                reasons.push("g never drops below the truncation level");
            }
            Err(Error::Model(format!(
                "{} fails validation: {}",
                self.kind.label(),
                reasons.join("; ")
            )))
        }
    }

    /// Connection probability at normalised distance `x`. Zero beyond the cutoff.
    #[inline]
    pub fn g(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0);
        if x > self.cutoff {
            0.0
        } else {
            self.kind.eval_raw(x)
        }
    }

    pub fn eval_g(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::Parameter(format!(
                "g is defined on [0, inf), got x = {x}"
            )));
        }
        Ok(self.g(x))
    }

    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.kind.breakpoints();
        if self.cutoff.is_finite() {
            b.push(self.cutoff);
        }
        b
    }

    /// `C` by the analytic value where one is known, otherwise by quadrature.
    pub fn integral_c(&self) -> Result<Estimate> {
        integral_c_of(&self.kind, self.cutoff, true)
    }

    /// `C` forced through radial quadrature, bypassing the closed forms.
    pub fn integral_c_quadrature(&self) -> Result<Estimate> {
        integral_c_of(&self.kind, self.cutoff, false)
    }

    /// `∫_R^inf 2 pi x g(x) dx` with the untruncated `g`.
    pub fn tail_integral(&self, from: f64) -> Result<Estimate> {
        let kind = &self.kind;
        let start = from.max(0.0);
        let breaks = kind.breakpoints();
        let last_break = breaks.iter().copied().fold(start, f64::max);
        let head = quadrature::integrate(
            |x| 2.0 * PI * x * kind.eval_raw(x),
            start,
            last_break,
            &breaks,
            Tolerance::absolute(INTEGRAL_TOL),
        )?;
        let tail = quadrature::integrate_to_infinity(
            |x| 2.0 * PI * x * kind.eval_raw(x),
            last_break,
            Tolerance::absolute(INTEGRAL_TOL),
        )?;
        Ok(Estimate {
            value: head.value + tail.value,
            abs_error: head.abs_error + tail.abs_error,
        })
    }

    /// Grid from 0 to ten times the cutoff (or the last table knot when no
    /// cutoff exists), merged with the table knots.
    pub fn default_grid(&self) -> Vec<f64> {
        const POINTS: usize = 4000;
        let knots_end = self.kind.breakpoints().into_iter().fold(1.0f64, f64::max);
        let span = if self.cutoff.is_finite() {
            10.0 * self.cutoff.max(knots_end)
        } else {
            10.0 * knots_end
        };
        let mut grid: Vec<f64> = (0..=POINTS)
            .map(|i| span * i as f64 / POINTS as f64)
            .chain(self.kind.breakpoints())
            .collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        grid
    }

    /// Checks the conditions on `g` over `grid`.
    ///
    /// `grid` must be strictly increasing, start at 0 and reach ten times the
    /// cutoff when the cutoff is finite.
    pub fn validate(&self, grid: &[f64]) -> Result<ModelValidationReport> {
        if grid.is_empty() {
            return Err(Error::Parameter("validation grid is empty".into()));
        }
        if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parameter(
                "validation grid must be finite and strictly increasing".into(),
            ));
        }
        if grid[0] != 0.0 {
            return Err(Error::Parameter("validation grid must start at 0".into()));
        }
        let x_max = grid[grid.len() - 1];
        if self.cutoff.is_finite() && x_max < 10.0 * self.cutoff * (1.0 - 1e-12) {
            return Err(Error::Parameter(format!(
                "validation grid ends at {x_max}, needs to reach 10 * cutoff = {}",
                10.0 * self.cutoff
            )));
        }

        let values: Vec<f64> = grid.iter().map(|&x| self.kind.eval_raw(x)).collect();
        let mut range_ok = values.iter().all(|v| (0.0..=1.0).contains(v));
        let mut monotone_ok = values.windows(2).all(|w| w[1] <= w[0]);
        if let ModelKind::Table { knots } = &self.kind {
            range_ok &= knots.iter().all(|k| (0.0..=1.0).contains(&k.1));
            monotone_ok &= knots.windows(2).all(|w| w[1].1 <= w[0].1);
        }

        let integral_finite = self.cutoff.is_finite()
            && self.c.value.is_finite()
            && self.c.value > 0.0;

        let tail = |x: f64, v: f64| {
            let l = x.ln();
            x * x * l * l * v
        };
        let tail_witness = grid
            .iter()
            .zip(&values)
            .rev()
            .find(|&(&x, &v)| x > 1.0 && tail(x, v) > TAIL_TOL)
            .map(|(&x, _)| x);
        let decade: Vec<f64> = grid
            .iter()
            .zip(&values)
            .filter(|&(&x, _)| x >= x_max / 10.0 && x > 1.0)
            .map(|(&x, &v)| tail(x, v))
            .collect();
        // Far below the tolerance the product only tracks subnormal round-off.
        let negligible = TAIL_TOL * 1e-200;
        let tail_ok = decade
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + 1e-12) || w[1] <= negligible)
            && decade.last().map_or(true, |&h| h <= TAIL_TOL);

        Ok(ModelValidationReport {
            monotone_ok,
            range_ok,
            integral_finite,
            tail_ok,
            tail_witness,
        })
    }
}

fn find_cutoff(kind: &ModelKind) -> f64 {
    let below = |x: f64| kind.eval_raw(x) <= TRUNCATION_EPS;
    if below(0.0) {
        return f64::MIN_POSITIVE;
    }
    let mut hi = 1.0;
    while !below(hi) {
        hi *= 2.0;
        if hi > CUTOFF_SEARCH_LIMIT {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn integral_c_of(kind: &ModelKind, cutoff: f64, analytic: bool) -> Result<Estimate> {
    if analytic {
        match kind {
            ModelKind::UnitDisk | ModelKind::Gaussian => return Ok(Estimate::exact(PI)),
            _ => {}
        }
    }
    let breaks = kind.breakpoints();
    let upper = if cutoff.is_finite() {
        cutoff
    } else {
        breaks.iter().copied().fold(1.0, f64::max)
    };
    let integrand = |x: f64| 2.0 * PI * x * kind.eval_raw(x);
    let body = quadrature::integrate(
        integrand,
        0.0,
        upper,
        &breaks,
        Tolerance::absolute(INTEGRAL_TOL),
    )?;
    let tail = quadrature::integrate_to_infinity(integrand, upper, Tolerance::absolute(INTEGRAL_TOL))?;
    // The tail is included in the value and also counted as error: it is
    // the part the truncated kernel never realises.
    Ok(Estimate {
        value: body.value + tail.value,
        abs_error: body.abs_error + tail.abs_error + tail.value.abs(),
    })
}

/// `r = sqrt((ln rho + b) / (C rho))`, natural logarithm.
pub fn connection_radius(c: f64, rho: f64, b: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Parameter(format!("C must be positive and finite, got {c}")));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Parameter(format!("rho must be positive and finite, got {rho}")));
    }
    let scale = rho.ln() + b;
    if !(scale > 0.0) {
        return Err(Error::Parameter(format!(
            "log rho + b <= 0 (rho = {rho}, b = {b})"
        )));
    }
    Ok((scale / (c * rho)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_disk_values() {
        let m = ConnectionModel::unit_disk();
        assert_eq!(m.eval_g(0.5).unwrap(), 1.0);
        assert_eq!(m.eval_g(1.0).unwrap(), 1.0);
        assert_eq!(m.eval_g(1.5).unwrap(), 0.0);
        assert_eq!(m.cutoff(), 1.0);
        assert!(m.eval_g(-0.1).is_err());
    }

    #[test]
    fn lognormal_median_at_reference_distance() {
        for (s, e) in [(4.0, 2.0), (8.0, 3.5), (1.0, 0.5)] {
            let m = ConnectionModel::log_normal(s, e).unwrap();
            assert!((m.eval_g(1.0).unwrap() - 0.5).abs() < 1e-15);
            assert_eq!(m.eval_g(0.0).unwrap(), 1.0);
        }
        assert!(ConnectionModel::log_normal(0.0, 2.0).is_err());
    }

    #[test]
    fn analytic_constants() {
        assert_eq!(ConnectionModel::unit_disk().integral_c().unwrap().value, PI);
        assert_eq!(ConnectionModel::gaussian().integral_c().unwrap().value, PI);
    }

    #[test]
    fn quadrature_path_reproduces_pi() {
        for m in [ConnectionModel::unit_disk(), ConnectionModel::gaussian()] {
            let est = m.integral_c_quadrature().unwrap();
            assert!((est.value - PI).abs() < 1e-9, "{:?}: {}", m.kind(), est.value);
        }
    }

    #[test]
    fn connection_radius_examples() {
        let r = connection_radius(PI, 100.0, 0.0).unwrap();
        assert!((r - 0.121_073_2).abs() < 5e-8, "{r}");
        let r = connection_radius(PI, 1e4, 1.0).unwrap();
        assert!((r - 0.018_028).abs() < 5e-7, "{r}");
        let err = connection_radius(1.0, 2.0, -1.0).unwrap_err();
        assert!(err.to_string().contains("log rho + b <= 0"));
    }

    #[test]
    fn unit_disk_validates() {
        let v = ConnectionModel::unit_disk().validation().clone();
        assert!(v.passed(), "{v}");
        assert_eq!(v.tail_witness, None);
        assert!(ConnectionModel::gaussian().is_usable());
        assert!(ConnectionModel::log_normal(4.0, 2.0).unwrap().is_usable());
    }

    #[test]
    fn inverse_distance_table_is_not_integrable() {
        let knots: Vec<(f64, f64)> = (0..=1000)
            .map(|i| {
                let x = i as f64;
                (x, (1.0f64).min(1.0 / x))
            })
            .collect();
        let m = ConnectionModel::table(knots).unwrap();
        let v = m.validation();
        assert!(!v.integral_finite);
        assert!(!v.tail_ok);
        assert!(v.tail_witness.is_some());
        assert!(m.ensure_usable().is_err());
    }

    #[test]
    fn increasing_table_is_not_monotone() {
        let m = ConnectionModel::table(vec![(0.0, 0.5), (1.0, 0.8), (2.0, 0.0)]).unwrap();
        assert!(!m.validation().monotone_ok);
        assert!(m.validation().range_ok);
    }

    #[test]
    fn out_of_range_table_flagged() {
        let m = ConnectionModel::table(vec![(0.0, 1.5), (1.0, 0.0)]).unwrap();
        assert!(!m.validation().range_ok);
    }

    #[test]
    fn table_interpolates_and_truncates() {
        let m = ConnectionModel::table(vec![(0.0, 1.0), (1.0, 0.5), (2.0, 0.0)]).unwrap();
        assert!((m.g(0.5) - 0.75).abs() < 1e-15);
        assert!((m.g(1.5) - 0.25).abs() < 1e-15);
        assert_eq!(m.g(3.0), 0.0);
        assert!(m.cutoff() <= 2.0 && m.cutoff() > 1.99);
        // g = 1 - x/2 on [0, 2], so C = 2 pi ∫ x (1 - x/2) dx = 4 pi / 3.
        let expected = 4.0 * PI / 3.0;
        assert!((m.c() - expected).abs() < 1e-8, "{} vs {expected}", m.c());
        assert!(m.is_usable());
    }

    #[test]
    fn cutoff_meets_truncation_level() {
        for m in [
            ConnectionModel::gaussian(),
            ConnectionModel::log_normal(4.0, 2.0).unwrap(),
            ConnectionModel::log_normal(8.0, 3.0).unwrap(),
        ] {
            let c = m.cutoff();
            assert!(m.kind().eval_raw(c) <= TRUNCATION_EPS);
            assert!(m.kind().eval_raw(c * (1.0 - 1e-9)) > TRUNCATION_EPS * 0.5);
            assert_eq!(m.g(c * 1.000_001), 0.0);
            assert_eq!(m.g(c + 10.0), 0.0);
        }
    }

    #[test]
    fn parse_table_formats() {
        let knots = parse_table("# r g\n0 1\n0.5, 0.8\n\n1.0\t0 # end\n").unwrap();
        assert_eq!(knots, vec![(0.0, 1.0), (0.5, 0.8), (1.0, 0.0)]);
        assert!(parse_table("0 1\n0 0.5\n").is_err());
        assert!(parse_table("0 1 2\n").is_err());
        assert!(parse_table("zero 1\n").is_err());
    }

    #[test]
    fn validate_rejects_short_grid() {
        let m = ConnectionModel::gaussian();
        assert!(m.validate(&[0.0, 1.0, 2.0]).is_err());
        assert!(m.validate(&[]).is_err());
        assert!(m.validate(&[0.0, 2.0, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn builtin_models_non_increasing(x in 0.0f64..40.0, dx in 0.0f64..10.0) {
            let models = [
                ConnectionModel::unit_disk(),
                ConnectionModel::gaussian(),
                ConnectionModel::log_normal(4.0, 2.0).unwrap(),
            ];
            for m in &models {
                prop_assert!(m.g(x) >= m.g(x + dx));
                prop_assert!((0.0..=1.0).contains(&m.g(x)));
            }
        }

        #[test]
        fn radius_decreasing_in_rho(rho in 10.0f64..1e6, factor in 1.01f64..10.0, b in -1.0f64..3.0) {
            prop_assume!(rho.ln() + b > 1.0);
            let r1 = connection_radius(PI, rho, b).unwrap();
            let r2 = connection_radius(PI, rho * factor, b).unwrap();
            prop_assert!(r2 < r1);
        }
    }
}
