//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Panels are kept in a max-heap keyed by their error estimate and the worst
//! panel is bisected until the summed error meets the tolerance or the panel
//! budget runs out. Known kinks and jumps of the integrand should be passed
//! as breakpoints so that no panel straddles them.

use std::cell::{Cell, RefCell};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An integral value together with an absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            abs_error: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub const fn absolute(abs: f64) -> Self {
        Self {
            abs,
            rel: 0.0,
            max_panels: 2000,
        }
    }

    pub const fn relative(rel: f64) -> Self {
        Self {
            abs: 0.0,
            rel,
            max_panels: 2000,
        }
    }

    /// Met when either the absolute or the relative target is met.
    pub const fn mixed(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_panels: 2000,
        }
    }

    pub const fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    /// Never tighter than the round-off floor of the estimate itself.
    fn target(&self, value: f64) -> f64 {
        self.abs
            .max(self.rel * value.abs())
            .max(100.0 * f64::EPSILON * value.abs())
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.abs() * WGK[7];
    let mut fv = [(0.0, 0.0); 7];
    for (j, &x) in XGK[..7].iter().enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = (f1, f2);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = kronrod * half;
    let abs_sum = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_sum);
    }
    Panel {
        a,
        b,
        value,
        error,
    }
}

/// Integrates `f` over `[a, b]`, splitting first at every breakpoint that
/// falls strictly inside the interval.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Parameter(format!(
            "integration bounds must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Estimate::exact(0.0));
    }
    if a > b {
        let est = integrate(f, b, a, breakpoints, tol)?;
        return Ok(Estimate {
            value: -est.value,
            ..est
        });
    }

    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b && x.is_finite())
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut lo = a;
    for &c in cuts.iter().chain(std::iter::once(&b)) {
        heap.push(gk15(&f, lo, c));
        lo = c;
    }

    let mut value: f64 = heap.iter().map(|p| p.value).sum();
    let mut error: f64 = heap.iter().map(|p| p.error).sum();
    let mut frozen = Estimate::exact(0.0);
    loop {
        if !value.is_finite() {
            return Err(Error::Quadrature {
                value,
                abs_error: error,
            });
        }
        if error <= tol.target(value) || heap.is_empty() {
            // Re-sum to shed the drift of the running totals.
            let (v, e) = heap.iter().fold((frozen.value, frozen.abs_error), |(v, e), p| {
                (v + p.value, e + p.error)
            });
            return Ok(Estimate {
                value: v,
                abs_error: e,
            });
        }
        if heap.len() >= tol.max_panels {
            return Err(Error::Quadrature {
                value,
                abs_error: error,
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel is at floating-point resolution; accept it as is.
            frozen.value += worst.value;
            frozen.abs_error += worst.error;
            continue;
        }
        let (left, right) = (gk15(&f, worst.a, mid), gk15(&f, mid, worst.b));
        value += left.value + right.value - worst.value;
        error = (error + left.error + right.error - worst.error).max(0.0);
        heap.push(left);
        heap.push(right);
    }
}

/// Integrates `f` over `[a, inf)` by successive doublings of the upper limit.
///
/// Stops once a doubling contributes no more than `tol.abs`. Declares
/// divergence once three successive doublings each exceed the tolerance
/// without shrinking, or when the doubling budget is exhausted.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<Estimate> {
    const MAX_DOUBLINGS: usize = 1000;
    let mut lo = a;
    let mut hi = (2.0 * a).max(a + 1.0);
    let mut total = Estimate::exact(0.0);
    let mut previous = f64::INFINITY;
    let mut stalled = 0;
    for _ in 0..MAX_DOUBLINGS {
        let piece = integrate(&f, lo, hi, &[], tol)?;
        total.value += piece.value;
        total.abs_error += piece.abs_error;
        let size = piece.value.abs();
        if size <= tol.abs {
            total.abs_error += size;
            return Ok(total);
        }
        if size >= previous {
            stalled += 1;
            if stalled >= 3 {
                return Err(Error::Divergent(format!(
                    "contribution over [{lo:e}, {hi:e}] is {size:e} and not shrinking"
                )));
            }
        } else {
            stalled = 0;
        }
        previous = size;
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            break;
        }
    }
    Err(Error::Divergent(format!(
        "tail did not settle below {:e} within the doubling budget",
        tol.abs
    )))
}

/// Iterated integral of `f(x, y)` over `[ax, bx] x [ay(x), by(x)]`.
pub fn integrate_2d<F, L, U>(
    f: F,
    x_range: (f64, f64),
    y_lower: L,
    y_upper: U,
    x_breaks: &[f64],
    outer: Tolerance,
    inner: Tolerance,
) -> Result<Estimate>
where
    F: Fn(f64, f64) -> f64,
    L: Fn(f64) -> f64,
    U: Fn(f64) -> f64,
{
    integrate_nested(
        f,
        x_range,
        |x| (y_lower(x), y_upper(x)),
        |_| Vec::new(),
        x_breaks,
        outer,
        inner,
    )
}

/// [`integrate_2d`] with breakpoints for the inner integral that may
/// depend on the outer variable.
pub fn integrate_nested<F, R, B>(
    f: F,
    (ax, bx): (f64, f64),
    y_range: R,
    y_breaks: B,
    x_breaks: &[f64],
    outer: Tolerance,
    inner: Tolerance,
) -> Result<Estimate>
where
    F: Fn(f64, f64) -> f64,
    R: Fn(f64) -> (f64, f64),
    B: Fn(f64) -> Vec<f64>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let worst_inner = Cell::new(0.0f64);
    let outer_est = integrate(
        |x| {
            if failure.borrow().is_some() {
                return 0.0;
            }
            let (lo, hi) = y_range(x);
            match integrate(|y| f(x, y), lo, hi, &y_breaks(x), inner) {
                Ok(e) => {
                    worst_inner.set(worst_inner.get().max(e.abs_error));
                    e.value
                }
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    0.0
                }
            }
        },
        ax,
        bx,
        x_breaks,
        outer,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let est = outer_est?;
    Ok(Estimate {
        value: est.value,
        abs_error: est.abs_error + (bx - ax).abs() * worst_inner.get(),
    })
}
