//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! The interval with the largest local error estimate is bisected until the
//! summed error estimate drops below the absolute tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Abscissae of the 15-point Kronrod rule on [-1, 1], positive half, centre first.
// Odd indices are Kronrod-only; even indices are shared with the 7-point Gauss rule.
const XK: [f64; 8] = [
    0.0,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.991_455_371_120_812_639_206_854_697_526_329,
];

const WK: [f64; 8] = [
    0.209_482_141_084_727_828_012_999_174_891_714,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.022_935_322_010_529_224_963_732_008_058_970,
];

// Gauss weights for XK[0], XK[2], XK[4], XK[6].
const WG: [f64; 4] = [
    0.417_959_183_673_469_387_755_102_040_816_327,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.129_484_966_168_869_693_270_611_432_679_082,
];

/// Stopping rule for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

impl QuadConfig {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lower: f64,
    upper: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lower: f64, upper: f64) -> Segment {
    let centre = 0.5 * (lower + upper);
    let half = 0.5 * (upper - lower);

    let fc = f(centre);
    let mut kronrod = WK[0] * fc;
    let mut gauss = WG[0] * fc;
    for i in 1..8 {
        let dx = half * XK[i];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WK[i] * pair;
        if i % 2 == 0 {
            gauss += WG[i / 2] * pair;
        }
    }

    Segment {
        lower,
        upper,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[lower, upper]`.
///
/// Reversed bounds flip the sign of the result. A zero-width interval
/// integrates to zero without evaluating `f`.
pub fn integrate<F>(f: F, lower: f64, upper: f64, config: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    integrate_with_breakpoints(f, lower, upper, &[], config)
}

/// Integrates `f` over `[lower, upper]` with the interval pre-split at
/// `breakpoints` (values outside the open interval are ignored).
///
/// Use this when the integrand has narrow features at known locations that a
/// coarse initial rule could step over.
pub fn integrate_with_breakpoints<F>(
    f: F,
    lower: f64,
    upper: f64,
    breakpoints: &[f64],
    config: &QuadConfig,
) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    if !lower.is_finite() || !upper.is_finite() {
        return Err(Error::Domain(format!(
            "integration bounds must be finite, got [{lower}, {upper}]"
        )));
    }
    if !(config.abs_tol > 0.0) {
        return Err(Error::Domain("quadrature tolerance must be positive".into()));
    }
    if lower == upper {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    if upper < lower {
        let r = integrate_with_breakpoints(f, upper, lower, breakpoints, config)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }

    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x.is_finite() && x > lower && x < upper)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lower);
    edges.extend(cuts);
    edges.push(upper);

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in edges.windows(2) {
        heap.push(kronrod15(&f, w[0], w[1]));
        evaluations += 15;
    }

    let mut subdivisions = 0;
    loop {
        let total_error: f64 = heap.iter().map(|s| s.error).sum();
        if total_error <= config.abs_tol {
            break;
        }
        if subdivisions >= config.max_subdivisions {
            let value = heap.iter().map(|s| s.value).sum();
            return Err(Error::Quadrature {
                lower,
                upper,
                estimate: value,
                error_estimate: total_error,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.lower + worst.upper);
        if mid <= worst.lower || mid >= worst.upper {
            // Interval cannot be split further in floating point; accept it.
            heap.push(Segment { error: 0.0, ..worst });
            continue;
        }
        heap.push(kronrod15(&f, worst.lower, mid));
        heap.push(kronrod15(&f, mid, worst.upper));
        evaluations += 30;
        subdivisions += 1;
    }

    // Sum in interval order so the result does not depend on heap layout.
    let mut segments = heap.into_vec();
    segments.sort_by(|a, b| a.lower.total_cmp(&b.lower));
    let value = segments.iter().map(|s| s.value).sum();
    let error_estimate = segments.iter().map(|s| s.error).sum();

    Ok(QuadResult {
        value,
        error_estimate,
        evaluations,
    })
}
