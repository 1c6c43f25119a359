//! Special functions used by the closed-form coverage and authentication
//! expressions: the Gaussian tail `Q`, its inverse, and the Gauss
//! hypergeometric function `₂F₁` on the non-positive real axis.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{domain, Error, Result};

/// Series stopping rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

impl Tolerance {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !abs_tol.is_finite() {
            return domain(format!("abs_tol must be positive, got {abs_tol}"));
        }
        if max_terms == 0 {
            return domain("max_terms must be at least 1");
        }
        Ok(Self { abs_tol, max_terms })
    }
}

// ---------------------------------------------------------------------------
// erfc: rational approximations from FreeBSD msun s_erf.c
// (Copyright (C) 1993 by Sun Microsystems, Inc. Permission to use, copy,
// modify, and distribute this software is freely granted, provided that this
// notice is preserved.)
// ---------------------------------------------------------------------------

const ERX: f64 = 8.45062911510467529297e-01;

const PP0: f64 = 1.28379167095512558561e-01;
const PP1: f64 = -3.25042107247001499370e-01;
const PP2: f64 = -2.84817495755985104766e-02;
const PP3: f64 = -5.77027029648944159157e-03;
const PP4: f64 = -2.37630166566501626084e-05;
const QQ1: f64 = 3.97917223959155352819e-01;
const QQ2: f64 = 6.50222499887672944485e-02;
const QQ3: f64 = 5.08130628187576562776e-03;
const QQ4: f64 = 1.32494738004321644526e-04;
const QQ5: f64 = -3.96022827877536812320e-06;

const PA0: f64 = -2.36211856075265944077e-03;
const PA1: f64 = 4.14856118683748331666e-01;
const PA2: f64 = -3.72207876035701323847e-01;
const PA3: f64 = 3.18346619901161753674e-01;
const PA4: f64 = -1.10894694282396677476e-01;
const PA5: f64 = 3.54783043256182359371e-02;
const PA6: f64 = -2.16637559486879084300e-03;
const QA1: f64 = 1.06420880400844228286e-01;
const QA2: f64 = 5.40397917702171048937e-01;
const QA3: f64 = 7.18286544141962662868e-02;
const QA4: f64 = 1.26171219808761642112e-01;
const QA5: f64 = 1.36370839120290507362e-02;
const QA6: f64 = 1.19844998467991074170e-02;

const RA0: f64 = -9.86494403484714822705e-03;
const RA1: f64 = -6.93858572707181764372e-01;
const RA2: f64 = -1.05586262253232909814e+01;
const RA3: f64 = -6.23753324503260060396e+01;
const RA4: f64 = -1.62396669462573470355e+02;
const RA5: f64 = -1.84605092906711035994e+02;
const RA6: f64 = -8.12874355063065934246e+01;
const RA7: f64 = -9.81432934416914548592e+00;
const SA1: f64 = 1.96512716674392571292e+01;
const SA2: f64 = 1.37657754143519042600e+02;
const SA3: f64 = 4.34565877475229228821e+02;
const SA4: f64 = 6.45387271733267880336e+02;
const SA5: f64 = 4.29008140027567833386e+02;
const SA6: f64 = 1.08635005541779435134e+02;
const SA7: f64 = 6.57024977031928170135e+00;
const SA8: f64 = -6.04244152148580987438e-02;

const RB0: f64 = -9.86494292470009928597e-03;
const RB1: f64 = -7.99283237680523006574e-01;
const RB2: f64 = -1.77579549177547519889e+01;
const RB3: f64 = -1.60636384855821916062e+02;
const RB4: f64 = -6.37566443368389627722e+02;
const RB5: f64 = -1.02509513161107724954e+03;
const RB6: f64 = -4.83519191608651397019e+02;
const SB1: f64 = 3.03380607434824582924e+01;
const SB2: f64 = 3.25792512996573918826e+02;
const SB3: f64 = 1.53672958608443695994e+03;
const SB4: f64 = 3.19985821950859553908e+03;
const SB5: f64 = 2.55305040643316442583e+03;
const SB6: f64 = 4.74528541206955367215e+02;
const SB7: f64 = -2.24409524465858183362e+01;

/// Complementary error function, accurate to about one ulp.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x == f64::NEG_INFINITY {
        return 2.0;
    }
    let negative = x < 0.0;
    let ax = x.abs();

    if ax < 0.84375 {
        let t = if ax < 1.0 / (1u64 << 56) as f64 {
            ax
        } else {
            let z = ax * ax;
            let r = PP0 + z * (PP1 + z * (PP2 + z * (PP3 + z * PP4)));
            let s = 1.0 + z * (QQ1 + z * (QQ2 + z * (QQ3 + z * (QQ4 + z * QQ5))));
            let y = r / s;
            if ax < 0.25 {
                ax + ax * y
            } else {
                0.5 + (ax * y + (ax - 0.5))
            }
        };
        return if negative { 1.0 + t } else { 1.0 - t };
    }

    if ax < 1.25 {
        let s = ax - 1.0;
        let p = PA0 + s * (PA1 + s * (PA2 + s * (PA3 + s * (PA4 + s * (PA5 + s * PA6)))));
        let q = 1.0 + s * (QA1 + s * (QA2 + s * (QA3 + s * (QA4 + s * (QA5 + s * QA6)))));
        return if negative {
            1.0 + ERX + p / q
        } else {
            1.0 - ERX - p / q
        };
    }

    if ax >= 28.0 {
        return if negative { 2.0 } else { 0.0 };
    }
    if negative && ax > 6.0 {
        return 2.0;
    }

    let s = 1.0 / (ax * ax);
    let (r, q) = if ax < 1.0 / 0.35 {
        (
            RA0 + s * (RA1 + s * (RA2 + s * (RA3 + s * (RA4 + s * (RA5 + s * (RA6 + s * RA7)))))),
            1.0 + s
                * (SA1
                    + s * (SA2 + s * (SA3 + s * (SA4 + s * (SA5 + s * (SA6 + s * (SA7 + s * SA8))))))),
        )
    } else {
        (
            RB0 + s * (RB1 + s * (RB2 + s * (RB3 + s * (RB4 + s * (RB5 + s * RB6))))),
            1.0 + s * (SB1 + s * (SB2 + s * (SB3 + s * (SB4 + s * (SB5 + s * (SB6 + s * SB7)))))),
        )
    };
    // Split ax into a short high part so -ax² is formed without rounding loss.
    let hi = f64::from_bits(ax.to_bits() & 0xffff_ffff_0000_0000);
    let v = (-hi * hi - 0.5625).exp() * ((hi - ax) * (hi + ax) + r / q).exp() / ax;
    if negative {
        2.0 - v
    } else {
        v
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Gaussian tail probability `Q(x) = P[N(0,1) > x]`.
pub fn q_function(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("q_function needs a finite argument, got {x}"));
    }
    Ok(q_unchecked(x))
}

#[inline]
pub(crate) fn q_unchecked(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

// Acklam's rational approximation to the normal quantile (|rel err| < 1.2e-9),
// used only as the starting point for Halley refinement.
fn acklam_lower_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549671010005191e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Inverse of [`q_function`]: the `x` with `Q(x) = p`.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("q_inverse needs p in (0, 1), got {p}"));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Work in the upper tail so the residual Q(x) - p keeps relative precision.
    if p > 0.5 {
        return Ok(-q_inverse_upper(1.0 - p));
    }
    Ok(q_inverse_upper(p))
}

fn q_inverse_upper(p: f64) -> f64 {
    let mut x = -acklam_lower_quantile(p);
    for _ in 0..8 {
        let e = q_unchecked(x) - p;
        let u = e / normal_pdf(x);
        let step = u / (1.0 - 0.5 * x * u);
        x += step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric function
// ---------------------------------------------------------------------------

fn is_non_positive_integer(v: f64) -> bool {
    v <= 0.0 && v == v.round()
}

// Lanczos approximation (g = 7, n = 9).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments; poles return infinity.
pub(crate) fn gamma(x: f64) -> f64 {
    if is_non_positive_integer(x) {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

fn rgamma(x: f64) -> f64 {
    if is_non_positive_integer(x) {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// Direct Gauss series `Σ (a)ₙ(b)ₙ/(c)ₙ zⁿ/n!`, valid for `|z| < 1`
/// (or any `z` when `a` or `b` is a non-positive integer).
fn series(a: f64, b: f64, c: f64, z: f64, tol: &Tolerance) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..tol.max_terms {
        let k = n as f64;
        let ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        term *= ratio;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        // Bound the remaining tail by a geometric series at the current ratio.
        let rho = ratio.abs();
        let tail = if rho < 1.0 {
            term.abs() * rho / (1.0 - rho)
        } else {
            f64::INFINITY
        };
        let scale = sum.abs().max(f64::MIN_POSITIVE);
        if term.abs() <= tol.abs_tol * scale && tail <= tol.abs_tol * scale {
            return Ok(sum);
        }
    }
    Err(Error::Convergence {
        partial: sum,
        terms: tol.max_terms,
    })
}

/// `₂F₁(a, b; c; z)` for real `z ≤ 0` with the default [`Tolerance`].
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    hyp2f1_with(a, b, c, z, &Tolerance::default())
}

/// `₂F₁(a, b; c; z)` for real `z ≤ 0`.
///
/// The evaluation route depends on the argument:
/// * `-1/2 ≤ z ≤ 0`: direct power series;
/// * `-2 ≤ z < -1/2`: Pfaff transformation to `z/(z-1) ∈ [1/3, 2/3]`;
/// * `z < -2`: reflection to `1/z` (requires `b - a` non-integer), falling back to
///   Pfaff when the reflection is degenerate.
pub fn hyp2f1_with(a: f64, b: f64, c: f64, z: f64, tol: &Tolerance) -> Result<f64> {
    if ![a, b, c, z].iter().all(|v| v.is_finite()) {
        return domain("hyp2f1 arguments must be finite");
    }
    if is_non_positive_integer(c) {
        return domain(format!("hyp2f1 undefined for c = {c}"));
    }
    if z > 0.0 {
        return domain(format!("hyp2f1 is only provided for z <= 0, got {z}"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if is_non_positive_integer(a) || is_non_positive_integer(b) {
        // Terminating polynomial.
        let tol = Tolerance {
            max_terms: tol.max_terms.max(1 + a.abs().max(b.abs()) as usize),
            ..*tol
        };
        return series(a, b, c, z, &tol);
    }
    if z >= -0.5 {
        return series(a, b, c, z, tol);
    }
    let reflectable = (b - a) != (b - a).round();
    if z >= -2.0 || !reflectable {
        return pfaff(a, b, c, z, tol);
    }
    reflect_inverse(a, b, c, z, tol)
}

fn pfaff(a: f64, b: f64, c: f64, z: f64, tol: &Tolerance) -> Result<f64> {
    let w = z / (z - 1.0);
    let scale = (1.0 - z).powf(-a);
    series(a, c - b, c, w, tol)
        .map(|s| scale * s)
        .map_err(|e| match e {
            Error::Convergence { partial, terms } => Error::Convergence {
                partial: scale * partial,
                terms,
            },
            other => other,
        })
}

fn reflect_inverse(a: f64, b: f64, c: f64, z: f64, tol: &Tolerance) -> Result<f64> {
    let mz = -z;
    let inv = 1.0 / z;
    let gc = gamma(c);
    let coef_a = gc * gamma(b - a) * rgamma(b) * rgamma(c - a);
    let coef_b = gc * gamma(a - b) * rgamma(a) * rgamma(c - b);
    let mut value = 0.0;
    if coef_a != 0.0 {
        value += coef_a * mz.powf(-a) * series(a, a - c + 1.0, a - b + 1.0, inv, tol)?;
    }
    if coef_b != 0.0 {
        value += coef_b * mz.powf(-b) * series(b, b - c + 1.0, b - a + 1.0, inv, tol)?;
    }
    Ok(value)
}
