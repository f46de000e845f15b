//! Globally adaptive Gauss-Kronrod (G7/K15) integration on finite intervals.
//!
//! Panels are kept in a max-heap keyed on their local error estimate; the
//! worst panel is bisected until the summed error estimate meets
//! `max(abs_tol, rel_tol·|value|)`. The per-panel error estimate is the
//! QUADPACK rescaling of `|K15 − G7|`. Panels at `max_depth` are frozen.
//! Final sums are taken over panels in left-to-right order, so results are
//! bit-reproducible for identical inputs.

// Nodes and weights are kept at full published precision.
#![allow(clippy::excessive_precision)]

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::convert::Infallible;

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

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Hard cap on bisections, independent of `max_depth`.
const MAX_SUBDIVISIONS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-11,
            rel_tol: 1e-11,
            max_depth: 40,
        }
    }
}

impl QuadOptions {
    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Absolute error estimate.
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("tolerances must be positive (abs_tol = {abs_tol}, rel_tol = {rel_tol})")]
    InvalidTolerance { abs_tol: f64, rel_tol: f64 },
    #[error("integrand is not finite at x = {abscissa:e} (value {value})")]
    NonFinite { abscissa: f64, value: f64 },
}

/// Failure of a fallible integrand or of the integrator itself.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TryQuadError<E> {
    #[error(transparent)]
    Quad(QuadError),
    #[error("integrand failed at x = {abscissa:e}: {source}")]
    Integrand { abscissa: f64, source: E },
}

/// Integrate `f` over `[lo, hi]`.
pub fn integrate<F>(mut f: F, lo: f64, hi: f64, opts: &QuadOptions) -> Result<QuadResult, QuadError>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_points(|x| Ok::<f64, Infallible>(f(x)), &[lo, hi], opts).map_err(|e| match e {
        TryQuadError::Quad(q) => q,
        TryQuadError::Integrand { source, .. } => match source {},
    })
}

/// Integrate a fallible integrand over `[lo, hi]`.
pub fn try_integrate<F, E>(
    f: F,
    lo: f64,
    hi: f64,
    opts: &QuadOptions,
) -> Result<QuadResult, TryQuadError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    try_integrate_points(f, &[lo, hi], opts)
}

/// Integrate over `[points[0], points[last]]`, starting from one panel per
/// consecutive pair of breakpoints.
pub fn try_integrate_points<F, E>(
    mut f: F,
    points: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult, TryQuadError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    if !(opts.abs_tol > 0.0 && opts.rel_tol > 0.0) {
        return Err(TryQuadError::Quad(QuadError::InvalidTolerance {
            abs_tol: opts.abs_tol,
            rel_tol: opts.rel_tol,
        }));
    }
    let (first, last) = match (points.first(), points.last()) {
        (Some(&a), Some(&b)) if points.len() >= 2 => (a, b),
        _ => {
            return Err(TryQuadError::Quad(QuadError::InvalidInterval {
                lo: f64::NAN,
                hi: f64::NAN,
            }))
        }
    };
    for w in points.windows(2) {
        if !(w[0].is_finite() && w[1].is_finite() && w[0] <= w[1]) {
            return Err(TryQuadError::Quad(QuadError::InvalidInterval { lo: first, hi: last }));
        }
    }
    if first == last {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        });
    }

    let mut evaluations = 0usize;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut value_sum = 0.0;
    let mut error_sum = 0.0;
    let mut frozen_error = 0.0;
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let p = Panel::evaluate(&mut f, w[0], w[1], 0, &mut evaluations)?;
        value_sum += p.value;
        error_sum += p.error;
        heap.push(p);
    }

    let mut subdivisions = 0usize;
    let mut converged = false;
    loop {
        let target = opts.target(value_sum);
        if error_sum <= target {
            converged = true;
            break;
        }
        if frozen_error > target || subdivisions >= MAX_SUBDIVISIONS {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if worst.depth >= opts.max_depth || mid <= worst.lo || mid >= worst.hi {
            frozen_error += worst.error;
            frozen.push(worst);
            continue;
        }
        let left = Panel::evaluate(&mut f, worst.lo, mid, worst.depth + 1, &mut evaluations)?;
        let right = Panel::evaluate(&mut f, mid, worst.hi, worst.depth + 1, &mut evaluations)?;
        value_sum += left.value + right.value - worst.value;
        error_sum += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }

    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error_estimate: f64 = panels.iter().map(|p| p.error).sum();
    Ok(QuadResult {
        value,
        error_estimate,
        evaluations,
        converged: converged && error_estimate <= opts.target(value),
    })
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Largest error first; leftmost first among equals.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

impl Panel {
    fn evaluate<F, E>(
        f: &mut F,
        lo: f64,
        hi: f64,
        depth: u32,
        evaluations: &mut usize,
    ) -> Result<Panel, TryQuadError<E>>
    where
        F: FnMut(f64) -> Result<f64, E>,
    {
        let (value, error) = kronrod15(f, lo, hi)?;
        *evaluations += 15;
        Ok(Panel {
            lo,
            hi,
            value,
            error,
            depth,
        })
    }
}

fn sample<F, E>(f: &mut F, x: f64) -> Result<f64, TryQuadError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let v = f(x).map_err(|source| TryQuadError::Integrand {
        abscissa: x,
        source,
    })?;
    if !v.is_finite() {
        return Err(TryQuadError::Quad(QuadError::NonFinite {
            abscissa: x,
            value: v,
        }));
    }
    Ok(v)
}

/// One G7/K15 panel: Kronrod value and rescaled error estimate.
fn kronrod15<F, E>(f: &mut F, lo: f64, hi: f64) -> Result<(f64, f64), TryQuadError<E>>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = sample(f, center)?;
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = sample(f, center - dx)?;
        let f2 = sample(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * libm::pow(200.0 * err / res_asc, 1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> QuadOptions {
        QuadOptions::default()
    }

    #[test]
    fn constant_is_exact() {
        let r = integrate(|_| 1.0, 0.0, 1.0, &opts()).unwrap();
        assert!(r.converged);
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn cubic_polynomial() {
        let r = integrate(|x| x * x, 1.0, 2.0, &opts()).unwrap();
        assert!(r.converged);
        assert!((r.value - 7.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_interval_is_exact_zero() {
        let r = integrate(|x| x, 2.5, 2.5, &opts()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
        assert_eq!(r.evaluations, 0);
    }

    #[test]
    fn reversed_interval_is_rejected() {
        assert!(matches!(
            integrate(|x| x, 2.0, 1.0, &opts()),
            Err(QuadError::InvalidInterval { .. })
        ));
        let bad = QuadOptions {
            abs_tol: 0.0,
            ..opts()
        };
        assert!(matches!(
            integrate(|x| x, 0.0, 1.0, &bad),
            Err(QuadError::InvalidTolerance { .. })
        ));
    }

    #[test]
    fn non_finite_sample_names_abscissa() {
        let err = integrate(|x| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0, &opts()).unwrap_err();
        match err {
            QuadError::NonFinite { abscissa, .. } => assert!(abscissa > 0.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn integrand_errors_propagate() {
        let r = try_integrate(
            |x| if x < 0.25 { Err("boom") } else { Ok(x) },
            0.0,
            1.0,
            &opts(),
        );
        assert!(matches!(r, Err(TryQuadError::Integrand { source: "boom", .. })));
    }

    #[test]
    fn depth_limit_reports_non_convergence() {
        let tight = QuadOptions {
            max_depth: 2,
            ..opts()
        };
        let r = integrate(libm::sqrt, 0.0, 1.0, &tight).unwrap();
        assert!(!r.converged);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn sqrt_endpoint_singularity() {
        let r = integrate(libm::sqrt, 0.0, 1.0, &opts()).unwrap();
        assert!(r.converged);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn breakpoints_partition_the_interval() {
        let whole = integrate(libm::exp, 0.0, 3.0, &opts()).unwrap();
        let split =
            try_integrate_points(|x| Ok::<_, Infallible>(libm::exp(x)), &[0.0, 1.0, 1.0, 3.0], &opts())
                .unwrap();
        assert!((whole.value - split.value).abs() < 1e-12);
    }
}
