//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! The error of a panel is estimated by the Kronrod/Gauss difference.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

/// Default absolute tolerance for expectations.
pub const ABS_TOL: f64 = 1e-10;

/// Default maximum bisection depth.
pub const MAX_DEPTH: u32 = 60;

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

// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, depth: u32) -> Self {
        let (value, error) = kronrod15(f, a, b);
        Self { a, b, value, error, depth }
    }
}

/// Panels allowed before giving up.
const MAX_PANELS: usize = 20_000;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`, bisecting the
/// panel with the largest error estimate until the summed estimate meets
/// `tol`. No panel is bisected more than `max_depth` times.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::invalid(format!("bad integration interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let mut panels = vec![Panel::new(&f, a, b, 0)];
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::numeric("adaptive quadrature", format!("non-finite integrand on [{a}, {b}]")));
        }
        if error <= tol.max(50.0 * f64::EPSILON * value.abs()) {
            return Ok(value);
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        if p.depth >= max_depth || panels.len() + 2 > MAX_PANELS {
            return Err(Error::numeric(
                "adaptive quadrature",
                format!(
                    "no convergence: panel [{:.6e}, {:.6e}] at depth {} with error {:.3e}; \
                     total error {error:.3e} exceeds tolerance {tol:.1e} ({} panels)",
                    p.a,
                    p.b,
                    p.depth,
                    p.error,
                    panels.len() + 1
                ),
            ));
        }
        let mid = 0.5 * (p.a + p.b);
        panels.push(Panel::new(&f, p.a, mid, p.depth + 1));
        panels.push(Panel::new(&f, mid, p.b, p.depth + 1));
    }
}

/// [`integrate`] with the crate defaults.
pub fn integrate_default<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate(f, a, b, ABS_TOL, MAX_DEPTH)
}
