//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            relative: 1e-10,
            absolute: 1e-14,
            max_intervals: 400,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = fc * WG[3];
    let mut kron = fc * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kron * half,
        error: ((kron - gauss) * half).abs(),
    }
}

/// Integral of `f` over `[a, b]` (either orientation).
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut panels = vec![kronrod(&mut f, a, b)];
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::Domain(format!(
                "integrand is not finite on [{a:e}, {b:e}]"
            )));
        }
        if error <= tol.absolute.max(tol.relative * value.abs()) {
            return Ok(value);
        }
        if panels.len() >= tol.max_intervals {
            return Err(Error::NoConvergence {
                what: "adaptive quadrature",
                iterations: panels.len(),
                detail: format!("estimated error {error:e} for value {value:e}"),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid == p.a || mid == p.b {
            // Interval exhausted in floating point; accept its estimate.
            return Ok(value);
        }
        panels.push(kronrod(&mut f, p.a, mid));
        panels.push(kronrod(&mut f, mid, p.b));
    }
}

/// Single 15-point Kronrod rule on `[a, b]`; exact for polynomials up to degree 22.
pub fn kronrod15<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    kronrod(&mut f, a, b).value
}

struct VecPanel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

fn kronrod_vec<F: FnMut(f64, &mut [f64])>(f: &mut F, dim: usize, a: f64, b: f64) -> VecPanel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut buf = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    let mut kron = vec![0.0; dim];
    let mut add = |x: f64, wk: f64, wg: f64, buf: &mut [f64]| {
        f(x, buf);
        for k in 0..dim {
            kron[k] += wk * buf[k];
            gauss[k] += wg * buf[k];
        }
    };
    add(center, WGK[7], WG[3], &mut buf);
    for j in 0..7 {
        let dx = half * XGK[j];
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        add(center - dx, WGK[j], wg, &mut buf);
        add(center + dx, WGK[j], wg, &mut buf);
    }
    let error = kron
        .iter()
        .zip(&gauss)
        .map(|(k, g)| ((k - g) * half).abs())
        .sum();
    VecPanel {
        a,
        b,
        value: kron.into_iter().map(|k| k * half).collect(),
        error,
    }
}

/// Vector-valued adaptive integral over consecutive panels `breaks[i]..breaks[i+1]`.
///
/// `f(x, out)` fills all `dim` components at once. Refinement stops when the
/// summed error estimate is below `max(absolute, relative * sum_k |I_k|)`.
pub fn integrate_vec<F: FnMut(f64, &mut [f64])>(
    mut f: F,
    dim: usize,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Vec<f64>> {
    let mut panels: Vec<VecPanel> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod_vec(&mut f, dim, w[0], w[1]))
        .collect();
    let max_panels = tol.max_intervals.max(2 * panels.len());
    loop {
        let mut value = vec![0.0; dim];
        let mut error = 0.0;
        for p in &panels {
            error += p.error;
            for k in 0..dim {
                value[k] += p.value[k];
            }
        }
        if value.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("vector integrand is not finite".into()));
        }
        let scale: f64 = value.iter().map(|v| v.abs()).sum();
        if error <= tol.absolute.max(tol.relative * scale) || panels.is_empty() {
            return Ok(value);
        }
        if panels.len() >= max_panels {
            return Err(Error::NoConvergence {
                what: "adaptive vector quadrature",
                iterations: panels.len(),
                detail: format!("estimated error {error:e} against scale {scale:e}"),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid == p.a || mid == p.b {
            return Ok(value);
        }
        panels.push(kronrod_vec(&mut f, dim, p.a, mid));
        panels.push(kronrod_vec(&mut f, dim, mid, p.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| 3.0 * x * x + 1.0, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((v - 10.0).abs() < 1e-13);
        let v = integrate(|x| x.powi(20), -1.0, 1.0, Tolerance::default()).unwrap();
        assert!((v - 2.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn reversed_orientation() {
        let f = |x: f64| x.exp();
        let fwd = integrate(f, 0.0, 1.0, Tolerance::default()).unwrap();
        let bwd = integrate(f, 1.0, 0.0, Tolerance::default()).unwrap();
        assert!((fwd + bwd).abs() < 1e-15);
        assert!((fwd - (std::f64::consts::E - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn peaked_integrand_is_refined() {
        // integral of 1/(1e-4 + x^2) over [-1, 1] = 2 atan(100) / 1e-2
        let v = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, Tolerance::default()).unwrap();
        let exact = 2.0 * 100f64.atan() / 1e-2;
        assert!(((v - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        assert!(integrate(|_| f64::NAN, 0.0, 1.0, Tolerance::default()).is_err());
    }

    #[test]
    fn vector_integral_with_jump() {
        let step = |x: f64, out: &mut [f64]| {
            out[0] = if x < 0.3 { 1.0 } else { 2.0 };
            out[1] = x.sin();
        };
        let v = integrate_vec(step, 2, &[0.0, 0.3, 1.0], Tolerance::default()).unwrap();
        assert!((v[0] - 1.7).abs() < 1e-14);
        assert!((v[1] - (1.0 - 1f64.cos())).abs() < 1e-13);
    }

    #[test]
    fn fixed_rule_degree() {
        let v = kronrod15(|x| x.powi(22), 0.0, 1.0);
        assert!((v - 1.0 / 23.0).abs() < 1e-15);
    }
}
