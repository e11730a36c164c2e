//! Smooth plateau profile and its exact derivatives.
//!
//! The transition profile is `s(t) = φ(t) / (φ(t) + φ(1 - t))` with
//! `φ(t) = exp(-1/t)` for `t > 0` and `0` otherwise. It is `C^∞`, equals `0`
//! for `t ≤ 0` and `1` for `t ≥ 1`. Derivatives of any order are computed by
//! truncated Taylor-series arithmetic, so they are exact up to roundoff.

use std::sync::OnceLock;

/// Below this distance from the ends of `[0, 1]` the profile differs from
/// its limit by less than `exp(-400)`; the jet is snapped to the limit there.
const FLAT_EDGE: f64 = 2.5e-3;

/// Highest derivative order with a cached sup bound.
const MAX_CACHED_ORDER: usize = 10;

/// Value of `d^order s / dt^order` at `t`.
pub fn smoothstep_derivative(t: f64, order: u32) -> f64 {
    if t <= FLAT_EDGE {
        return 0.0;
    }
    if t >= 1.0 - FLAT_EDGE {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    let n = order as usize;
    let jet = smoothstep_jet(t, n);
    jet[n] * factorial(n)
}

/// Taylor coefficients `s^{(k)}(t) / k!` for `k = 0..=n`, valid for `t` in
/// the open transition interval.
fn smoothstep_jet(t: f64, n: usize) -> Vec<f64> {
    // -1/(t + e) = sum_k -(-1)^k e^k / t^(k+1)
    let left_exponent: Vec<f64> = (0..=n)
        .map(|k| {
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            sign / t.powi(k as i32 + 1)
        })
        .collect();
    // -1/(1 - t - e) = sum_k -e^k / (1-t)^(k+1)
    let u = 1.0 - t;
    let right_exponent: Vec<f64> = (0..=n).map(|k| -1.0 / u.powi(k as i32 + 1)).collect();

    let a = series_exp(&left_exponent);
    let b = series_exp(&right_exponent);
    let denom: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    series_div(&a, &denom)
}

fn series_exp(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut e = vec![0.0; n];
    e[0] = u[0].exp();
    for k in 1..n {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += j as f64 * u[j] * e[k - j];
        }
        e[k] = acc / k as f64;
    }
    e
}

fn series_div(num: &[f64], den: &[f64]) -> Vec<f64> {
    let n = num.len();
    let mut c = vec![0.0; n];
    for k in 0..n {
        let mut acc = num[k];
        for j in 1..=k {
            acc -= den[j] * c[k - j];
        }
        c[k] = acc / den[0];
    }
    c
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Upper bound on `sup_t |s^{(order)}(t)|`.
///
/// Obtained from a dense scan of the transition interval padded by 5%; the
/// profile is analytic on the open interval so the scan sees every extremum.
pub fn smoothstep_sup(order: u32) -> f64 {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = CACHE.get_or_init(|| {
        (0..=MAX_CACHED_ORDER as u32)
            .map(|k| {
                if k == 0 {
                    return 1.0;
                }
                let samples = 20_000;
                let max = (1..samples)
                    .map(|i| smoothstep_derivative(i as f64 / samples as f64, k).abs())
                    .fold(0.0, f64::max);
                max * 1.05
            })
            .collect()
    });
    match table.get(order as usize) {
        Some(v) => *v,
        None => {
            let samples = 20_000;
            (1..samples)
                .map(|i| smoothstep_derivative(i as f64 / samples as f64, order).abs())
                .fold(0.0, f64::max)
                * 1.05
        }
    }
}
