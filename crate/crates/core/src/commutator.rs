//! Generating Hamiltonian of the flow commutator `f_s g_t f_s⁻¹ g_t⁻¹`.
//!
//! With `f_s`, `g_t` the time-`s` and time-`t` maps of `F` and `G`, the path
//! `τ ↦ f_{τs} g_t f_{τs}⁻¹ g_t⁻¹` is generated by
//!
//! ```text
//! L_{s,t}(x, τ) = s·F(x) − s·F(g_t⁻¹ f_{τs}⁻¹ x)
//! ```
//!
//! and `L_{s,t} = st{F,G} + K_{s,t}` with `‖K_{s,t}‖ / st → 0`.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{poisson, sample, FieldExpr, GridSample, Point2};
use crate::flow::{FlowComposition, FlowFactor, FlowParams, FlowSpec};

/// Resolution of the zero-mean check.
const MEAN_CHECK_N: usize = 256;
const MEAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct CommutatorPath {
    f: FieldExpr,
    g: FieldExpr,
    s: f64,
    t: f64,
    f_flow: Arc<FlowSpec>,
    g_flow: Arc<FlowSpec>,
    bracket: FieldExpr,
}

impl CommutatorPath {
    /// `F`, `G` must have zero mean on the torus. `s = 0` or `t = 0` gives
    /// the constant path.
    pub fn new(f: FieldExpr, g: FieldExpr, s: f64, t: f64, params: FlowParams) -> Result<Self> {
        if f.domain() != g.domain() {
            return Err(Error::precondition("F and G live on different domains"));
        }
        if !(s >= 0.0 && t >= 0.0 && s.is_finite() && t.is_finite()) {
            return Err(Error::precondition("s and t must be finite and non-negative"));
        }
        if f.domain().is_torus() {
            for (name, h) in [("F", &f), ("G", &g)] {
                let mean = sample(h, MEAN_CHECK_N).mean();
                if mean.abs() > MEAN_TOL {
                    return Err(Error::precondition(format!(
                        "{name} must have zero mean, found {mean:e}"
                    )));
                }
            }
        }
        let f_flow = Arc::new(FlowSpec::new(f.clone(), params)?);
        let g_flow = Arc::new(FlowSpec::new(g.clone(), params)?);
        let bracket = poisson(&f, &g);
        Ok(CommutatorPath {
            f,
            g,
            s,
            t,
            f_flow,
            g_flow,
            bracket,
        })
    }

    pub fn f(&self) -> &FieldExpr {
        &self.f
    }

    pub fn g(&self) -> &FieldExpr {
        &self.g
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn bracket(&self) -> &FieldExpr {
        &self.bracket
    }

    pub fn f_flow(&self) -> &Arc<FlowSpec> {
        &self.f_flow
    }

    pub fn g_flow(&self) -> &Arc<FlowSpec> {
        &self.g_flow
    }

    /// `L_{s,t}(x, τ)`.
    pub fn eval_l(&self, x: Point2, tau: f64) -> Result<f64> {
        check_tau(tau)?;
        Ok(self.eval_l_many(x, &[tau])?[0])
    }

    /// `L_{s,t}(x, τ_k)` for increasing `τ_k`, sharing one `F`-trajectory.
    pub fn eval_l_many(&self, x: Point2, taus: &[f64]) -> Result<Vec<f64>> {
        if self.s == 0.0 {
            return Ok(vec![0.0; taus.len()]);
        }
        let times: Vec<f64> = taus.iter().map(|tau| -tau * self.s).collect();
        let inner = self.f_flow.trajectory(x, &times)?;
        let fx = self.f.evaluate(x);
        inner
            .into_iter()
            .map(|y| {
                let z = self.g_flow.advance(y, -self.t)?;
                Ok(self.s * fx - self.s * self.f.evaluate(z))
            })
            .collect()
    }

    /// The time-one map of the path as a word in primitive flows.
    pub fn endpoint_word(&self) -> FlowComposition {
        FlowComposition::new(vec![
            FlowFactor::forward(&self.f_flow, self.s),
            FlowFactor::forward(&self.g_flow, self.t),
            FlowFactor::backward(&self.f_flow, self.s),
            FlowFactor::backward(&self.g_flow, self.t),
        ])
        .expect("non-empty word")
    }

    /// Lattice samples of `L(·, τ_k)` at `τ_k = k / τ_samples`,
    /// `k = 0..=τ_samples`.
    pub fn l_grids(&self, n: usize, tau_samples: usize) -> Result<Vec<GridSample>> {
        let taus = tau_nodes(tau_samples);
        let domain = self.f.domain();
        let rows: Vec<Vec<f64>> = (0..n * n)
            .into_par_iter()
            .map(|idx| self.eval_l_many(domain.lattice_point(idx / n, idx % n, n), &taus))
            .collect::<Result<_>>()?;
        Ok((0..taus.len())
            .map(|k| GridSample::new(n, rows.iter().map(|r| r[k]).collect(), domain))
            .collect())
    }

    /// Lattice sup of `|L_{s,t}(x, τ) − st{F,G}(x)|`.
    pub fn residual(&self, n: usize, tau_samples: usize) -> Result<ResidualReport> {
        if n < 64 {
            return Err(Error::precondition("residual resolution must be at least 64"));
        }
        if tau_samples < 8 {
            return Err(Error::precondition("at least 8 tau samples required"));
        }
        let taus = tau_nodes(tau_samples);
        let domain = self.f.domain();
        let st = self.s * self.t;
        let sup = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let x = domain.lattice_point(idx / n, idx % n, n);
                let target = st * self.bracket.evaluate(x);
                let ls = self.eval_l_many(x, &taus)?;
                Ok(ls.iter().map(|l| (l - target).abs()).fold(0.0, f64::max))
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let ratio = if st > 0.0 { sup / st } else { 0.0 };
        Ok(ResidualReport {
            s: self.s,
            t: self.t,
            sup_residual: sup,
            ratio,
            n,
            tau_samples,
        })
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::precondition(format!("tau must lie in [0, 1], got {tau}")));
    }
    Ok(())
}

/// `k / m` for `k = 0..=m`.
pub fn tau_nodes(m: usize) -> Vec<f64> {
    (0..=m).map(|k| k as f64 / m as f64).collect()
}

/// `‖K_{s,t}‖` on a lattice, and its ratio to `st`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub s: f64,
    pub t: f64,
    pub sup_residual: f64,
    pub ratio: f64,
    pub n: usize,
    pub tau_samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicScan {
    pub k_min: u32,
    pub reports: Vec<ResidualReport>,
    /// Least-squares slope of `log₂ ratio` against `k`; `None` when some
    /// ratio vanishes.
    pub decay_exponent: Option<f64>,
}

impl DyadicScan {
    pub const CSV_HEADER: [&'static str; 7] =
        ["k", "s", "t", "sup_residual", "ratio", "N", "tau_samples"];

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.reports
            .iter()
            .enumerate()
            .map(|(i, r)| {
                vec![
                    (self.k_min as usize + i).to_string(),
                    r.s.to_string(),
                    r.t.to_string(),
                    r.sup_residual.to_string(),
                    r.ratio.to_string(),
                    r.n.to_string(),
                    r.tau_samples.to_string(),
                ]
            })
            .collect()
    }
}

/// Residual reports for `s = t = 2^{-k}`, `k = k_min..=k_max`.
pub fn dyadic_scan(
    f: &FieldExpr,
    g: &FieldExpr,
    k_min: u32,
    k_max: u32,
    n: usize,
    tau_samples: usize,
    params: FlowParams,
) -> Result<DyadicScan> {
    if !(1 <= k_min && k_min < k_max && k_max <= 12) {
        return Err(Error::precondition(format!(
            "need 1 <= kmin < kmax <= 12, got {k_min}..{k_max}"
        )));
    }
    let mut reports = Vec::new();
    for k in k_min..=k_max {
        let h = 0.5f64.powi(k as i32);
        let cp = CommutatorPath::new(f.clone(), g.clone(), h, h, params)?;
        reports.push(cp.residual(n, tau_samples)?);
    }
    let decay_exponent = fit_log2_slope(k_min, &reports);
    Ok(DyadicScan {
        k_min,
        reports,
        decay_exponent,
    })
}

fn fit_log2_slope(k_min: u32, reports: &[ResidualReport]) -> Option<f64> {
    if reports.len() < 2 || reports.iter().any(|r| r.ratio <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = (0..reports.len()).map(|i| (k_min as usize + i) as f64).collect();
    let ys: Vec<f64> = reports.iter().map(|r| r.ratio.log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}
