//! Hofer-type lengths of explicit paths.
//!
//! `ρ⁺` and `ρ` are infima over all generators of a path class and cannot
//! be computed. Every length here belongs to one explicit generator and is
//! therefore an upper bound for the corresponding infimum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::commutator::{tau_nodes, CommutatorPath};
use crate::error::{Error, Result};
use crate::field::grid::newton_refine_max;
use crate::field::{extrema, poisson, sample, sup_dist, Domain, FieldExpr, GridSample, Point2};
use crate::flow::{FlowParams, FlowSpec};

/// Trapezoid lengths of a path generator over `τ ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLengthReport {
    /// `∫ max_x L(x, τ) dτ`, an upper bound for `ρ⁺`.
    pub positive_length: f64,
    /// `∫ (max_x L − min_x L) dτ`, an upper bound for `ρ`.
    pub full_length: f64,
    pub tau_samples: usize,
    pub n: usize,
}

/// Trapezoid rule on the uniform nodes `k / (len − 1)`.
pub fn trapezoid(values: &[f64]) -> f64 {
    let m = values.len() - 1;
    if m == 0 {
        return values[0];
    }
    let inner: f64 = values[1..m].iter().sum();
    (inner + 0.5 * (values[0] + values[m])) / m as f64
}

fn lengths_of(grids: &[GridSample], tau_samples: usize) -> PathLengthReport {
    let max: Vec<f64> = grids.iter().map(|g| g.max().0).collect();
    let osc: Vec<f64> = grids.iter().map(|g| g.max().0 - g.min().0).collect();
    PathLengthReport {
        positive_length: trapezoid(&max),
        full_length: trapezoid(&osc),
        tau_samples,
        n: grids[0].resolution(),
    }
}

/// Lengths of the commutator path generated by `L_{s,t}`.
pub fn path_length(cp: &CommutatorPath, n: usize, tau_samples: usize) -> Result<PathLengthReport> {
    if tau_samples < 8 {
        return Err(Error::precondition("at least 8 tau samples required"));
    }
    Ok(lengths_of(&cp.l_grids(n, tau_samples)?, tau_samples))
}

/// Lengths of the path `τ ↦ ψ_H^τ` of an autonomous generator; both
/// integrands are constant in `τ`.
pub fn autonomous_length(h: &FieldExpr, n: usize) -> PathLengthReport {
    let e = extrema(h, n, 20);
    PathLengthReport {
        positive_length: trapezoid(&[e.max; 9]),
        full_length: trapezoid(&[e.max - e.min; 9]),
        tau_samples: 8,
        n,
    }
}

/// Nodes and weights of `m`-point Gauss–Legendre quadrature on `[0, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for i in 0..m {
        // Newton iteration on P_m from the Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 0 { 1.0 } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * pm - pm1) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(0.5 * (1.0 - x));
        weights.push(1.0 / ((1.0 - x * x) * dp * dp));
    }
    let mut pairs: Vec<(f64, f64)> = nodes.into_iter().zip(weights).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Controls for [`lemma2_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Settings {
    pub n: usize,
    pub tau_samples: usize,
    /// Newton iterations from each lattice peak.
    pub refine_iters: usize,
    /// Lattice peaks refined per maximum.
    pub starts: usize,
    /// Random points for the integral identity.
    pub identity_points: usize,
    /// Gauss–Legendre nodes for the integral along each trajectory.
    pub identity_nodes: usize,
    pub seed: u64,
    pub params: FlowParams,
}

impl Default for Lemma2Settings {
    fn default() -> Self {
        Lemma2Settings {
            n: 32,
            tau_samples: 8,
            refine_iters: 30,
            starts: 4,
            identity_points: 100,
            identity_nodes: 64,
            seed: 0,
            params: FlowParams::default(),
        }
    }
}

/// The numerical chain behind `ρ⁺([ψ_H, ψ_K]) ≤ max{H,K}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma2Report {
    /// Refined `max_x L(x, τ)` at `τ = k / tau_samples`.
    pub max_l_per_tau: Vec<f64>,
    pub max_over_tau_of_max_l: f64,
    pub min_over_tau_of_max_l: f64,
    /// `max(H∘ψ_K − H)`.
    pub max_h_pullback_diff: f64,
    /// `max{H,K}`.
    pub max_bracket: f64,
    /// Largest deviation from `H(ψ_K x) − H(x) = ∫₀¹ {H,K}(ψ_K^τ x) dτ`.
    pub identity_residual: f64,
}

impl Lemma2Report {
    pub fn tau_spread(&self) -> f64 {
        self.max_over_tau_of_max_l - self.min_over_tau_of_max_l
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = vec![
            row("max_over_tau_of_max_L", self.max_over_tau_of_max_l),
            row("min_over_tau_of_max_L", self.min_over_tau_of_max_l),
            row("max_H_pullback_diff", self.max_h_pullback_diff),
            row("max_bracket", self.max_bracket),
            row("identity_residual", self.identity_residual),
        ];
        let m = self.max_l_per_tau.len() - 1;
        for (k, v) in self.max_l_per_tau.iter().enumerate() {
            rows.push(row(&format!("max_L_tau_{}", k as f64 / m as f64), *v));
        }
        rows
    }
}

fn row(name: &str, v: f64) -> Vec<String> {
    vec![name.to_string(), v.to_string()]
}

/// Refined maximum of an expensive function sampled on a lattice.
fn refined_max<F>(grid: &GridSample, f: F, settings: &Lemma2Settings) -> Result<f64>
where
    F: Fn(Point2) -> Result<f64> + Sync,
{
    let domain = grid.domain();
    let (hq, _) = domain.spacing(grid.resolution());
    let starts = grid.local_maxima(settings.starts);
    let best = starts
        .par_iter()
        .map(|&x0| {
            let v0 = f(x0)?;
            Ok(newton_refine_max(&f, domain, x0, v0, hq, settings.refine_iters)?.0)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(best.into_iter().fold(grid.max().0, f64::max))
}

/// Computes, for zero-mean `H` and `K`: the refined maximum of the
/// commutator generator `L(·, τ)` (with `s = t = 1`) at every `τ` node,
/// `max(H∘ψ_K − H)`, `max{H,K}` and the residual of the integral identity
/// along `K`-trajectories.
pub fn lemma2_check(h: &FieldExpr, k: &FieldExpr, settings: &Lemma2Settings) -> Result<Lemma2Report> {
    let cp = CommutatorPath::new(h.clone(), k.clone(), 1.0, 1.0, settings.params)?;
    let n = settings.n;
    let taus = tau_nodes(settings.tau_samples);
    let grids = cp.l_grids(n, settings.tau_samples)?;
    let mut max_l_per_tau = Vec::with_capacity(taus.len());
    for (grid, &tau) in grids.iter().zip(&taus) {
        max_l_per_tau.push(refined_max(grid, |x| cp.eval_l(x, tau), settings)?);
    }

    let k_flow = cp.g_flow();
    let diff = |x: Point2| -> Result<f64> { Ok(h.evaluate(k_flow.advance(x, 1.0)?) - h.evaluate(x)) };
    let diff_grid = GridSample::try_from_fn(n, h.domain(), diff)?;
    let max_h_pullback_diff = refined_max(&diff_grid, diff, settings)?;

    let bracket = poisson(h, k);
    let max_bracket = extrema(&bracket, 256.max(n), 20).max;

    let identity_residual = identity_residual(h, k, k_flow, settings)?;

    let max_over = max_l_per_tau.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_over = max_l_per_tau.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Lemma2Report {
        max_l_per_tau,
        max_over_tau_of_max_l: max_over,
        min_over_tau_of_max_l: min_over,
        max_h_pullback_diff,
        max_bracket,
        identity_residual,
    })
}

fn identity_residual(
    h: &FieldExpr,
    k: &FieldExpr,
    k_flow: &FlowSpec,
    settings: &Lemma2Settings,
) -> Result<f64> {
    let bracket = poisson(h, k);
    let (nodes, weights) = gauss_legendre(settings.identity_nodes);
    let mut times = nodes.clone();
    times.push(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let points: Vec<Point2> = (0..settings.identity_points)
        .map(|_| Point2::new(rng.gen(), rng.gen()))
        .collect();
    let residuals = points
        .par_iter()
        .map(|&x| {
            let traj = k_flow.trajectory(x, &times)?;
            let integral: f64 = traj[..nodes.len()]
                .iter()
                .zip(&weights)
                .map(|(y, w)| w * bracket.evaluate(*y))
                .sum();
            let lhs = h.evaluate(traj[nodes.len()]) - h.evaluate(x);
            Ok((lhs - integral).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(residuals.into_iter().fold(0.0, f64::max))
}

/// `|ℓ⁺(ψ_{σH}) − ℓ⁺(ψ_{σK})|` for the autonomous paths of `σH` and `σK`,
/// against `2‖σH − σK‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hof2Report {
    pub difference: f64,
    pub bound: f64,
}

impl Hof2Report {
    pub fn holds(&self) -> bool {
        self.difference <= self.bound
    }
}

pub fn hof2_check(h: &FieldExpr, k: &FieldExpr, s_scale: f64) -> Result<Hof2Report> {
    check_zero_mean(h, "H")?;
    check_zero_mean(k, "K")?;
    let (hs, ks) = (h.scale(s_scale), k.scale(s_scale));
    let n = 256;
    let difference = (autonomous_length(&hs, n).positive_length
        - autonomous_length(&ks, n).positive_length)
        .abs();
    let bound = 2.0 * sup_dist(&hs, &ks, n, 20) + 1e-6;
    Ok(Hof2Report { difference, bound })
}

fn check_zero_mean(f: &FieldExpr, name: &str) -> Result<()> {
    if f.domain().is_torus() {
        let mean = sample(f, 256).mean();
        if mean.abs() > 1e-10 {
            return Err(Error::precondition(format!("{name} must have zero mean, found {mean:e}")));
        }
    }
    Ok(())
}

/// `|ℓ⁺(ψ_H) − ℓ⁺(ψ_K)|` against the lengths of the explicit generators
/// `K∘ψ_H^τ − H` of `ψ_H^{-τ}ψ_K^τ` and `H∘ψ_K^τ − K` of `ψ_K^{-τ}ψ_H^τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hof1Report {
    pub difference: f64,
    /// Positive lengths of the two difference paths.
    pub forward_positive: f64,
    pub backward_positive: f64,
    /// Full length of the first difference path.
    pub forward_full: f64,
}

impl Hof1Report {
    /// `max` of the two positive lengths.
    pub fn bound(&self) -> f64 {
        self.forward_positive.max(self.backward_positive)
    }
}

pub fn hof1_check(
    h: &FieldExpr,
    k: &FieldExpr,
    n: usize,
    tau_samples: usize,
    params: FlowParams,
) -> Result<Hof1Report> {
    let h_flow = FlowSpec::new(h.clone(), params)?;
    let k_flow = FlowSpec::new(k.clone(), params)?;
    let forward = difference_path(h, k, &h_flow, n, tau_samples)?;
    let backward = difference_path(k, h, &k_flow, n, tau_samples)?;
    let difference = (autonomous_length(h, n.max(64)).positive_length
        - autonomous_length(k, n.max(64)).positive_length)
        .abs();
    Ok(Hof1Report {
        difference,
        forward_positive: forward.positive_length,
        backward_positive: backward.positive_length,
        forward_full: forward.full_length,
    })
}

/// Lengths of `(x, τ) ↦ b(ψ_a^τ x) − a(x)`.
fn difference_path(
    a: &FieldExpr,
    b: &FieldExpr,
    a_flow: &FlowSpec,
    n: usize,
    tau_samples: usize,
) -> Result<PathLengthReport> {
    let taus = tau_nodes(tau_samples);
    let domain: Domain = a.domain();
    let rows: Vec<Vec<f64>> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let x = domain.lattice_point(idx / n, idx % n, n);
            let ax = a.evaluate(x);
            let traj = a_flow.trajectory(x, &taus)?;
            Ok(traj.iter().map(|y| b.evaluate(*y) - ax).collect())
        })
        .collect::<Result<_>>()?;
    let grids: Vec<GridSample> = (0..taus.len())
        .map(|j| GridSample::new(n, rows.iter().map(|r| r[j]).collect(), domain))
        .collect();
    Ok(lengths_of(&grids, tau_samples))
}
