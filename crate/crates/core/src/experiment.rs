//! Derivative-free searches over `C⁰`-small perturbations of a pair of
//! fields.
//!
//! Every family has the form `F' = F + Σ θ_k D_k` with directions `D_k`
//! of known sup `w_k`; the constraint `Σ |θ_k| w_k ≤ δ` keeps `F'` in the
//! `δ`-ball around `F`. A search returns the smallest value of the
//! objective it found, which is an upper bound on the infimum over the
//! family and nothing more.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::grid::extrema_with;
use crate::field::random::half_plane_modes;
use crate::field::{poisson, sup_dist, Domain, FieldExpr, Phase, Point2};
use crate::tamed::{default_eta, tame, ThickGrid};

/// Slack allowed in the post-hoc `δ`-ball check.
pub const BALL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// Low-degree trigonometric noise.
    TrigNoise,
    /// Partial blends towards tamed versions of the field on shifted grids.
    TamedLock,
    /// Partial blends towards averages of translates.
    SmoothingBlend,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 3] = [
        FamilyKind::TrigNoise,
        FamilyKind::TamedLock,
        FamilyKind::SmoothingBlend,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::TrigNoise => "trig-noise",
            FamilyKind::TamedLock => "tamed-lock",
            FamilyKind::SmoothingBlend => "smoothing-blend",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::precondition(format!("unknown perturbation family `{s}`")))
    }
}

/// A family of perturbations within sup-distance `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationFamily {
    pub kind: FamilyKind,
    pub delta: f64,
    /// Trigonometric degree of the noise modes.
    pub degree: i32,
    /// Grid parameter of the tamed-lock directions.
    pub m: usize,
    /// Number of grid shifts (tamed-lock) or smoothing scales.
    pub variants: usize,
}

impl PerturbationFamily {
    pub fn new(kind: FamilyKind, delta: f64) -> Self {
        PerturbationFamily {
            kind,
            delta,
            degree: 2,
            m: 4,
            variants: 6,
        }
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        PerturbationFamily { delta, ..*self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::precondition("delta must be finite and non-negative"));
        }
        if self.degree < 1 || self.m < 1 || self.variants < 1 {
            return Err(Error::precondition("degree, m and variants must be at least 1"));
        }
        Ok(())
    }

    /// Directions and their sup weights for the base field `f`.
    pub fn basis(&self, f: &FieldExpr, dist: &SearchSettings) -> Result<Basis> {
        self.validate()?;
        if f.domain() != Domain::Torus {
            return Err(Error::precondition("perturbation searches run on the torus"));
        }
        let (directions, weights, max_coef): (Vec<FieldExpr>, Vec<f64>, f64) = match self.kind {
            FamilyKind::TrigNoise => {
                let dirs: Vec<FieldExpr> = half_plane_modes(self.degree)
                    .into_iter()
                    .flat_map(|(kq, kp)| {
                        [Phase::Cos, Phase::Sin].map(|ph| FieldExpr::trig(kq, kp, ph))
                    })
                    .collect();
                let w = vec![1.0; dirs.len()];
                (dirs, w, f64::INFINITY)
            }
            FamilyKind::TamedLock => {
                let c = 1.0 / (3.0 * self.m as f64);
                let eta = default_eta(self.m);
                let mut dirs = Vec::with_capacity(self.variants);
                for k in 0..self.variants {
                    let s = 3.0 * c * k as f64 / self.variants as f64;
                    let grid = ThickGrid::new(self.m, Point2::new(s, s), Domain::Torus)?;
                    dirs.push(tame(f, &grid, eta)?.sub(f));
                }
                let w = blend_weights(&dirs, dist);
                (dirs, w, 1.0)
            }
            FamilyKind::SmoothingBlend => {
                let mut dirs = Vec::with_capacity(self.variants);
                for k in 0..self.variants {
                    let sigma = 0.25 / 2f64.powi(k as i32);
                    let shifts = [(sigma, 0.0), (-sigma, 0.0), (0.0, sigma), (0.0, -sigma)];
                    let avg: Vec<FieldExpr> = shifts
                        .iter()
                        .map(|&(a, b)| f.translate(Point2::new(a, b)))
                        .collect();
                    dirs.push(FieldExpr::sum_of(&avg).scale(0.25).sub(f));
                }
                let w = blend_weights(&dirs, dist);
                (dirs, w, 1.0)
            }
        };
        Ok(Basis {
            base: f.clone(),
            directions,
            weights,
            max_coef,
            delta: self.delta,
        })
    }
}

/// Estimated sups of blend directions, padded slightly upward.
fn blend_weights(dirs: &[FieldExpr], s: &SearchSettings) -> Vec<f64> {
    let zero = FieldExpr::zero();
    dirs.iter()
        .map(|d| sup_dist(d, &zero, s.dist_n, s.dist_refine) * (1.0 + 1e-6))
        .collect()
}

/// `F + Σ θ_k D_k` under `Σ |θ_k| w_k ≤ δ` and `|θ_k| ≤ max_coef`.
#[derive(Debug, Clone)]
pub struct Basis {
    base: FieldExpr,
    directions: Vec<FieldExpr>,
    weights: Vec<f64>,
    max_coef: f64,
    delta: f64,
}

impl Basis {
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn base(&self) -> &FieldExpr {
        &self.base
    }

    /// Nearest feasible point in the sense of clamp-then-shrink; feasible
    /// points are left unchanged.
    pub fn project(&self, theta: &mut [f64]) {
        for (t, w) in theta.iter_mut().zip(&self.weights) {
            if *w == 0.0 {
                *t = 0.0;
            }
            *t = t.clamp(-self.max_coef, self.max_coef);
        }
        let used: f64 = theta.iter().zip(&self.weights).map(|(t, w)| t.abs() * w).sum();
        if used > self.delta {
            // a hair inside, so that projecting again is the identity
            let k = self.delta / used * (1.0 - 1e-12);
            theta.iter_mut().for_each(|t| *t *= k);
        }
    }

    /// Uniform-ish draw from the feasible set: random signs and shares, and a
    /// random fraction of the budget `δ`.
    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let shares: Vec<f64> = (0..self.dim()).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = shares.iter().sum();
        let radius = self.delta * rng.gen::<f64>();
        let mut theta: Vec<f64> = shares
            .iter()
            .zip(&self.weights)
            .map(|(s, w)| {
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                if *w > 0.0 {
                    sign * radius * s / total / w
                } else {
                    0.0
                }
            })
            .collect();
        self.project(&mut theta);
        theta
    }

    /// Per-coordinate step of size `fraction · δ` in sup.
    fn step(&self, k: usize, fraction: f64) -> f64 {
        if self.weights[k] > 0.0 {
            fraction * self.delta / self.weights[k]
        } else {
            0.0
        }
    }

    /// The member for coefficients `theta`; the base itself when all vanish.
    pub fn member(&self, theta: &[f64]) -> FieldExpr {
        let terms: Vec<FieldExpr> = theta
            .iter()
            .zip(&self.directions)
            .filter(|(t, _)| **t != 0.0)
            .map(|(t, d)| d.scale(*t))
            .collect();
        if terms.is_empty() {
            self.base.clone()
        } else {
            self.base.add(&FieldExpr::sum_of(&terms))
        }
    }
}

/// Resolutions used by the searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSettings {
    /// Lattice of the objective's maximum.
    pub n: usize,
    pub refine_iters: usize,
    /// Lattice of the post-hoc `δ`-ball check.
    pub dist_n: usize,
    pub dist_refine: usize,
    /// Candidates evaluated together before the serial accept step.
    pub batch: usize,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings {
            n: 64,
            refine_iters: 6,
            dist_n: 128,
            dist_refine: 8,
            batch: 16,
        }
    }
}

/// What a search minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// `max {F', G'}`.
    Bracket,
    /// `max {{F', G'}, G'}`.
    Triple,
}

impl Objective {
    fn label(self) -> &'static str {
        match self {
            Objective::Bracket => "perturb-search",
            Objective::Triple => "triple-search",
        }
    }

    fn evaluate(self, f: &FieldExpr, g: &FieldExpr, s: &SearchSettings) -> f64 {
        let e = match self {
            Objective::Bracket => extrema_with(
                |x| {
                    let (_, fq, fp) = f.eval_grad(x);
                    let (_, gq, gp) = g.eval_grad(x);
                    Ok::<f64, std::convert::Infallible>(fq * gp - fp * gq)
                },
                Domain::Torus,
                s.n,
                s.refine_iters,
                1,
            ),
            Objective::Triple => {
                let tree = poisson(&poisson(f, g), g);
                extrema_with(
                    |x| Ok::<f64, std::convert::Infallible>(tree.evaluate(x)),
                    Domain::Torus,
                    s.n,
                    s.refine_iters,
                    1,
                )
            }
        };
        match e {
            Ok(e) => e.max,
            Err(never) => match never {},
        }
    }
}

/// Outcome of one search.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub objective: Objective,
    pub family: FamilyKind,
    pub seed: u64,
    pub delta: f64,
    pub budget: usize,
    pub evaluations: usize,
    /// Objective at `(F, G)`.
    pub baseline: f64,
    /// Smallest objective value found.
    pub best_value: f64,
    pub theta_f: Vec<f64>,
    pub theta_g: Vec<f64>,
    /// Post-hoc `sup |F' − F|` and `sup |G' − G|` of the best candidate.
    pub dist_f: f64,
    pub dist_g: f64,
    /// `(evaluations, best_value)` after every improvement.
    pub history: Vec<(usize, f64)>,
}

impl ExperimentRecord {
    pub fn is_exploratory(&self) -> bool {
        self.objective == Objective::Triple
    }

    /// How the value may be read.
    pub fn label(&self) -> &'static str {
        if self.is_exploratory() {
            "EXPLORATORY"
        } else {
            "upper bound on the infimum"
        }
    }

    pub const CSV_HEADER: [&'static str; 11] = [
        "experiment",
        "family",
        "seed",
        "delta",
        "budget",
        "evaluations",
        "baseline",
        "best_value",
        "dist_f",
        "dist_g",
        "label",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.objective.label().to_string(),
            self.family.name().to_string(),
            self.seed.to_string(),
            format!("{:e}", self.delta),
            self.budget.to_string(),
            self.evaluations.to_string(),
            format!("{:e}", self.baseline),
            format!("{:e}", self.best_value),
            format!("{:e}", self.dist_f),
            format!("{:e}", self.dist_g),
            self.label().to_string(),
        ]
    }

    pub const HISTORY_HEADER: [&'static str; 2] = ["evaluations", "best_value"];

    pub fn history_rows(&self) -> Vec<Vec<String>> {
        self.history
            .iter()
            .map(|(k, v)| vec![k.to_string(), format!("{v:e}")])
            .collect()
    }
}

/// Minimizes `max {F', G'}` over the family; see [`search`].
pub fn perturb_search(
    f: &FieldExpr,
    g: &FieldExpr,
    family: &PerturbationFamily,
    budget: usize,
    seed: u64,
    warm: Option<&ExperimentRecord>,
    settings: &SearchSettings,
) -> Result<ExperimentRecord> {
    search(Objective::Bracket, f, g, family, budget, seed, warm, settings)
}

/// Minimizes `max {{F', G'}, G'}` over the family. The records are labeled
/// EXPLORATORY: no reference value exists.
pub fn triple_search(
    f: &FieldExpr,
    g: &FieldExpr,
    family: &PerturbationFamily,
    budget: usize,
    seed: u64,
    warm: Option<&ExperimentRecord>,
    settings: &SearchSettings,
) -> Result<ExperimentRecord> {
    search(Objective::Triple, f, g, family, budget, seed, warm, settings)
}

/// Random sampling for half the budget, then greedy coordinate refinement of
/// the best candidate with halving steps. Candidates are drawn serially
/// from a ChaCha8 stream, evaluated in parallel batches and accepted in
/// draw order, so the record depends only on the seed. An improvement is
/// accepted only after its post-hoc `δ`-ball check. A warm start is the
/// best point of an earlier record, projected into the new ball.
#[allow(clippy::too_many_arguments)]
pub fn search(
    objective: Objective,
    f: &FieldExpr,
    g: &FieldExpr,
    family: &PerturbationFamily,
    budget: usize,
    seed: u64,
    warm: Option<&ExperimentRecord>,
    settings: &SearchSettings,
) -> Result<ExperimentRecord> {
    if budget < 100 {
        return Err(Error::precondition("budget must be at least 100"));
    }
    family.validate()?;
    let bf = family.basis(f, settings)?;
    let bg = family.basis(g, settings)?;
    let (df, dg) = (bf.dim(), bg.dim());
    let baseline = objective.evaluate(f, g, settings);
    let mut record = ExperimentRecord {
        objective,
        family: family.kind,
        seed,
        delta: family.delta,
        budget,
        evaluations: 1,
        baseline,
        best_value: baseline,
        theta_f: vec![0.0; df],
        theta_g: vec![0.0; dg],
        dist_f: 0.0,
        dist_g: 0.0,
        history: vec![(1, baseline)],
    };
    if family.delta == 0.0 {
        return Ok(record);
    }

    let split = |theta: &[f64]| (theta[..df].to_vec(), theta[df..].to_vec());
    let project = |theta: &mut Vec<f64>| {
        let (a, b) = theta.split_at_mut(df);
        bf.project(a);
        bg.project(b);
    };
    let value_of = |theta: &[f64]| {
        let (a, b) = split(theta);
        objective.evaluate(&bf.member(&a), &bg.member(&b), settings)
    };
    let feasible = |theta: &[f64]| {
        let (a, b) = split(theta);
        let d1 = sup_dist(&bf.member(&a), f, settings.dist_n, settings.dist_refine);
        let d2 = sup_dist(&bg.member(&b), g, settings.dist_n, settings.dist_refine);
        (d1 <= family.delta + BALL_TOL && d2 <= family.delta + BALL_TOL).then_some((d1, d2))
    };

    let mut best: Vec<f64> = vec![0.0; df + dg];
    if let Some(w) = warm {
        if w.theta_f.len() == df && w.theta_g.len() == dg {
            let mut start: Vec<f64> = w.theta_f.iter().chain(&w.theta_g).copied().collect();
            project(&mut start);
            if record.evaluations < budget {
                let v = value_of(&start);
                record.evaluations += 1;
                if v < record.best_value {
                    if let Some((d1, d2)) = feasible(&start) {
                        record.best_value = v;
                        record.dist_f = d1;
                        record.dist_g = d2;
                        best = start;
                        record.history.push((record.evaluations, v));
                    }
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let accept = |cands: Vec<Vec<f64>>, record: &mut ExperimentRecord, best: &mut Vec<f64>| -> bool {
        let values: Vec<f64> = cands.par_iter().map(|c| value_of(c)).collect();
        let mut improved = false;
        for (cand, v) in cands.into_iter().zip(values) {
            record.evaluations += 1;
            if v < record.best_value {
                if let Some((d1, d2)) = feasible(&cand) {
                    record.best_value = v;
                    record.dist_f = d1;
                    record.dist_g = d2;
                    *best = cand;
                    record.history.push((record.evaluations, v));
                    improved = true;
                }
            }
        }
        improved
    };

    // random phase: global draws and local gaussian moves around the best
    let random_budget = budget / 2;
    while record.evaluations < random_budget {
        let n = settings.batch.min(random_budget - record.evaluations);
        let cands: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    let mut c = bf.random_point(&mut rng);
                    c.extend(bg.random_point(&mut rng));
                    c
                } else {
                    let scale = [0.3, 0.1, 0.03][rng.gen_range(0..3)];
                    let mut c: Vec<f64> = best
                        .iter()
                        .enumerate()
                        .map(|(k, t)| {
                            let step = if k < df { bf.step(k, scale) } else { bg.step(k - df, scale) };
                            t + step * rng.sample::<f64, _>(StandardNormal)
                        })
                        .collect();
                    project(&mut c);
                    c
                }
            })
            .collect();
        accept(cands, &mut record, &mut best);
    }

    // coordinate phase
    let mut fraction = 0.25;
    while record.evaluations < budget {
        let mut swept = false;
        for k in 0..df + dg {
            let step = if k < df { bf.step(k, fraction) } else { bg.step(k - df, fraction) };
            if step == 0.0 {
                continue;
            }
            let room = budget - record.evaluations;
            if room == 0 {
                break;
            }
            let cands: Vec<Vec<f64>> = [step, -step]
                .iter()
                .take(room)
                .map(|s| {
                    let mut c = best.clone();
                    c[k] += s;
                    project(&mut c);
                    c
                })
                .collect();
            swept |= accept(cands, &mut record, &mut best);
        }
        if !swept {
            fraction *= 0.5;
            if fraction < 1e-9 {
                fraction = 0.25;
            }
        }
    }
    let (a, b) = split(&best);
    record.theta_f = a;
    record.theta_g = b;
    Ok(record)
}

/// Runs the search at each `delta` from the smallest up, warm-starting every
/// run from the previous record. Results are returned in the given order.
pub fn nested_delta_runs(
    objective: Objective,
    f: &FieldExpr,
    g: &FieldExpr,
    family: &PerturbationFamily,
    deltas: &[f64],
    budget: usize,
    seed: u64,
    settings: &SearchSettings,
) -> Result<Vec<ExperimentRecord>> {
    let mut order: Vec<usize> = (0..deltas.len()).collect();
    order.sort_by(|&a, &b| deltas[a].total_cmp(&deltas[b]));
    let mut out: Vec<Option<ExperimentRecord>> = vec![None; deltas.len()];
    let mut prev: Option<ExperimentRecord> = None;
    for i in order {
        let fam = family.with_delta(deltas[i]);
        let r = search(objective, f, g, &fam, budget, seed, prev.as_ref(), settings)?;
        prev = Some(r.clone());
        out[i] = Some(r);
    }
    Ok(out.into_iter().map(|r| r.expect("every delta ran")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sin_pair() -> (FieldExpr, FieldExpr) {
        (FieldExpr::sin(1, 0), FieldExpr::sin(0, 1))
    }

    fn quick() -> SearchSettings {
        SearchSettings {
            n: 32,
            refine_iters: 4,
            dist_n: 64,
            dist_refine: 6,
            batch: 8,
        }
    }

    #[test]
    fn zero_delta_returns_baseline() {
        let (f, g) = sin_pair();
        for kind in FamilyKind::ALL {
            let fam = PerturbationFamily::new(kind, 0.0);
            let r = perturb_search(&f, &g, &fam, 100, 1, None, &quick()).unwrap();
            assert_eq!(r.best_value, r.baseline);
            let four_pi2 = 4.0 * std::f64::consts::PI.powi(2);
            assert!((r.baseline - four_pi2).abs() < 1e-9);
        }
    }

    #[test]
    fn projection_keeps_ball() {
        let (f, _) = sin_pair();
        for kind in FamilyKind::ALL {
            let fam = PerturbationFamily::new(kind, 0.05);
            let b = fam.basis(&f, &quick()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            for _ in 0..5 {
                let mut t: Vec<f64> = (0..b.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                b.project(&mut t);
                let d = sup_dist(&b.member(&t), &f, 128, 8);
                assert!(d <= 0.05 + BALL_TOL, "{kind}: {d}");
                let mut again = t.clone();
                b.project(&mut again);
                assert_eq!(again, t);
            }
        }
    }

    #[test]
    fn search_is_deterministic_and_feasible() {
        let (f, g) = sin_pair();
        let fam = PerturbationFamily::new(FamilyKind::TrigNoise, 0.1);
        let a = perturb_search(&f, &g, &fam, 200, 9, None, &quick()).unwrap();
        let b = perturb_search(&f, &g, &fam, 200, 9, None, &quick()).unwrap();
        assert_eq!(a, b);
        assert!(a.evaluations <= 200);
        assert!(a.best_value <= a.baseline);
        assert!(a.dist_f <= 0.1 + BALL_TOL && a.dist_g <= 0.1 + BALL_TOL);
    }

    #[test]
    fn warm_started_runs_are_monotone() {
        let (f, g) = sin_pair();
        let fam = PerturbationFamily::new(FamilyKind::SmoothingBlend, 0.0);
        let rs = nested_delta_runs(Objective::Bracket, &f, &g, &fam, &[0.1, 0.05, 0.025], 120, 2, &quick())
            .unwrap();
        assert!(rs[2].best_value >= rs[1].best_value);
        assert!(rs[1].best_value >= rs[0].best_value);
    }

    #[test]
    fn triple_search_is_labeled_exploratory() {
        let (f, g) = sin_pair();
        let fam = PerturbationFamily::new(FamilyKind::TamedLock, 0.05);
        let r = triple_search(&f, &g, &fam, 100, 3, None, &quick()).unwrap();
        assert_eq!(r.label(), "EXPLORATORY");
        assert!(r.best_value <= r.baseline);
        assert!(perturb_search(&f, &g, &fam, 99, 3, None, &quick()).is_err());
    }
}
