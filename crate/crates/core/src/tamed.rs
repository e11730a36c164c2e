//! Thick grids and tamed approximations.
//!
//! A thick grid with mesh `c` is a family of pairwise disjoint closed squares
//! of side `2c` whose centers form a lattice of mesh `3c`. A field is tamed
//! by a grid when it is constant near every square. Three diagonally offset
//! grids cover the torus, so the triple bracket of fields tamed by the three
//! grids vanishes identically: near every point one of them is constant.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::grid::refine_max;
use crate::field::{nested_poisson, wrap_unit, Domain, FieldExpr, Point2, Var};

/// Slack for closed-square membership tests.
const MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThickGrid {
    m: usize,
    c: f64,
    offset: Point2,
    domain: Domain,
}

impl ThickGrid {
    /// Grid of mesh `c = 1/(3m)` on the torus or on the unit chart.
    pub fn new(m: usize, offset: Point2, domain: Domain) -> Result<Self> {
        if m == 0 {
            return Err(Error::precondition("thick grid needs m >= 1"));
        }
        if let Domain::Chart(b) = domain {
            if b != crate::field::ChartBounds::UNIT {
                return Err(Error::precondition("thick grids live on the unit chart"));
            }
        }
        Ok(ThickGrid {
            m,
            c: 1.0 / (3.0 * m as f64),
            offset,
            domain,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Half-side of the squares.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn offset(&self) -> Point2 {
        self.offset
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Square centers along one axis. On a chart the row extends one step
    /// past each side so that every point of `[0, 1]` is reached.
    pub fn centers_1d(&self, var: Var) -> Vec<f64> {
        let o = var.of(self.offset);
        let mesh = 3.0 * self.c;
        if self.domain.is_torus() {
            (0..self.m).map(|i| wrap_unit(o + mesh * i as f64)).collect()
        } else {
            (-1..=self.m as i64).map(|i| o + mesh * i as f64).collect()
        }
    }

    pub fn squares(&self) -> Vec<Point2> {
        let qs = self.centers_1d(Var::Q);
        let ps = self.centers_1d(Var::P);
        qs.iter()
            .flat_map(|&q| ps.iter().map(move |&p| Point2::new(q, p)))
            .collect()
    }

    /// Index of the window containing `u` along `var`, if any, for windows
    /// of half-width `c + enlarge`.
    fn window(&self, u: f64, var: Var, enlarge: f64) -> Option<usize> {
        let mesh = 3.0 * self.c;
        let o = var.of(self.offset);
        let half = self.c + enlarge + MEMBERSHIP_TOL;
        if self.domain.is_torus() {
            let r = wrap_unit(u - o);
            let k = (r / mesh).round();
            ((r - k * mesh).abs() <= half).then_some(k as usize % self.m)
        } else {
            let k = ((u - o) / mesh).round();
            let inside = (-1.0..=self.m as f64).contains(&k);
            (inside && (u - o - k * mesh).abs() <= half).then_some((k + 1.0) as usize)
        }
    }

    /// Indices `(i, j)` into [`Self::centers_1d`] of the square whose
    /// `enlarge`-neighbourhood contains `x`.
    pub fn square_index(&self, x: Point2, enlarge: f64) -> Option<(usize, usize)> {
        Some((self.window(x.q, Var::Q, enlarge)?, self.window(x.p, Var::P, enlarge)?))
    }

    pub fn contains(&self, x: Point2, enlarge: f64) -> bool {
        self.square_index(x, enlarge).is_some()
    }

    /// Smallest gap between distinct squares of the grid.
    pub fn min_gap(&self) -> f64 {
        let qs = self.centers_1d(Var::Q);
        let mut gap = f64::INFINITY;
        for (a, &u) in qs.iter().enumerate() {
            for &v in &qs[a + 1..] {
                let d = if self.domain.is_torus() {
                    let r = wrap_unit(u - v);
                    r.min(1.0 - r)
                } else {
                    (u - v).abs()
                };
                gap = gap.min(d - 2.0 * self.c);
            }
        }
        if qs.len() == 1 && self.domain.is_torus() {
            // a single square per row faces its own periodic copy
            gap = 1.0 - 2.0 * self.c;
        }
        gap
    }
}

/// The three diagonally offset grids `(0,0)`, `(c,c)`, `(2c,2c)` of mesh
/// `c = 1/(3m)` on the torus.
pub fn build_cover(m: usize) -> Result<[ThickGrid; 3]> {
    build_cover_on(m, Domain::Torus)
}

pub fn build_cover_on(m: usize, domain: Domain) -> Result<[ThickGrid; 3]> {
    let c = 1.0 / (3.0 * m.max(1) as f64);
    let grid = |k: f64| ThickGrid::new(m, Point2::new(k * c, k * c), domain);
    Ok([grid(0.0)?, grid(1.0)?, grid(2.0)?])
}

/// Result of an exhaustive membership scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageReport {
    pub n: usize,
    pub uncovered: usize,
    /// Lattice points covered by exactly 1, 2 and 3 grids.
    pub multiplicity: [usize; 3],
}

/// Membership of every point of the `n × n` lattice in the closed squares.
pub fn coverage(grids: &[ThickGrid; 3], n: usize) -> CoverageReport {
    let domain = grids[0].domain();
    let mut report = CoverageReport {
        n,
        uncovered: 0,
        multiplicity: [0; 3],
    };
    // include the far edge on a chart
    let side = if domain.is_torus() { n } else { n + 1 };
    for i in 0..side {
        for j in 0..side {
            let x = domain.lattice_point(i, j, n);
            let count = grids.iter().filter(|g| g.contains(x, 0.0)).count();
            if count == 0 {
                report.uncovered += 1;
            } else {
                report.multiplicity[count - 1] += 1;
            }
        }
    }
    report
}

fn check_eta(grid: &ThickGrid, eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < grid.c() / 4.0) {
        return Err(Error::precondition(format!(
            "eta must lie in (0, c/4) = (0, {}), got {eta}",
            grid.c() / 4.0
        )));
    }
    Ok(())
}

/// Default plateau margin `c/8`.
pub fn default_eta(m: usize) -> f64 {
    1.0 / (3.0 * m as f64) / 8.0
}

fn window_bumps(grid: &ThickGrid, var: Var, eta: f64) -> Vec<FieldExpr> {
    let c = grid.c();
    grid.centers_1d(var)
        .into_iter()
        .map(|u| FieldExpr::bump(var, u, c + eta / 2.0, c + eta).with_domain(grid.domain()))
        .collect()
}

/// Value `f'` takes near a square: `f(center)`, or 0 on a chart when the
/// `η`-window reaches the boundary, so that `f'` keeps the compact support of
/// `f` (which vanishes somewhere in such a window).
fn locked_value(f: &FieldExpr, grid: &ThickGrid, center: Point2, eta: f64) -> f64 {
    if let Domain::Chart(b) = grid.domain() {
        let half = grid.c() + eta;
        let inside = center.q - half > b.q_min
            && center.q + half < b.q_max
            && center.p - half > b.p_min
            && center.p + half < b.p_max;
        if !inside {
            return 0.0;
        }
    }
    f.evaluate(center)
}

/// `f' = f + Σ_i β_i (f(center_i) − f)` with `β_i` the plateau equal to 1 on
/// the `η/2`-neighbourhood of square `i` and 0 outside its
/// `η`-neighbourhood. `f'` equals `f(center_i)` near square `i`.
pub fn tame(f: &FieldExpr, grid: &ThickGrid, eta: f64) -> Result<FieldExpr> {
    check_eta(grid, eta)?;
    if f.domain() != grid.domain() {
        return Err(Error::precondition("field and grid live on different domains"));
    }
    if let crate::field::Node::Const(_) = f.node() {
        return Ok(f.clone());
    }
    let domain = grid.domain();
    let bq = window_bumps(grid, Var::Q, eta);
    let bp = window_bumps(grid, Var::P, eta);
    let qs = grid.centers_1d(Var::Q);
    let ps = grid.centers_1d(Var::P);
    // the q-windows are disjoint, so Σ bq_i · Σ bp_j is the plateau of the grid
    let beta = FieldExpr::sum_of(&bq).mul(&FieldExpr::sum_of(&bp));
    let one_minus = FieldExpr::constant(1.0).with_domain(domain).sub(&beta);
    let mut rows = Vec::with_capacity(qs.len());
    for (bq_i, &q) in bq.iter().zip(&qs) {
        let terms: Vec<FieldExpr> = bp
            .iter()
            .zip(&ps)
            .filter_map(|(bp_j, &p)| {
                let v = locked_value(f, grid, Point2::new(q, p), eta);
                (v != 0.0).then(|| bp_j.scale(v))
            })
            .collect();
        if !terms.is_empty() {
            rows.push(bq_i.mul(&FieldExpr::sum_of(&terms)));
        }
    }
    let blended = one_minus.mul(f);
    Ok(if rows.is_empty() {
        blended
    } else {
        blended.add(&FieldExpr::sum_of(&rows))
    })
}

/// `sup |tame(f) − f|`, computed square by square from
/// `f' − f = β (f(center) − f)`: a `k × k` lattice over each
/// `η`-neighbourhood, then local refinement in the worst squares.
pub fn local_c0_error(f: &FieldExpr, grid: &ThickGrid, eta: f64, k: usize) -> f64 {
    let c = grid.c();
    let half = c + eta;
    let domain = grid.domain();
    let error_at = |beta: &FieldExpr, v: f64, x: Point2| -> f64 {
        if let Domain::Chart(bounds) = domain {
            if !bounds.contains(x) {
                return 0.0;
            }
        }
        beta.evaluate(x) * (v - f.evaluate(x)).abs()
    };
    let mut per_square: Vec<(f64, Point2, Point2)> = grid
        .squares()
        .par_iter()
        .map(|&center| {
            let v = locked_value(f, grid, center, eta);
            let beta = FieldExpr::bump2(center, c + eta / 2.0, half, domain);
            let mut worst = (0.0, center);
            for a in 0..k {
                for b in 0..k {
                    let x = Point2::new(
                        center.q - half + 2.0 * half * a as f64 / (k - 1) as f64,
                        center.p - half + 2.0 * half * b as f64 / (k - 1) as f64,
                    );
                    let e = error_at(&beta, v, x);
                    if e > worst.0 {
                        worst = (e, x);
                    }
                }
            }
            (worst.0, worst.1, center)
        })
        .collect();
    per_square.sort_by(|a, b| b.0.total_cmp(&a.0));
    let lattice_step = 2.0 * half / (k - 1) as f64;
    per_square
        .iter()
        .take(REFINED_SQUARES)
        .map(|&(e, x, center)| {
            let v = locked_value(f, grid, center, eta);
            let beta = FieldExpr::bump2(center, c + eta / 2.0, half, domain);
            let local = |y: Point2| Ok::<f64, ()>(error_at(&beta, v, y));
            refine_max(local, domain, x, e, lattice_step, 12)
                .expect("infallible")
                .0
        })
        .fold(0.0, f64::max)
}

/// Lipschitz oscillation bound `Lip(f)·√2·(c + η)` for the taming error.
pub fn oscillation_bound(f: &FieldExpr, grid: &ThickGrid, eta: f64) -> f64 {
    f.lipschitz_bound() * std::f64::consts::SQRT_2 * (grid.c() + eta)
}

/// Squares refined after the lattice pass of [`local_c0_error`].
const REFINED_SQUARES: usize = 4;

/// Lattice points per side of each square in [`local_c0_error`].
const LOCAL_SAMPLES: usize = 33;

/// Three fields tamed by the three grids of a cover.
#[derive(Debug, Clone)]
pub struct TamedTriple {
    pub originals: [FieldExpr; 3],
    pub fields: [FieldExpr; 3],
    pub grids: [ThickGrid; 3],
    pub c0_errors: [f64; 3],
    pub oscillation_bounds: [f64; 3],
    pub eta: f64,
}

impl TamedTriple {
    pub fn m(&self) -> usize {
        self.grids[0].m()
    }

    pub fn max_error(&self) -> f64 {
        self.c0_errors.iter().copied().fold(0.0, f64::max)
    }

    /// `{F'_1, {F'_2, F'_3}}` as a tree.
    pub fn triple_bracket(&self) -> FieldExpr {
        nested_poisson(&self.fields)
    }

    /// Evaluates the triple bracket on the `n × n` lattice and checks at
    /// every node that one of the tamed fields has exactly zero gradient.
    pub fn verify(&self, n: usize) -> TripleCheck {
        let tree = self.triple_bracket();
        let domain = self.fields[0].domain();
        let (sup, failures) = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let x = domain.lattice_point(idx / n, idx % n, n);
                let v = tree.evaluate(x).abs();
                let locked = self.fields.iter().any(|f| {
                    let (_, gq, gp) = f.eval_grad(x);
                    gq == 0.0 && gp == 0.0
                });
                (v, usize::from(!locked))
            })
            .reduce(|| (0.0, 0), |a, b| (a.0.max(b.0), a.1 + b.1));
        TripleCheck {
            n,
            sup_triple_bracket: sup,
            unlocked_points: failures,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleCheck {
    pub n: usize,
    pub sup_triple_bracket: f64,
    /// Lattice points where no tamed field has vanishing gradient.
    pub unlocked_points: usize,
}

/// Tames `F_k` by grid `k` of the cover with mesh `1/(3m)`.
pub fn tame_triple(fields: [&FieldExpr; 3], m: usize, eta: f64) -> Result<TamedTriple> {
    tame_triple_on(fields, m, eta, Domain::Torus)
}

/// The same construction on the unit square for compactly supported fields;
/// windows do not wrap.
pub fn square_tame_triple(fields: [&FieldExpr; 3], m: usize, eta: f64) -> Result<TamedTriple> {
    tame_triple_on(fields, m, eta, Domain::unit_chart())
}

fn tame_triple_on(fields: [&FieldExpr; 3], m: usize, eta: f64, domain: Domain) -> Result<TamedTriple> {
    let grids = build_cover_on(m, domain)?;
    let mut tamed = Vec::with_capacity(3);
    let mut errors = [0.0; 3];
    let mut bounds = [0.0; 3];
    for k in 0..3 {
        tamed.push(tame(fields[k], &grids[k], eta)?);
        errors[k] = local_c0_error(fields[k], &grids[k], eta, LOCAL_SAMPLES);
        bounds[k] = oscillation_bound(fields[k], &grids[k], eta);
    }
    let fields_out: [FieldExpr; 3] = [tamed[0].clone(), tamed[1].clone(), tamed[2].clone()];
    Ok(TamedTriple {
        originals: [fields[0].clone(), fields[1].clone(), fields[2].clone()],
        fields: fields_out,
        grids,
        c0_errors: errors,
        oscillation_bounds: bounds,
        eta,
    })
}

/// Smallest `m ≤ m_max` whose tamed triple (with `η = c/8`) has every
/// `C⁰` error at most `epsilon`.
pub fn tame_to_epsilon(
    fields: [&FieldExpr; 3],
    epsilon: f64,
    m_max: usize,
    domain: Domain,
) -> Result<TamedTriple> {
    if !(epsilon > 0.0) {
        return Err(Error::precondition("epsilon must be positive"));
    }
    for m in 1..=m_max {
        let grids = build_cover_on(m, domain)?;
        let eta = default_eta(m);
        let fits = (0..3).all(|k| local_c0_error(fields[k], &grids[k], eta, LOCAL_SAMPLES) <= epsilon);
        if fits {
            return tame_triple_on(fields, m, eta, domain);
        }
    }
    Err(Error::precondition(format!(
        "no m <= {m_max} tames the fields within {epsilon}"
    )))
}
