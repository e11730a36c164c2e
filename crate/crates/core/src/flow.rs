//! Hamiltonian flows `ψ_H^t` of time-independent generators.
//!
//! Integration uses Gauss–Legendre collocation: the one-stage member is the
//! implicit midpoint rule, the three-stage member (the default) is of order
//! six. All members are symplectic for non-separable `H` and exact on
//! shears. Stage equations are solved by fixed-point iteration.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::grid::is_constant;
use crate::field::{Domain, FieldExpr, GridSample, Point2, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    /// One-stage Gauss method, order 2.
    ImplicitMidpoint,
    /// Two-stage Gauss method, order 4.
    Gauss4,
    /// Three-stage Gauss method, order 6.
    Gauss6,
}

struct Tableau {
    a: [[f64; 3]; 3],
    b: [f64; 3],
    c: [f64; 3],
    stages: usize,
}

impl Integrator {
    fn tableau(self) -> Tableau {
        match self {
            Integrator::ImplicitMidpoint => Tableau {
                a: [[0.5, 0.0, 0.0], [0.0; 3], [0.0; 3]],
                b: [1.0, 0.0, 0.0],
                c: [0.5, 0.0, 0.0],
                stages: 1,
            },
            Integrator::Gauss4 => {
                let r = 3f64.sqrt() / 6.0;
                Tableau {
                    a: [[0.25, 0.25 - r, 0.0], [0.25 + r, 0.25, 0.0], [0.0; 3]],
                    b: [0.5, 0.5, 0.0],
                    c: [0.5 - r, 0.5 + r, 0.0],
                    stages: 2,
                }
            }
            Integrator::Gauss6 => {
                let r = 15f64.sqrt();
                Tableau {
                    a: [
                        [5.0 / 36.0, 2.0 / 9.0 - r / 15.0, 5.0 / 36.0 - r / 30.0],
                        [5.0 / 36.0 + r / 24.0, 2.0 / 9.0, 5.0 / 36.0 - r / 24.0],
                        [5.0 / 36.0 + r / 30.0, 2.0 / 9.0 + r / 15.0, 5.0 / 36.0],
                    ],
                    b: [5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0],
                    c: [0.5 - r / 10.0, 0.5, 0.5 + r / 10.0],
                    stages: 3,
                }
            }
        }
    }
}

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    pub dt: f64,
    pub fp_tol: f64,
    pub fp_max_iters: usize,
    pub integrator: Integrator,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            dt: 1e-3,
            fp_tol: 1e-13,
            fp_max_iters: 50,
            integrator: Integrator::Gauss6,
        }
    }
}

impl FlowParams {
    pub fn with_dt(dt: f64) -> Self {
        FlowParams {
            dt,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= 1e-2) {
            return Err(Error::precondition(format!(
                "integration step must lie in (0, 1e-2], got {}",
                self.dt
            )));
        }
        if !(self.fp_tol > 0.0 && self.fp_tol <= 1e-10) {
            return Err(Error::precondition(format!(
                "fixed-point tolerance must lie in (0, 1e-10], got {}",
                self.fp_tol
            )));
        }
        if self.fp_max_iters < 10 {
            return Err(Error::precondition("at least 10 fixed-point iterations required"));
        }
        Ok(())
    }
}

/// A time-independent generator together with integrator settings.
#[derive(Debug, Clone)]
pub struct FlowSpec {
    h: FieldExpr,
    params: FlowParams,
    trivial: bool,
}

type Mat2 = [[f64; 2]; 2];

impl FlowSpec {
    pub fn new(h: FieldExpr, params: FlowParams) -> Result<Self> {
        params.validate()?;
        let trivial = is_constant(&h);
        Ok(FlowSpec { h, params, trivial })
    }

    pub fn generator(&self) -> &FieldExpr {
        &self.h
    }

    pub fn params(&self) -> &FlowParams {
        &self.params
    }

    pub fn domain(&self) -> Domain {
        self.h.domain()
    }

    fn vector(&self, x: Point2) -> Point2 {
        self.h.hamiltonian_vector(x)
    }

    /// `ψ_H^t(x)`. Negative `t` integrates backward. The last step is
    /// shortened to land exactly on `t`.
    pub fn advance(&self, x: Point2, t: f64) -> Result<Point2> {
        if self.trivial || t == 0.0 {
            return Ok(x);
        }
        let y = self.integrate(x, t)?;
        Ok(self.domain().reduce(y))
    }

    fn integrate(&self, mut x: Point2, t: f64) -> Result<Point2> {
        let tab = self.params.integrator.tableau();
        let dt = self.params.dt;
        let sign = t.signum();
        let mut remaining = t.abs();
        let mut previous: Option<([Point2; 3], f64)> = None;
        // absorb a last step shorter than 1e-9·dt into the previous one
        while remaining > dt * 1e-9 {
            let h = sign * if remaining < dt * (1.0 + 1e-9) { remaining } else { dt };
            let guess = match previous {
                Some((k, h_prev)) => extrapolate(&tab, &k, h / h_prev),
                None => [self.vector(x); 3],
            };
            let k = self.solve_stages(x, h, &tab, guess)?;
            for i in 0..tab.stages {
                x.q += h * tab.b[i] * k[i].q;
                x.p += h * tab.b[i] * k[i].p;
            }
            previous = Some((k, h));
            remaining -= h.abs();
        }
        Ok(x)
    }

    /// Points `ψ_H^{t_k}(x)` for monotone times `t_k` of one sign, computed
    /// along a single trajectory.
    pub fn trajectory(&self, x: Point2, times: &[f64]) -> Result<Vec<Point2>> {
        let mut out = Vec::with_capacity(times.len());
        let mut current = x;
        let mut t_prev = 0.0;
        for &t in times {
            if self.trivial {
                out.push(x);
                continue;
            }
            let dt = t - t_prev;
            if dt != 0.0 {
                current = self.integrate(current, dt)?;
            }
            t_prev = t;
            out.push(self.domain().reduce(current));
        }
        Ok(out)
    }

    fn solve_stages(
        &self,
        x: Point2,
        h: f64,
        tab: &Tableau,
        guess: [Point2; 3],
    ) -> Result<[Point2; 3]> {
        let s = tab.stages;
        let mut k = guess;
        for _ in 0..self.params.fp_max_iters {
            let mut next = [Point2::default(); 3];
            let mut delta: f64 = 0.0;
            for i in 0..s {
                let mut y = x;
                for j in 0..s {
                    y.q += h * tab.a[i][j] * k[j].q;
                    y.p += h * tab.a[i][j] * k[j].p;
                }
                next[i] = self.vector(y);
                delta = delta
                    .max((h * (next[i].q - k[i].q)).abs())
                    .max((h * (next[i].p - k[i].p)).abs());
            }
            k = next;
            if !delta.is_finite() {
                break;
            }
            if delta <= self.params.fp_tol {
                return Ok(k);
            }
        }
        Err(Error::FixedPointDivergence { point: x, step: h })
    }

    /// `ψ_H^t(x)` together with the Jacobian of the discrete map (the
    /// linearized scheme integrated alongside the trajectory).
    pub fn advance_with_jacobian(&self, x: Point2, t: f64) -> Result<(Point2, Mat2)> {
        let mut jac = [[1.0, 0.0], [0.0, 1.0]];
        if self.trivial || t == 0.0 {
            return Ok((x, jac));
        }
        let hq = self.h.differentiate(Var::Q);
        let hp = self.h.differentiate(Var::P);
        let tab = self.params.integrator.tableau();
        let dt = self.params.dt;
        let sign = t.signum();
        let mut remaining = t.abs();
        let mut cur = x;
        while remaining > dt * 1e-9 {
            let h = sign * if remaining < dt * (1.0 + 1e-9) { remaining } else { dt };
            let k = self.solve_stages(cur, h, &tab, [self.vector(cur); 3])?;
            // stage points and vector-field Jacobians there
            let mut dv = [[[0.0; 2]; 2]; 3];
            for i in 0..tab.stages {
                let mut y = cur;
                for j in 0..tab.stages {
                    y.q += h * tab.a[i][j] * k[j].q;
                    y.p += h * tab.a[i][j] * k[j].p;
                }
                let (_, hqq, hqp) = hq.eval_grad(y);
                let (_, hpq, hpp) = hp.eval_grad(y);
                dv[i] = [[hpq, hpp], [-hqq, -hqp]];
            }
            // dK_i = Dv_i (J + h Σ_j a_ij dK_j)
            let mut dk = [[[0.0; 2]; 2]; 3];
            for _ in 0..self.params.fp_max_iters {
                let mut next = [[[0.0; 2]; 2]; 3];
                let mut delta: f64 = 0.0;
                for i in 0..tab.stages {
                    let mut m = jac;
                    for j in 0..tab.stages {
                        m = mat_add(m, mat_scale(dk[j], h * tab.a[i][j]));
                    }
                    next[i] = mat_mul(dv[i], m);
                    for r in 0..2 {
                        for c in 0..2 {
                            delta = delta.max((h * (next[i][r][c] - dk[i][r][c])).abs());
                        }
                    }
                }
                dk = next;
                if delta <= self.params.fp_tol {
                    break;
                }
            }
            for i in 0..tab.stages {
                jac = mat_add(jac, mat_scale(dk[i], h * tab.b[i]));
                cur.q += h * tab.b[i] * k[i].q;
                cur.p += h * tab.b[i] * k[i].p;
            }
            remaining -= h.abs();
        }
        Ok((self.domain().reduce(cur), jac))
    }
}

/// Stage guesses for the next step: the previous step's stage derivatives
/// interpolated at its collocation nodes and evaluated at `1 + c_i·ratio`,
/// where `ratio` is the new step over the old one.
fn extrapolate(tab: &Tableau, k: &[Point2; 3], ratio: f64) -> [Point2; 3] {
    let s = tab.stages;
    let mut out = [Point2::default(); 3];
    for i in 0..s {
        let tau = 1.0 + tab.c[i] * ratio;
        for j in 0..s {
            let mut l = 1.0;
            for m in 0..s {
                if m != j {
                    l *= (tau - tab.c[m]) / (tab.c[j] - tab.c[m]);
                }
            }
            out[i].q += l * k[j].q;
            out[i].p += l * k[j].p;
        }
    }
    out
}

fn mat_add(a: Mat2, b: Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

fn mat_scale(a: Mat2, k: f64) -> Mat2 {
    [[a[0][0] * k, a[0][1] * k], [a[1][0] * k, a[1][1] * k]]
}

fn mat_mul(a: Mat2, b: Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// One factor `ψ_H^{±t}` of a composition.
#[derive(Debug, Clone)]
pub struct FlowFactor {
    pub flow: Arc<FlowSpec>,
    pub time: f64,
    pub direction: Direction,
}

impl FlowFactor {
    pub fn forward(flow: &Arc<FlowSpec>, time: f64) -> Self {
        FlowFactor {
            flow: flow.clone(),
            time,
            direction: Direction::Forward,
        }
    }

    pub fn backward(flow: &Arc<FlowSpec>, time: f64) -> Self {
        FlowFactor {
            flow: flow.clone(),
            time,
            direction: Direction::Backward,
        }
    }

    fn signed_time(&self) -> f64 {
        match self.direction {
            Direction::Forward => self.time,
            Direction::Backward => -self.time,
        }
    }

    pub fn apply(&self, x: Point2) -> Result<Point2> {
        self.flow.advance(x, self.signed_time())
    }

    fn inverse(&self) -> FlowFactor {
        FlowFactor {
            flow: self.flow.clone(),
            time: self.time,
            direction: match self.direction {
                Direction::Forward => Direction::Backward,
                Direction::Backward => Direction::Forward,
            },
        }
    }
}

/// A word `φ₁ φ₂ … φ_k` in flow maps. Factors are listed as in the written
/// word and applied right to left: `φ_k` acts first.
#[derive(Debug, Clone)]
pub struct FlowComposition {
    factors: Vec<FlowFactor>,
}

impl FlowComposition {
    pub fn new(factors: Vec<FlowFactor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::precondition("a flow composition needs at least one factor"));
        }
        Ok(FlowComposition { factors })
    }

    pub fn factors(&self) -> &[FlowFactor] {
        &self.factors
    }

    pub fn apply(&self, x: Point2) -> Result<Point2> {
        self.factors.iter().rev().try_fold(x, |y, f| f.apply(y))
    }

    /// The inverse word.
    pub fn inverse(&self) -> FlowComposition {
        FlowComposition {
            factors: self.factors.iter().rev().map(FlowFactor::inverse).collect(),
        }
    }
}

pub fn apply_composition(c: &FlowComposition, x: Point2) -> Result<Point2> {
    c.apply(x)
}

/// Samples of `f ∘ c` on the `N × N` lattice.
pub fn pullback(f: &FieldExpr, c: &FlowComposition, n: usize) -> Result<GridSample> {
    if n < 32 {
        return Err(Error::precondition("pullback resolution must be at least 32"));
    }
    GridSample::try_from_fn(n, f.domain(), |x| Ok(f.evaluate(c.apply(x)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{poisson, sample};
    use std::f64::consts::TAU;

    fn spec(h: FieldExpr) -> Arc<FlowSpec> {
        Arc::new(FlowSpec::new(h, FlowParams::default()).unwrap())
    }

    #[test]
    fn shear_flow_is_exact() {
        let flow = spec(FieldExpr::sin(0, 1));
        for &(q, p, t) in &[(0.1, 0.2, 0.7), (0.5, 0.9, -1.3), (0.33, 0.05, 2.0)] {
            let y = flow.advance(Point2::new(q, p), t).unwrap();
            let expected = Point2::new(q + TAU * (TAU * p).cos() * t, p).wrapped();
            assert!(y.torus_dist(expected) < 1e-10, "{y:?} vs {expected:?}");
        }
    }

    #[test]
    fn constant_generator_is_identity() {
        let flow = spec(FieldExpr::constant(3.0));
        let x = Point2::new(0.4, 0.6);
        assert_eq!(flow.advance(x, 5.0).unwrap(), x);
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = FlowParams::with_dt(0.1);
        assert!(matches!(
            FlowSpec::new(FieldExpr::sin(1, 0), bad),
            Err(Error::Precondition(_))
        ));
        let bad = FlowParams {
            fp_max_iters: 3,
            ..FlowParams::default()
        };
        assert!(FlowSpec::new(FieldExpr::sin(1, 0), bad).is_err());
    }

    #[test]
    fn divergence_is_reported() {
        // step far beyond the contraction radius of the fixed-point map
        let params = FlowParams {
            dt: 1e-2,
            fp_max_iters: 10,
            integrator: Integrator::ImplicitMidpoint,
            ..FlowParams::default()
        };
        let h = FieldExpr::sin(40, 40).add(&FieldExpr::cos(40, -40)).scale(10.0);
        let flow = FlowSpec::new(h, params).unwrap();
        let err = flow.advance(Point2::new(0.3, 0.2), 1.0).unwrap_err();
        assert!(matches!(err, Error::FixedPointDivergence { .. }));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn forward_then_backward_is_identity() {
        let flow = spec(FieldExpr::sin(1, 0).add(&FieldExpr::sin(0, 1)));
        let c = FlowComposition::new(vec![
            FlowFactor::forward(&flow, 0.8),
            FlowFactor::backward(&flow, 0.8),
        ])
        .unwrap();
        let x = Point2::new(0.21, 0.67);
        assert!(c.apply(x).unwrap().torus_dist(x) < 1e-8);
        let zero = FlowComposition::new(vec![FlowFactor::forward(&flow, 0.0)]).unwrap();
        assert_eq!(zero.apply(x).unwrap(), x);
        assert!(FlowComposition::new(vec![]).is_err());
    }

    #[test]
    fn composition_order_is_right_to_left() {
        let f = spec(FieldExpr::sin(1, 0));
        let g = spec(FieldExpr::sin(0, 1));
        let x = Point2::new(0.1, 0.3);
        let word = FlowComposition::new(vec![
            FlowFactor::forward(&g, 0.2),
            FlowFactor::forward(&f, 0.3),
        ])
        .unwrap();
        let manual = g.advance(f.advance(x, 0.3).unwrap(), 0.2).unwrap();
        assert_eq!(word.apply(x).unwrap(), manual);
        let back = word.inverse().apply(word.apply(x).unwrap()).unwrap();
        assert!(back.torus_dist(x) < 1e-10);
    }

    #[test]
    fn trajectory_matches_fresh_advances() {
        let flow = spec(FieldExpr::sin(1, 1).add(&FieldExpr::cos(0, 1).scale(0.5)));
        let x = Point2::new(0.7, 0.2);
        let times = [0.0, -0.125, -0.25, -0.6];
        let pts = flow.trajectory(x, &times).unwrap();
        for (t, y) in times.iter().zip(&pts) {
            assert!(y.torus_dist(flow.advance(x, *t).unwrap()) < 1e-11);
        }
    }

    #[test]
    fn pullback_examples() {
        let shear = spec(FieldExpr::sin(0, 1));
        let f = FieldExpr::sin(1, 0);
        let id = FlowComposition::new(vec![FlowFactor::forward(&shear, 0.0)]).unwrap();
        assert_eq!(pullback(&f, &id, 32).unwrap(), sample(&f, 32));

        let back = FlowComposition::new(vec![FlowFactor::backward(&shear, 1.0)]).unwrap();
        let pb = pullback(&f, &back, 64).unwrap();
        for i in (0..64).step_by(7) {
            for j in (0..64).step_by(5) {
                let x = pb.point(i, j);
                let expected = (TAU * (x.q - TAU * (TAU * x.p).cos())).sin();
                assert!((pb.get(i, j) - expected).abs() < 1e-8);
            }
        }
        assert!(pullback(&f, &back, 16).is_err());
    }

    #[test]
    fn bracket_is_derivative_along_flow() {
        let f = FieldExpr::sin(1, 1).add(&FieldExpr::cos(2, 0).scale(0.3));
        let g = FieldExpr::cos(0, 1).add(&FieldExpr::sin(1, -1).scale(0.4));
        let flow = spec(g.clone());
        let bracket = poisson(&f, &g);
        let h = 1e-4;
        for &(q, p) in &[(0.1, 0.2), (0.45, 0.8), (0.9, 0.61)] {
            let x = Point2::new(q, p);
            let at = |t: f64| f.evaluate(flow.advance(x, t).unwrap());
            let fd = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
            assert!((fd - bracket.evaluate(x)).abs() < 1e-6, "{fd} vs {}", bracket.evaluate(x));
        }
    }

    #[test]
    fn discrete_map_is_area_preserving() {
        let flow = spec(FieldExpr::sin(1, 0).add(&FieldExpr::sin(1, 1).scale(0.5)));
        for integrator in [Integrator::ImplicitMidpoint, Integrator::Gauss4, Integrator::Gauss6] {
            let params = FlowParams {
                integrator,
                ..FlowParams::default()
            };
            let f = FlowSpec::new(flow.generator().clone(), params).unwrap();
            let (_, j) = f.advance_with_jacobian(Point2::new(0.3, 0.4), 1.0).unwrap();
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            assert!((det - 1.0).abs() < 1e-9, "{integrator:?}: det {det}");
        }
    }
}
