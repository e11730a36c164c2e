//! Closed-form smooth fields on the unit torus `[0,1)²` and on planar charts.
//!
//! A [`FieldExpr`] is an immutable expression tree. Differentiation is
//! symbolic (the derivative of a tree is again a tree of the same node
//! kinds), so Poisson brackets of any nesting depth evaluate exactly up to
//! roundoff.
//!
//! Conventions: coordinates `(q, p)`, symplectic form `dq ∧ dp`, Hamiltonian
//! vector field `X_H = (∂H/∂p, -∂H/∂q)` and bracket
//! `{F, G} = dF(X_G) = F_q G_p - F_p G_q`, so that `{q, p} = 1`.

mod bump;
pub mod grid;
pub mod parse;
pub mod random;

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

pub use bump::{smoothstep_derivative, smoothstep_sup};
pub use grid::{extrema, normalize, sample, sup_dist, Extrema, GridSample};
pub use parse::{parse_field, parse_field_file, parse_field_on, FieldFile};

/// A point of the torus or of a planar chart.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub q: f64,
    pub p: f64,
}

impl Point2 {
    pub const fn new(q: f64, p: f64) -> Self {
        Point2 { q, p }
    }

    /// Reduces both coordinates to `[0, 1)`.
    pub fn wrapped(self) -> Self {
        Point2 {
            q: wrap_unit(self.q),
            p: wrap_unit(self.p),
        }
    }

    /// Distance on the torus (shortest representative of the difference).
    pub fn torus_dist(self, other: Point2) -> f64 {
        let dq = centered(self.q - other.q);
        let dp = centered(self.p - other.p);
        dq.hypot(dp)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self.q - other.q).hypot(self.p - other.p)
    }
}

/// `x mod 1` in `[0, 1)`.
pub fn wrap_unit(x: f64) -> f64 {
    let r = x - x.floor();
    // x = -1e-18 gives r == 1.0 after rounding
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Representative of `x mod 1` in `[-1/2, 1/2)`.
pub fn centered(x: f64) -> f64 {
    x - (x + 0.5).floor()
}

/// Coordinate selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Q,
    P,
}

impl Var {
    pub fn of(self, x: Point2) -> f64 {
        match self {
            Var::Q => x.q,
            Var::P => x.p,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::Q => "q",
            Var::P => "p",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Cos,
    Sin,
}

/// Axis-aligned rectangle `[q_min, q_max] × [p_min, p_max]` of a planar chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartBounds {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl ChartBounds {
    pub const UNIT: ChartBounds = ChartBounds {
        q_min: 0.0,
        q_max: 1.0,
        p_min: 0.0,
        p_max: 1.0,
    };

    pub fn contains(&self, x: Point2) -> bool {
        x.q >= self.q_min && x.q <= self.q_max && x.p >= self.p_min && x.p <= self.p_max
    }
}

/// Where a field lives. Torus fields are 1-periodic and bumps wrap; chart
/// fields are evaluated on the plane without reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Torus,
    Chart(ChartBounds),
}

impl Domain {
    pub fn unit_chart() -> Self {
        Domain::Chart(ChartBounds::UNIT)
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, Domain::Torus)
    }

    /// Lattice point `(i/N, j/N)` mapped into the domain.
    pub fn lattice_point(&self, i: usize, j: usize, n: usize) -> Point2 {
        match self {
            Domain::Torus => Point2::new(i as f64 / n as f64, j as f64 / n as f64),
            Domain::Chart(b) => Point2::new(
                b.q_min + (b.q_max - b.q_min) * i as f64 / n as f64,
                b.p_min + (b.p_max - b.p_min) * j as f64 / n as f64,
            ),
        }
    }

    /// Lattice spacing along each axis at resolution `n`.
    pub fn spacing(&self, n: usize) -> (f64, f64) {
        match self {
            Domain::Torus => (1.0 / n as f64, 1.0 / n as f64),
            Domain::Chart(b) => (
                (b.q_max - b.q_min) / n as f64,
                (b.p_max - b.p_min) / n as f64,
            ),
        }
    }

    /// Brings a point back into the fundamental domain (torus only).
    pub fn reduce(&self, x: Point2) -> Point2 {
        match self {
            Domain::Torus => x.wrapped(),
            Domain::Chart(_) => x,
        }
    }

    pub fn clamp(&self, x: Point2) -> Point2 {
        match self {
            Domain::Torus => x.wrapped(),
            Domain::Chart(b) => Point2::new(
                x.q.clamp(b.q_min, b.q_max),
                x.p.clamp(b.p_min, b.p_max),
            ),
        }
    }
}

/// Expression tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Coord(Var),
    /// `cos` or `sin` of `2π (kq·q + kp·p)`.
    Trig { kq: i32, kp: i32, phase: Phase },
    /// Derivative of order `order` (along `var`) of the plateau function that
    /// equals 1 for `|x - center| ≤ inner` and 0 for `|x - center| ≥ outer`.
    Bump {
        var: Var,
        center: f64,
        inner: f64,
        outer: f64,
        order: u32,
    },
    Sum(Vec<Arc<Node>>),
    Product(Arc<Node>, Arc<Node>),
    Scale(f64, Arc<Node>),
}

const ZERO: Node = Node::Const(0.0);

impl Node {
    fn is_zero(&self) -> bool {
        matches!(self, Node::Const(c) if *c == 0.0)
    }
}

/// A smooth field: an expression tree tagged with its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldExpr {
    root: Arc<Node>,
    domain: Domain,
}

impl FieldExpr {
    pub fn from_node(node: Node, domain: Domain) -> Self {
        FieldExpr {
            root: Arc::new(node),
            domain,
        }
    }

    fn from_arc(root: Arc<Node>, domain: Domain) -> Self {
        FieldExpr { root, domain }
    }

    pub fn node(&self) -> &Node {
        &self.root
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Same tree on another domain.
    pub fn with_domain(&self, domain: Domain) -> Self {
        FieldExpr {
            root: self.root.clone(),
            domain,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_node(Node::Const(c), Domain::Torus)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn coord(var: Var) -> Self {
        Self::from_node(Node::Coord(var), Domain::Torus)
    }

    pub fn trig(kq: i32, kp: i32, phase: Phase) -> Self {
        Self::from_node(Node::Trig { kq, kp, phase }, Domain::Torus)
    }

    /// `sin(2π(kq·q + kp·p))`.
    pub fn sin(kq: i32, kp: i32) -> Self {
        Self::trig(kq, kp, Phase::Sin)
    }

    /// `cos(2π(kq·q + kp·p))`.
    pub fn cos(kq: i32, kp: i32) -> Self {
        Self::trig(kq, kp, Phase::Cos)
    }

    /// Plateau bump along one coordinate. On the torus the bump wraps.
    pub fn bump(var: Var, center: f64, inner: f64, outer: f64) -> Self {
        Self::from_node(
            Node::Bump {
                var,
                center,
                inner,
                outer,
                order: 0,
            },
            Domain::Torus,
        )
    }

    /// Product of a `q`-bump and a `p`-bump sharing the same radii.
    pub fn bump2(center: Point2, inner: f64, outer: f64, domain: Domain) -> Self {
        Self::bump(Var::Q, center.q, inner, outer)
            .with_domain(domain)
            .mul(&Self::bump(Var::P, center.p, inner, outer).with_domain(domain))
    }

    pub fn sum_of(items: &[FieldExpr]) -> Self {
        let domain = items.first().map(|f| f.domain).unwrap_or(Domain::Torus);
        for f in items {
            check_domains(domain, f.domain);
        }
        Self::from_node(
            Node::Sum(items.iter().map(|f| f.root.clone()).collect()),
            domain,
        )
    }

    pub fn add(&self, other: &FieldExpr) -> Self {
        check_domains(self.domain, other.domain);
        Self::from_node(
            Node::Sum(vec![self.root.clone(), other.root.clone()]),
            self.domain,
        )
    }

    pub fn sub(&self, other: &FieldExpr) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &FieldExpr) -> Self {
        check_domains(self.domain, other.domain);
        Self::from_node(
            Node::Product(self.root.clone(), other.root.clone()),
            self.domain,
        )
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::from_node(Node::Scale(k, self.root.clone()), self.domain)
    }

    pub fn add_const(&self, c: f64) -> Self {
        self.add(&FieldExpr::constant(c).with_domain(self.domain))
    }

    /// Exact value at `x`. Torus points are reduced mod 1 first.
    pub fn evaluate(&self, x: Point2) -> f64 {
        let wrap = self.domain.is_torus();
        let x = if wrap { x.wrapped() } else { x };
        eval_node(&self.root, x, wrap)
    }

    /// Value and gradient `(f, ∂f/∂q, ∂f/∂p)` by forward-mode differentiation.
    pub fn eval_grad(&self, x: Point2) -> (f64, f64, f64) {
        let wrap = self.domain.is_torus();
        let x = if wrap { x.wrapped() } else { x };
        let d = eval_dual(&self.root, x, wrap);
        (d.v, d.dq, d.dp)
    }

    /// Exact partial derivative, as a new tree.
    pub fn differentiate(&self, var: Var) -> Self {
        Self::from_arc(diff_node(&self.root, var), self.domain)
    }

    /// `f(x + shift)` as a new tree.
    pub fn translate(&self, shift: Point2) -> Self {
        Self::from_arc(translate_node(&self.root, shift), self.domain)
    }

    /// Upper bound on `sup |f|` by recursive bound propagation.
    pub fn sup_bound(&self) -> f64 {
        sup_bound_node(&self.root, self.domain)
    }

    /// Upper bound on the Lipschitz constant (Euclidean norm of the gradient).
    pub fn lipschitz_bound(&self) -> f64 {
        self.differentiate(Var::Q)
            .sup_bound()
            .hypot(self.differentiate(Var::P).sup_bound())
    }

    /// Number of nodes in the tree (shared subtrees counted each time).
    pub fn size(&self) -> usize {
        node_size(&self.root)
    }

    /// Hamiltonian vector field `X_f = (f_p, -f_q)` at `x`.
    pub fn hamiltonian_vector(&self, x: Point2) -> Point2 {
        let (_, fq, fp) = self.eval_grad(x);
        Point2::new(fp, -fq)
    }
}

fn check_domains(a: Domain, b: Domain) {
    assert_eq!(a, b, "fields live on different domains");
}

/// Poisson bracket `{f, g} = f_q g_p - f_p g_q` as a tree.
pub fn poisson(f: &FieldExpr, g: &FieldExpr) -> FieldExpr {
    check_domains(f.domain, g.domain);
    let fq = diff_node(&f.root, Var::Q);
    let fp = diff_node(&f.root, Var::P);
    let gq = diff_node(&g.root, Var::Q);
    let gp = diff_node(&g.root, Var::P);
    let left = product_node(fq, gp);
    let right = product_node(fp, gq);
    let node = match (left.is_zero(), right.is_zero()) {
        (true, true) => Arc::new(ZERO),
        (false, true) => left,
        (true, false) => Arc::new(Node::Scale(-1.0, right)),
        (false, false) => Arc::new(Node::Sum(vec![left, Arc::new(Node::Scale(-1.0, right))])),
    };
    FieldExpr::from_arc(node, f.domain)
}

/// Right-nested bracket `{f₁, {f₂, … {f_{n-1}, f_n}}}`.
pub fn nested_poisson(fields: &[FieldExpr]) -> FieldExpr {
    assert!(fields.len() >= 2, "a bracket needs at least two fields");
    let mut acc = poisson(&fields[fields.len() - 2], &fields[fields.len() - 1]);
    for f in fields[..fields.len() - 2].iter().rev() {
        acc = poisson(f, &acc);
    }
    acc
}

fn product_node(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    if a.is_zero() || b.is_zero() {
        Arc::new(ZERO)
    } else {
        Arc::new(Node::Product(a, b))
    }
}

fn scale_node(k: f64, a: Arc<Node>) -> Arc<Node> {
    if a.is_zero() || k == 0.0 {
        Arc::new(ZERO)
    } else {
        Arc::new(Node::Scale(k, a))
    }
}

fn diff_node(node: &Arc<Node>, var: Var) -> Arc<Node> {
    match node.as_ref() {
        Node::Const(_) => Arc::new(ZERO),
        Node::Coord(v) => Arc::new(Node::Const(if *v == var { 1.0 } else { 0.0 })),
        Node::Trig { kq, kp, phase } => {
            let k = match var {
                Var::Q => *kq,
                Var::P => *kp,
            };
            if k == 0 {
                return Arc::new(ZERO);
            }
            let w = TAU * k as f64;
            match phase {
                Phase::Sin => Arc::new(Node::Scale(
                    w,
                    Arc::new(Node::Trig {
                        kq: *kq,
                        kp: *kp,
                        phase: Phase::Cos,
                    }),
                )),
                Phase::Cos => Arc::new(Node::Scale(
                    -w,
                    Arc::new(Node::Trig {
                        kq: *kq,
                        kp: *kp,
                        phase: Phase::Sin,
                    }),
                )),
            }
        }
        Node::Bump {
            var: v,
            center,
            inner,
            outer,
            order,
        } => {
            if *v != var {
                return Arc::new(ZERO);
            }
            Arc::new(Node::Bump {
                var: *v,
                center: *center,
                inner: *inner,
                outer: *outer,
                order: order + 1,
            })
        }
        Node::Sum(items) => {
            let terms: Vec<Arc<Node>> = items
                .iter()
                .map(|c| diff_node(c, var))
                .filter(|d| !d.is_zero())
                .collect();
            match terms.len() {
                0 => Arc::new(ZERO),
                1 => terms.into_iter().next().unwrap(),
                _ => Arc::new(Node::Sum(terms)),
            }
        }
        Node::Product(a, b) => {
            let left = product_node(diff_node(a, var), b.clone());
            let right = product_node(a.clone(), diff_node(b, var));
            match (left.is_zero(), right.is_zero()) {
                (true, true) => Arc::new(ZERO),
                (false, true) => left,
                (true, false) => right,
                (false, false) => Arc::new(Node::Sum(vec![left, right])),
            }
        }
        Node::Scale(k, a) => scale_node(*k, diff_node(a, var)),
    }
}

fn trig_arg(kq: i32, kp: i32, x: Point2) -> f64 {
    // Reduce the phase before scaling by 2π to keep large modes accurate.
    let t = kq as f64 * x.q + kp as f64 * x.p;
    TAU * (t - t.round())
}

/// Value of a bump derivative; `d` is the signed offset from the center.
fn bump_value(d: f64, inner: f64, outer: f64, order: u32) -> f64 {
    let a = d.abs();
    if a <= inner {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    if a >= outer {
        return 0.0;
    }
    let width = outer - inner;
    let t = (outer - a) / width;
    let s = smoothstep_derivative(t, order);
    if order == 0 {
        return s;
    }
    // t decreases with |d|, so dt/dx = -sign(d)/width
    let slope = -d.signum() / width;
    s * slope.powi(order as i32)
}

fn bump_offset(x: f64, center: f64, wrap: bool) -> f64 {
    let d = x - center;
    if wrap {
        centered(d)
    } else {
        d
    }
}

fn eval_node(node: &Node, x: Point2, wrap: bool) -> f64 {
    match node {
        Node::Const(c) => *c,
        Node::Coord(v) => v.of(x),
        Node::Trig { kq, kp, phase } => {
            let arg = trig_arg(*kq, *kp, x);
            match phase {
                Phase::Cos => arg.cos(),
                Phase::Sin => arg.sin(),
            }
        }
        Node::Bump {
            var,
            center,
            inner,
            outer,
            order,
        } => bump_value(bump_offset(var.of(x), *center, wrap), *inner, *outer, *order),
        Node::Sum(items) => items.iter().map(|c| eval_node(c, x, wrap)).sum(),
        Node::Product(a, b) => {
            // Localized factors (bumps) are usually zero; skip the other side.
            let va = eval_node(a, x, wrap);
            if va == 0.0 {
                0.0
            } else {
                va * eval_node(b, x, wrap)
            }
        }
        Node::Scale(k, a) => k * eval_node(a, x, wrap),
    }
}

#[derive(Clone, Copy)]
struct Dual {
    v: f64,
    dq: f64,
    dp: f64,
}

impl Dual {
    const ZERO: Dual = Dual {
        v: 0.0,
        dq: 0.0,
        dp: 0.0,
    };
}

fn eval_dual(node: &Node, x: Point2, wrap: bool) -> Dual {
    match node {
        Node::Const(c) => Dual {
            v: *c,
            ..Dual::ZERO
        },
        Node::Coord(Var::Q) => Dual {
            v: x.q,
            dq: 1.0,
            dp: 0.0,
        },
        Node::Coord(Var::P) => Dual {
            v: x.p,
            dq: 0.0,
            dp: 1.0,
        },
        Node::Trig { kq, kp, phase } => {
            let (s, c) = trig_arg(*kq, *kp, x).sin_cos();
            let (v, dv) = match phase {
                Phase::Sin => (s, c),
                Phase::Cos => (c, -s),
            };
            Dual {
                v,
                dq: TAU * *kq as f64 * dv,
                dp: TAU * *kp as f64 * dv,
            }
        }
        Node::Bump {
            var,
            center,
            inner,
            outer,
            order,
        } => {
            let d = bump_offset(var.of(x), *center, wrap);
            if d.abs() >= *outer {
                return Dual::ZERO;
            }
            let v = bump_value(d, *inner, *outer, *order);
            let dv = bump_value(d, *inner, *outer, order + 1);
            match var {
                Var::Q => Dual { v, dq: dv, dp: 0.0 },
                Var::P => Dual { v, dq: 0.0, dp: dv },
            }
        }
        Node::Sum(items) => items.iter().fold(Dual::ZERO, |acc, c| {
            let d = eval_dual(c, x, wrap);
            Dual {
                v: acc.v + d.v,
                dq: acc.dq + d.dq,
                dp: acc.dp + d.dp,
            }
        }),
        Node::Product(a, b) => {
            let da = eval_dual(a, x, wrap);
            if da.v == 0.0 && da.dq == 0.0 && da.dp == 0.0 {
                return Dual::ZERO;
            }
            let db = eval_dual(b, x, wrap);
            Dual {
                v: da.v * db.v,
                dq: da.dq * db.v + da.v * db.dq,
                dp: da.dp * db.v + da.v * db.dp,
            }
        }
        Node::Scale(k, a) => {
            let d = eval_dual(a, x, wrap);
            Dual {
                v: k * d.v,
                dq: k * d.dq,
                dp: k * d.dp,
            }
        }
    }
}

fn translate_node(node: &Arc<Node>, shift: Point2) -> Arc<Node> {
    match node.as_ref() {
        Node::Const(_) => node.clone(),
        Node::Coord(v) => Arc::new(Node::Sum(vec![
            node.clone(),
            Arc::new(Node::Const(v.of(shift))),
        ])),
        Node::Trig { kq, kp, phase } => {
            let phi = TAU * (*kq as f64 * shift.q + *kp as f64 * shift.p);
            let (sp, cp) = phi.sin_cos();
            let cos = Arc::new(Node::Trig {
                kq: *kq,
                kp: *kp,
                phase: Phase::Cos,
            });
            let sin = Arc::new(Node::Trig {
                kq: *kq,
                kp: *kp,
                phase: Phase::Sin,
            });
            match phase {
                // cos(θ+φ) = cosθ cosφ - sinθ sinφ
                Phase::Cos => Arc::new(Node::Sum(vec![
                    Arc::new(Node::Scale(cp, cos)),
                    Arc::new(Node::Scale(-sp, sin)),
                ])),
                // sin(θ+φ) = sinθ cosφ + cosθ sinφ
                Phase::Sin => Arc::new(Node::Sum(vec![
                    Arc::new(Node::Scale(cp, sin)),
                    Arc::new(Node::Scale(sp, cos)),
                ])),
            }
        }
        Node::Bump {
            var,
            center,
            inner,
            outer,
            order,
        } => Arc::new(Node::Bump {
            var: *var,
            center: center - var.of(shift),
            inner: *inner,
            outer: *outer,
            order: *order,
        }),
        Node::Sum(items) => Arc::new(Node::Sum(
            items.iter().map(|c| translate_node(c, shift)).collect(),
        )),
        Node::Product(a, b) => Arc::new(Node::Product(
            translate_node(a, shift),
            translate_node(b, shift),
        )),
        Node::Scale(k, a) => Arc::new(Node::Scale(*k, translate_node(a, shift))),
    }
}

fn sup_bound_node(node: &Node, domain: Domain) -> f64 {
    match node {
        Node::Const(c) => c.abs(),
        Node::Coord(v) => match domain {
            Domain::Torus => 1.0,
            Domain::Chart(b) => match v {
                Var::Q => b.q_min.abs().max(b.q_max.abs()),
                Var::P => b.p_min.abs().max(b.p_max.abs()),
            },
        },
        Node::Trig { .. } => 1.0,
        Node::Bump {
            inner,
            outer,
            order,
            ..
        } => smoothstep_sup(*order) / (outer - inner).powi(*order as i32),
        Node::Sum(items) => items.iter().map(|c| sup_bound_node(c, domain)).sum(),
        Node::Product(a, b) => sup_bound_node(a, domain) * sup_bound_node(b, domain),
        Node::Scale(k, a) => k.abs() * sup_bound_node(a, domain),
    }
}

fn node_size(node: &Node) -> usize {
    match node {
        Node::Sum(items) => 1 + items.iter().map(|c| node_size(c)).sum::<usize>(),
        Node::Product(a, b) => 1 + node_size(a) + node_size(b),
        Node::Scale(_, a) => 1 + node_size(a),
        _ => 1,
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        parse::write_node(f, &self.root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn evaluate_examples() {
        assert_close(FieldExpr::sin(1, 0).evaluate(Point2::new(0.25, 0.7)), 1.0, 1e-15);
        let s = FieldExpr::constant(1.0).add(&FieldExpr::constant(2.0));
        assert_eq!(s.evaluate(Point2::new(0.3, 0.9)), 3.0);
        let b = FieldExpr::bump(Var::Q, 0.5, 0.1, 0.2);
        assert_eq!(b.evaluate(Point2::new(0.5, 0.123)), 1.0);
        assert_eq!(b.evaluate(Point2::new(0.75, 0.123)), 0.0);
    }

    #[test]
    fn differentiate_examples() {
        let d = FieldExpr::sin(1, 0).differentiate(Var::Q);
        assert_eq!(
            d.node(),
            &Node::Scale(
                TAU,
                Arc::new(Node::Trig {
                    kq: 1,
                    kp: 0,
                    phase: Phase::Cos
                })
            )
        );
        let c = FieldExpr::constant(3.5).differentiate(Var::Q);
        assert_eq!(c.node(), &Node::Const(0.0));
        assert_eq!(FieldExpr::sin(1, 0).differentiate(Var::P).node(), &Node::Const(0.0));
    }

    #[test]
    fn bracket_of_sines() {
        let b = poisson(&FieldExpr::sin(1, 0), &FieldExpr::sin(0, 1));
        for &(q, p) in &[(0.0, 0.0), (0.1, 0.7), (0.33, 0.5)] {
            let x = Point2::new(q, p);
            let expected = 4.0 * PI * PI * (TAU * q).cos() * (TAU * p).cos();
            assert_close(b.evaluate(x), expected, 1e-12);
        }
        // {q, p} = 1 on a chart
        let dom = Domain::unit_chart();
        let qp = poisson(
            &FieldExpr::coord(Var::Q).with_domain(dom),
            &FieldExpr::coord(Var::P).with_domain(dom),
        );
        assert_eq!(qp.evaluate(Point2::new(0.2, 0.4)), 1.0);
    }

    #[test]
    fn bump_wraps_on_torus_but_not_on_chart() {
        let b = FieldExpr::bump(Var::P, 0.02, 0.05, 0.1);
        assert_eq!(b.evaluate(Point2::new(0.0, 0.99)), 1.0);
        let chart = b.with_domain(Domain::unit_chart());
        assert_eq!(chart.evaluate(Point2::new(0.0, 0.99)), 0.0);
        assert_eq!(chart.evaluate(Point2::new(0.0, -0.01)), 1.0);
    }

    #[test]
    fn dual_matches_trees() {
        let f = FieldExpr::sin(1, 2)
            .mul(&FieldExpr::bump(Var::Q, 0.4, 0.05, 0.3))
            .add(&FieldExpr::cos(0, 1).scale(0.3));
        for &(q, p) in &[(0.2, 0.1), (0.55, 0.8), (0.67, 0.33)] {
            let x = Point2::new(q, p);
            let (v, dq, dp) = f.eval_grad(x);
            assert_close(v, f.evaluate(x), 1e-14);
            assert_close(dq, f.differentiate(Var::Q).evaluate(x), 1e-12);
            assert_close(dp, f.differentiate(Var::P).evaluate(x), 1e-12);
        }
    }

    #[test]
    fn translate_shifts_argument() {
        let f = FieldExpr::sin(2, -1)
            .add(&FieldExpr::bump(Var::P, 0.3, 0.05, 0.2).mul(&FieldExpr::cos(1, 1)));
        let a = Point2::new(0.137, -0.061);
        let g = f.translate(a);
        for &(q, p) in &[(0.1, 0.2), (0.9, 0.35), (0.5, 0.5)] {
            let x = Point2::new(q, p);
            assert_close(g.evaluate(x), f.evaluate(Point2::new(q + a.q, p + a.p)), 1e-13);
        }
    }

    #[test]
    fn bounds_dominate_values() {
        let f = FieldExpr::sin(1, 1).scale(2.0).add(&FieldExpr::bump(Var::Q, 0.5, 0.1, 0.3));
        assert!(f.sup_bound() >= 3.0);
        let lip = f.lipschitz_bound();
        assert!(lip >= 2.0 * TAU * 2f64.sqrt());
    }

    #[test]
    fn wrap_helpers() {
        assert_eq!(wrap_unit(-1e-18), 0.0);
        assert_close(wrap_unit(-0.25), 0.75, 1e-15);
        assert_close(centered(0.75), -0.25, 1e-15);
        assert_close(
            Point2::new(0.01, 0.5).torus_dist(Point2::new(0.99, 0.5)),
            0.02,
            1e-15,
        );
    }
}
