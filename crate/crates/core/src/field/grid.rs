//! Uniform lattice samples, extrema search and grid quadrature.

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{Domain, FieldExpr, Node, Phase, Point2};

/// Values of a function on the `N × N` lattice `(i/N, j/N)` (mapped into
/// chart bounds on a chart). `values[i * N + j]` belongs to lattice node
/// `(i, j)`, where `i` indexes `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSample {
    n: usize,
    values: Vec<f64>,
    domain: Domain,
}

impl GridSample {
    pub fn new(n: usize, values: Vec<f64>, domain: Domain) -> Self {
        assert!(n >= 8, "grid resolution must be at least 8");
        assert_eq!(values.len(), n * n);
        GridSample { n, values, domain }
    }

    /// Samples an arbitrary function on the lattice.
    pub fn from_fn<F>(n: usize, domain: Domain, f: F) -> Self
    where
        F: Fn(Point2) -> f64 + Sync,
    {
        match Self::try_from_fn(n, domain, |x| Ok::<f64, std::convert::Infallible>(f(x))) {
            Ok(g) => g,
            Err(never) => match never {},
        }
    }

    pub fn try_from_fn<F, E>(n: usize, domain: Domain, f: F) -> Result<Self, E>
    where
        F: Fn(Point2) -> Result<f64, E> + Sync,
        E: Send,
    {
        assert!(n >= 8, "grid resolution must be at least 8");
        let values: Result<Vec<f64>, E> = (0..n * n)
            .into_par_iter()
            .map(|idx| f(domain.lattice_point(idx / n, idx % n, n)))
            .collect();
        Ok(GridSample {
            n,
            values: values?,
            domain,
        })
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn point(&self, i: usize, j: usize) -> Point2 {
        self.domain.lattice_point(i, j, self.n)
    }

    /// Grid quadrature of the mean, with a fixed pairwise summation order.
    pub fn mean(&self) -> f64 {
        pairwise_sum(&self.values) / self.values.len() as f64
    }

    /// Largest value and its lattice node.
    pub fn max(&self) -> (f64, Point2) {
        let (idx, v) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        (v, self.point(idx / self.n, idx % self.n))
    }

    /// Smallest value and its lattice node.
    pub fn min(&self) -> (f64, Point2) {
        let (idx, v) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        (v, self.point(idx / self.n, idx % self.n))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Lattice nodes of the `k` largest values, best first.
    pub fn top_nodes(&self, k: usize) -> Vec<Point2> {
        let mut idx: Vec<usize> = (0..self.values.len()).collect();
        idx.sort_by(|&a, &b| self.values[b].total_cmp(&self.values[a]).then(a.cmp(&b)));
        idx.into_iter()
            .take(k)
            .map(|i| self.point(i / self.n, i % self.n))
            .collect()
    }

    /// Up to `k` lattice nodes that dominate their eight neighbours, best
    /// first. Neighbours wrap on the torus; chart border nodes compare only
    /// with existing neighbours.
    pub fn local_maxima(&self, k: usize) -> Vec<Point2> {
        let n = self.n as isize;
        let torus = self.domain.is_torus();
        let at = |i: isize, j: isize| -> Option<f64> {
            if torus {
                Some(self.values[(i.rem_euclid(n) * n + j.rem_euclid(n)) as usize])
            } else if (0..n).contains(&i) && (0..n).contains(&j) {
                Some(self.values[(i * n + j) as usize])
            } else {
                None
            }
        };
        let mut peaks: Vec<usize> = (0..self.values.len())
            .filter(|&idx| {
                let (i, j) = ((idx / self.n) as isize, (idx % self.n) as isize);
                let v = self.values[idx];
                (-1..=1).all(|di| {
                    (-1..=1).all(|dj| {
                        (di == 0 && dj == 0) || at(i + di, j + dj).map_or(true, |w| v >= w)
                    })
                })
            })
            .collect();
        peaks.sort_by(|&a, &b| self.values[b].total_cmp(&self.values[a]).then(a.cmp(&b)));
        peaks
            .into_iter()
            .take(k)
            .map(|i| self.point(i / self.n, i % self.n))
            .collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridSample {
        GridSample {
            n: self.n,
            values: self.values.iter().map(|&v| f(v)).collect(),
            domain: self.domain,
        }
    }

    pub fn zip_with(&self, other: &GridSample, f: impl Fn(f64, f64) -> f64) -> GridSample {
        assert_eq!(self.n, other.n);
        GridSample {
            n: self.n,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            domain: self.domain,
        }
    }

    /// Trigonometric interpolant of a torus sample, keeping modes whose
    /// coefficient exceeds `rel_tol` times the largest one. The Nyquist
    /// row and column are dropped.
    pub fn to_trig_series(&self, rel_tol: f64) -> FieldExpr {
        let n = self.n;
        let mut data: Vec<Complex<f64>> = self.values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        let mut planner = FftPlanner::<f64>::new();
        let fft = planner.plan_fft_forward(n);
        // rows (fixed i, varying j) then columns
        for row in data.chunks_mut(n) {
            fft.process(row);
        }
        let mut column = vec![Complex::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                column[i] = data[i * n + j];
            }
            fft.process(&mut column);
            for i in 0..n {
                data[i * n + j] = column[i];
            }
        }
        let scale = 1.0 / (n * n) as f64;
        let freq = |m: usize| -> Option<i32> {
            if 2 * m == n {
                None
            } else if 2 * m < n {
                Some(m as i32)
            } else {
                Some(m as i32 - n as i32)
            }
        };
        let largest = data.iter().fold(0.0f64, |m, c| m.max(c.norm())) * scale;
        let cutoff = rel_tol * largest;
        let mut terms: Vec<FieldExpr> = Vec::new();
        let c0 = data[0].re * scale;
        if c0.abs() > cutoff {
            terms.push(FieldExpr::constant(c0));
        }
        for a in 0..n {
            for b in 0..n {
                let (Some(kq), Some(kp)) = (freq(a), freq(b)) else {
                    continue;
                };
                let upper_half = kq > 0 || (kq == 0 && kp > 0);
                if !upper_half {
                    continue;
                }
                let c = data[a * n + b] * scale;
                if c.norm() <= cutoff {
                    continue;
                }
                // c e^{iθ} + conj(c) e^{-iθ} = 2Re(c) cosθ - 2Im(c) sinθ
                if c.re != 0.0 {
                    terms.push(FieldExpr::trig(kq, kp, Phase::Cos).scale(2.0 * c.re));
                }
                if c.im != 0.0 {
                    terms.push(FieldExpr::trig(kq, kp, Phase::Sin).scale(-2.0 * c.im));
                }
            }
        }
        if terms.is_empty() {
            return FieldExpr::zero();
        }
        FieldExpr::sum_of(&terms)
    }
}

/// Pairwise (cascade) summation in a fixed order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// `values[i][j] = f(i/N, j/N)`.
pub fn sample(f: &FieldExpr, n: usize) -> GridSample {
    GridSample::from_fn(n, f.domain(), |x| f.evaluate(x))
}

/// Result of a grid scan followed by local refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrema {
    pub min: f64,
    pub max: f64,
    pub argmin: Point2,
    pub argmax: Point2,
    /// Plain lattice extrema before refinement.
    pub grid_min: f64,
    pub grid_max: f64,
    /// `grid_max + Lip·h_diag/2`, when a Lipschitz bound is available.
    pub upper_pad: Option<f64>,
    /// `grid_min - Lip·h_diag/2`, when a Lipschitz bound is available.
    pub lower_pad: Option<f64>,
}

/// Golden-section probes per line search.
const GOLDEN_EVALS: usize = 40;

/// Maximizes `f` on `[a, b]` by golden-section search; returns the best
/// probe.
fn golden_max<E>(
    f: &mut impl FnMut(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    evals: usize,
) -> Result<(f64, f64), E> {
    const R: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - R * (hi - lo);
    let mut x2 = lo + R * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 2..evals {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - R * (hi - lo);
            f1 = f(x1)?;
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + R * (hi - lo);
            f2 = f(x2)?;
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
    }
    Ok(best)
}

/// Local ascent from `start`: alternating golden-section searches along
/// `q` and `p` on a box of half-width `h0`, halving the box each
/// iteration. Never returns a value below `f(start)`.
pub fn refine_max<E>(
    f: impl Fn(Point2) -> Result<f64, E>,
    domain: Domain,
    start: Point2,
    start_value: f64,
    h0: f64,
    iters: usize,
) -> Result<(f64, Point2), E> {
    let mut best = (start_value, start);
    let mut h = h0;
    for _ in 0..iters {
        let x = best.1;
        let mut along_q = |q: f64| f(domain.clamp(Point2::new(q, x.p)));
        let (q, v) = golden_max(&mut along_q, x.q - h, x.q + h, GOLDEN_EVALS)?;
        if v > best.0 {
            best = (v, domain.clamp(Point2::new(q, x.p)));
        }
        let x = best.1;
        let mut along_p = |p: f64| f(domain.clamp(Point2::new(x.q, p)));
        let (p, v) = golden_max(&mut along_p, x.p - h, x.p + h, GOLDEN_EVALS)?;
        if v > best.0 {
            best = (v, domain.clamp(Point2::new(x.q, p)));
        }
        h *= 0.5;
    }
    Ok(best)
}

/// Trust-region Newton ascent for expensive `f`. Gradient and Hessian
/// come from a 3×3 stencil whose spacing follows the trust radius; the step is the Newton step
/// of the quadratic model when it is concave and a gradient step
/// otherwise, clipped to a radius that doubles on success and shrinks
/// fourfold on failure. Follows long flat ridges that box-shrinking
/// searches cannot traverse. Never returns a value below `start_value`.
pub fn newton_refine_max<E>(
    f: impl Fn(Point2) -> Result<f64, E>,
    domain: Domain,
    start: Point2,
    start_value: f64,
    radius0: f64,
    iters: usize,
) -> Result<(f64, Point2), E> {
    let mut best = (start_value, start);
    let mut radius = radius0;
    let mut model: Option<(f64, f64, f64, f64, f64)> = None;
    let mut h_used = f64::INFINITY;
    for _ in 0..iters {
        let x = best.1;
        let h_fd = (radius / 8.0).clamp(1e-7, 1e-4);
        if h_fd < 0.5 * h_used {
            model = None;
        }
        let (gq, gp, hqq, hpp, hqp) = match model {
            Some(m) => m,
            None => {
                h_used = h_fd;
                let at = |dq: f64, dp: f64| f(domain.clamp(Point2::new(x.q + dq, x.p + dp)));
                let f0 = best.0;
                let (qp, qm, pp, pm) = (at(h_fd, 0.0)?, at(-h_fd, 0.0)?, at(0.0, h_fd)?, at(0.0, -h_fd)?);
                let (a, b, c, d) = (
                    at(h_fd, h_fd)?,
                    at(h_fd, -h_fd)?,
                    at(-h_fd, h_fd)?,
                    at(-h_fd, -h_fd)?,
                );
                let h2 = h_fd * h_fd;
                let m = (
                    (qp - qm) / (2.0 * h_fd),
                    (pp - pm) / (2.0 * h_fd),
                    (qp - 2.0 * f0 + qm) / h2,
                    (pp - 2.0 * f0 + pm) / h2,
                    (a - b - c + d) / (4.0 * h2),
                );
                model = Some(m);
                m
            }
        };
        let det = hqq * hpp - hqp * hqp;
        let (mut dq, mut dp) = if hqq < 0.0 && det > 0.0 {
            (-(hpp * gq - hqp * gp) / det, -(hqq * gp - hqp * gq) / det)
        } else {
            let g = gq.hypot(gp);
            if g == 0.0 {
                break;
            }
            (gq / g * radius, gp / g * radius)
        };
        let len = dq.hypot(dp);
        if len > radius {
            dq *= radius / len;
            dp *= radius / len;
        }
        let step = dq.hypot(dp);
        if step < 1e-12 {
            break;
        }
        let y = domain.clamp(Point2::new(x.q + dq, x.p + dp));
        let fy = f(y)?;
        if fy > best.0 {
            best = (fy, y);
            model = None;
            radius = (2.0 * radius).max(2.0 * step).min(0.25);
        } else {
            radius = step / 4.0;
            if radius < 1e-12 {
                break;
            }
        }
    }
    Ok(best)
}

/// Grid scan plus refinement for an arbitrary (fallible) function.
/// Refinement starts from the `starts` best lattice nodes.
pub fn extrema_with<F, E>(
    f: F,
    domain: Domain,
    n: usize,
    refine_iters: usize,
    starts: usize,
) -> Result<Extrema, E>
where
    F: Fn(Point2) -> Result<f64, E> + Sync,
    E: Send,
{
    let grid = GridSample::try_from_fn(n, domain, &f)?;
    extrema_from_grid(&grid, f, refine_iters, starts)
}

/// Refines the extrema of an already sampled function.
pub fn extrema_from_grid<F, E>(
    grid: &GridSample,
    f: F,
    refine_iters: usize,
    starts: usize,
) -> Result<Extrema, E>
where
    F: Fn(Point2) -> Result<f64, E>,
{
    let domain = grid.domain();
    let (hq, hp) = domain.spacing(grid.resolution());
    let h0 = hq.max(hp);
    let (grid_max, mut argmax) = grid.max();
    let (grid_min, mut argmin) = grid.min();
    let mut max = grid_max;
    let mut min = grid_min;
    if refine_iters > 0 {
        for start in grid.top_nodes(starts.max(1)) {
            let v0 = f(start)?;
            let (v, x) = refine_max(&f, domain, start, v0, h0, refine_iters)?;
            if v > max {
                max = v;
                argmax = x;
            }
        }
        let negated = grid.map(|v| -v);
        for start in negated.top_nodes(starts.max(1)) {
            let v0 = -f(start)?;
            let (v, x) = refine_max(|y| f(y).map(|v| -v), domain, start, v0, h0, refine_iters)?;
            if -v < min {
                min = -v;
                argmin = x;
            }
        }
    }
    Ok(Extrema {
        min,
        max,
        argmin,
        argmax,
        grid_min,
        grid_max,
        upper_pad: None,
        lower_pad: None,
    })
}

/// Extrema of a closed-form field: lattice scan at resolution `n` followed
/// by `refine_iters` rounds of local golden-section refinement. The
/// reported maximum is never below the lattice maximum.
pub fn extrema(f: &FieldExpr, n: usize, refine_iters: usize) -> Extrema {
    let domain = f.domain();
    let mut e = match extrema_with(
        |x| Ok::<f64, std::convert::Infallible>(f.evaluate(x)),
        domain,
        n,
        refine_iters,
        1,
    ) {
        Ok(e) => e,
        Err(never) => match never {},
    };
    let (hq, hp) = domain.spacing(n);
    let lip = f.lipschitz_bound();
    if lip.is_finite() {
        let pad = lip * hq.hypot(hp) / 2.0;
        e.upper_pad = Some(e.grid_max + pad);
        e.lower_pad = Some(e.grid_min - pad);
    }
    e
}

/// `f - mean(f)`, the mean computed by lattice quadrature at resolution
/// `n` (exact for trigonometric fields whose modes are below `n/2`).
pub fn normalize(f: &FieldExpr, n: usize) -> FieldExpr {
    let mean = sample(f, n).mean();
    f.add_const(-mean)
}

/// Uniform distance `sup |f - g|` (refined lattice estimate).
pub fn sup_dist(f: &FieldExpr, g: &FieldExpr, n: usize, refine_iters: usize) -> f64 {
    let e = extrema(&f.sub(g), n, refine_iters);
    e.max.abs().max(e.min.abs())
}

/// Whether a tree is a constant node (used to short-cut trivial flows).
pub(crate) fn is_constant(f: &FieldExpr) -> bool {
    matches!(f.node(), Node::Const(_))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_refinement_follows_flat_ridge() {
        // maximum at (0.3137, 0.7771) on a ridge 10⁴ times flatter across
        let f = |x: Point2| {
            let (u, v) = (x.q - 0.3137 + x.p - 0.7771, x.q - 0.3137 - (x.p - 0.7771));
            Ok::<f64, ()>(-(u * u) * 1e-4 - 1.0 * v * v)
        };
        let start = Point2::new(0.1, 0.55);
        let (v, x) = newton_refine_max(f, Domain::Torus, start, f(start).unwrap(), 1.0 / 32.0, 30).unwrap();
        assert!(v.abs() < 1e-12, "{v}");
        assert!((x.q - 0.3137).abs() < 1e-5 && (x.p - 0.7771).abs() < 1e-5);
    }

    #[test]
    fn local_maxima_of_two_peaks() {
        let f = FieldExpr::cos(2, 0).add(&FieldExpr::cos(0, 1));
        let g = sample(&f, 16);
        let peaks = g.local_maxima(5);
        assert_eq!(peaks.len(), 2);
        assert!(peaks.iter().all(|x| (x.q == 0.0 || x.q == 0.5) && x.p == 0.0));
    }
    use crate::field::poisson;
    use std::f64::consts::PI;

    #[test]
    fn sample_examples() {
        let g = sample(&FieldExpr::constant(2.0), 8);
        assert!(g.values().iter().all(|&v| v == 2.0));
        let s = sample(&FieldExpr::sin(1, 0), 8);
        assert!((s.get(2, 0) - 1.0).abs() < 1e-15);
        assert!((s.point(2, 0).q - 0.25).abs() < 1e-15);
    }

    #[test]
    fn trig_modes_have_zero_grid_mean() {
        for &(k, l) in &[(1, 0), (0, 1), (2, -1), (3, 3)] {
            for phase in [Phase::Cos, Phase::Sin] {
                let m = sample(&FieldExpr::trig(k, l, phase), 16).mean();
                assert!(m.abs() < 1e-12, "({k},{l}) mean {m}");
            }
        }
    }

    #[test]
    fn extrema_examples() {
        let e = extrema(&FieldExpr::sin(1, 0), 64, 20);
        assert!((e.max - 1.0).abs() < 1e-9);
        assert!((e.min + 1.0).abs() < 1e-9);
        assert!(e.max >= e.grid_max);
        assert!(e.upper_pad.unwrap() >= e.max);

        let b = poisson(&FieldExpr::sin(1, 0), &FieldExpr::sin(0, 1));
        let e = extrema(&b, 64, 20);
        assert!((e.max - 4.0 * PI * PI).abs() < 1e-6);

        let z = extrema(&FieldExpr::zero(), 32, 5);
        assert_eq!((z.min, z.max), (0.0, 0.0));
    }

    #[test]
    fn extrema_finds_off_grid_maximum() {
        // maximum at q = 0.3 + 1/4, not a lattice node for N = 64
        let f = FieldExpr::sin(1, 0).translate(Point2::new(0.3, 0.0));
        let e = extrema(&f, 64, 20);
        assert!(e.grid_max < 1.0 - 1e-6);
        assert!((e.max - 1.0).abs() < 1e-9);
    }

    #[test]
    fn normalize_examples() {
        let z = normalize(&FieldExpr::constant(5.0), 16);
        assert!(z.evaluate(Point2::new(0.3, 0.1)).abs() < 1e-15);
        let s = normalize(&FieldExpr::sin(1, 0), 16);
        let x = Point2::new(0.1, 0.2);
        assert!((s.evaluate(x) - FieldExpr::sin(1, 0).evaluate(x)).abs() < 1e-15);
        let t = normalize(&FieldExpr::sin(1, 0).add_const(3.0), 16);
        assert!((t.evaluate(x) - FieldExpr::sin(1, 0).evaluate(x)).abs() < 1e-12);
    }

    #[test]
    fn sup_dist_examples() {
        let f = FieldExpr::sin(1, 1).add(&FieldExpr::cos(2, 0).scale(0.3));
        assert_eq!(sup_dist(&f, &f, 32, 5), 0.0);
        assert!((sup_dist(&FieldExpr::sin(1, 0), &FieldExpr::zero(), 64, 20) - 1.0).abs() < 1e-9);
        let d = 0.0125;
        assert!((sup_dist(&f, &f.add_const(d), 32, 5) - d).abs() < 1e-15);
    }

    #[test]
    fn trig_series_recovers_modes() {
        let f = FieldExpr::sin(1, 0)
            .scale(0.7)
            .add(&FieldExpr::cos(-2, 3).scale(-0.2))
            .add_const(0.5);
        let series = sample(&f, 16).to_trig_series(1e-12);
        for &(q, p) in &[(0.13, 0.77), (0.5, 0.01), (0.91, 0.42)] {
            let x = Point2::new(q, p);
            assert!((series.evaluate(x) - f.evaluate(x)).abs() < 1e-13);
        }
    }
}
