//! Separable fields on a four-dimensional Darboux chart `K² × K²` and the
//! implant of a planar triple into it.
//!
//! Plane 1 carries `(q₁, p₁)`, plane 2 carries `(q₂, p₂)`, and the bracket
//! is the sum of the two planar brackets. A field `Σ a_k ⊗ b_k` is kept as
//! its term list and never sampled on a 4D grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{extrema, nested_poisson, poisson, sup_dist, ChartBounds, Domain, FieldExpr, Point2};
use crate::tamed::{tame_to_epsilon, TamedTriple};

/// Largest value tolerated outside the unit square by [`chi_product`].
pub const SUPPORT_TOL: f64 = 1e-12;

/// A point of `ℝ⁴ = plane 1 × plane 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point4 {
    pub x1: Point2,
    pub x2: Point2,
}

impl Point4 {
    pub const fn new(x1: Point2, x2: Point2) -> Self {
        Point4 { x1, x2 }
    }
}

/// `Σ a_k(q₁, p₁) · b_k(q₂, p₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductField4D {
    terms: Vec<(FieldExpr, FieldExpr)>,
}

impl ProductField4D {
    pub fn zero() -> Self {
        ProductField4D { terms: Vec::new() }
    }

    /// Term list without any support check.
    pub fn from_terms(terms: Vec<(FieldExpr, FieldExpr)>) -> Self {
        let terms = terms
            .into_iter()
            .filter(|(a, b)| !is_zero(a) && !is_zero(b))
            .collect();
        ProductField4D { terms }
    }

    pub fn terms(&self) -> &[(FieldExpr, FieldExpr)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, x: Point4) -> f64 {
        self.terms
            .iter()
            .map(|(a, b)| {
                let va = a.evaluate(x.x1);
                if va == 0.0 {
                    0.0
                } else {
                    va * b.evaluate(x.x2)
                }
            })
            .sum()
    }

    pub fn add(&self, other: &ProductField4D) -> ProductField4D {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        ProductField4D { terms }
    }

    pub fn scale(&self, k: f64) -> ProductField4D {
        ProductField4D::from_terms(self.terms.iter().map(|(a, b)| (a.scale(k), b.clone())).collect())
    }

    /// Sup over the product of an `n1 × n1` lattice on plane 1 and an
    /// `n2 × n2` lattice on plane 2.
    pub fn lattice_sup(&self, n1: usize, n2: usize) -> f64 {
        if self.terms.is_empty() {
            return 0.0;
        }
        let plane1 = sample_terms(self.terms.iter().map(|t| &t.0), n1);
        let plane2 = sample_terms(self.terms.iter().map(|t| &t.1), n2);
        let k = self.terms.len();
        plane1
            .par_chunks(k)
            .map(|a| {
                plane2
                    .chunks(k)
                    .map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().abs())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }
}

fn is_zero(f: &FieldExpr) -> bool {
    matches!(f.node(), crate::field::Node::Const(c) if *c == 0.0)
}

/// Values of every term at every lattice node, node-major.
fn sample_terms<'a>(fields: impl Iterator<Item = &'a FieldExpr>, n: usize) -> Vec<f64> {
    let fields: Vec<&FieldExpr> = fields.collect();
    let domain = Domain::unit_chart();
    (0..=n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let fields = &fields;
            (0..=n).flat_map(move |j| {
                let x = domain.lattice_point(i, j, n);
                fields.iter().map(move |f| f.evaluate(x))
            })
        })
        .collect()
}

/// Points on a few rings around the unit square (on its boundary and
/// outside it).
fn outside_probes(per_side: usize) -> Vec<Point2> {
    let mut out = Vec::new();
    for d in [0.0, 0.01, 0.1, 0.5] {
        let (lo, hi) = (-d, 1.0 + d);
        for i in 0..=per_side {
            let u = lo + (hi - lo) * i as f64 / per_side as f64;
            out.extend([
                Point2::new(u, lo),
                Point2::new(u, hi),
                Point2::new(lo, u),
                Point2::new(hi, u),
            ]);
        }
    }
    out
}

/// Checks that `f` lives on the unit chart and vanishes on and outside its
/// boundary.
pub fn check_support(f: &FieldExpr, name: &str) -> Result<()> {
    if f.domain() != Domain::Chart(ChartBounds::UNIT) {
        return Err(Error::precondition(format!("{name} must live on the unit chart")));
    }
    for x in outside_probes(64) {
        let v = f.evaluate(x);
        if v.abs() > SUPPORT_TOL {
            return Err(Error::precondition(format!(
                "{name} = {v:e} at ({}, {}), outside the unit square",
                x.q, x.p
            )));
        }
    }
    Ok(())
}

/// `χL(x₁, x₂) = χ(x₁) L(x₂)`, zero outside `K² × K²`.
pub fn chi_product(chi: &FieldExpr, l: &FieldExpr) -> Result<ProductField4D> {
    check_support(chi, "chi")?;
    check_support(l, "L")?;
    Ok(ProductField4D::from_terms(vec![(chi.clone(), l.clone())]))
}

/// `{a⊗b, a'⊗b'} = {a,a'}₁ ⊗ bb' + aa' ⊗ {b,b'}₂`, summed over term pairs.
pub fn poisson4(x: &ProductField4D, y: &ProductField4D) -> ProductField4D {
    let mut terms = Vec::with_capacity(2 * x.terms.len() * y.terms.len());
    for (a, b) in &x.terms {
        for (a2, b2) in &y.terms {
            terms.push((poisson(a, a2), b.mul(b2)));
            terms.push((a.mul(a2), poisson(b, b2)));
        }
    }
    ProductField4D::from_terms(terms)
}

/// Default `χ`: plateau equal to 1 on `[0.3, 0.7]²`, supported in
/// `[0.1, 0.9]²`.
pub fn default_chi() -> FieldExpr {
    FieldExpr::bump2(Point2::new(0.5, 0.5), 0.2, 0.4, Domain::unit_chart())
}

/// Bump-localized sines `a·sin(2π(q)), a·sin(2πp), a·sin(2π(q+p))` times a
/// plateau on `[0.25, 0.75]²`, supported in `[0.05, 0.95]²`.
pub fn default_seed(amplitude: f64) -> [FieldExpr; 3] {
    let chart = Domain::unit_chart();
    let envelope = FieldExpr::bump2(Point2::new(0.5, 0.5), 0.25, 0.45, chart);
    [(1, 0), (0, 1), (1, 1)].map(|(kq, kp)| {
        FieldExpr::sin(kq, kp)
            .with_domain(chart)
            .mul(&envelope)
            .scale(amplitude)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplantSettings {
    /// Lattice intervals per side on plane 1.
    pub n_plane1: usize,
    /// Lattice intervals per side on plane 2.
    pub n_plane2: usize,
    /// Cap of the taming loop over `m`.
    pub m_max: usize,
    /// Lattice and refinement used for planar `C⁰` distances.
    pub dist_n: usize,
    pub dist_refine: usize,
}

impl Default for ImplantSettings {
    fn default() -> Self {
        ImplantSettings {
            n_plane1: 40,
            n_plane2: 128,
            m_max: 64,
            dist_n: 256,
            dist_refine: 10,
        }
    }
}

/// Outcome of implanting a planar triple and its tamed perturbation.
#[derive(Debug, Clone)]
pub struct Theorem3Report {
    pub delta: f64,
    pub m: usize,
    pub eta: f64,
    pub max_chi: f64,
    pub max_chi_cubed: f64,
    /// Lattice sup of `{F₁,{G₁,H₁}}` on plane 2.
    pub planar_triple_sup: f64,
    /// Lattice sup of `{χF₁,{χG₁,χH₁}}` on the product lattice.
    pub implanted_triple_sup: f64,
    /// Lattice sup of `{χF'₁,{χG'₁,χH'₁}}` on the product lattice.
    pub perturbed_triple_sup: f64,
    /// Taming errors of `F'₁, G'₁, H'₁`.
    pub c0_errors: [f64; 3],
    /// `sup |χF₁ − χF'₁|` and likewise for `G`, `H`.
    pub implant_distances: [f64; 3],
    pub n_plane1: usize,
    pub n_plane2: usize,
    pub tamed: TamedTriple,
}

impl Theorem3Report {
    /// `max|χ³| · sup |{F₁,{G₁,H₁}}|`.
    pub fn predicted_sup(&self) -> f64 {
        self.max_chi_cubed * self.planar_triple_sup
    }

    pub const CSV_HEADER: [&'static str; 13] = [
        "delta",
        "m",
        "eta",
        "max_chi",
        "planar_triple_sup",
        "implanted_triple_sup",
        "predicted_sup",
        "perturbed_triple_sup",
        "c0_error_max",
        "dist_F",
        "dist_G",
        "dist_H",
        "dist_bound",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        let c0 = self.c0_errors.iter().copied().fold(0.0, f64::max);
        [
            self.delta,
            self.m as f64,
            self.eta,
            self.max_chi,
            self.planar_triple_sup,
            self.implanted_triple_sup,
            self.predicted_sup(),
            self.perturbed_triple_sup,
            c0,
            self.implant_distances[0],
            self.implant_distances[1],
            self.implant_distances[2],
            self.delta * self.max_chi,
        ]
        .iter()
        .map(|v| format!("{v:e}"))
        .collect()
    }

    /// One-page plain text summary.
    pub fn summary(&self) -> String {
        format!(
            "implant on K^2 x K^2 (delta = {})\n\
             taming mesh m = {}, eta = {:e}\n\
             max|chi| = {:.12}, max|chi^3| = {:.12}\n\
             planar triple bracket sup        {:.12e}\n\
             implanted triple bracket sup     {:.12e}\n\
             max|chi^3| * planar sup          {:.12e}\n\
             perturbed implanted sup          {:.3e}\n\
             taming errors                    {:.6e} {:.6e} {:.6e}\n\
             implant C0 distances             {:.6e} {:.6e} {:.6e}\n\
             bound delta * max|chi|           {:.6e}\n\
             lattices: plane 1 {}^2, plane 2 {}^2\n",
            self.delta,
            self.m,
            self.eta,
            self.max_chi,
            self.max_chi_cubed,
            self.planar_triple_sup,
            self.implanted_triple_sup,
            self.predicted_sup(),
            self.perturbed_triple_sup,
            self.c0_errors[0],
            self.c0_errors[1],
            self.c0_errors[2],
            self.implant_distances[0],
            self.implant_distances[1],
            self.implant_distances[2],
            self.delta * self.max_chi,
            self.n_plane1 + 1,
            self.n_plane2 + 1,
        )
    }
}

fn planar_lattice_sup(f: &FieldExpr, n: usize) -> f64 {
    sample_terms(std::iter::once(f), n)
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
}

/// `{χa, {χb, χc}}` in four dimensions.
pub fn implanted_triple(chi: &FieldExpr, fields: [&FieldExpr; 3]) -> Result<ProductField4D> {
    let [a, b, c] = fields.map(|f| chi_product(chi, f));
    Ok(poisson4(&a?, &poisson4(&b?, &c?)))
}

/// Implants `F₁, G₁, H₁` with `χ`, tames them on the square within
/// `delta`, and measures both implanted triple brackets and the implant
/// distances.
pub fn theorem3_demo(
    seed: [&FieldExpr; 3],
    chi: &FieldExpr,
    delta: f64,
    settings: &ImplantSettings,
) -> Result<Theorem3Report> {
    if !(delta > 0.0) {
        return Err(Error::precondition("delta must be positive"));
    }
    let (n1, n2) = (settings.n_plane1, settings.n_plane2);
    let planar = nested_poisson(&[seed[0].clone(), seed[1].clone(), seed[2].clone()]);
    let planar_triple_sup = planar_lattice_sup(&planar, n2);
    if !(planar_triple_sup > 0.0) {
        return Err(Error::precondition("the seed triple bracket vanishes on the lattice"));
    }
    let implanted = implanted_triple(chi, seed)?;
    let implanted_triple_sup = implanted.lattice_sup(n1, n2);

    let tamed = tame_to_epsilon(seed, delta, settings.m_max, Domain::unit_chart())?;
    let perturbed = implanted_triple(chi, [&tamed.fields[0], &tamed.fields[1], &tamed.fields[2]])?;
    let perturbed_triple_sup = perturbed.lattice_sup(n1, n2);

    let chi_extrema = extrema(chi, settings.dist_n, settings.dist_refine);
    let max_chi = chi_extrema.max.abs().max(chi_extrema.min.abs());
    let max_chi_cubed = planar_lattice_sup(&chi.mul(&chi.mul(chi)), n1);
    // sup |χ ⊗ (F − F')| = sup|χ| · sup|F − F'|
    let implant_distances: [f64; 3] = std::array::from_fn(|k| {
        max_chi * sup_dist(seed[k], &tamed.fields[k], settings.dist_n, settings.dist_refine)
    });
    Ok(Theorem3Report {
        delta,
        m: tamed.m(),
        eta: tamed.eta,
        max_chi,
        max_chi_cubed,
        planar_triple_sup,
        implanted_triple_sup,
        perturbed_triple_sup,
        c0_errors: tamed.c0_errors,
        implant_distances,
        n_plane1: n1,
        n_plane2: n2,
        tamed,
    })
}
