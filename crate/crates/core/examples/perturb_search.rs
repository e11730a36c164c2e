//! Search for small perturbations that lower the bracket's sup norm.

use rigidity_lab::experiment::{nested_delta_runs, FamilyKind, Objective, PerturbationFamily, SearchSettings};
use rigidity_lab::FieldExpr;

fn main() -> rigidity_lab::Result<()> {
    let (f, g) = (FieldExpr::sin(1, 0), FieldExpr::sin(0, 1));
    let settings = SearchSettings {
        n: 32,
        ..SearchSettings::default()
    };
    let family = PerturbationFamily::new(FamilyKind::TrigNoise, 0.0);
    let runs = nested_delta_runs(Objective::Bracket, &f, &g, &family, &[0.05, 0.1], 400, 1, &settings)?;
    for r in &runs {
        println!(
            "delta {:<5} baseline {:.6} best {:.6} after {} evaluations ({})",
            r.delta, r.baseline, r.best_value, r.evaluations, r.label()
        );
    }
    Ok(())
}
