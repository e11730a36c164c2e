//! Length bounds for commutator paths and autonomous paths.

use rigidity_lab::commutator::CommutatorPath;
use rigidity_lab::flow::FlowParams;
use rigidity_lab::hofer::{autonomous_length, hof2_check, lemma2_check, path_length, Lemma2Settings};
use rigidity_lab::FieldExpr;

fn main() -> rigidity_lab::Result<()> {
    let (h, k) = (FieldExpr::sin(1, 0), FieldExpr::sin(0, 1));
    let settings = Lemma2Settings {
        params: FlowParams::with_dt(5e-3),
        ..Lemma2Settings::default()
    };
    let r = lemma2_check(&h, &k, &settings)?;
    println!("max L over tau nodes   {:?}", r.max_l_per_tau);
    println!("max(H o psi_K - H)     {:.9}", r.max_h_pullback_diff);
    println!("max {{H,K}}              {:.9}", r.max_bracket);
    println!("identity residual      {:.2e}", r.identity_residual);

    let cp = CommutatorPath::new(h.clone(), k.clone(), 0.25, 0.25, FlowParams::with_dt(1e-3))?;
    let len = path_length(&cp, 64, 16)?;
    println!("commutator path s=t=1/4: positive {:.6}, full {:.6}", len.positive_length, len.full_length);
    println!("autonomous path of H: positive {:.6}", autonomous_length(&h, 128).positive_length);
    let hof2 = hof2_check(&h, &h.add(&k.scale(0.1)), 1.0)?;
    println!("|l+(H) - l+(H + 0.1K)| = {:.6} <= {:.6}", hof2.difference, hof2.bound);
    Ok(())
}
