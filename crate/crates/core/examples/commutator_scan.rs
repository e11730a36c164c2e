//! Sup-norm deviation of the commutator generator from `st{F,G}` as
//! `s = t = 2^-k` shrinks.

use rigidity_lab::commutator::dyadic_scan;
use rigidity_lab::flow::FlowParams;
use rigidity_lab::FieldExpr;

fn main() -> rigidity_lab::Result<()> {
    let (f, g) = (FieldExpr::sin(1, 0), FieldExpr::sin(0, 1));
    let scan = dyadic_scan(&f, &g, 2, 6, 64, 8, FlowParams::with_dt(1e-3))?;
    println!("k  sup_residual   ratio");
    for (i, r) in scan.reports.iter().enumerate() {
        println!("{}  {:.6e}  {:.6e}", scan.k_min as usize + i, r.sup_residual, r.ratio);
    }
    println!("log2 slope of the ratio: {:?}", scan.decay_exponent);
    Ok(())
}
