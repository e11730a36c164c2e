//! Integrate a Hamiltonian flow and watch the energy.

use rigidity_lab::field::parse_field;
use rigidity_lab::flow::{FlowParams, FlowSpec};
use rigidity_lab::Point2;

fn main() -> rigidity_lab::Result<()> {
    let h = parse_field("sin(2pi*(q + p)) + 0.3*cos(2pi*(q - 2*p))")?;
    let flow = FlowSpec::new(h.clone(), FlowParams::with_dt(1e-3))?;
    let x = Point2::new(0.1, 0.2);
    let times: Vec<f64> = (0..=8).map(|k| k as f64 * 0.25).collect();
    println!("t       q          p          H drift");
    for (t, y) in times.iter().zip(flow.trajectory(x, &times)?) {
        println!("{t:<6}  {:.6}  {:.6}  {:.2e}", y.q, y.p, h.evaluate(y) - h.evaluate(x));
    }
    let back = flow.advance(flow.advance(x, 1.5)?, -1.5)?;
    println!("round trip error {:.2e}", back.torus_dist(x));
    Ok(())
}
