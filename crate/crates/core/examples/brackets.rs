//! Parse fields from the DSL, take brackets and locate their extrema.

use rigidity_lab::field::{extrema, parse_field, random::random_trig_field};
use rigidity_lab::{poisson, Point2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> rigidity_lab::Result<()> {
    let f = parse_field("sin(2pi*q)")?;
    let g = parse_field("sin(2pi*p)")?;
    let fg = poisson(&f, &g);
    println!("{{F,G}} = {fg}");
    let e = extrema(&fg, 128, 20);
    println!("max {:.12} at ({:.4}, {:.4})  (4 pi^2 = {:.12})", e.max, e.argmax.q, e.argmax.p, 4.0 * std::f64::consts::PI.powi(2));

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let [a, b, c] = [0; 3].map(|_| random_trig_field(&mut rng, 2, 4));
    let x = Point2::new(0.3, 0.7);
    let jacobi = poisson(&a, &poisson(&b, &c)).evaluate(x)
        + poisson(&b, &poisson(&c, &a)).evaluate(x)
        + poisson(&c, &poisson(&a, &b)).evaluate(x);
    println!("Jacobi sum at {x:?}: {jacobi:.3e}");
    Ok(())
}
