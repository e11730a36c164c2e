//! Tame a triple of fields on thick grids so that `{F1,{F2,F3}}` vanishes.

use rigidity_lab::field::Domain;
use rigidity_lab::tamed::{build_cover, coverage, default_eta, tame_to_epsilon, tame_triple};
use rigidity_lab::FieldExpr;

fn main() -> rigidity_lab::Result<()> {
    let fields = [FieldExpr::sin(1, 0), FieldExpr::sin(0, 1), FieldExpr::sin(1, 1)];
    let refs = [&fields[0], &fields[1], &fields[2]];
    let cov = coverage(&build_cover(3)?, 900);
    println!("cover m=3: {} uncovered, multiplicities {:?}", cov.uncovered, cov.multiplicity);
    for m in [2, 4, 8] {
        let t = tame_triple(refs, m, default_eta(m))?;
        let check = t.verify(256);
        println!(
            "m={m}: C0 errors {:.4} {:.4} {:.4}, triple sup {:.1e}",
            t.c0_errors[0], t.c0_errors[1], t.c0_errors[2], check.sup_triple_bracket
        );
    }
    let t = tame_to_epsilon(refs, 0.2, 64, Domain::Torus)?;
    println!("epsilon 0.2 reached at m = {}", t.m());
    Ok(())
}
