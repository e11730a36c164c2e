//! Implant a planar triple into a 4-dimensional chart and kill its triple
//! bracket by taming the planar factor.

use rigidity_lab::implant::{default_chi, default_seed, theorem3_demo, ImplantSettings};

fn main() -> rigidity_lab::Result<()> {
    let seed = default_seed(0.08);
    let chi = default_chi();
    let settings = ImplantSettings {
        n_plane1: 20,
        n_plane2: 64,
        ..ImplantSettings::default()
    };
    for delta in [0.1, 0.05] {
        let r = theorem3_demo([&seed[0], &seed[1], &seed[2]], &chi, delta, &settings)?;
        println!("{}", r.summary());
    }
    Ok(())
}
