//! From an A-infinity fit to a certified reverse Hölder exponent, then an
//! empirical search for the largest exponent that still passes.

use varexp::prelude::*;
use varexp::spaces::{Anchor, ShrinkSpec};
use varexp::weights::{
    ainfty_fit, ainfty_pairs, empirical_rh_exponent, rh_exponent_from_ainfty, verify_classical_rh,
};

fn main() -> Result<()> {
    let opts = NormOptions::default();
    let family = CubeFamily::generate(&FamilySpec {
        dim: 1,
        shrink: Some(ShrinkSpec {
            targets: vec![vec![0.0]],
            side0: 2.0,
            levels: 6,
            anchor: Anchor::Centered,
        }),
        explicit: vec![Cube::interval(0.0, 1.0)?, Cube::interval(-0.2, 0.7)?],
        ..Default::default()
    })?;
    let v = Weight::power(vec![0.0], -0.5)?;

    let pairs = ainfty_pairs(&family, 0);
    let fit = ainfty_fit(&v, &Exponent::constant(1.0)?, &pairs, &opts)?;
    println!(
        "A-infinity fit over {} pairs: delta = {}, C1 = {:.4}",
        fit.pairs_used, fit.delta, fit.c1
    );

    let r = rh_exponent_from_ainfty(fit.delta, fit.c1, 1)?;
    let cert = verify_classical_rh(&v, r, &family, &opts)?;
    println!(
        "r = {r:.6}: verified {} with max ratio {:?} (budget {})",
        cert.verified, cert.minimal_c, cert.budget
    );

    let w = v.clone();
    let p = Exponent::constant(1.5)?;
    let search = empirical_rh_exponent(&w, &p, 2.0, &family, 1e-3, 4.0, &opts)?;
    println!(
        "largest passing r for the norm form: {:.4} ({} steps)",
        search.r_star,
        search.history.len()
    );
    Ok(())
}
