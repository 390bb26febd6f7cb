//! The variable-exponent weight characteristic over a cube family, and its
//! agreement with the classical one when the exponent is constant.

use varexp::characteristic::DEFAULT_CAP;
use varexp::prelude::*;
use varexp::spaces::{DyadicSpec, ShrinkSpec};
use varexp::weights::{app_characteristic, app_value, classical_ap_value};

fn main() -> Result<()> {
    let opts = NormOptions::default();
    let family = CubeFamily::generate(&FamilySpec {
        dim: 1,
        dyadic: Some(DyadicSpec {
            min_level: -2,
            max_level: 4,
            bbox: Cube::interval(-4.0, 4.0)?,
            max_per_level: 16,
            targets: vec![vec![0.0]],
            seed: 0,
        }),
        shrink: Some(ShrinkSpec {
            targets: vec![vec![0.0]],
            side0: 2.0,
            levels: 8,
            anchor: Default::default(),
        }),
        special: Some(3),
        ..Default::default()
    })?;

    let w = Weight::power(vec![0.0], -0.25)?;
    let p = Exponent::log_decay(1.8, 0.4)?;
    let c = app_characteristic(&w, &p, &family, DEFAULT_CAP, &opts)?;
    println!(
        "{} cubes, sup = {:?}, attained on {:?}",
        family.len(),
        c.sup_value,
        c.argmax
    );

    let p2 = Exponent::constant(2.0)?;
    let v = w.powf(2.0);
    println!("{:>22} {:>12} {:>12}", "cube", "[w]_Q", "[v]_Q^(1/2)");
    for q in family.cubes.iter().take(8) {
        let a = app_value(&w, &p2, q, &opts)?;
        let b = classical_ap_value(&v, 2.0, q, &opts)?.sqrt();
        println!(
            "{:>22} {a:12.8} {b:12.8}",
            format!("{:?}/{}", q.center, q.side)
        );
    }
    Ok(())
}
