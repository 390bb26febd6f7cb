//! |x|^{-1/2} along cubes shrinking to the origin: stable for p = 1.5,
//! flagged divergent for p = 2.5.

use varexp::characteristic::DEFAULT_CAP;
use varexp::prelude::*;
use varexp::spaces::{Anchor, ShrinkSpec};
use varexp::weights::app_characteristic;

fn main() -> Result<()> {
    let opts = NormOptions::default();
    let family = CubeFamily::generate(&FamilySpec {
        dim: 1,
        shrink: Some(ShrinkSpec {
            targets: vec![vec![0.0]],
            side0: 1.0,
            levels: 12,
            anchor: Anchor::Corner,
        }),
        ..Default::default()
    })?;
    let w = Weight::power(vec![0.0], -0.5)?;
    for p0 in [1.5, 1.9, 2.5] {
        let c = app_characteristic(&w, &Exponent::constant(p0)?, &family, DEFAULT_CAP, &opts)?;
        let tail: Vec<String> = c
            .per_cube
            .iter()
            .rev()
            .take(3)
            .map(|v| format!("{:?}", v.value))
            .collect();
        println!(
            "p = {p0}: sup {:?}, smallest cubes {}",
            c.sup_value,
            tail.join(", ")
        );
        if let Some(why) = &c.divergence_reason {
            println!("  divergent: {why}");
        }
    }
    Ok(())
}
