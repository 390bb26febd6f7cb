//! Openness sweeps: scale the exponent and watch where the characteristic
//! of |x|^{-1/2} stops being finite.

use varexp::characteristic::DEFAULT_CAP;
use varexp::matrix::{matrix_openness_sweep, MatrixWeight};
use varexp::prelude::*;
use varexp::spaces::{Anchor, ShrinkSpec};
use varexp::weights::openness_sweep;

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
        ..Default::default()
    })?;
    let w = Weight::power(vec![0.0], -0.5)?;
    let p = Exponent::constant(1.5)?;
    let grid = [1.0, 1.1, 1.2, 1.3, 1.34, 1.4];

    let right = openness_sweep(&w, &p, &grid, &family, Side::Right, DEFAULT_CAP, &opts)?;
    for row in &right.rows {
        println!("right s = {:<5} sup = {:?}", row.s, row.sup_value);
    }
    println!("right boundary: {:?}", right.boundary);

    let left = openness_sweep(
        &w,
        &p,
        &[1.0, 1.1, 1.2],
        &family,
        Side::Left,
        DEFAULT_CAP,
        &opts,
    )?;
    for row in &left.rows {
        println!("left  s = {:<5} sup = {:?}", row.s, row.sup_value);
    }

    let m = MatrixWeight::diagonal(vec![w, Weight::Constant(1.0)])?;
    let mat = matrix_openness_sweep(&m, &p, &grid, &family, Side::Right, DEFAULT_CAP, &opts)?;
    println!("matrix boundary: {:?}", mat.boundary);
    Ok(())
}
