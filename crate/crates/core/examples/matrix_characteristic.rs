//! Matrix weight characteristics: the nested definition, the reduced form,
//! and the bound on directional scalar weights.

use nalgebra::DVector;
use varexp::characteristic::DEFAULT_CAP;
use varexp::matrix::{
    matrix_app_characteristic, matrix_to_scalar_check, reduced_characteristic, MatrixWeight,
    ReduceOptions,
};
use varexp::prelude::*;

fn main() -> Result<()> {
    let opts = NormOptions::default();
    let family = CubeFamily::from_cubes(vec![
        Cube::interval(-1.0, 1.0)?,
        Cube::interval(0.0, 0.5)?,
        Cube::interval(0.2, 1.7)?,
    ])?;
    let u = nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
    let w = MatrixWeight::congruence(
        u,
        vec![Weight::power(vec![0.0], -0.4)?, Weight::Constant(2.0)],
    )?;
    let p = Exponent::log_decay(1.6, 0.3)?;

    let nested = matrix_app_characteristic(&w, &p, &family, DEFAULT_CAP, &opts)?;
    let reduced = reduced_characteristic(
        &w,
        &p,
        &family,
        DEFAULT_CAP,
        &ReduceOptions::default(),
        &opts,
    )?;
    for (a, b) in nested.per_cube.iter().zip(&reduced.per_cube) {
        println!(
            "{:?}/{}: nested {:?}, reduced {:?}",
            a.cube.center, a.cube.side, a.value, b.value
        );
    }

    let e = DVector::from_vec(vec![1.0, 1.0]);
    let chk = matrix_to_scalar_check(&w, &e, &p, &family, DEFAULT_CAP, &opts)?;
    println!(
        "[|We|] = {:?} <= {:.4}: {}",
        chk.scalar, chk.bound, chk.holds
    );
    Ok(())
}
