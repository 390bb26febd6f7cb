//! Reducing operators: a constant matrix R with r(e) <= |Re| <= sqrt(d) r(e).

use nalgebra::DMatrix;
use varexp::matrix::{reducing_operator, DirectionalNorm, MatrixWeight, ReduceOptions};
use varexp::prelude::*;

fn main() -> Result<()> {
    let opts = NormOptions::default();
    let ro = ReduceOptions::default();
    let p = Exponent::constant(1.5)?;
    let q = Cube::interval(-0.5, 1.0)?;

    let w = MatrixWeight::diagonal(vec![Weight::power(vec![0.0], -0.5)?, Weight::Constant(1.0)])?;
    let red = reducing_operator(&w, &p, &q, &ro, &opts)?;
    println!("R = {:?}", red.rows());
    println!(
        "held-out |Re|/r(e) in [{:.6}, {:.6}] over {} directions",
        red.lower_ratio, red.sandwich_factor, red.held_out
    );

    let r = DirectionalNorm::new(&w, &p, &q, &opts)?;
    for e in [[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]] {
        let re = (&red.matrix * nalgebra::DVector::from_row_slice(&e)).norm();
        println!("e = {e:?}: r(e) = {:.6}, |Re| = {re:.6}", r.eval(&e)?);
    }

    let c = MatrixWeight::constant(DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 3.0]))?;
    let red = reducing_operator(&c, &p, &q, &ro, &opts)?;
    println!(
        "constant weight: quadratic = {}, factor = {:.3e}",
        red.quadratic, red.sandwich_factor
    );
    Ok(())
}
