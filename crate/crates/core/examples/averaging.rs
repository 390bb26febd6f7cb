//! Lower bounds for the norm of averaging operators over test fields.

use varexp::matrix::{averaging_norm_lower_bound, default_matrix_tests, MatrixWeight};
use varexp::prelude::*;
use varexp::varnorm::holder_bound;
use varexp::weights::{app_value, default_scalar_tests, scalar_averaging_lower_bound};

fn main() -> Result<()> {
    let opts = NormOptions::default();
    let p = Exponent::constant(1.5)?;
    let s = Weight::power(vec![0.0], -0.5)?;
    for q in [Cube::interval(-1.0, 1.0)?, Cube::interval(0.0, 0.25)?] {
        let b = scalar_averaging_lower_bound(&s, &q, &p, &default_scalar_tests(&s, &p, &q), &opts)?;
        let ch = app_value(&s, &p, &q, &opts)?;
        println!(
            "scalar on {:?}/{}: |A| >= {:.6} over {} fields, K [w] = {:.6}",
            q.center,
            q.side,
            b.value,
            b.tested,
            holder_bound(&p) * ch
        );
    }

    let w = MatrixWeight::diagonal(vec![s, Weight::Constant(1.0)])?;
    let q = Cube::interval(-0.5, 1.0)?;
    let tests = default_matrix_tests(&w, &p, &q, 0);
    let b = averaging_norm_lower_bound(&w, &q, &p, &tests, &opts)?;
    println!(
        "matrix: |A| >= {:.6} over {} fields ({} skipped)",
        b.value, b.tested, b.skipped
    );
    Ok(())
}
