//! Luxemburg norms, modulars and the Hölder constant for variable exponents.

use varexp::prelude::*;
use varexp::varnorm::{holder_bound, holder_defect, modular_with};

fn main() -> Result<()> {
    let opts = NormOptions::default();
    let q = Cube::interval(-1.0, 1.0)?;

    // p = 2 on the left half-line, 3 on the right
    let p = Exponent::piecewise(0, 0.0, 2.0, 3.0)?;
    let one = ScalarField::indicator(&q);
    let n = norm_on(&one, &p, &q, &opts)?;
    println!("|chi_[-1,1]| = {:.9} (bracket {:?})", n.value, n.bracket);
    println!("modular at the norm = {:.9}", n.modular_at_value);

    let p = Exponent::log_decay(1.5, 0.5)?;
    let f = ScalarField::power(vec![0.0], -0.3);
    let rho = modular_with(&f, &p, &q, &opts)?;
    let n = norm_on(&f, &p, &q, &opts)?.value;
    println!("rho(|x|^-0.3) = {rho:.6}, norm = {n:.6}");
    println!("p_- = {}, p_+ = {}", p.p_minus(), p.p_plus());

    let g = ScalarField::new(|x| 1.0 + x[0] * x[0]);
    let d = holder_defect(&f, &g, &p, &q, &opts)?;
    println!(
        "int |fg| / (|f|_p |g|_p') = {d:.6} <= K = {}",
        holder_bound(&p)
    );
    Ok(())
}
