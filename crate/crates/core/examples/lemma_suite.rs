//! Numerical checks of the supporting lemmas for the scalar theory.

use varexp::prelude::*;
use varexp::spaces::{Anchor, ShrinkSpec};
use varexp::varnorm::{char_function_bounds, one_characteristic};
use varexp::weights::{ainfty_pairs, verify_scalar_lemma, LemmaId, LemmaParams};

fn main() -> Result<()> {
    let opts = NormOptions::default();
    let family = CubeFamily::generate(&FamilySpec {
        dim: 1,
        shrink: Some(ShrinkSpec {
            targets: vec![vec![0.0]],
            side0: 2.0,
            levels: 4,
            anchor: Anchor::Centered,
        }),
        special: Some(2),
        ..Default::default()
    })?;
    let p = Exponent::log_decay(1.6, 0.4)?;

    let one = one_characteristic(&p, &family, &opts)?;
    println!("[1] = {:?}", one.sup_value);
    let bounds = char_function_bounds(&p, &family, one.sup_value.as_f64(), &opts)?;
    println!(
        "|chi_Q| bounds hold on {}/{} cubes",
        bounds.iter().filter(|b| b.holds).count(),
        bounds.len()
    );

    let w = Weight::power(vec![0.0], -0.3)?;
    let pairs = ainfty_pairs(&family, 0);
    for id in [
        LemmaId::SetRatio,
        LemmaId::WtdDiening,
        LemmaId::AinftyL2,
        LemmaId::Remainder,
        LemmaId::Collapse,
    ] {
        let r = verify_scalar_lemma(id, &w, &p, &family, &pairs, LemmaParams::default(), &opts)?;
        println!(
            "{id:?}: multiplier {:?}, factor {:?}, passes {} over {} samples",
            r.multiplier, r.structural_factor, r.passes, r.samples
        );
    }
    Ok(())
}
