//! Calibrate Gaussian and Laplace mechanisms and split a budget across
//! repeated releases.

use privrl::privacy::{
    advanced_composition_split, gaussian_sigma, laplace_scale, simple_composition_split, PrivacyBudget,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget = PrivacyBudget::new(0.9, 1e-5)?;
    println!("gaussian sigma for L2 sensitivity 1: {:.4}", gaussian_sigma(1.0, budget)?);
    println!("laplace scale for L1 sensitivity 1:  {:.4}", laplace_scale(1.0, budget.epsilon)?);

    for k in [1, 10, 100, 1000] {
        let adv = advanced_composition_split(budget, k)?;
        let simple = simple_composition_split(budget, k)?;
        println!(
            "k = {k:4}: advanced eps {:.5} (sigma {:8.3}), simple eps {:.5} (sigma {:8.3})",
            adv.epsilon,
            gaussian_sigma(1.0, adv)?,
            simple.epsilon,
            gaussian_sigma(1.0, simple)?
        );
    }
    Ok(())
}
