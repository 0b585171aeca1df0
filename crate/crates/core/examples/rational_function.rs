//! The four-pole rational function against the exponential, and its stage weights.
//!
//! ```text
//! cargo run --release --example rational_function
//! ```

use etdrk4rdp::harness::stability_check;
use etdrk4rdp::rational::{approximation_error, eval_rdp, stage_weights, RDP};

fn main() -> etdrk4rdp::Result<()> {
    println!("poles b = {:?}", RDP.b);
    println!("weights w = {:?}", RDP.w);
    println!();
    println!("{:>8} {:>14} {:>14} {:>11}", "z", "R(-z)", "exp(-z)", "|R - exp|");
    for z in [1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 2.93, 5.0, 8.44, 20.0, 1e3, 1e6] {
        println!(
            "{z:>8} {:>14.6e} {:>14.6e} {:>11.3e}",
            eval_rdp(z),
            (-z).exp(),
            approximation_error(z)
        );
    }

    let r = stability_check(0.1)?;
    println!();
    println!("sum of weights   {:.16}", r.weight_sum);
    println!("min E(y)         {:.3e}", r.e_min);
    println!("contact slope    {:.3}", r.contact_slope);
    println!("R(-1e8)          {:.3e}", r.far_field);

    let k = 0.05;
    let w = stage_weights(k)?;
    println!();
    println!("stage weights for k = {k}:");
    println!("  q = {:?}", w.q);
    println!("  r = {:?}", w.r);
    println!("  g = {:?}", w.g);
    println!("  h = {:?}", w.h);
    println!("  sums / k = {:?}", w.sums().map(|s| s / k));
    Ok(())
}
