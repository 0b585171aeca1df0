use serde::Serialize;

use crate::error::Result;
use crate::rational::{
    contact_order_slope, eval_rdp, eval_rdp_pf, l_acceptability_margin, stage_weights, IdentityCheck, WeightSource, RDP,
};

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub weight_sum: f64,
    /// `N(s) - e^{-s}D(s)` coefficients of `s¹..s⁴`; all vanish for fourth-order contact.
    pub taylor_defects: [f64; 4],
    /// Minimum of `E(y)` on `[-100, 100]` at spacing 0.1.
    pub e_min: f64,
    /// Log-log slope of the approximation error on `[1e-3, 1e-1]`.
    pub contact_slope: f64,
    /// Largest relative gap between product and partial-fraction forms on `[0, 100]`.
    pub pf_product_gap: f64,
    /// `R(-z)` at `z = 1e8`, approaching zero for an L-acceptable function.
    pub far_field: f64,
    pub k: f64,
    pub weight_sums: [f64; 4],
    pub weight_source: String,
    pub identities: Vec<IdentityCheck>,
}

pub fn stability_check(k: f64) -> Result<StabilityReport> {
    let series = RDP.defect_series(4);
    let ys: Vec<f64> = (-1000..=1000).map(|i| i as f64 * 0.1).collect();
    let pf_product_gap = (0..=10_000)
        .map(|i| {
            let z = i as f64 * 0.01;
            let p = eval_rdp(z);
            (p - eval_rdp_pf(z)).abs() / p.abs().max(1e-300)
        })
        .fold(0.0, f64::max);
    let weights = stage_weights(k)?;
    let weight_source = match &weights.source {
        WeightSource::ClosedForm => "closed-form".to_string(),
        WeightSource::Residue { failed } => format!("residue ({} closed-form checks failed)", failed.len()),
    };
    Ok(StabilityReport {
        weight_sum: RDP.w.iter().sum(),
        taylor_defects: [series[1], series[2], series[3], series[4]],
        e_min: l_acceptability_margin(&ys),
        contact_slope: contact_order_slope(1e-3, 1e-1, 21),
        pf_product_gap,
        far_field: eval_rdp(1e8),
        k,
        weight_sums: weights.sums(),
        weight_source,
        identities: weights.identity_checks(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_values() {
        let r = stability_check(0.1).unwrap();
        assert!((r.weight_sum - 1.0).abs() < 1e-12);
        assert!(r.taylor_defects.iter().all(|d| d.abs() < 1e-12));
        assert!(r.e_min >= -1e-8);
        assert!(r.far_field.abs() < 1e-7);
        assert_eq!(r.identities.len(), 16);
        assert_eq!(r.weight_source, "closed-form");
    }
}
