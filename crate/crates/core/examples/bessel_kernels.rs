//! Bessel functions through the series and through the main/error split, and the
//! decay of the error kernels `E±(r) r^{(n+1)/2}`.

use conelab::bessel::{
    bessel_j_series, bessel_j_split, bessel_main_term, verify_error_bound, verify_error_bound_with,
    BesselOrder, KernelRule,
};

fn main() -> conelab::error::Result<()> {
    for m in [0.0, 0.5, 1.0, 1.5, 2.0] {
        let order = BesselOrder::new(m)?;
        let r = 17.3;
        let series = bessel_j_series(order, r)?.value.re;
        let split = bessel_j_split(order, r)?.value.re;
        let main = bessel_main_term(order, r)?.re;
        println!("J_{m}({r}) = {series:+.15}  split {split:+.15}  main term alone {main:+.6}");
    }
    let grid: Vec<f64> = (0..=10).map(|k| 2f64.powi(k)).collect();
    for n in 2..=5 {
        let coarse = verify_error_bound(n, &grid)?;
        let fine = verify_error_bound_with(n, &grid, KernelRule::default().refined())?;
        let sup = |v: &[(f64, f64)]| v.iter().fold(0.0f64, |m, x| m.max(x.1));
        println!(
            "n = {n}: sup |E(r)| r^((n+1)/2) over 2^0..2^10 = {:.6}  (refined {:.6})",
            sup(&coarse),
            sup(&fine)
        );
    }
    Ok(())
}
