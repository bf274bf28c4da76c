//! Global `L^q` norm of a multi-band extension against `‖f‖_{L^p(dσ)}` on the critical line.

use conelab::dyadic::Dyadic;
use conelab::experiments::{
    equal_mass_levels, global_restriction_check, multi_band, ExponentTriple, GlobalOptions,
};
use conelab::profile::RadialProfile;

fn main() -> conelab::error::Result<()> {
    let exps = ExponentTriple::new(3, 2.0, 4.0)?;
    let base = RadialProfile::unit_constant();
    let opts = GlobalOptions::default();
    let cases: Vec<(&str, Vec<(Dyadic, f64)>)> = vec![
        ("single band M = 1", equal_mass_levels(&[Dyadic(0)])),
        ("bands M = 1, 8", equal_mass_levels(&[Dyadic(0), Dyadic(3)])),
        (
            "decaying masses",
            (-1..=1)
                .map(|j| (Dyadic(j), (-10.0 * j.abs() as f64).exp2()))
                .collect(),
        ),
    ];
    for (label, levels) in cases {
        let start = std::time::Instant::now();
        let pieces = multi_band(&base, &levels, exps.n, exps.p)?;
        let report = global_restriction_check(pieces, &exps, &opts)?;
        println!(
            "{label:<20} lhs {:.6}  rhs {:.6}  ratio {:.6}  tails {:.1e}/{:.1e}  flags {:?}  ({:.1?})",
            report.lhs,
            report.rhs,
            report.ratio,
            report.near_tail,
            report.far_tail,
            report.flags,
            start.elapsed()
        );
    }
    Ok(())
}
