//! Lorentz norms of step functions, the diagonal identity, dilations and Hölder ratios.

use conelab::norms::lorentz::{holder_corpus_max, holder_target};
use conelab::norms::{holder_lorentz_check, lorentz_norm, LorentzExponents, StepFunction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> conelab::error::Result<()> {
    let f = StepFunction::new(vec![(0.5, 3.0), (1.0, 1.0), (2.0, 0.25)])?;
    for (p, q) in [(2.0, 2.0), (2.0, 1.0), (2.0, 4.0), (3.0, f64::INFINITY)] {
        let e = LorentzExponents::new(p, q)?;
        let dilated = lorentz_norm(&f.dilated(8.0)?, e);
        println!(
            "L^({p},{q}) = {:.9}  after dilating by 8: {dilated:.9}  (factor {:.6})",
            lorentz_norm(&f, e),
            dilated / lorentz_norm(&f, e)
        );
    }
    println!("L^2 norm {:.9}", f.lp_norm(2.0));

    let e1 = LorentzExponents::new(2.0, 3.0)?;
    let e2 = LorentzExponents::new(4.0, 6.0)?;
    let g = StepFunction::new(vec![(0.5, 0.5), (1.0, 2.0), (2.0, 1.0)])?;
    let report = holder_lorentz_check(&f, &g, e1, e2, holder_target(e1, e2))?;
    println!(
        "one pair: ratio {:.6} into L^({}, {})",
        report.ratio, report.target.p, report.target.q
    );
    for seed in [1, 2] {
        let sup = holder_corpus_max(&mut ChaCha8Rng::seed_from_u64(seed), 500, 10, e1, e2)?;
        println!("corpus seed {seed}: sup ratio {sup:.6}");
    }
    Ok(())
}
