//! Dispatches configured experiments and writes the report files.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{Command, Expectation, ExperimentConfig, ProfileSpec, RunConfig, SlopeMode};
use super::report::{
    validate_report, write_summary, ReportRow, ReportWriter, Summary, SummaryDocument,
    SCHEMA_VERSION,
};
use crate::bessel::{verify_error_bound, verify_error_bound_with, KernelRule};
use crate::dyadic::{Dyadic, DyadicRange};
use crate::error::{invalid, Error, Result};
use crate::experiments::{
    band_sharpness, dyadic_sweep, fit_slope, global_restriction_check, multi_band, schur_sum,
    BandOptions, ExponentTriple, Flag, GlobalOptions, SweepOptions, SweepPoint,
};
use crate::extension::{evaluate, extension_direct, SpacetimePoint, Term};
use crate::norms::fourier::hausdorff_young_corpus_max;
use crate::norms::lorentz::holder_corpus_max;
use crate::norms::{
    lorentz_norm, weighted_bessel_norm, LorentzExponents, NormOptions, StepFunction,
};

/// Files and verdict of a finished run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub pass: bool,
    pub csv: PathBuf,
    pub json: PathBuf,
    pub summary: SummaryDocument,
}

pub const REPORT_FILE: &str = "report.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// Runs every experiment in order. Rows are flushed after each experiment, so a
/// failure part-way leaves the finished experiments on disk.
pub fn run(config: &RunConfig, out_dir: &Path, workers: Option<usize>) -> Result<RunOutcome> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.or(config.workers).unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?;
    let csv = out_dir.join(REPORT_FILE);
    let json = out_dir.join(SUMMARY_FILE);
    let mut writer = ReportWriter::create(&csv)?;
    let mut summaries = Vec::with_capacity(config.experiments.len());
    for (idx, exp) in config.experiments.iter().enumerate() {
        let (rows, summary) = pool.install(|| run_experiment(exp, config.seed, idx as u64));
        writer.write_rows(&rows)?;
        summaries.push(summary);
    }
    drop(writer);
    validate_report(&csv)?;
    let summary = SummaryDocument {
        schema_version: SCHEMA_VERSION,
        seed: config.seed,
        pass: summaries.iter().all(|s| s.pass),
        experiments: summaries,
    };
    write_summary(&json, &summary)?;
    Ok(RunOutcome {
        pass: summary.pass,
        csv,
        json,
        summary,
    })
}

/// Rows and summary of one experiment; failures become a failing summary.
pub fn run_experiment(exp: &ExperimentConfig, seed: u64, index: u64) -> (Vec<ReportRow>, Summary) {
    let mut summary = Summary {
        experiment: exp.id.clone(),
        command: exp.command.name().to_string(),
        params: exp.params.clone(),
        slope: None,
        expected_slope: None,
        tolerance: None,
        pass: false,
        measured: Default::default(),
        error: None,
    };
    let mut rows = Vec::new();
    let result = match exp.command {
        Command::BesselCheck => bessel_check(exp, &mut rows, &mut summary),
        Command::ExtensionEval => extension_eval(exp, &mut rows, &mut summary),
        Command::DyadicSweep => sweep(exp, &mut rows, &mut summary),
        Command::Schur => schur(exp, &mut rows, &mut summary),
        Command::LorentzCheck => lorentz(exp, seed, index, &mut rows, &mut summary),
        Command::HyCheck => hausdorff_young(exp, seed, index, &mut rows, &mut summary),
        Command::WeightedBessel => weighted(exp, &mut rows, &mut summary),
        Command::Band => band(exp, &mut rows, &mut summary),
        Command::GlobalCheck => global(exp, &mut rows, &mut summary),
        Command::Report => report(exp, &mut summary),
    };
    if let Err(e) = result {
        summary.pass = false;
        summary.error = Some(e.to_string());
    }
    (rows, summary)
}

/// Independent generator per experiment and sub-corpus.
fn rng_for(seed: u64, index: u64, sub: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((index << 8) | sub);
    rng
}

fn required<T: Copy>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidArgument(format!("missing '{key}'")))
}

fn triple(exp: &ExperimentConfig) -> Result<ExponentTriple> {
    ExponentTriple::new(
        required(exp.n, "n")?,
        exp.p.unwrap_or(2.0),
        required(exp.q, "q")?,
    )
}

fn base_row(exp: &ExperimentConfig) -> ReportRow {
    let mut row = ReportRow::new(&exp.id);
    row.n = exp.n;
    row.p = exp.p;
    row.q = exp.q;
    row
}

fn bessel_check(
    exp: &ExperimentConfig,
    rows: &mut Vec<ReportRow>,
    summary: &mut Summary,
) -> Result<()> {
    let n = required(exp.n, "n")?;
    let range = exp.r_range.unwrap_or(DyadicRange { lo: 0, hi: 10 });
    if range.lo < 0 {
        return invalid("the error-kernel bound is checked for r >= 1");
    }
    let tol = exp.tolerance.unwrap_or(0.01);
    // Four points per octave.
    let grid: Vec<f64> = (4 * range.lo..=4 * range.hi)
        .map(|k| (k as f64 / 4.0).exp2())
        .collect();
    let coarse = verify_error_bound(n, &grid)?;
    let fine = verify_error_bound_with(n, &grid, KernelRule::default().refined())?;
    let sup = |v: &[(f64, f64)]| v.iter().fold(0.0f64, |m, x| m.max(x.1));
    let (sup_coarse, sup_fine) = (sup(&coarse), sup(&fine));
    for (c, f) in coarse.iter().zip(&fine) {
        let mut row = base_row(exp);
        row.r = Some(f.0);
        row.norm_value = Some(f.1);
        row.abs_error = Some((f.1 - c.1).abs());
        rows.push(row);
    }
    let change = if sup_fine > 0.0 {
        (sup_fine - sup_coarse).abs() / sup_fine
    } else {
        0.0
    };
    summary.tolerance = Some(tol);
    summary.measured.insert("sup_scaled_error".into(), sup_fine);
    summary.measured.insert("refinement_change".into(), change);
    summary.pass = if n == 3 {
        sup_fine == 0.0 && sup_coarse == 0.0
    } else {
        sup_fine.is_finite() && change < tol
    };
    Ok(())
}

fn extension_eval(
    exp: &ExperimentConfig,
    rows: &mut Vec<ReportRow>,
    summary: &mut Summary,
) -> Result<()> {
    let n = required(exp.n, "n")?;
    let profile = exp.profile.build()?;
    let t = exp.t.unwrap_or(0.0);
    let radii = exp
        .radii
        .clone()
        .unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0]);
    let tol = exp.tolerance.unwrap_or(1e-7);
    let mut worst: f64 = 0.0;
    for &r in &radii {
        let pt = SpacetimePoint::new(t, r, n)?;
        let direct = extension_direct(&profile, pt)?;
        let mut full = base_row(exp);
        full.r = Some(r);
        full.term = Some(Term::Full.to_string());
        full.norm_value = Some(direct.value.norm());
        full.abs_error = Some(direct.abs_error);
        if r < 1.0 {
            rows.push(full);
            continue;
        }
        let main = evaluate(&profile, pt, Term::Main)?;
        let error = evaluate(&profile, pt, Term::Error)?;
        let residual =
            (direct.value - main.value - error.value).norm() / (1.0 + direct.value.norm());
        worst = worst.max(residual);
        full.residual = Some(residual);
        rows.push(full);
        for (term, v) in [(Term::Main, main), (Term::Error, error)] {
            let mut row = base_row(exp);
            row.r = Some(r);
            row.term = Some(term.to_string());
            row.norm_value = Some(v.value.norm());
            row.abs_error = Some(v.abs_error);
            rows.push(row);
        }
    }
    summary.tolerance = Some(tol);
    summary
        .measured
        .insert("max_decomposition_residual".into(), worst);
    summary.pass = worst <= tol;
    Ok(())
}

/// Far-field annuli start at `2^3`, near-field ones end at `2^-1`.
const FAR_START: i32 = 3;
const NEAR_END: i32 = -1;

fn sweep(exp: &ExperimentConfig, rows: &mut Vec<ReportRow>, summary: &mut Summary) -> Result<()> {
    let exps = triple(exp)?;
    let range = required(exp.r_range, "R")?;
    let profile = exp.profile.build()?;
    let mut opts = SweepOptions {
        norm: NormOptions::default(),
    };
    if let Some(t) = exp.truncation_tol {
        opts.norm.truncation_tol = t;
    }
    if let Some(t) = exp.radial_rel_tol {
        opts.norm.radial_rel_tol = t;
    }
    let mut points = dyadic_sweep(&profile, &exps, range, exp.term, &opts)?;
    let far = range.hi >= FAR_START;
    for p in &mut points {
        let e = p.r.exponent();
        let in_window = if far { e >= FAR_START } else { e <= NEAR_END };
        if !in_window && !p.flags.contains(&Flag::ExcludedFromFit) {
            p.flags.push(Flag::ExcludedFromFit);
        }
    }
    let n = exps.n as f64;
    let expected = exp.expected_slope.unwrap_or(match exp.term {
        Term::Error => -(n + 1.0) / 2.0 + n / exps.q,
        _ if far => exps.far_field_exponent(),
        _ => exps.near_field_exponent(),
    });
    let mode = exp.mode.unwrap_or(match (exp.term, &exp.profile) {
        (Term::Error, _) => SlopeMode::Upper,
        (_, ProfileSpec::Constant) => SlopeMode::TwoSided,
        _ => SlopeMode::Upper,
    });
    let tol = exp
        .tolerance
        .unwrap_or(if mode == SlopeMode::Upper { 0.1 } else { 0.05 });
    summary.expected_slope = Some(expected);
    summary.tolerance = Some(tol);

    let vanishing = exp.term == Term::Error && exps.n == 3;
    let fit = if vanishing {
        None
    } else {
        Some(fit_slope(&points))
    };
    let fitted = fit.as_ref().and_then(|f| f.as_ref().ok());
    for p in &points {
        let mut row = base_row(exp);
        row.p = Some(exps.p);
        row.r = Some(p.r.value());
        row.term = Some(exp.term.to_string());
        if let Some(norm) = &p.norm {
            row.norm_value = Some(norm.value);
            row.abs_error = Some(norm.abs_error);
        }
        if let Some(f) = fitted {
            row.slope = Some(f.slope);
            if p.usable() {
                let x = p.r.exponent() as f64;
                row.residual =
                    Some(p.norm.as_ref().unwrap().value.log2() - f.intercept - f.slope * x);
            }
        }
        rows.push(row.with_flags(&p.flags));
    }
    if vanishing {
        let max = points
            .iter()
            .filter_map(|p| p.norm.as_ref())
            .fold(0.0f64, |m, n| m.max(n.value));
        summary.measured.insert("max_norm".into(), max);
        summary.pass = max == 0.0 && points.iter().all(|p| p.norm.is_some());
        return Ok(());
    }
    let fit = fit.unwrap()?;
    summary.slope = Some(fit.slope);
    summary
        .measured
        .insert("max_residual".into(), fit.max_residual);
    summary.measured.insert("std_error".into(), fit.std_error);
    summary.pass = match mode {
        SlopeMode::TwoSided => (fit.slope - expected).abs() <= tol,
        SlopeMode::Upper => fit.slope <= expected + tol,
    };
    Ok(())
}

fn schur(exp: &ExperimentConfig, rows: &mut Vec<ReportRow>, summary: &mut Summary) -> Result<()> {
    let exps = triple(exp)?;
    let result = schur_sum(&exps, exp.range.unwrap_or(40));
    let last = result.partial_sums.len() - 1;
    for (l, s) in result.partial_sums.iter().enumerate() {
        let mut row = base_row(exp);
        row.p = Some(exps.p);
        row.r = Some((l as f64).exp2());
        row.norm_value = Some(*s);
        let flags = if l == last && !result.convergent {
            vec![Flag::Divergent]
        } else {
            Vec::new()
        };
        rows.push(row.with_flags(&flags));
    }
    let expect = exp.expect.unwrap_or(if exps.above_critical() {
        Expectation::Convergent
    } else {
        Expectation::Divergent
    });
    summary
        .measured
        .insert("truncated_sum".into(), result.truncated());
    summary
        .measured
        .insert("increment_ratio".into(), result.increment_ratio);
    if result.convergent {
        summary
            .measured
            .insert("extrapolated_sum".into(), result.total());
    }
    summary.pass = result.convergent == (expect == Expectation::Convergent);
    Ok(())
}

/// Largest relative deviation tolerated by the exact Lorentz identities.
const IDENTITY_TOL: f64 = 1e-12;

fn lorentz(
    exp: &ExperimentConfig,
    seed: u64,
    index: u64,
    rows: &mut Vec<ReportRow>,
    summary: &mut Summary,
) -> Result<()> {
    let p = required(exp.p, "p")?;
    let e1 = LorentzExponents::new(p, exp.q.unwrap_or(p))?;
    let e2 = LorentzExponents::new(exp.p2.unwrap_or(e1.p), exp.q2.unwrap_or(e1.q))?;
    let trials = exp.trials.unwrap_or(500);
    let pieces = exp.pieces.unwrap_or(10);
    let tol = exp.tolerance.unwrap_or(0.01);
    if pieces == 0 {
        return invalid("pieces must be positive");
    }

    let mut rng = rng_for(seed, index, 0);
    let diagonal = LorentzExponents::new(p, p)?;
    let mut identity: f64 = 0.0;
    let mut dilation: f64 = 0.0;
    for _ in 0..2 * trials {
        let f = StepFunction::random(&mut rng, pieces);
        let lp = f.lp_norm(p);
        if lp == 0.0 {
            continue;
        }
        identity = identity.max((lorentz_norm(&f, diagonal) - lp).abs() / lp);
        let base = lorentz_norm(&f, e1);
        for k in [-3, -1, 1, 5] {
            let lambda = (k as f64).exp2();
            let want = lambda.powf(1.0 / e1.p) * base;
            dilation = dilation.max((lorentz_norm(&f.dilated(lambda)?, e1) - want).abs() / want);
        }
    }
    let sup_a = holder_corpus_max(&mut rng_for(seed, index, 1), trials, pieces, e1, e2)?;
    let sup_b = holder_corpus_max(&mut rng_for(seed, index, 2), trials, pieces, e1, e2)?;
    let spread = (sup_a - sup_b).abs() / sup_a.max(sup_b);
    for sup in [sup_a, sup_b] {
        let mut row = ReportRow::new(&exp.id);
        row.p = Some(e1.p);
        row.q = Some(e1.q);
        row.norm_value = Some(sup);
        rows.push(row);
    }
    summary.tolerance = Some(tol);
    summary
        .measured
        .insert("identity_deviation".into(), identity);
    summary
        .measured
        .insert("dilation_deviation".into(), dilation);
    summary.measured.insert("holder_sup_a".into(), sup_a);
    summary.measured.insert("holder_sup_b".into(), sup_b);
    summary.measured.insert("holder_spread".into(), spread);
    summary.pass =
        identity <= IDENTITY_TOL && dilation <= IDENTITY_TOL && sup_a.is_finite() && spread <= tol;
    Ok(())
}

fn hausdorff_young(
    exp: &ExperimentConfig,
    seed: u64,
    index: u64,
    rows: &mut Vec<ReportRow>,
    summary: &mut Summary,
) -> Result<()> {
    let p = required(exp.p, "p")?;
    let trials = exp.trials.unwrap_or(200);
    let count = exp.count.unwrap_or(4);
    let sup = hausdorff_young_corpus_max(&mut rng_for(seed, index, 0), trials, count, p)?;
    let mut row = ReportRow::new(&exp.id);
    row.p = Some(p);
    row.norm_value = Some(sup);
    rows.push(row);
    summary.measured.insert("corpus_max".into(), sup);
    summary.pass = sup.is_finite() && exp.recorded_max.is_none_or(|m| sup <= m);
    Ok(())
}

fn weighted(
    exp: &ExperimentConfig,
    rows: &mut Vec<ReportRow>,
    summary: &mut Summary,
) -> Result<()> {
    let exps = triple(exp)?;
    let s = exp.s.unwrap_or(1.0);
    let r_max = exp.r_max.unwrap_or(1e4);
    let base = weighted_bessel_norm(exps.n, exps.q, s, r_max)?;
    let push = |rows: &mut Vec<ReportRow>, res: &crate::norms::WeightedBesselResult| {
        let mut row = base_row(exp);
        row.r = Some(r_max);
        row.norm_value = Some(res.norm.value);
        row.abs_error = Some(res.norm.abs_error);
        let flags = if res.divergent {
            vec![Flag::Divergent]
        } else {
            Vec::new()
        };
        rows.push(row.with_flags(&flags));
    };
    push(rows, &base);
    let expect = exp.expect.unwrap_or(if exps.above_critical() {
        Expectation::Convergent
    } else {
        Expectation::Divergent
    });
    summary.measured.insert("norm".into(), base.norm.value);
    summary
        .measured
        .insert("increment_ratio".into(), base.increment_ratio);
    let mut pass = base.divergent == (expect == Expectation::Divergent);
    if let (Some(scale), false) = (exp.scale, base.divergent) {
        let tol = exp.tolerance.unwrap_or(1e-3);
        let scaled = weighted_bessel_norm(exps.n, exps.q, s * scale, r_max)?;
        push(rows, &scaled);
        let n = exps.n as f64;
        let want = scale.powf((n - 2.0) / 2.0 - n / exps.q);
        let ratio = scaled.norm.value / base.norm.value;
        summary.tolerance = Some(tol);
        summary.measured.insert("scaling_ratio".into(), ratio);
        summary
            .measured
            .insert("expected_scaling_ratio".into(), want);
        pass &= (ratio - want).abs() <= tol * want;
    }
    summary.pass = pass;
    Ok(())
}

fn band(exp: &ExperimentConfig, rows: &mut Vec<ReportRow>, summary: &mut Summary) -> Result<()> {
    let exps = triple(exp)?;
    let range = required(exp.delta_range, "delta")?;
    let deltas: Vec<Dyadic> = range.iter().collect();
    let opts = BandOptions {
        cutoff_margin: exp
            .cutoff_margin
            .unwrap_or(BandOptions::default().cutoff_margin),
        ..BandOptions::default()
    };
    let report = band_sharpness(&deltas, &exps, &opts)?;
    let expected = exp.expected_slope.unwrap_or(1.0 - 1.0 / exps.q);
    let tol = exp.tolerance.unwrap_or(0.1);
    for point in &report.points {
        let mut row = base_row(exp);
        row.p = Some(exps.p);
        row.delta = Some(point.delta.value());
        row.term = Some(Term::Full.to_string());
        row.norm_value = Some(point.lhs);
        row.abs_error = Some(point.lhs_error);
        row.slope = Some(report.lhs_fit.slope);
        rows.push(row.with_flags(&point.flags));
    }
    summary.slope = Some(report.lhs_fit.slope);
    summary.expected_slope = Some(expected);
    summary.tolerance = Some(tol);
    summary
        .measured
        .insert("rhs_slope".into(), report.rhs_fit.slope);
    summary
        .measured
        .insert("max_residual".into(), report.lhs_fit.max_residual);
    summary.pass = (report.lhs_fit.slope - expected).abs() <= tol;
    Ok(())
}

fn global(exp: &ExperimentConfig, rows: &mut Vec<ReportRow>, summary: &mut Summary) -> Result<()> {
    let exps = triple(exp)?;
    let levels = exp.m_levels.clone().unwrap_or_else(|| vec![Dyadic::ONE]);
    let decay = exp.mass_decay.unwrap_or(0.0);
    let masses: Vec<(Dyadic, f64)> = levels
        .iter()
        .map(|&m| (m, (-decay * m.0.abs() as f64).exp2()))
        .collect();
    let base = exp.profile.build()?;
    let pieces = multi_band(&base, &masses, exps.n, exps.p)?;
    let report = global_restriction_check(pieces, &exps, &GlobalOptions::default())?;
    let annulus_row = |p: &SweepPoint| {
        let mut row = base_row(exp);
        row.p = Some(exps.p);
        row.r = Some(p.r.value());
        row.term = Some(Term::Full.to_string());
        if let Some(norm) = &p.norm {
            row.norm_value = Some(norm.value);
            row.abs_error = Some(norm.abs_error);
        }
        row.with_flags(&p.flags)
    };
    rows.extend(report.annuli.iter().map(annulus_row));
    let mut total = base_row(exp);
    total.p = Some(exps.p);
    total.term = Some(Term::Full.to_string());
    total.norm_value = Some(report.lhs);
    rows.push(total.with_flags(&report.flags));
    summary.measured.insert("lhs".into(), report.lhs);
    summary.measured.insert("rhs".into(), report.rhs);
    summary.measured.insert("ratio".into(), report.ratio);
    summary
        .measured
        .insert("near_tail".into(), report.near_tail);
    summary.measured.insert("far_tail".into(), report.far_tail);
    summary.pass = report.flags.is_empty()
        && report.ratio.is_finite()
        && exp.bound.is_none_or(|b| report.ratio <= b);
    Ok(())
}

fn report(exp: &ExperimentConfig, summary: &mut Summary) -> Result<()> {
    let path = exp
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("missing 'input'".into()))?;
    let rows = validate_report(path)?;
    summary.measured.insert("rows".into(), rows.len() as f64);
    summary.pass = true;
    Ok(())
}
