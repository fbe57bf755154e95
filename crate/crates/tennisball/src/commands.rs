//! One function per subcommand. Each returns the records and checks of the
//! run; writing them out is left to the caller.
//!
//! Stream layout: every subcommand starts from `SeededStream::root(seed)`.
//! `scan-circles` uses child `c` for circle `c`; `estimate-delta` uses child
//! `n` for dimension `n`; `subspace-test` and `end-to-end` use the roles of
//! `experiments::end_to_end_streams`; `verify-lemmas` gives each lemma its own
//! child.

use std::f64::consts::PI;
use std::path::Path;
use std::{fs, io};

use rand::Rng;
use serde_json::json;
use tennisball_core::experiments::{self, end_to_end_streams, EndToEndSummary, EstimateReport};
use tennisball_core::sampling::{self, SeededStream, SubspaceFrame};
use tennisball_core::{bounds, measure, SphereVector, StaircaseParams};
use thiserror::Error;

use crate::config::{Command, RunConfig};
use crate::report::{Check, Outcome};
use crate::runner::Runner;
use crate::vector_io::{self, VectorFormat, VectorIoError};

pub const WITNESS: &str = "every 2-dimensional subspace has a point outside the expansion of Gamma";
pub const INCLUSION: &str = "the tennis-ball map sends the complement of Delta into Gamma";
pub const SUBSPACE: &str = "a random subspace of proportional dimension misses Delta";
pub const SWITCHING: &str = "switching lemma: pair statistics move by at most twice the distance";
pub const EXPANSION: &str = "expansion lemma: points near Gamma keep pair mass above 1 - 2 lambda^2 beta - 6 epsilon";
pub const SEPARATION: &str = "angle separation lemma: separated phase pairs carry mass at least 1/3";
pub const COTANGENT: &str = "cotangent lemma: P[a <= cot theta <= b] is bounded";
pub const BAD_RATIO: &str = "bad-ratio lemma: sine ratios rarely land in B^2 B^-2";

/// Tolerance for the randomised lemma checks.
pub const SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] tennisball_core::Error),
    #[error(transparent)]
    Vectors(#[from] VectorIoError),
    #[error("{path}: {source}")]
    File { path: String, source: io::Error },
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, RunError>;

pub fn run(cmd: &Command, cfg: &RunConfig, runner: &Runner) -> Result<Outcome> {
    match cmd {
        Command::Map { input, vectors_out, vector_format, inverse } => {
            map(cfg, input, vectors_out.as_deref(), *vector_format, *inverse)
        }
        Command::ScanCircles => scan_circles(cfg, runner),
        Command::EstimateDelta { sweep } => estimate_delta(cfg, runner, sweep),
        Command::SubspaceTest => subspace_test(cfg, runner),
        Command::EndToEnd => end_to_end(cfg, runner),
        Command::VerifyLemmas { switch_eps } => verify_lemmas(cfg, runner, *switch_eps),
        Command::Bounds { delta, m } => Ok(bound_table(cfg, *delta, *m)),
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| RunError::File { path: path.display().to_string(), source })
}

pub fn map(
    cfg: &RunConfig,
    input: &Path,
    vectors_out: Option<&Path>,
    vector_format: Option<VectorFormat>,
    inverse: bool,
) -> Result<Outcome> {
    let p = &cfg.params;
    let (format, raw) = vector_io::read_any(&read_file(input)?)?;
    let mut out = Outcome::default();
    let mut mapped = Vec::with_capacity(raw.len());
    let mut violations = 0u64;
    for (index, coords) in raw.into_iter().enumerate() {
        let v = SphereVector::new(coords).map_err(|e| RunError::Input(format!("vector {index}: {e}")))?;
        let x = v.normalized().map_err(|e| RunError::Input(format!("vector {index}: {e}")))?;
        let y = if inverse { measure::psi_inverse(&x, p)? } else { measure::psi(&x, p)? };
        // the preimage is the domain side in both directions
        let (pre, image) = if inverse { (&y, &x) } else { (&x, &y) };
        let in_delta = measure::in_delta(pre, p)?;
        let in_gamma = measure::in_gamma(image, p)?;
        violations += u64::from(!in_delta && !in_gamma);
        out.record(
            "vector",
            json!({
                "index": index,
                "n": v.dim(),
                "input_norm": v.norm(),
                "preimage_in_delta": in_delta,
                "image_in_gamma": in_gamma,
            }),
        );
        mapped.push(y.into_coords());
    }
    if let Some(path) = vectors_out {
        let file =
            fs::File::create(path).map_err(|source| RunError::File { path: path.display().to_string(), source })?;
        vector_io::write(vector_format.unwrap_or(format), io::BufWriter::new(file), &mapped)
            .map_err(|source| RunError::File { path: path.display().to_string(), source })?;
    }
    out.check(Check::new("inclusion", INCLUSION, violations == 0, format!("{violations} violations")));
    Ok(out)
}

pub fn scan_circles(cfg: &RunConfig, runner: &Runner) -> Result<Outcome> {
    let p = &cfg.params;
    let stream = SeededStream::root(cfg.seed);
    let reports = runner.try_map(cfg.circles, |c| experiments::circle_trial(cfg.n, cfg.grid, p, stream, c))?;
    let mut out = Outcome::default();
    let certified = reports.iter().filter(|r| r.certified).count();
    let excluded = reports.iter().filter(|r| r.gamma_eps_excluded).count();
    let worst = reports.iter().map(|r| r.best_out_mass).fold(f64::INFINITY, f64::min);
    for r in &reports {
        out.record("circle", r);
    }
    out.record(
        "scan_totals",
        json!({
            "n": cfg.n,
            "grid": cfg.grid,
            "circles": cfg.circles,
            "certified": certified,
            "gamma_eps_excluded": excluded,
            "min_best_out_mass": worst,
        }),
    );
    let total = reports.len();
    out.check(Check::new("witness", WITNESS, certified == total, format!("{certified}/{total} circles certified")));
    if p.expansion_exclusion_threshold() < experiments::WITNESS_THRESHOLD {
        out.check(Check::new(
            "gamma_eps_excluded",
            WITNESS,
            excluded == total,
            format!("{excluded}/{total} circles outside Gamma_epsilon"),
        ));
    }
    Ok(out)
}

pub fn estimate_delta(cfg: &RunConfig, runner: &Runner, sweep: &[usize]) -> Result<Outcome> {
    let dims = if sweep.is_empty() { vec![cfg.n] } else { sweep.to_vec() };
    if dims.contains(&0) {
        return Err(RunError::Input("sweep dimensions must be positive".into()));
    }
    let mut out = Outcome::default();
    for n in dims {
        let stream = SeededStream::root(cfg.seed).child(n as u64);
        let flags = runner.try_map(cfg.trials, |t| experiments::delta_trial(n, &cfg.params, stream, t))?;
        let hits = flags.iter().filter(|&&f| f).count() as u64;
        out.record("estimate", EstimateReport::new("delta_measure", n, hits, cfg.trials, cfg.seed));
    }
    Ok(out)
}

/// Subspace samples outside `Delta` and, of those, images in `Gamma`.
fn subspace_points(cfg: &RunConfig, runner: &Runner, frame: &SubspaceFrame, samples: u64) -> Result<(u64, u64)> {
    let points = end_to_end_streams::points(SeededStream::root(cfg.seed));
    let flags = runner.try_map(samples, |t| experiments::tennis_ball_point_trial(frame, &cfg.params, points, t))?;
    let outside = flags.iter().filter(|f| f.0).count() as u64;
    let images = flags.iter().filter(|f| f.0 && f.1).count() as u64;
    Ok((outside, images))
}

fn subspace_checks(out: &mut Outcome, samples: u64, outside: u64, images: u64) {
    out.check(Check::new(
        "subspace_misses_delta",
        SUBSPACE,
        outside == samples,
        format!("{outside}/{samples} samples outside Delta"),
    ));
    out.check(Check::new(
        "images_in_gamma",
        INCLUSION,
        images == outside,
        format!("{images}/{outside} images in Gamma"),
    ));
}

fn frame(cfg: &RunConfig) -> Result<SubspaceFrame> {
    let mut rng = end_to_end_streams::frame(SeededStream::root(cfg.seed)).rng();
    Ok(sampling::sample_frame(cfg.n, cfg.d, &mut rng)?)
}

pub fn subspace_test(cfg: &RunConfig, runner: &Runner) -> Result<Outcome> {
    let frame = frame(cfg)?;
    let (outside, images) = subspace_points(cfg, runner, &frame, cfg.trials)?;
    let mut out = Outcome::default();
    out.record(
        "estimate",
        EstimateReport::new("subspace_delta_fraction", cfg.n, cfg.trials - outside, cfg.trials, cfg.seed),
    );
    out.record("subspace", json!({ "n": cfg.n, "d": cfg.d, "samples": cfg.trials, "in_delta_complement": outside, "images_in_gamma": images }));
    subspace_checks(&mut out, cfg.trials, outside, images);
    Ok(out)
}

/// The parallel counterpart of `experiments::end_to_end_tennis_ball` with
/// `samples = trials`; both give the same summary.
pub fn end_to_end_summary(cfg: &RunConfig, runner: &Runner) -> Result<EndToEndSummary> {
    let p = &cfg.params;
    let frame = frame(cfg)?;
    let (outside, images) = subspace_points(cfg, runner, &frame, cfg.trials)?;
    let circles = end_to_end_streams::circles(SeededStream::root(cfg.seed));
    let reports = runner.try_map(cfg.circles, |c| experiments::circle_trial(cfg.n, cfg.grid, p, circles, c))?;
    Ok(EndToEndSummary {
        n: cfg.n,
        d: cfg.d,
        seed: cfg.seed,
        epsilon: p.epsilon(),
        paper_valid: p.paper_valid(),
        samples: cfg.trials,
        in_delta_complement: outside,
        images_in_gamma: images,
        circles: cfg.circles,
        certified: reports.iter().filter(|r| r.certified).count() as u64,
        gamma_eps_excluded: reports.iter().filter(|r| r.gamma_eps_excluded).count() as u64,
    })
}

pub fn end_to_end(cfg: &RunConfig, runner: &Runner) -> Result<Outcome> {
    let s = end_to_end_summary(cfg, runner)?;
    let mut out = Outcome::default();
    out.record("end_to_end", &s);
    subspace_checks(&mut out, s.samples, s.in_delta_complement, s.images_in_gamma);
    out.check(Check::new(
        "circles_outside_gamma_eps",
        WITNESS,
        s.gamma_eps_excluded == s.circles && s.certified == s.circles,
        format!(
            "{}/{} certified, {}/{} outside Gamma_epsilon",
            s.certified, s.circles, s.gamma_eps_excluded, s.circles
        ),
    ));
    Ok(out)
}

pub fn verify_lemmas(cfg: &RunConfig, runner: &Runner, switch_eps: f64) -> Result<Outcome> {
    if !(switch_eps > 0.0 && switch_eps < 1.0) {
        return Err(RunError::Input("--switch-eps must lie in (0, 1)".into()));
    }
    let (n, trials, p) = (cfg.n, cfg.trials, &cfg.params);
    let root = SeededStream::root(cfg.seed);
    let mut out = Outcome::default();

    let s = root.child(0);
    let moves = runner.try_map(trials, |t| experiments::switchprob_trial(n, switch_eps, s, t))?;
    let worst = moves.iter().copied().fold(0.0, f64::max);
    let bound = 2.0 * switch_eps;
    let fails = moves.iter().filter(|&&d| d > bound + SLACK).count();
    out.record(
        "lemma",
        json!({ "lemma": "switching", "trials": trials, "failures": fails, "max_change": worst, "bound": bound }),
    );
    out.check(Check::new("switching", SWITCHING, fails == 0, format!("max change {worst:e} against {bound:e}")));

    let s = root.child(1);
    let runs = runner.try_map(trials, |t| experiments::gamma_eps_trial(n, p, s, t))?;
    let fails = runs.iter().filter(|r| !r.holds(SLACK)).count();
    let margin = runs.iter().map(|r| r.perturbed_mass - r.required).fold(f64::INFINITY, f64::min);
    out.record("lemma", json!({ "lemma": "expansion", "trials": trials, "failures": fails, "min_margin": margin }));
    out.check(Check::new("expansion", EXPANSION, fails == 0, format!("{fails} failures, min margin {margin:e}")));

    let s = root.child(2);
    let runs = runner.try_map(trials, |t| experiments::proposition_trial(n, p, s, t))?;
    let checked = runs.iter().flatten().count();
    let fails = runs.iter().flatten().filter(|&&g| !g).count();
    out.record("lemma", json!({ "lemma": "inclusion", "trials": trials, "checked": checked, "failures": fails }));
    out.check(Check::new("inclusion", INCLUSION, fails == 0, format!("{fails} of {checked} images outside Gamma")));

    let s = root.child(3);
    let masses = runner.try_map(trials, |t| {
        sampling::sample_circle(n.max(2), &mut s.child(t).rng()).map(|c| experiments::verify_separated_angles(&c))
    })?;
    let min = masses.iter().copied().fold(f64::INFINITY, f64::min);
    let fails = masses.iter().filter(|&&m| m < 1.0 / 3.0 - SLACK).count();
    out.record("lemma", json!({ "lemma": "angle_separation", "trials": trials, "failures": fails, "min_mass": min }));
    out.check(Check::new("angle_separation", SEPARATION, fails == 0, format!("min mass {min}")));

    let draws = trials.saturating_mul(1000);
    let cot = experiments::verify_cot_bound(0.5, 2.0, draws, root.child(4))?;
    out.record("lemma", json!({ "lemma": "cotangent", "check": cot }));
    let ok = cot.positive.within(5.0) && cot.mirrored.within(5.0);
    out.check(Check::new(
        "cotangent",
        COTANGENT,
        ok,
        format!("{:.3e} and {:.3e} against {:.3e}", cot.positive.empirical, cot.mirrored.empirical, cot.positive.bound),
    ));

    let s = root.child(5);
    let mut rng = s.child(u64::MAX).rng();
    let mut configs = vec![(1.0, 1.0, PI / 2.0, 0.0)];
    for _ in 0..3 {
        configs.push((
            rng.random_range(0.1..3.0),
            rng.random_range(0.1..3.0),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..PI),
        ));
    }
    let mut all_ok = true;
    for (k, &(ai, aj, fi, fj)) in configs.iter().enumerate() {
        let c = experiments::verify_bad_ratio(ai, aj, fi, fj, p, draws / 4, s.child(k as u64))?;
        all_ok &= c.within(5.0);
        out.record(
            "lemma",
            json!({ "lemma": "bad_ratio", "a_i": ai, "a_j": aj, "phi_i": fi, "phi_j": fj, "check": c }),
        );
    }
    out.check(Check::new("bad_ratio", BAD_RATIO, all_ok, format!("{} configurations within 5 sigma", configs.len())));
    Ok(out)
}

/// Every bound evaluator at the configured parameters. Evaluators whose
/// hypotheses fail are listed with the error instead of a value.
pub fn bound_table(cfg: &RunConfig, delta: f64, m: u32) -> Outcome {
    let p: &StaircaseParams = &cfg.params;
    let (lambda, eta, beta, n) = (p.lambda(), p.eta(), p.beta(), cfg.n as u64);
    let mut out = Outcome::default();
    let mut push = |name: &str, r: tennisball_core::Result<serde_json::Value>| match r {
        Ok(v) => out.record("bound", v),
        Err(e) => out.record("bound", json!({ "name": name, "error": e.to_string() })),
    };
    let to_json = |r: bounds::BoundReport| serde_json::to_value(r).expect("bound reports serialize");
    push("simplex", bounds::simplex_count_bound(2.0, m).map(to_json));
    push("jensen", bounds::jensen_count_bound(lambda, lambda * lambda, m).map(to_json));
    push("lognet", bounds::lognet_bound(lambda, 2f64.sqrt(), eta, m).map(to_json));
    push("net", bounds::net_bound(n, delta).map(to_json));
    push("cone", bounds::cone_bound(n, delta).map(to_json));
    push("ringvolume", bounds::ringvolume_bound(n, u64::from(m).min(n), beta, eta, delta).map(to_json));
    push(
        "badvolume_max",
        bounds::badvolume_max(delta, eta, beta, experiments::DEFAULT_GRID).map(|b| {
            json!({
                "name": "badvolume_max",
                "inputs": { "delta": delta, "eta": eta, "beta": beta },
                "value": b.max,
                "argmax": b.argmax,
                "max_large_theta": b.max_large_theta,
                "max_small_theta": b.max_small_theta,
            })
        }),
    );
    push("badvolume_total", bounds::badvolume_total(n, delta, eta, beta).map(to_json));
    for net_eta in [1e-10, eta] {
        push(
            "alpha",
            bounds::alpha_constant(0.999, net_eta)
                .map(|a| json!({ "name": "alpha", "inputs": { "sigma": 0.999, "net_eta": net_eta }, "value": a })),
        );
    }
    out
}
