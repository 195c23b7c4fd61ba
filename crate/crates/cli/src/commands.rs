//! One function per subcommand. Each returns a serialisable result, a CSV
//! table and whether its mathematical checks passed.

use std::time::Instant;

use obslab::construct::{
    random_density, smooth_minorant, transfer_function, BallSystem, MinorantOptions, SampledFunction, SmoothMinorant,
    TransferFunction,
};
use obslab::covering::{comb_gcc_certify, verify_covering, CertificateReport, CertifyOptions, Certificate, CoveringBuilder};
use obslab::evolution::{
    arb_time_shape_check, cost_curve, linear_fit, CostCurve, GramianOptions, LinearFit, ShapeFit,
};
use obslab::geometry::ObservationField;
use obslab::spectral::{
    build_mask, calibrate_m, resolvent_constant, uncertainty_constant, EigenOptions, SpectralGrid, SpectralReport,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{num, opt, Table};

/// Result of one subcommand.
pub struct Outcome<R> {
    pub result: R,
    pub table: Table,
    pub pass: bool,
    /// One line per sweep point, echoed to stdout.
    pub summary: Vec<String>,
}

fn eigen_options(config: &ExperimentConfig) -> EigenOptions {
    EigenOptions {
        dense_limit: config.spectral.dense_limit,
        tol: config.spectral.tol,
        ..EigenOptions::default()
    }
}

fn builder(config: &ExperimentConfig, field: &ObservationField) -> Result<CoveringBuilder, CliError> {
    CoveringBuilder::for_family(field.family(), config.sweep.l, config.sweep.gamma)
        .map_err(|e| CliError::from_core("field.family", e))
}

fn certificate_columns(c: &Certificate) -> [String; 3] {
    match c {
        Certificate::Gcc { length, eta } => ["gcc".into(), num(*length), num(*eta)],
        Certificate::Comb { m, eta, .. } => ["comb".into(), num(*m), num(*eta)],
    }
}

pub fn certify(config: &ExperimentConfig) -> Result<Outcome<CertificateReport>, CliError> {
    let field = config.build_field()?;
    let b = builder(config, &field)?;
    let rho = config.sweep.rho;
    let lambdas = if config.sweep.lambda.is_empty() {
        let l0 = b.lambda0(rho);
        vec![l0, 2.0 * l0]
    } else {
        config.sweep.lambda.clone()
    };
    let report = comb_gcc_certify(&field, rho, &lambdas, &b, &CertifyOptions::default())
        .map_err(|e| CliError::from_core("certify", e))?;
    let mut table = Table::new(&[
        "lambda", "angle", "p", "q", "certificate", "length", "eta", "measured", "floor", "pass",
    ]);
    let mut summary = Vec::new();
    for l in &report.lambdas {
        for e in &l.entries {
            let [kind, length, eta] = certificate_columns(&e.certificate);
            table.push(vec![
                num(l.lambda),
                num(e.angle),
                opt(e.p),
                opt(e.q),
                kind,
                length,
                eta,
                num(e.measured),
                num(e.floor),
                e.pass.to_string(),
            ]);
        }
        summary.push(format!(
            "lambda={} entries={} failures={} covers={} budget_ok={} pass={}",
            num(l.lambda),
            l.entries.len(),
            l.failures,
            l.covering.covers,
            l.covering.budget_ok,
            l.pass
        ));
    }
    Ok(Outcome {
        pass: report.pass,
        result: report,
        table,
        summary,
    })
}

#[derive(Serialize)]
pub struct CoverResult {
    pub builder: CoveringBuilder,
    pub coverings: Vec<obslab::covering::EffectiveCovering>,
    pub reports: Vec<obslab::covering::CoveringReport>,
}

pub fn cover(config: &ExperimentConfig) -> Result<Outcome<CoverResult>, CliError> {
    let field = config.build_field()?;
    let b = builder(config, &field)?;
    let rho = config.sweep.rho;
    let lambdas = if config.sweep.lambda.is_empty() {
        vec![b.lambda0(rho)]
    } else {
        config.sweep.lambda.clone()
    };
    let mut table = Table::new(&["lambda", "angle", "p", "q", "eps", "m", "certificate", "length", "eta", "budget"]);
    let (mut coverings, mut reports, mut summary) = (Vec::new(), Vec::new(), Vec::new());
    for &lambda in &lambdas {
        let cov = b.build(rho, lambda).map_err(|e| CliError::from_core("sweep.lambda", e))?;
        let rep = verify_covering(&cov);
        for e in &cov.entries {
            let [kind, length, eta] = certificate_columns(&e.certificate);
            table.push(vec![
                num(lambda),
                num(e.theta.angle()),
                opt(e.rational.map(|r| r.p)),
                opt(e.rational.map(|r| r.q)),
                num(e.eps),
                num(e.m),
                kind,
                length,
                eta,
                num(e.budget(lambda)),
            ]);
        }
        summary.push(format!(
            "lambda={} entries={} covers={} budget_ok={} worst_margin={}",
            num(lambda),
            rep.entries,
            rep.covers,
            rep.budget_ok,
            num(rep.worst_margin)
        ));
        coverings.push(cov);
        reports.push(rep);
    }
    Ok(Outcome {
        pass: reports.iter().all(|r| r.covers && r.budget_ok),
        result: CoverResult {
            builder: b,
            coverings,
            reports,
        },
        table,
        summary,
    })
}

fn spectral_header(config: &ExperimentConfig) -> Table {
    let mut h = vec!["lambda", "kind", "rank", "c", "C", "M", "residual"];
    if config.run.timing {
        h.push("wall_time");
    }
    Table::new(&h)
}

fn spectral_row(config: &ExperimentConfig, lambda: f64, r: &SpectralReport, seconds: f64) -> Vec<String> {
    let kind = serde_json::to_value(r.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let resolvent = matches!(r.kind, obslab::spectral::ConstantKind::ResolventM);
    let mut row = vec![
        num(lambda),
        kind,
        r.rank.to_string(),
        if resolvent { String::new() } else { num(r.eigenvalue) },
        if resolvent { String::new() } else { num(r.value) },
        if resolvent { num(r.value) } else { String::new() },
        num(r.residual),
    ];
    if config.run.timing {
        row.push(format!("{seconds:.3}"));
    }
    row
}

pub fn uncertainty(config: &ExperimentConfig) -> Result<Outcome<Vec<SpectralReport>>, CliError> {
    let field = config.build_field()?;
    let grid = SpectralGrid::of_field(&field).map_err(|e| CliError::from_core("field", e))?;
    let lambdas = if config.sweep.lambda.is_empty() {
        (1..=5).map(|j| grid.nyquist() / 2.0 * j as f64 / 5.0).collect()
    } else {
        config.sweep.lambda.clone()
    };
    let opts = eigen_options(config);
    let mut table = spectral_header(config);
    let (mut reports, mut summary) = (Vec::new(), Vec::new());
    for &lambda in &lambdas {
        let mask = build_mask(grid, config.mask_kind(lambda)?).map_err(|e| CliError::from_core("spectral.mask", e))?;
        for weight in config.weights()? {
            let start = Instant::now();
            let r = uncertainty_constant(&field, &mask, weight, &opts)
                .map_err(|e| CliError::from_core("uncertainty", e))?;
            table.push(spectral_row(config, lambda, &r, start.elapsed().as_secs_f64()));
            summary.push(format!(
                "lambda={} weight={weight:?} rank={} c={} C={}",
                num(lambda),
                r.rank,
                num(r.eigenvalue),
                num(r.value)
            ));
            reports.push(r);
        }
    }
    Ok(Outcome {
        result: reports,
        table,
        pass: true,
        summary,
    })
}

/// `0.6` times the Nyquist radius, reduced so that the ball mask has about
/// half of `dense_limit` points.
fn default_cutoff(grid: &SpectralGrid, dense_limit: usize) -> f64 {
    let half = dense_limit as f64 / 2.0;
    let by_rank = match grid.dim {
        1 => grid.spacing() * half / 2.0,
        _ => grid.spacing() * (half / std::f64::consts::PI).sqrt(),
    };
    (0.6 * grid.nyquist()).min(by_rank)
}

#[derive(Serialize)]
pub struct ResolventResult {
    pub m: f64,
    pub calibrated: bool,
    pub cutoff: f64,
    pub reports: Vec<SpectralReport>,
    /// Fit of `log M` against `log lambda` over finite positive values.
    pub slope: Option<LinearFit>,
}

pub fn resolvent(config: &ExperimentConfig) -> Result<Outcome<ResolventResult>, CliError> {
    let field = config.build_field()?;
    let grid = SpectralGrid::of_field(&field).map_err(|e| CliError::from_core("field", e))?;
    let gamma = config.spectral.symbol_gamma;
    let cutoff = config.sweep.cutoff.unwrap_or_else(|| default_cutoff(&grid, config.spectral.dense_limit));
    let opts = eigen_options(config);
    let (m, calibrated) = match config.spectral.m {
        Some(m) => (m, false),
        None => (
            calibrate_m(&field, gamma, config.spectral.lambda0, &opts)
                .map_err(|e| CliError::from_core("spectral.lambda0", e))?,
            true,
        ),
    };
    let lambdas = if config.sweep.lambda.is_empty() {
        let top = (cutoff / 2.0).powf(gamma);
        (0..6).map(|j| top / 2f64.powi(5 - j)).collect()
    } else {
        config.sweep.lambda.clone()
    };
    let mut table = spectral_header(config);
    let (mut reports, mut summary) = (Vec::new(), Vec::new());
    for &lambda in &lambdas {
        let start = Instant::now();
        let r = resolvent_constant(&field, cutoff, gamma, lambda, m, &opts)
            .map_err(|e| CliError::from_core("resolvent", e))?;
        table.push(spectral_row(config, lambda, &r, start.elapsed().as_secs_f64()));
        summary.push(format!("lambda={} rank={} M={}", num(lambda), r.rank, num(r.value)));
        reports.push(r);
    }
    let (x, y): (Vec<f64>, Vec<f64>) = lambdas
        .iter()
        .zip(&reports)
        .filter(|(_, r)| r.value.is_finite() && r.value > 0.0)
        .map(|(l, r)| (l.ln(), r.value.ln()))
        .unzip();
    let slope = (x.len() >= 2).then(|| linear_fit(&x, &y));
    if let Some(f) = &slope {
        summary.push(format!("log-log slope={} r2={}", num(f.slope), num(f.r_squared)));
    }
    Ok(Outcome {
        result: ResolventResult {
            m,
            calibrated,
            cutoff,
            reports,
            slope,
        },
        table,
        pass: true,
        summary,
    })
}

#[derive(Serialize)]
pub struct ObserveResult {
    pub curve: CostCurve,
    pub shape: Option<ShapeFit>,
}

pub fn observe(config: &ExperimentConfig) -> Result<Outcome<ObserveResult>, CliError> {
    let field = config.build_field()?;
    let times = if config.sweep.t.is_empty() {
        vec![0.1, 0.2, 0.5, 1.0]
    } else {
        config.sweep.t.clone()
    };
    let cutoff = config.sweep.cutoff.unwrap_or(10.0);
    let opts = GramianOptions {
        eigen: eigen_options(config),
        ..GramianOptions::default()
    };
    let curve = cost_curve(&field, config.sweep.beta, &times, cutoff, &opts)
        .map_err(|e| CliError::from_core("observe", e))?;
    let shape = match config.sweep.eps_decay {
        Some(eps) => Some(arb_time_shape_check(&curve, eps, 0.9).map_err(|e| CliError::from_core("sweep.eps_decay", e))?),
        None => None,
    };
    let mut table = Table::new(&["T", "K", "n_nodes", "lambda_min", "kappa"]);
    let mut summary = Vec::new();
    for r in &curve.reports {
        table.push(vec![num(r.t), num(r.cutoff), r.n_nodes.to_string(), num(r.lambda_min), num(r.kappa)]);
        summary.push(format!("T={} rank={} lambda_min={} kappa={}", num(r.t), r.rank, num(r.lambda_min), num(r.kappa)));
    }
    if let Some(s) = &shape {
        summary.push(format!(
            "fit log kappa ~ T^{}: slope={} r2={} pass={}",
            num(s.exponent),
            num(s.fit.slope),
            num(s.fit.r_squared),
            s.pass
        ));
    }
    Ok(Outcome {
        pass: curve.monotone && shape.as_ref().is_none_or(|s| s.pass),
        result: ObserveResult { curve, shape },
        table,
        summary,
    })
}

#[derive(Serialize)]
pub struct ConstructResult {
    pub seed: u64,
    pub minorant: SmoothMinorant,
    pub density: SampledFunction,
    pub transfer: TransferFunction,
}

pub fn construct_demo(config: &ExperimentConfig) -> Result<Outcome<ConstructResult>, CliError> {
    let s = &config.sweep;
    let (m, rho, delta) = (s.m, s.rho, s.ball_delta);
    if !(rho > 0.0 && rho < 1.0) {
        return Err(CliError::usage(format!("sweep.rho = {rho} is outside the valid range (0,1)")));
    }
    if !(delta > 0.0 && delta < m / 2.0) {
        return Err(CliError::usage(format!(
            "sweep.ball_delta = {delta} is outside the valid range (0, M/2)"
        )));
    }
    let per_unit = (MinorantOptions::default().nodes_per_bump / (rho * delta)).ceil();
    let h = m / (m * per_unit).ceil();
    let n = (s.length / h).round() as usize;
    let grid = SampledFunction::zeros(0.0, h, n);
    let mut rng = ChaCha8Rng::seed_from_u64(config.run.seed);
    let balls = BallSystem::random(&mut rng, &grid, m, rho, delta).map_err(|e| CliError::from_core("sweep", e))?;
    let minorant = smooth_minorant(&balls, m, rho, &grid, &MinorantOptions::default())
        .map_err(|e| CliError::from_core("construct-demo", e))?;
    let (density, partition) = random_density(&mut rng, &grid, m, rho).map_err(|e| CliError::from_core("sweep", e))?;
    let transfer = transfer_function(&density, rho, &partition).map_err(|e| CliError::from_core("construct-demo", e))?;

    let mut table = Table::new(&["k", "s_k", "t_k", "cell_mean"]);
    let nodes = &minorant.partition.nodes;
    for (k, w) in nodes.windows(2).enumerate() {
        table.push(vec![
            k.to_string(),
            num(minorant.a.node(w[0])),
            num(minorant.t[k]),
            num(minorant.a.mean(w[0], w[1])),
        ]);
    }
    let rep = &minorant.report;
    let transfer_ok = transfer.max_abs <= transfer.bound;
    let summary = vec![
        format!(
            "minorant: eta={} window_min={} cells={} pass={}",
            num(minorant.eta),
            num(rep.window_min),
            minorant.t.len(),
            rep.pass
        ),
        format!(
            "transfer: max|B|={} bound={} pass={}",
            num(transfer.max_abs),
            num(transfer.bound),
            transfer_ok
        ),
    ];
    Ok(Outcome {
        pass: rep.pass && transfer_ok,
        result: ConstructResult {
            seed: config.run.seed,
            minorant,
            density,
            transfer,
        },
        table,
        summary,
    })
}
