//! The scenario pipeline: build, lift, verify, optimize, report.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use pbsurf_core::collection::collection::{CollectionMode, PositiveCollection};
use pbsurf_core::collection::io::parse_mode;
use pbsurf_core::collection::pb::{pb_function, sup_pb};
use pbsurf_core::cover::cover::Cover;
use pbsurf_core::error::Error as CoreError;
use pbsurf_core::fields::shapes::cap_field;
use pbsurf_core::geometry::chart::{ChartKind, SurfaceChart};
use pbsurf_core::geometry::field::ScalarField;
use pbsurf_core::geometry::ops::integrate;
use pbsurf_core::lift::ops::{lift_collection, lift_cover};
use pbsurf_core::optimize::minimize::{minimize_pb, Objective, OptimizerParams};
use pbsurf_core::verify::averaging::averaging_report;
use pbsurf_core::verify::checks::{
    blt_comparison, check_confined_essential, check_partition_refinement, check_pb_bound,
    check_star, confined_essential_discs, CheckReport, DEFAULT_TOL,
};
use pbsurf_core::verify::measure::Measure;

use crate::report::{emit_plot_data, write_csv, Row, RowStatus};
use crate::scenario::{
    resolve, AtSelector, CheckSpec, DiscSelector, MeasureSpec, OptimizerSpec, Scenario,
};

pub struct RunOutcome {
    pub rows: Vec<Row>,
    pub any_failure: bool,
}

struct Ctx {
    scenario_id: String,
    chart: Arc<SurfaceChart>,
    cover: Cover,
    collection: PositiveCollection,
    localization: Option<Vec<usize>>,
    seed: u64,
}

impl Ctx {
    fn grid(&self) -> String {
        format!("{}x{}", self.chart.n1(), self.chart.n2())
    }

    fn row_from_report(&self, report: CheckReport, ms: u128) -> Row {
        Row {
            scenario: self.scenario_id.clone(),
            check: report.id,
            value: report.value,
            bound: report.bound,
            margin: report.margin,
            status: if report.pass { RowStatus::Pass } else { RowStatus::Fail },
            grid: self.grid(),
            runtime_ms: ms,
        }
    }

    fn skipped(&self, id: &str, reason: &str, ms: u128) -> Row {
        log::info!("check {id} skipped: {reason}");
        Row {
            scenario: self.scenario_id.clone(),
            check: id.to_string(),
            value: f64::NAN,
            bound: f64::NAN,
            margin: f64::NAN,
            status: RowStatus::SkippedHypotheses,
            grid: self.grid(),
            runtime_ms: ms,
        }
    }
}

fn is_hypothesis_error(err: &CoreError) -> bool {
    matches!(
        err,
        CoreError::HypothesesUnmet(_) | CoreError::PreconditionFailed(_) | CoreError::NotPartitionMode
    )
}

/// Runs a scenario end to end, returning the emitted rows. Hypothesis-unmet
/// checks become `skipped:hypotheses` rows and do not count as failures.
pub fn run_scenario(
    scenario: &Scenario,
    base: &Path,
    grid_override: Option<usize>,
    seed_override: Option<u64>,
    out_dir: &Path,
) -> Result<RunOutcome> {
    let seed = seed_override.unwrap_or(scenario.seed);
    let resolved = resolve(scenario, base, grid_override, seed)?;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;

    // validity of the input data is a hard precondition, not a check row
    resolved
        .collection
        .validate_strict(&resolved.cover)
        .map_err(|e| anyhow!("scenario collection invalid: {e}"))?;

    let mut ctx = Ctx {
        scenario_id: scenario.id.clone(),
        chart: resolved.chart,
        cover: resolved.cover,
        collection: resolved.collection,
        localization: resolved.localization,
        seed,
    };
    let mut rows = Vec::new();

    if let Some(map) = &resolved.map {
        let t = Instant::now();
        let min_s_before = ctx.collection.min_sum();
        let lifted_cover = lift_cover(map, &ctx.cover)?;
        let lifted = lift_collection(map, &ctx.collection, &lifted_cover)?;
        let min_s_after = lifted.min_sum();
        let dev = (min_s_after - min_s_before).abs();
        rows.push(Row {
            scenario: ctx.scenario_id.clone(),
            check: "lift_sum_preserved".into(),
            value: dev,
            bound: 1e-9,
            margin: 1e-9 - dev,
            status: if dev <= 1e-9 { RowStatus::Pass } else { RowStatus::Fail },
            grid: format!("{}x{}", map.source().n1(), map.source().n2()),
            runtime_ms: t.elapsed().as_millis(),
        });
        ctx.chart = map.source().clone();
        ctx.cover = lifted_cover.cover;
        ctx.collection = lifted;
        // node-based localization data does not transfer across the lift
        ctx.localization = None;
        log::info!("lifted along {:?}: {} discs", scenario.covering_map, ctx.cover.len());
    }

    for spec in &scenario.checks {
        run_check(&ctx, spec, &mut rows)?;
    }

    if let Some(opt) = &scenario.optimizer {
        run_optimizer(&ctx, opt, out_dir, &mut rows)?;
    }

    write_csv(&rows, &out_dir.join("report.csv"))?;
    let any_failure = rows.iter().any(|r| r.status == RowStatus::Fail);
    Ok(RunOutcome { rows, any_failure })
}

fn run_check(ctx: &Ctx, spec: &CheckSpec, rows: &mut Vec<Row>) -> Result<()> {
    let tol = spec.tolerance.unwrap_or(DEFAULT_TOL);
    let t = Instant::now();
    match spec.check.as_str() {
        "confined_essential" | "partition_refinement" => {
            for j in selected_discs(ctx, spec)? {
                let t = Instant::now();
                let result = if spec.check == "confined_essential" {
                    check_confined_essential(&ctx.cover, &ctx.collection, j, tol)
                } else {
                    check_partition_refinement(&ctx.cover, &ctx.collection, j, tol)
                };
                push_result(ctx, &format!("{}[{j}]", spec.check), result, t, rows);
            }
        }
        "star" => {
            for x in selected_points(ctx, spec)? {
                let t = Instant::now();
                let result =
                    check_star(&ctx.cover, &ctx.collection, x, ctx.localization.as_deref(), tol);
                push_result(ctx, &format!("star[{x}]"), result, t, rows);
            }
        }
        "pb_bound" => {
            let mu = build_measure(ctx, spec.measure.as_ref())?;
            let result =
                check_pb_bound(&ctx.cover, &ctx.collection, &mu, ctx.localization.as_deref(), tol);
            push_result(ctx, "pb_bound", result, t, rows);
        }
        "blt_comparison" => {
            let result = blt_comparison(&ctx.cover, &ctx.collection, tol);
            push_result(ctx, "blt_comparison", result, t, rows);
        }
        "averaging" => {
            let mu = build_measure(ctx, spec.measure.as_ref())?;
            match averaging_report(
                &ctx.cover,
                &ctx.collection,
                &mu,
                ctx.localization.as_deref(),
                tol,
            ) {
                Ok(report) => {
                    rows.push(Row {
                        scenario: ctx.scenario_id.clone(),
                        check: "averaging_bound".into(),
                        value: report.rhs,
                        bound: report.lhs,
                        margin: report.rhs - report.lhs,
                        status: if report.holds { RowStatus::Pass } else { RowStatus::Fail },
                        grid: ctx.grid(),
                        runtime_ms: t.elapsed().as_millis(),
                    });
                    let scale = report.fubini_direct.abs().max(1.0);
                    let dev = (report.fubini_direct - report.fubini_exchanged).abs() / scale;
                    rows.push(Row {
                        scenario: ctx.scenario_id.clone(),
                        check: "averaging_fubini".into(),
                        value: dev,
                        bound: 1e-9,
                        margin: 1e-9 - dev,
                        status: if dev <= 1e-9 { RowStatus::Pass } else { RowStatus::Fail },
                        grid: ctx.grid(),
                        runtime_ms: t.elapsed().as_millis(),
                    });
                }
                Err(err) if is_hypothesis_error(&err) => {
                    rows.push(ctx.skipped("averaging", &err.to_string(), t.elapsed().as_millis()));
                }
                Err(err) => return Err(err.into()),
            }
        }
        "sup_pb" => {
            let value = sup_pb(&ctx.collection)?;
            let bound = spec.bound.unwrap_or(1e-12);
            rows.push(Row {
                scenario: ctx.scenario_id.clone(),
                check: "sup_pb".into(),
                value,
                bound,
                margin: bound - value,
                status: if value <= bound { RowStatus::Pass } else { RowStatus::Fail },
                grid: ctx.grid(),
                runtime_ms: t.elapsed().as_millis(),
            });
        }
        other => bail!("unknown check id {other:?}"),
    }
    Ok(())
}

fn push_result(
    ctx: &Ctx,
    id: &str,
    result: pbsurf_core::error::Result<CheckReport>,
    t: Instant,
    rows: &mut Vec<Row>,
) {
    match result {
        Ok(report) => rows.push(ctx.row_from_report(report, t.elapsed().as_millis())),
        Err(err) if is_hypothesis_error(&err) => {
            rows.push(ctx.skipped(id, &err.to_string(), t.elapsed().as_millis()));
        }
        Err(err) => {
            log::error!("check {id} errored: {err}");
            rows.push(Row {
                scenario: ctx.scenario_id.clone(),
                check: id.to_string(),
                value: f64::NAN,
                bound: f64::NAN,
                margin: f64::NAN,
                status: RowStatus::Fail,
                grid: ctx.grid(),
                runtime_ms: t.elapsed().as_millis(),
            });
        }
    }
}

fn selected_discs(ctx: &Ctx, spec: &CheckSpec) -> Result<Vec<usize>> {
    match &spec.disc {
        Some(DiscSelector::Index(j)) => Ok(vec![*j]),
        Some(DiscSelector::Named(name)) if name == "auto" => {
            Ok(confined_essential_discs(&ctx.cover))
        }
        Some(DiscSelector::Named(other)) => bail!("unknown disc selector {other:?}"),
        None => Ok(vec![*ctx.cover.essential_discs().first().unwrap_or(&0)]),
    }
}

fn selected_points(ctx: &Ctx, spec: &CheckSpec) -> Result<Vec<usize>> {
    match &spec.at {
        Some(AtSelector::Point(p)) => Ok(vec![ctx.chart.nearest_node((p[0], p[1]))]),
        Some(AtSelector::Named(name)) if name == "localization" => ctx
            .localization
            .clone()
            .ok_or_else(|| anyhow!("no localization points declared or found")),
        Some(AtSelector::Named(name)) if name.starts_with("samples:") => {
            let k: usize = name["samples:".len()..]
                .parse()
                .context("parsing samples count")?;
            use rand::SeedableRng;
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x5347_4152);
            Ok((0..k).map(|_| rng.gen_range(0..ctx.chart.len())).collect())
        }
        Some(AtSelector::Named(other)) => bail!("unknown star point selector {other:?}"),
        None => Ok(vec![ctx.chart.len() / 2]),
    }
}

fn build_measure(ctx: &Ctx, spec: Option<&MeasureSpec>) -> Result<Measure> {
    let Some(spec) = spec else {
        return Ok(Measure::area_form());
    };
    match spec.kind.as_str() {
        "area_form" => Ok(Measure::area_form()),
        "dirac_sum" => {
            let points: Vec<usize> = match (&spec.points, spec.count) {
                (Some(points), _) => points
                    .iter()
                    .map(|p| ctx.chart.nearest_node((p[0], p[1])))
                    .collect(),
                (None, Some(count)) => ctx
                    .cover
                    .find_localization(count)
                    .ok_or_else(|| anyhow!("no {count}-localization found"))?,
                (None, None) => ctx
                    .localization
                    .clone()
                    .ok_or_else(|| anyhow!("dirac_sum needs points, a count, or a localization"))?,
            };
            Ok(Measure::dirac(points, spec.normalized.unwrap_or(true))?)
        }
        other => bail!("unknown measure kind {other:?}"),
    }
}

/// Theta-rippled positive start on the two-cap cover: the caps carry a
/// bracket the optimizer has to remove.
pub fn rippled_two_cap_start(chart: &Arc<SurfaceChart>) -> Result<PositiveCollection> {
    if chart.kind() != ChartKind::SphereCyl {
        bail!("the rippled start needs the sphere chart");
    }
    let ramp = cap_field(chart, -0.35, 0.35, true, 5)?;
    let band = cap_field(chart, -0.4, -0.1, true, 5)?; // reused as z-window below
    let window = ScalarField::from_fn(chart, |_, z| {
        // smooth bump in z supported in the overlap band
        let t = (z + 0.3) / 0.6;
        if !(0.0..=1.0).contains(&t) {
            0.0
        } else {
            let s = t * (1.0 - t) * 4.0;
            s * s
        }
    })?;
    drop(band);
    let n = chart.len();
    let mut f_n = vec![0.0; n];
    let mut f_s = vec![0.0; n];
    for idx in 0..n {
        let (theta, _) = chart.node_coords(idx);
        let ripple = 0.3 * theta.sin() * window.samples()[idx];
        let up = ramp.samples()[idx];
        f_n[idx] = 1.6 * up * (1.0 + ripple);
        f_s[idx] = 1.6 * (1.0 - up) * (1.0 - ripple);
    }
    let f_n = ScalarField::from_samples(chart, f_n)?;
    let f_s = ScalarField::from_samples(chart, f_s)?;
    Ok(PositiveCollection::new(
        chart.clone(),
        vec![f_n, f_s],
        vec![0, 1],
        CollectionMode::Positive,
    )?)
}

fn run_optimizer(ctx: &Ctx, spec: &OptimizerSpec, out_dir: &Path, rows: &mut Vec<Row>) -> Result<()> {
    let t = Instant::now();
    let mode = parse_mode(&spec.mode)?;
    let objective = match spec.objective.as_deref() {
        None | Some("l1_pb") => Objective::L1Pb,
        Some("smoothed_linf") => Objective::SmoothedLinf,
        Some(other) => bail!("unknown objective {other:?}"),
    };
    let params = OptimizerParams {
        objective,
        softabs_eps: spec.softabs_eps,
        step0: spec.step0.unwrap_or(1e-2),
        max_iters: spec.max_iters,
        mode,
        ..OptimizerParams::default()
    };

    let starts: Vec<PositiveCollection> = match spec.init.as_str() {
        "collection" => vec![ctx.collection.clone()],
        "ripple" => vec![rippled_two_cap_start(&ctx.chart)?],
        "bumps" => {
            // seeded random rescalings of the scenario collection
            use rand::SeedableRng;
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x4f505453);
            (0..spec.restarts.max(1))
                .map(|_| {
                    let fields: Vec<ScalarField> = ctx
                        .collection
                        .fields()
                        .iter()
                        .map(|f| f.scale(rng.gen_range(1.0..1.5)))
                        .collect();
                    PositiveCollection::new(
                        ctx.chart.clone(),
                        fields,
                        ctx.collection.disc_of().to_vec(),
                        mode,
                    )
                })
                .collect::<pbsurf_core::error::Result<_>>()?
        }
        other => bail!("unknown optimizer init {other:?}"),
    };

    let mut best: Option<(f64, PositiveCollection, Vec<f64>)> = None;
    for start in &starts {
        let (out, trace) = minimize_pb(&ctx.cover, start, &params)?;
        let l1 = integrate(&pb_function(&out)?);
        if best.as_ref().map(|(b, _, _)| l1 < *b).unwrap_or(true) {
            best = Some((l1, out, trace.objective));
        }
    }
    let (l1, out, trace) = best.expect("at least one start");
    out.validate_strict(&ctx.cover)
        .map_err(|e| anyhow!("optimizer left an invalid iterate: {e}"))?;

    let trace_rows: Vec<(f64, f64)> = trace
        .iter()
        .enumerate()
        .map(|(i, &v)| (i as f64, v))
        .collect();
    emit_plot_data(
        &trace_rows,
        "iteration objective",
        &out_dir.join(format!("trace_{}.dat", ctx.scenario_id)),
    )?;

    let bound = spec.target_l1.unwrap_or(f64::INFINITY);
    let pass = l1 <= bound;
    rows.push(Row {
        scenario: ctx.scenario_id.clone(),
        check: "optimizer_final_l1".into(),
        value: l1,
        bound,
        margin: bound - l1,
        status: if pass { RowStatus::Pass } else { RowStatus::Fail },
        grid: ctx.grid(),
        runtime_ms: t.elapsed().as_millis(),
    });
    log::info!(
        "optimizer finished: final integral {l1:.6e} after {} accepted iterates",
        trace.len()
    );
    Ok(())
}
