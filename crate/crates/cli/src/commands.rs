use std::fmt::Write as _;
use std::time::Instant;

use hmr_core::data::{
    load_cultures, synthesize, synthesize_piecewise, target_column_name, window, write_cultures,
    CultureSeries, MissingPolicy, SupervisedSet, SynthConfig,
};
use hmr_core::regressor::predict_recursive;
use hmr_core::selection::{
    cross_validate, cross_validate_chained, feature_selection, grid_search_theta,
    linear_baseline_cv, nested_cv, plan_folds, rmse, EvalOptions, FoldPlan, GridSpec,
};
use hmr_core::{ClusterConfig, HmrError, HmrModel, Jobs, MembershipParams};
use serde_json::json;

use crate::args::{
    Cli, Command, CvArgs, DataArgs, FeatselArgs, Generator, Missing, ModelArgs, PredictArgs,
    RunArgs, SynthArgs, TrainArgs, TuneArgs,
};
use crate::output::{self, json_document, to_value, RunConfig};
use crate::CliError;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Synth(a) => synth(a, cli.json),
        Command::Train(a) => train(a, cli.json),
        Command::Predict(a) => predict(a, cli.json),
        Command::Cv(a) => cv(a, cli.json),
        Command::Tune(a) => tune(a, cli.json),
        Command::Featsel(a) => featsel(a, cli.json),
    }
}

fn synth(a: &SynthArgs, as_json: bool) -> Result<(), CliError> {
    let config = SynthConfig {
        n_cultures: a.cultures as usize,
        n_days: a.days as usize,
        noise: a.noise,
        seed: a.seed,
    };
    let series = match a.generator {
        Generator::Culture => synthesize(&config)?,
        Generator::Piecewise => synthesize_piecewise(&config)?,
    };
    write_cultures(&a.output, &series)?;
    let run = RunConfig {
        command: "synth",
        generator: Some(match a.generator {
            Generator::Culture => "culture",
            Generator::Piecewise => "piecewise",
        }),
        cultures: Some(a.cultures),
        days: Some(a.days),
        noise: Some(a.noise),
        output: Some(a.output.clone()),
        seed: Some(a.seed),
        ..Default::default()
    };
    let rows: usize = series.iter().map(|s| s.n_days()).sum();
    let text = if as_json {
        json_document(&run, json!({ "rows": rows }))
    } else {
        format!("{}rows,{rows}\n", run.header())
    };
    output::emit(&text, None)
}

/// Loaded cultures with the feature list resolved.
struct Loaded {
    series: Vec<CultureSeries>,
    features: Vec<String>,
}

fn missing_policy(m: Missing) -> MissingPolicy {
    match m {
        Missing::Reject => MissingPolicy::Reject,
        Missing::CarryForward => MissingPolicy::CarryForward,
    }
}

fn missing_name(m: Missing) -> &'static str {
    match m {
        Missing::Reject => "reject",
        Missing::CarryForward => "carry-forward",
    }
}

fn load(d: &DataArgs) -> Result<Loaded, CliError> {
    let series = load_cultures(&d.data, missing_policy(d.missing))?;
    let Some(first) = series.first() else {
        return Err(HmrError::Data(format!("{} holds no cultures", d.data.display())).into());
    };
    let features = if d.features.is_empty() {
        first.parameters.clone()
    } else {
        d.features.clone()
    };
    Ok(Loaded { series, features })
}

/// Windowed training rows; horizon 2 adds the observed `t+1` target as input.
fn supervised(loaded: &Loaded, d: &DataArgs) -> Result<SupervisedSet, CliError> {
    let windowed = window(
        &loaded.series,
        &loaded.features,
        &d.target,
        d.horizon,
        d.horizon == 2,
    )?;
    for w in &windowed.warnings {
        log::warn!("{}", w.message);
    }
    if windowed.set.is_empty() {
        return Err(HmrError::Data("no complete windows in the data".into()).into());
    }
    Ok(windowed.set)
}

fn cluster_config(m: &ModelArgs) -> Result<ClusterConfig, CliError> {
    Ok(ClusterConfig::new(m.theta, m.top_k, m.expansion_fraction)?)
}

fn base_config(d: &DataArgs, loaded: &Loaded, command: &'static str) -> RunConfig {
    RunConfig {
        command,
        data: Some(d.data.clone()),
        target: Some(d.target.clone()),
        features: Some(loaded.features.clone()),
        horizon: Some(d.horizon),
        missing: Some(missing_name(d.missing)),
        ..Default::default()
    }
}

fn with_model(mut run: RunConfig, m: &ModelArgs) -> RunConfig {
    run.theta = Some(m.theta);
    run.top_k = Some(m.top_k);
    run.expansion_fraction = Some(m.expansion_fraction);
    run.lambda = Some(m.lambda);
    run
}

fn options(r: &RunArgs) -> EvalOptions<'static> {
    EvalOptions::with_jobs(Jobs::from_count(r.jobs))
}

fn folds_for(set: &SupervisedSet, k: usize, seed: u64) -> Result<FoldPlan, CliError> {
    Ok(plan_folds(&set.culture_ids(), k, seed)?)
}

fn train(a: &TrainArgs, as_json: bool) -> Result<(), CliError> {
    let loaded = load(&a.data)?;
    let set = supervised(&loaded, &a.data)?;
    let config = cluster_config(&a.model)?;
    let params = MembershipParams::uniform(a.model.lambda, set.n_features())?;

    let started = Instant::now();
    let model = HmrModel::fit(&set, &config, &params)?;
    let seconds = started.elapsed().as_secs_f64();
    model.save(&a.output)?;

    let predicted = model.predict_scaled_batch(&set.inputs)?;
    let observed: Vec<f64> = set
        .targets
        .iter()
        .map(|y| model.scaler().scale_target(*y))
        .collect();
    let train_rmse = rmse(&predicted, &observed)?;

    let mut run = with_model(base_config(&a.data, &loaded, "train"), &a.model);
    run.features = Some(set.feature_names.clone());
    run.output = Some(a.output.clone());
    let text = if as_json {
        json_document(
            &run,
            json!({
                "samples": set.len(),
                "boxes": model.n_boxes(),
                "train_rmse": train_rmse,
                "fit_seconds": seconds,
            }),
        )
    } else {
        format!(
            "{}samples,boxes,train_rmse,fit_seconds\n{},{},{train_rmse},{seconds}\n",
            run.header(),
            set.len(),
            model.n_boxes()
        )
    };
    output::emit(&text, None)
}

fn predict(a: &PredictArgs, as_json: bool) -> Result<(), CliError> {
    let first = HmrModel::load(&a.model)?;
    let second = match (a.horizon, &a.model2) {
        (2, Some(path)) => Some(HmrModel::load(path)?),
        (2, None) => return Err(CliError::Usage("--horizon 2 needs --model2".into())),
        (_, Some(_)) => {
            return Err(CliError::Usage(
                "--model2 is only used with --horizon 2".into(),
            ))
        }
        (_, None) => None,
    };
    let target = first.target_name().to_owned();
    if let Some(second) = &second {
        let mut expected = first.feature_names().to_vec();
        expected.push(target_column_name(&target, 1));
        if second.feature_names() != expected.as_slice() || second.target_name() != target {
            return Err(HmrError::Data(format!(
                "second model must take [{}] and predict {target}; it takes [{}] and predicts {}",
                expected.join(", "),
                second.feature_names().join(", "),
                second.target_name()
            ))
            .into());
        }
    }

    let series = load_cultures(&a.data, missing_policy(a.missing))?;
    let windowed = window(&series, first.feature_names(), &target, a.horizon, false)?;
    for w in &windowed.warnings {
        log::warn!("{}", w.message);
    }
    let set = windowed.set;

    let mut csv = format!("culture_id,day,{}", target_column_name(&target, 1));
    if second.is_some() {
        let _ = write!(csv, ",{}", target_column_name(&target, 2));
    }
    csv.push('\n');
    for ((row, culture), day) in set.inputs.iter().zip(&set.cultures).zip(&set.days) {
        match &second {
            Some(second) => {
                let (t1, t2) = predict_recursive(&first, second, row)?;
                let _ = writeln!(csv, "{culture},{day},{t1},{t2}");
            }
            None => {
                let t1 = first.predict(row)?;
                let _ = writeln!(csv, "{culture},{day},{t1}");
            }
        }
    }
    std::fs::write(&a.output, &csv).map_err(|e| HmrError::Io {
        path: a.output.clone(),
        source: e,
    })?;

    let run = RunConfig {
        command: "predict",
        data: Some(a.data.clone()),
        target: Some(target),
        horizon: Some(a.horizon),
        missing: Some(missing_name(a.missing)),
        model: Some(a.model.clone()),
        model2: a.model2.clone(),
        output: Some(a.output.clone()),
        ..Default::default()
    };
    let text = if as_json {
        json_document(&run, json!({ "rows": set.len() }))
    } else {
        format!("{}rows,{}\n", run.header(), set.len())
    };
    output::emit(&text, None)
}

fn cv(a: &CvArgs, as_json: bool) -> Result<(), CliError> {
    if a.nested && a.data.horizon == 2 {
        return Err(CliError::Usage("--nested supports --horizon 1 only".into()));
    }
    let loaded = load(&a.data)?;
    let config = cluster_config(&a.model)?;
    let opts = options(&a.run);
    let mut run = with_model(base_config(&a.data, &loaded, "cv"), &a.model);
    run.folds = Some(a.folds);
    run.seed = Some(a.run.seed);
    run.nested = Some(a.nested);
    run.baseline = Some(a.baseline);
    let timings = a.run.timings;

    let h1_args = DataArgs {
        horizon: 1,
        features: loaded.features.clone(),
        data: a.data.data.clone(),
        target: a.data.target.clone(),
        missing: a.data.missing,
    };
    let h1 = supervised(&loaded, &h1_args)?;
    let plan = folds_for(&h1, a.folds, a.run.seed)?;

    let mut body = serde_json::Map::new();
    let mut table = String::new();
    if a.data.horizon == 2 {
        let h2 = supervised(&loaded, &a.data)?;
        let chained =
            cross_validate_chained(&h1, &h2, &plan, &config, &config, a.model.lambda, &opts)?;
        let (r1, r2) = if timings {
            (chained.horizon1, chained.horizon2)
        } else {
            (
                chained.horizon1.without_timings(),
                chained.horizon2.without_timings(),
            )
        };
        table.push_str(&output::cv_table(&r1, "h1", timings));
        table.push('\n');
        table.push_str(&output::cv_table(&r2, "h2", timings));
        body.insert("horizon1".into(), to_value(&r1));
        body.insert("horizon2".into(), to_value(&r2));
    } else if a.nested {
        let grid = GridSpec::new(a.grid.clone())?;
        run.grid = Some(a.grid.clone());
        run.inner_folds = Some(a.inner_folds);
        run.theta = None;
        let report = nested_cv(
            &h1,
            &plan,
            &grid,
            a.inner_folds,
            &config,
            a.model.lambda,
            &opts,
        )?;
        let report = if timings {
            report
        } else {
            report.without_timings()
        };
        table.push_str(&output::nested_table(&report, timings));
        body.insert("nested".into(), to_value(&report));
    } else {
        let report = cross_validate(&h1, &plan, &config, a.model.lambda, &opts)?;
        let report = if timings {
            report
        } else {
            report.without_timings()
        };
        table.push_str(&output::cv_table(&report, "hmr", timings));
        body.insert("cv".into(), to_value(&report));
    }
    if a.baseline {
        let base = linear_baseline_cv(&h1, &plan, &opts)?;
        table.push('\n');
        table.push_str(&output::cv_table(&base, "linear", false));
        body.insert("baseline".into(), to_value(&base));
    }

    let text = if as_json {
        json_document(&run, serde_json::Value::Object(body))
    } else {
        format!("{}{table}", run.header())
    };
    output::emit(&text, a.run.output.as_deref())
}

fn tune(a: &TuneArgs, as_json: bool) -> Result<(), CliError> {
    let loaded = load(&a.data)?;
    let set = supervised(&loaded, &a.data)?;
    let config = cluster_config(&a.model)?;
    let grid = GridSpec::new(a.grid.clone())?;
    let plan = folds_for(&set, a.folds, a.run.seed)?;
    let search = grid_search_theta(
        &set,
        &plan,
        &grid,
        &config,
        a.model.lambda,
        &options(&a.run),
    )?;
    let search = if a.run.timings {
        search
    } else {
        search.without_timings()
    };

    let mut run = with_model(base_config(&a.data, &loaded, "tune"), &a.model);
    run.features = Some(set.feature_names.clone());
    run.theta = None;
    run.grid = Some(a.grid.clone());
    run.folds = Some(a.folds);
    run.seed = Some(a.run.seed);
    let text = if as_json {
        json_document(
            &run,
            json!({ "best_theta": search.best_theta, "search": to_value(&search) }),
        )
    } else {
        format!(
            "{}{}\nbest_theta,{}\n",
            run.header(),
            output::grid_table(&search),
            search.best_theta
        )
    };
    output::emit(&text, a.run.output.as_deref())
}

fn featsel(a: &FeatselArgs, as_json: bool) -> Result<(), CliError> {
    let loaded = load(&a.data)?;
    let set = supervised(&loaded, &a.data)?;
    let config = ClusterConfig::new(a.theta, a.top_k, a.expansion_fraction)?;
    let plan = folds_for(&set, a.folds, a.run.seed)?;
    let report = feature_selection(
        &set,
        &plan,
        a.inner_folds,
        &config,
        a.lambda,
        a.min_folds,
        &options(&a.run),
    )?;

    let mut run = base_config(&a.data, &loaded, "featsel");
    run.features = Some(set.feature_names.clone());
    run.theta = Some(a.theta);
    run.top_k = Some(a.top_k);
    run.expansion_fraction = Some(a.expansion_fraction);
    run.lambda = Some(a.lambda);
    run.folds = Some(a.folds);
    run.inner_folds = Some(a.inner_folds);
    run.min_folds = Some(a.min_folds);
    run.seed = Some(a.run.seed);
    let text = if as_json {
        json_document(&run, json!({ "featsel": to_value(&report) }))
    } else {
        format!("{}{}", run.header(), output::featsel_tables(&report))
    };
    output::emit(&text, a.run.output.as_deref())
}
