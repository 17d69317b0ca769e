use std::time::Duration;

use chrono::{SecondsFormat, Utc};
use ggdp_core::accounting::{write_accounts_csv, BridgeModels, MONEY_UNIT};
use ggdp_core::gm11::{fit_series, predict};
use ggdp_core::grey_relational::gra_matrix;
use ggdp_core::panel::fetch::{fetch_indicator, FetchOptions, Transport};
use ggdp_core::panel::{load_csv, load_panel, save_panel, write_csv_long, Severity};
use ggdp_core::plot::{render_svg, PlotKind, PlotSeries, PlotSpec};
use ggdp_core::report::{CorrelationEntry, ForecastEntry, GraEntry, Report, RunMeta};
use ggdp_core::stats::{pct_change, trend_correlation};
use ggdp_core::{
    build_account, climate_impact_score, refit_bridges, validate, Error, GgdpAccount,
    IndicatorSeries, Module, Panel, Result, SeriesKey, Warning,
};

use crate::config::{BridgeChoice, RunConfig};
use crate::output::Outputs;

pub struct Run {
    pub cfg: RunConfig,
    pub command: &'static str,
}

impl Run {
    fn meta(&self, bridges: Option<&BridgeModels>) -> Result<RunMeta> {
        let mut config =
            serde_json::to_value(&self.cfg).map_err(|e| Error::Serialize(e.to_string()))?;
        if let (Some(b), Some(obj)) = (bridges, config.as_object_mut()) {
            let b = serde_json::to_value(b).map_err(|e| Error::Serialize(e.to_string()))?;
            obj.insert("bridge_models".into(), b);
        }
        Ok(RunMeta {
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.into(),
            config,
        })
    }

    fn load(&self) -> Result<Panel> {
        if self.cfg.inputs.is_empty() {
            return Err(Error::InvalidOption("no input files configured".into()));
        }
        let mut panel = Panel::new("inputs");
        for input in &self.cfg.inputs {
            let is_json = input
                .path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("json"));
            let part = if is_json {
                let text = std::fs::read_to_string(&input.path).map_err(|source| Error::Io {
                    path: input.path.clone(),
                    source,
                })?;
                load_panel(&text)?
            } else {
                load_csv(&input.path, input.layout)?
            };
            for s in part.series() {
                panel.insert(s.clone())?;
            }
        }
        Ok(panel)
    }

    fn countries(&self, panel: &Panel) -> Result<Vec<String>> {
        if self.cfg.countries.is_empty() {
            return Ok(panel
                .countries()
                .into_iter()
                .filter(|c| panel.get(c, "GDP").is_some())
                .collect());
        }
        for c in &self.cfg.countries {
            if !panel.has_country(c) {
                return Err(Error::InvalidOption(format!("unknown country {c}")));
            }
        }
        Ok(self.cfg.countries.clone())
    }

    fn bridges(&self, panel: &Panel) -> Result<BridgeModels> {
        match self.cfg.bridge {
            BridgeChoice::Published => Ok(BridgeModels::published()),
            BridgeChoice::Refit => refit_bridges(panel),
        }
    }

    fn accounts(&self, panel: &Panel) -> Result<(Vec<GgdpAccount>, BridgeModels)> {
        let bridges = self.bridges(panel)?;
        let strategy = ggdp_core::AccountStrategy {
            bridges: bridges.clone(),
            ..self.cfg.strategy()
        };
        let accounts = self
            .countries(panel)?
            .iter()
            .map(|c| build_account(panel, c, &strategy))
            .collect::<Result<Vec<_>>>()?;
        Ok((accounts, bridges))
    }

    /// The input panel plus account series it does not already hold.
    fn with_accounts(&self, panel: &Panel, accounts: &[GgdpAccount]) -> Panel {
        let mut out = panel.clone();
        for acc in accounts {
            for s in acc.to_series() {
                if out.get(s.country(), s.indicator()).is_none() {
                    out.upsert(s);
                }
            }
        }
        out
    }

    fn window(&self, s: &IndicatorSeries) -> IndicatorSeries {
        match self.cfg.years {
            Some((lo, hi)) => s.window(&(lo..=hi)),
            None => s.clone(),
        }
    }

    fn report(&self, panel: &Panel, bridges: Option<&BridgeModels>) -> Result<Report> {
        let mut report = Report::new(self.meta(bridges)?);
        for issue in validate(panel).warnings() {
            let message = format!("{}: {}", issue.key, issue.message);
            let mut w = Warning::new(Module::PanelStore, "validation", message)
                .for_country(&issue.key.country);
            if let Some(y) = issue.year {
                w = w.at_year(y);
            }
            report.warnings.push(w);
        }
        Ok(report)
    }
}

fn line_points(s: &IndicatorSeries) -> Vec<(f64, f64)> {
    s.observations()
        .iter()
        .map(|o| (f64::from(o.year), o.value))
        .collect()
}

pub fn compute(run: &Run) -> Result<Outputs> {
    let panel = run.load()?;
    let (accounts, bridges) = run.accounts(&panel)?;
    let mut out = Outputs::default();
    let mut report = run.report(&panel, Some(&bridges))?;

    let mut csv = Vec::new();
    write_accounts_csv(&accounts, &mut csv)?;

    for acc in &accounts {
        let gdp = acc.series("GDP").expect("account has GDP");
        let ggdp = acc.series("GGDP").expect("account has GGDP");
        let spec = PlotSpec::new(PlotKind::Line, format!("{}: GDP and green GDP", acc.country))
            .labels("year", MONEY_UNIT)
            .with_series(PlotSeries::line("GDP", line_points(&gdp)))
            .with_series(PlotSeries::line("GGDP", line_points(&ggdp)));
        out.add(format!("ggdp_{}.svg", acc.country), render_svg(&spec)?);
    }
    for acc in accounts {
        report.add_account(acc);
    }
    out.add("ggdp.csv", csv);
    out.add("report.json", report.to_json()?);
    Ok(out)
}

fn common_years(series: &[&IndicatorSeries]) -> Option<(i32, i32)> {
    let lo = series.iter().filter_map(|s| s.first_year()).max()?;
    let hi = series.iter().filter_map(|s| s.last_year()).min()?;
    (lo <= hi).then_some((lo, hi))
}

pub fn gra(run: &Run) -> Result<Outputs> {
    let base = run.load()?;
    let (accounts, bridges) = run.accounts(&base)?;
    let panel = run.with_accounts(&base, &accounts);
    let mut report = run.report(&base, Some(&bridges))?;
    let mut out = Outputs::default();
    let g = &run.cfg.gra;

    for country in run.countries(&base)? {
        let parent = panel.require(&country, &g.parent)?;
        let mut children = Vec::new();
        for ind in &g.children {
            match panel.get(&country, ind) {
                Some(s) => children.push(s),
                None => report.warnings.push(
                    Warning::new(
                        Module::GreyRelational,
                        "missing_child",
                        format!("{country} has no {ind} series; left out of the comparison"),
                    )
                    .for_country(&country),
                ),
            }
        }
        if children.is_empty() {
            return Err(Error::MissingSeries {
                country,
                indicator: g.children.join(","),
            });
        }
        let all: Vec<&IndicatorSeries> = std::iter::once(parent).chain(children.iter().copied()).collect();
        let (mut lo, mut hi) = common_years(&all).ok_or_else(|| {
            Error::YearMismatch(format!("{country}: series share no years"))
        })?;
        if let Some((a, b)) = run.cfg.years {
            lo = lo.max(a);
            hi = hi.min(b);
        }
        let keys: Vec<SeriesKey> = all.iter().map(|s| s.key()).collect();
        let m = panel.align(&keys, lo..=hi, run.cfg.gaps)?;
        let labels: Vec<String> = children.iter().map(|s| s.indicator().to_string()).collect();
        let mut result = gra_matrix(
            &g.parent,
            &m.column(0),
            &labels,
            m.columns_from(1),
            g.options(),
        )?;
        result.years = m.years.clone();

        let mut spec = PlotSpec::new(
            PlotKind::Bar,
            format!("{country}: grey relational grades against {}", g.parent),
        )
        .labels("indicator", "grade");
        spec.categories = result.ranking.iter().map(|r| r.label.clone()).collect();
        spec = spec.with_series(PlotSeries::line(
            "grade",
            result
                .ranking
                .iter()
                .enumerate()
                .map(|(i, r)| (i as f64, r.grade))
                .collect(),
        ));
        out.add(format!("gra_{country}.svg"), render_svg(&spec)?);
        report.gra.push(GraEntry::new(&country, &result, run.cfg.full));
    }
    out.add("gra_report.json", report.to_json()?);
    Ok(out)
}

pub fn forecast(run: &Run) -> Result<Outputs> {
    let base = run.load()?;
    let (accounts, bridges) = run.accounts(&base)?;
    let panel = run.with_accounts(&base, &accounts);
    let mut report = run.report(&base, Some(&bridges))?;
    let mut out = Outputs::default();
    let f = &run.cfg.forecast;

    for country in run.countries(&base)? {
        for ind in &f.indicators {
            let series = run.window(panel.require(&country, ind)?);
            let model = fit_series(&series, f.shift)?;
            let result = predict(&model, f.horizon);
            let entry = ForecastEntry::new(&country, ind, series.observations(), &result);

            let mut curve: Vec<(f64, f64)> = entry
                .fitted
                .iter()
                .chain(&entry.forecast)
                .map(|o| (f64::from(o.year), o.value))
                .collect();
            curve.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut spec = PlotSpec::new(PlotKind::Line, format!("{country}: {ind} GM(1,1) forecast"))
                .labels("year", series.unit())
                .with_series(PlotSeries::points("observed", line_points(&series)))
                .with_series(PlotSeries::line("model", curve));
            if let Some(last) = series.last_year() {
                spec.boundary = Some((f64::from(last), "forecast".into()));
            }
            out.add(format!("forecast_{country}_{ind}.svg"), render_svg(&spec)?);
            report.add_forecast(entry);
        }
        for (x, y) in &f.correlations {
            let xs = run.window(panel.require(&country, x)?);
            let ys = run.window(panel.require(&country, y)?);
            let c = trend_correlation(&xs, &ys, f.correlation_mode)?;
            report.correlations.push(CorrelationEntry::new(&country, x, y, &c));
        }
    }
    out.add("forecast_report.json", report.to_json()?);
    Ok(out)
}

pub fn impact(run: &Run) -> Result<Outputs> {
    let base = run.load()?;
    let (accounts, bridges) = run.accounts(&base)?;
    let panel = run.with_accounts(&base, &accounts);
    let mut report = run.report(&base, Some(&bridges))?;
    let mut out = Outputs::default();
    let cfg = &run.cfg.impact;

    let mut indicators = Vec::new();
    if cfg.include_ggdp {
        indicators.push("GGDP".to_string());
    }
    indicators.extend(cfg.indicators.iter().cloned());
    if indicators.is_empty() {
        return Err(Error::InvalidOption("no impact indicators configured".into()));
    }

    for country in run.countries(&base)? {
        let mut spec = PlotSpec::new(
            PlotKind::Overlay,
            format!("{country}: year-over-year change"),
        )
        .labels("year", "percent change");
        for ind in &indicators {
            let series = run.window(panel.require(&country, ind)?);
            let score = climate_impact_score(&series)?;
            spec = spec.with_series(PlotSeries::line(ind.clone(), line_points(&pct_change(&series)?)));
            report.impact.push(score);
        }
        out.add(format!("impact_{country}.svg"), render_svg(&spec)?);
    }
    out.add("impact_report.json", report.to_json()?);
    Ok(out)
}

pub fn fetch<T: Transport + ?Sized>(run: &Run, transport: &T, api_base: &str) -> Result<Outputs> {
    let cfg = &run.cfg;
    let (lo, hi) = cfg
        .years
        .ok_or_else(|| Error::InvalidOption("fetch needs a year range".into()))?;
    if cfg.countries.is_empty() || cfg.fetch.indicators.is_empty() {
        return Err(Error::InvalidOption(
            "fetch needs countries and fetch.indicators".into(),
        ));
    }
    let opts = FetchOptions {
        backoff: Duration::from_millis(500),
        ..FetchOptions::default()
    };
    let mut panel = Panel::new(format!("World Bank API {api_base}"));
    for country in &cfg.countries {
        for (local, remote) in &cfg.fetch.indicators {
            let raw = fetch_indicator(transport, api_base, country, &remote.id, lo..=hi, &opts)?;
            let scale = remote.scale;
            panel.insert(
                raw.map_values(|v| v * scale)
                    .with_indicator(local.clone())
                    .with_unit(remote.unit.clone()),
            )?;
        }
    }
    for issue in validate(&panel).issues {
        let level = match issue.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        eprintln!("{level}: {issue}");
    }
    panel.ensure_valid()?;
    let mut csv = Vec::new();
    write_csv_long(&panel, &mut csv)?;
    let mut out = Outputs::default();
    out.add("panel.csv", csv);
    out.add("panel.json", save_panel(&panel)?);
    Ok(out)
}

/// Prints every validation issue; fails when any is an error.
pub fn validate_inputs(run: &Run) -> Result<()> {
    let panel = run.load()?;
    let report = validate(&panel);
    for issue in &report.issues {
        let level = match issue.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        println!("{level}: {issue}");
    }
    let errors = report.errors().count();
    println!(
        "{} series, {} error(s), {} warning(s)",
        panel.len(),
        errors,
        report.warnings().count()
    );
    if let Some(first) = report.errors().next() {
        return Err(Error::InvalidPanel {
            count: errors,
            first: first.to_string(),
        });
    }
    Ok(())
}
