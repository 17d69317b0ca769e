//! Green GDP accounts.
//!
//! `GGDP = GDP - RDM - EPCL - EPDL`, with
//!
//! - RDM: resource depletion value,
//! - EPCL: environmental pollution control loss,
//! - EPDL: environmental pollution degradation loss,
//!
//! all in billions of current US dollars. Each deduction is resolved per
//! year from the first available source in the configured order: a measured
//! series, the sum of its secondary components, `δ·GNI` (RDM only), or a
//! linear bridge from RDM (EPCL and EPDL only).

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::{IndicatorSeries, Observation, Panel};
use crate::stats::{apply_linear, ols_fit, LinearModel};
use crate::warning::{Module, Warning};

pub const GDP: &str = "GDP";
pub const GNI: &str = "GNI";
pub const GGDP: &str = "GGDP";
/// Natural resource depletion as a share of GNI.
pub const DELTA: &str = "NRD_PCT_GNI";
/// Unit tag of every monetary account value.
pub const MONEY_UNIT: &str = "usd_bn";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Deduction {
    Rdm,
    Epcl,
    Epdl,
}

impl Deduction {
    pub const ALL: [Deduction; 3] = [Deduction::Rdm, Deduction::Epcl, Deduction::Epdl];

    pub fn indicator(self) -> &'static str {
        match self {
            Deduction::Rdm => "RDM",
            Deduction::Epcl => "EPCL",
            Deduction::Epdl => "EPDL",
        }
    }
}

impl fmt::Display for Deduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.indicator())
    }
}

/// Secondary indicators that make up each deduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SecondaryComponent {
    CultivatedLandDepletion,
    EnergyConsumptionReduction,
    WaterConsumptionReduction,
    FreshwaterFishingDepletion,
    LiveWoodAccumulation,
    AdditionalForestLandValue,
    PollutionActualGovernance,
    PollutionVirtualGovernance,
    FixedAssetAcceleratedDepreciation,
    HumanHealthLoss,
    NaturalDisasterLoss,
}

impl SecondaryComponent {
    pub const ALL: [SecondaryComponent; 11] = [
        Self::CultivatedLandDepletion,
        Self::EnergyConsumptionReduction,
        Self::WaterConsumptionReduction,
        Self::FreshwaterFishingDepletion,
        Self::LiveWoodAccumulation,
        Self::AdditionalForestLandValue,
        Self::PollutionActualGovernance,
        Self::PollutionVirtualGovernance,
        Self::FixedAssetAcceleratedDepreciation,
        Self::HumanHealthLoss,
        Self::NaturalDisasterLoss,
    ];

    pub fn category(self) -> Deduction {
        use SecondaryComponent::*;
        match self {
            CultivatedLandDepletion
            | EnergyConsumptionReduction
            | WaterConsumptionReduction
            | FreshwaterFishingDepletion
            | LiveWoodAccumulation
            | AdditionalForestLandValue => Deduction::Rdm,
            PollutionActualGovernance | PollutionVirtualGovernance => Deduction::Epcl,
            FixedAssetAcceleratedDepreciation | HumanHealthLoss | NaturalDisasterLoss => {
                Deduction::Epdl
            }
        }
    }

    /// Indicator identifier used in panels.
    pub fn indicator(self) -> &'static str {
        use SecondaryComponent::*;
        match self {
            CultivatedLandDepletion => "CULTIVATED_LAND_DEPLETION",
            EnergyConsumptionReduction => "ENERGY_CONSUMPTION_REDUCTION",
            WaterConsumptionReduction => "WATER_CONSUMPTION_REDUCTION",
            FreshwaterFishingDepletion => "FRESHWATER_FISHING_DEPLETION",
            LiveWoodAccumulation => "LIVE_WOOD_ACCUMULATION",
            AdditionalForestLandValue => "ADDITIONAL_FOREST_LAND_VALUE",
            PollutionActualGovernance => "POLLUTION_ACTUAL_GOVERNANCE",
            PollutionVirtualGovernance => "POLLUTION_VIRTUAL_GOVERNANCE",
            FixedAssetAcceleratedDepreciation => "FIXED_ASSET_ACCELERATED_DEPRECIATION",
            HumanHealthLoss => "HUMAN_HEALTH_LOSS",
            NaturalDisasterLoss => "NATURAL_DISASTER_LOSS",
        }
    }

    pub fn label(self) -> &'static str {
        use SecondaryComponent::*;
        match self {
            CultivatedLandDepletion => "cultivated land depletion",
            EnergyConsumptionReduction => "energy consumption reduction",
            WaterConsumptionReduction => "water consumption reduction",
            FreshwaterFishingDepletion => "freshwater fishing depletion",
            LiveWoodAccumulation => "live wood accumulation",
            AdditionalForestLandValue => "value of additional forest land",
            PollutionActualGovernance => "actual governance",
            PollutionVirtualGovernance => "virtual governance",
            FixedAssetAcceleratedDepreciation => "accelerated depreciation of fixed assets",
            HumanHealthLoss => "loss of human health",
            NaturalDisasterLoss => "natural disasters losses",
        }
    }

    pub fn of(category: Deduction) -> impl Iterator<Item = SecondaryComponent> {
        Self::ALL.into_iter().filter(move |c| c.category() == category)
    }
}

impl FromStr for SecondaryComponent {
    type Err = ();

    /// Accepts the indicator identifier or the label, ignoring case.
    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        let s = s.trim();
        Self::ALL
            .into_iter()
            .find(|c| c.indicator().eq_ignore_ascii_case(s) || c.label().eq_ignore_ascii_case(s))
            .ok_or(())
    }
}

/// True for indicators whose values are money amounts.
pub fn is_monetary_indicator(indicator: &str) -> bool {
    [GDP, GNI, GGDP, "RDM", "EPCL", "EPDL"].contains(&indicator)
        || SecondaryComponent::ALL
            .iter()
            .any(|c| c.indicator() == indicator)
}

/// Where a deduction value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Measured,
    Rollup,
    DeltaGni,
    /// EPCL from the RDM bridge line.
    #[serde(rename = "bridge_eq8")]
    BridgeEpcl,
    /// EPDL from the RDM bridge line.
    #[serde(rename = "bridge_eq9")]
    BridgeEpdl,
}

/// A candidate source in a resolution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Measured,
    Rollup,
    DeltaGni,
    Bridge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeModels {
    pub label: String,
    /// EPCL as a function of RDM.
    pub epcl: LinearModel,
    /// EPDL as a function of RDM.
    pub epdl: LinearModel,
}

impl BridgeModels {
    /// Published coefficients: `EPCL = 0.1009·RDM + 932.2`,
    /// `EPDL = 0.07316·RDM + 1179`.
    pub fn published() -> Self {
        Self {
            label: "published".into(),
            epcl: LinearModel::fixed(0.1009, 932.2),
            epdl: LinearModel::fixed(0.07316, 1179.0),
        }
    }
}

impl Default for BridgeModels {
    fn default() -> Self {
        Self::published()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccountStrategy {
    pub rdm: Vec<Source>,
    pub epcl: Vec<Source>,
    pub epdl: Vec<Source>,
    pub bridges: BridgeModels,
    /// Restrict the account to these years (inclusive).
    #[serde(default)]
    pub years: Option<(i32, i32)>,
}

impl Default for AccountStrategy {
    fn default() -> Self {
        Self {
            rdm: vec![Source::Measured, Source::Rollup, Source::DeltaGni],
            epcl: vec![Source::Measured, Source::Rollup, Source::Bridge],
            epdl: vec![Source::Measured, Source::Rollup, Source::Bridge],
            bridges: BridgeModels::published(),
            years: None,
        }
    }
}

impl AccountStrategy {
    fn order(&self, d: Deduction) -> &[Source] {
        match d {
            Deduction::Rdm => &self.rdm,
            Deduction::Epcl => &self.epcl,
            Deduction::Epdl => &self.epdl,
        }
    }

    fn check(&self) -> Result<()> {
        for d in Deduction::ALL {
            for s in self.order(d) {
                let ok = match s {
                    Source::Measured | Source::Rollup => true,
                    Source::DeltaGni => d == Deduction::Rdm,
                    Source::Bridge => d != Deduction::Rdm,
                };
                if !ok {
                    return Err(Error::InvalidOption(format!(
                        "source {s:?} cannot produce {d}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowMethods {
    pub rdm: Method,
    pub epcl: Method,
    pub epdl: Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccountRow {
    pub year: i32,
    pub gdp: f64,
    pub rdm: f64,
    pub epcl: f64,
    pub epdl: f64,
    pub ggdp: f64,
    pub methods: RowMethods,
}

impl AccountRow {
    fn new(year: i32, gdp: f64, rdm: f64, epcl: f64, epdl: f64, methods: RowMethods) -> Self {
        Self {
            year,
            gdp,
            rdm,
            epcl,
            epdl,
            ggdp: gdp - rdm - epcl - epdl,
            methods,
        }
    }

    /// Recomputes the identity from the row's own fields; zero on every
    /// emitted row.
    pub fn identity_residual(&self) -> f64 {
        self.gdp - self.rdm - self.epcl - self.epdl - self.ggdp
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GgdpAccount {
    pub country: String,
    pub unit: String,
    pub rows: Vec<AccountRow>,
    #[serde(default)]
    pub warnings: Vec<Warning>,
}

impl GgdpAccount {
    fn from_rows(country: &str, rows: Vec<AccountRow>, mut warnings: Vec<Warning>) -> Self {
        for row in rows.iter().filter(|r| r.ggdp < 0.0) {
            warnings.push(
                Warning::new(
                    Module::GgdpAccounting,
                    "negative_ggdp",
                    format!("deductions exceed GDP: GGDP = {}", row.ggdp),
                )
                .for_country(country)
                .at_year(row.year),
            );
        }
        Self {
            country: country.to_string(),
            unit: MONEY_UNIT.to_string(),
            rows,
            warnings,
        }
    }

    /// GDP, RDM, EPCL, EPDL and GGDP as panel series.
    pub fn to_series(&self) -> Vec<IndicatorSeries> {
        let column = |name: &str, f: fn(&AccountRow) -> f64| {
            IndicatorSeries::from_parts_unchecked(
                self.country.clone(),
                name,
                self.unit.clone(),
                self.rows
                    .iter()
                    .map(|r| Observation {
                        year: r.year,
                        value: f(r),
                    })
                    .collect(),
            )
        };
        vec![
            column(GDP, |r| r.gdp),
            column("RDM", |r| r.rdm),
            column("EPCL", |r| r.epcl),
            column("EPDL", |r| r.epdl),
            column(GGDP, |r| r.ggdp),
        ]
    }

    pub fn series(&self, indicator: &str) -> Option<IndicatorSeries> {
        self.to_series()
            .into_iter()
            .find(|s| s.indicator() == indicator)
    }
}

/// Writes accounts in long CSV layout: one GGDP row and one row per
/// component per year, with the deduction method in the last column.
pub fn write_accounts_csv<W: Write>(accounts: &[GgdpAccount], writer: W) -> Result<()> {
    use crate::numfmt::format_g17;
    let ser = |e: csv::Error| Error::Serialize(e.to_string());
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["country", "indicator", "unit", "year", "value", "method"])
        .map_err(ser)?;
    let method = |m: Method| {
        serde_json::to_value(m)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default()
    };
    for acc in accounts {
        for r in &acc.rows {
            let year = r.year.to_string();
            let entries = [
                (GGDP, r.ggdp, String::new()),
                (GDP, r.gdp, String::new()),
                ("RDM", r.rdm, method(r.methods.rdm)),
                ("EPCL", r.epcl, method(r.methods.epcl)),
                ("EPDL", r.epdl, method(r.methods.epdl)),
            ];
            for (ind, v, m) in entries {
                wtr.write_record([
                    acc.country.as_str(),
                    ind,
                    acc.unit.as_str(),
                    &year,
                    &format_g17(v),
                    &m,
                ])
                .map_err(ser)?;
            }
        }
    }
    wtr.flush().map_err(|e| Error::Serialize(e.to_string()))
}

fn is_percent_unit(unit: &str) -> bool {
    let u = unit.to_ascii_lowercase();
    u.contains('%') || u.contains("percent") || u.contains("pct")
}

/// `δ` as a fraction: percent-tagged series are divided by 100.
fn delta_fraction(delta: &IndicatorSeries, value: f64) -> f64 {
    if is_percent_unit(delta.unit()) {
        value / 100.0
    } else {
        value
    }
}

fn same_years(a: &IndicatorSeries, b: &IndicatorSeries) -> Result<()> {
    if a.years() != b.years() {
        return Err(Error::YearMismatch(format!(
            "{} and {} cover different years",
            a.key(),
            b.key()
        )));
    }
    Ok(())
}

fn check_delta(year: i32, frac: f64) -> Result<()> {
    if (0.0..=1.0).contains(&frac) {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!(
            "depletion share {frac} in {year} is outside [0, 1]"
        )))
    }
}

/// `RDM = δ·GNI`, year by year.
pub fn rdm_from_gni(gni: &IndicatorSeries, delta: &IndicatorSeries) -> Result<IndicatorSeries> {
    same_years(gni, delta)?;
    let mut obs = Vec::with_capacity(gni.len());
    for (g, d) in gni.observations().iter().zip(delta.observations()) {
        let frac = delta_fraction(delta, d.value);
        check_delta(g.year, frac)?;
        obs.push((g.year, frac * g.value));
    }
    IndicatorSeries::new(gni.country(), "RDM", gni.unit(), obs)
}

/// A deduction category with its secondary component series.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondaryBundle {
    pub category: Deduction,
    /// Component series; each series' indicator names the component.
    pub components: Vec<IndicatorSeries>,
}

/// Sums a bundle's components year by year.
pub fn rollup(bundle: &SecondaryBundle) -> Result<IndicatorSeries> {
    let first = bundle
        .components
        .first()
        .ok_or_else(|| Error::EmptyInput(format!("{} bundle has no components", bundle.category)))?;
    for c in &bundle.components {
        match c.indicator().parse::<SecondaryComponent>() {
            Ok(comp) if comp.category() == bundle.category => {}
            _ => {
                return Err(Error::UnknownComponent {
                    category: bundle.category.to_string(),
                    name: c.indicator().to_string(),
                })
            }
        }
        same_years(first, c)?;
        if let Some(o) = c.observations().iter().find(|o| o.value < 0.0) {
            return Err(Error::NegativeValue {
                what: c.indicator().to_string(),
                year: o.year,
                value: o.value,
            });
        }
    }
    let years = first.years();
    let sums = years.iter().enumerate().map(|(k, &year)| {
        let total: f64 = bundle
            .components
            .iter()
            .map(|c| c.observations()[k].value)
            .sum();
        (year, total)
    });
    IndicatorSeries::new(
        first.country(),
        bundle.category.indicator(),
        first.unit(),
        sums.collect::<Vec<_>>(),
    )
}

fn bridge(
    rdm: &IndicatorSeries,
    model: &LinearModel,
    target: Deduction,
) -> (IndicatorSeries, Vec<Warning>) {
    let mut warnings = Vec::new();
    let obs = rdm
        .observations()
        .iter()
        .map(|o| {
            let mut value = apply_linear(model, o.value);
            if value < 0.0 {
                warnings.push(clamp_warning(rdm.country(), o.year, target, value));
                value = 0.0;
            }
            Observation {
                year: o.year,
                value,
            }
        })
        .collect();
    (
        IndicatorSeries::from_parts_unchecked(rdm.country(), target.indicator(), rdm.unit(), obs),
        warnings,
    )
}

fn clamp_warning(country: &str, year: i32, target: Deduction, value: f64) -> Warning {
    Warning::new(
        Module::GgdpAccounting,
        "negative_bridge_clamped",
        format!("bridge estimate of {target} was {value}; clamped to 0"),
    )
    .for_country(country)
    .at_year(year)
}

/// EPCL estimated from RDM; negative estimates are clamped to zero.
pub fn epcl_bridge(rdm: &IndicatorSeries, model: &LinearModel) -> (IndicatorSeries, Vec<Warning>) {
    bridge(rdm, model, Deduction::Epcl)
}

/// EPDL estimated from RDM; negative estimates are clamped to zero.
pub fn epdl_bridge(rdm: &IndicatorSeries, model: &LinearModel) -> (IndicatorSeries, Vec<Warning>) {
    bridge(rdm, model, Deduction::Epdl)
}

fn non_negative(what: &str, year: i32, value: f64) -> Result<f64> {
    if value < 0.0 {
        Err(Error::NegativeValue {
            what: what.to_string(),
            year,
            value,
        })
    } else {
        Ok(value)
    }
}

/// Applies the deduction identity to four series with identical years.
///
/// All deductions are recorded as measured.
pub fn compute_ggdp(
    gdp: &IndicatorSeries,
    rdm: &IndicatorSeries,
    epcl: &IndicatorSeries,
    epdl: &IndicatorSeries,
) -> Result<GgdpAccount> {
    for d in [rdm, epcl, epdl] {
        same_years(gdp, d)?;
    }
    let methods = RowMethods {
        rdm: Method::Measured,
        epcl: Method::Measured,
        epdl: Method::Measured,
    };
    let mut rows = Vec::with_capacity(gdp.len());
    for (k, g) in gdp.observations().iter().enumerate() {
        let y = g.year;
        rows.push(AccountRow::new(
            y,
            g.value,
            non_negative("RDM", y, rdm.observations()[k].value)?,
            non_negative("EPCL", y, epcl.observations()[k].value)?,
            non_negative("EPDL", y, epdl.observations()[k].value)?,
            methods,
        ));
    }
    Ok(GgdpAccount::from_rows(gdp.country(), rows, Vec::new()))
}

/// Per-country inputs looked up once per account.
struct Inputs<'a> {
    country: &'a str,
    panel: &'a Panel,
}

impl Inputs<'_> {
    fn value(&self, indicator: &str, year: i32) -> Option<f64> {
        self.panel.get(self.country, indicator)?.get(year)
    }

    fn measured(&self, d: Deduction, year: i32) -> Result<Option<f64>> {
        self.value(d.indicator(), year)
            .map(|v| non_negative(d.indicator(), year, v))
            .transpose()
    }

    /// Sum of every present component, if all of them cover `year`.
    fn rollup(&self, d: Deduction, year: i32) -> Result<Option<f64>> {
        let present: Vec<&IndicatorSeries> = SecondaryComponent::of(d)
            .filter_map(|c| self.panel.get(self.country, c.indicator()))
            .collect();
        if present.is_empty() {
            return Ok(None);
        }
        let mut total = 0.0;
        for s in present {
            match s.get(year) {
                Some(v) => total += non_negative(s.indicator(), year, v)?,
                None => return Ok(None),
            }
        }
        Ok(Some(total))
    }

    fn delta_gni(&self, year: i32) -> Result<Option<f64>> {
        let (Some(gni), Some(delta)) = (self.panel.get(self.country, GNI), self.panel.get(self.country, DELTA))
        else {
            return Ok(None);
        };
        let (Some(g), Some(d)) = (gni.get(year), delta.get(year)) else {
            return Ok(None);
        };
        let frac = delta_fraction(delta, d);
        check_delta(year, frac)?;
        Ok(Some(frac * g))
    }
}

/// Builds one country's account from a panel.
///
/// Each deduction is resolved independently for every GDP year, taking the
/// first source in the strategy's order that has data for that year.
pub fn build_account(panel: &Panel, country: &str, strategy: &AccountStrategy) -> Result<GgdpAccount> {
    strategy.check()?;
    panel.ensure_valid()?;
    let gdp = panel.require(country, GDP)?;
    let inputs = Inputs { country, panel };
    let mut rows = Vec::new();
    let mut warnings = Vec::new();

    for o in gdp.observations() {
        let year = o.year;
        if let Some((lo, hi)) = strategy.years {
            if year < lo || year > hi {
                continue;
            }
        }
        let unresolved = |d: Deduction| Error::Unresolvable {
            country: country.to_string(),
            deduction: d.to_string(),
            year,
        };

        let mut rdm = None;
        for s in &strategy.rdm {
            rdm = match s {
                Source::Measured => inputs.measured(Deduction::Rdm, year)?.map(|v| (v, Method::Measured)),
                Source::Rollup => inputs.rollup(Deduction::Rdm, year)?.map(|v| (v, Method::Rollup)),
                Source::DeltaGni => inputs.delta_gni(year)?.map(|v| (v, Method::DeltaGni)),
                Source::Bridge => None,
            };
            if rdm.is_some() {
                break;
            }
        }
        let (rdm, rdm_method) = rdm.ok_or_else(|| unresolved(Deduction::Rdm))?;

        let mut resolve_loss = |d: Deduction, model: &LinearModel, tag: Method| -> Result<(f64, Method)> {
            for s in strategy.order(d) {
                let found = match s {
                    Source::Measured => inputs.measured(d, year)?.map(|v| (v, Method::Measured)),
                    Source::Rollup => inputs.rollup(d, year)?.map(|v| (v, Method::Rollup)),
                    Source::Bridge => {
                        let mut v = apply_linear(model, rdm);
                        if v < 0.0 {
                            warnings.push(clamp_warning(country, year, d, v));
                            v = 0.0;
                        }
                        Some((v, tag))
                    }
                    Source::DeltaGni => None,
                };
                if let Some(hit) = found {
                    return Ok(hit);
                }
            }
            Err(unresolved(d))
        };
        let (epcl, epcl_method) = resolve_loss(Deduction::Epcl, &strategy.bridges.epcl, Method::BridgeEpcl)?;
        let (epdl, epdl_method) = resolve_loss(Deduction::Epdl, &strategy.bridges.epdl, Method::BridgeEpdl)?;

        rows.push(AccountRow::new(
            year,
            o.value,
            rdm,
            epcl,
            epdl,
            RowMethods {
                rdm: rdm_method,
                epcl: epcl_method,
                epdl: epdl_method,
            },
        ));
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput(format!("no GDP years for {country} in range")));
    }
    Ok(GgdpAccount::from_rows(country, rows, warnings))
}

/// Refits the EPCL and EPDL bridges on observed (measured or rolled-up)
/// data pooled across every country in the panel.
pub fn refit_bridges(panel: &Panel) -> Result<BridgeModels> {
    panel.ensure_valid()?;
    let mut points: BTreeMap<Deduction, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for country in panel.countries() {
        let inputs = Inputs {
            country: &country,
            panel,
        };
        let mut years: Vec<i32> = Vec::new();
        for d in Deduction::ALL {
            if let Some(s) = panel.get(&country, d.indicator()) {
                years.extend(s.years());
            }
            for c in SecondaryComponent::of(d) {
                if let Some(s) = panel.get(&country, c.indicator()) {
                    years.extend(s.years());
                }
            }
        }
        years.sort_unstable();
        years.dedup();
        for year in years {
            let observed = |d: Deduction| -> Result<Option<f64>> {
                Ok(match inputs.measured(d, year)? {
                    Some(v) => Some(v),
                    None => inputs.rollup(d, year)?,
                })
            };
            let Some(rdm) = observed(Deduction::Rdm)? else {
                continue;
            };
            for d in [Deduction::Epcl, Deduction::Epdl] {
                if let Some(v) = observed(d)? {
                    let entry = points.entry(d).or_default();
                    entry.0.push(rdm);
                    entry.1.push(v);
                }
            }
        }
    }
    let fit = |d: Deduction| -> Result<LinearModel> {
        let (x, y) = points.get(&d).cloned().unwrap_or_default();
        if x.len() < 2 {
            return Err(Error::TooShort {
                needed: 2,
                got: x.len(),
            });
        }
        ols_fit(&x, &y)
    };
    Ok(BridgeModels {
        label: "refit".into(),
        epcl: fit(Deduction::Epcl)?,
        epdl: fit(Deduction::Epdl)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn s(country: &str, ind: &str, unit: &str, vals: &[f64]) -> IndicatorSeries {
        IndicatorSeries::new(
            country,
            ind,
            unit,
            vals.iter().enumerate().map(|(i, &v)| (2000 + i as i32, v)),
        )
        .unwrap()
    }

    fn bn(ind: &str, vals: &[f64]) -> IndicatorSeries {
        s("CHN", ind, MONEY_UNIT, vals)
    }

    #[test]
    fn rdm_from_gni_examples() {
        let gni = bn(GNI, &[1000.0, 2000.0]);
        let r = rdm_from_gni(&gni, &s("CHN", DELTA, "fraction", &[0.02, 0.0])).unwrap();
        assert_eq!(r.values(), vec![20.0, 0.0]);
        let r = rdm_from_gni(&gni, &s("CHN", DELTA, "percent of GNI", &[2.0, 2.0])).unwrap();
        assert_eq!(r.values(), vec![20.0, 40.0]);
        let r = rdm_from_gni(&gni, &s("CHN", DELTA, "fraction", &[0.0, 0.0])).unwrap();
        assert!(r.values().iter().all(|&v| v == 0.0));
        assert!(rdm_from_gni(&gni, &s("CHN", DELTA, "fraction", &[1.5, 0.0])).is_err());
        assert!(rdm_from_gni(&gni, &s("CHN", DELTA, "fraction", &[0.1])).is_err());
    }

    #[test]
    fn rollup_examples() {
        let bundle = SecondaryBundle {
            category: Deduction::Epcl,
            components: vec![
                bn("POLLUTION_ACTUAL_GOVERNANCE", &[1.0, 2.0]),
                bn("POLLUTION_VIRTUAL_GOVERNANCE", &[3.0, 4.0]),
            ],
        };
        assert_eq!(rollup(&bundle).unwrap().values(), vec![4.0, 6.0]);

        let single = SecondaryBundle {
            category: Deduction::Epdl,
            components: vec![bn("HUMAN_HEALTH_LOSS", &[1.5, 2.5])],
        };
        assert_eq!(rollup(&single).unwrap().values(), vec![1.5, 2.5]);

        let unknown = SecondaryBundle {
            category: Deduction::Rdm,
            components: vec![bn("ocean mining", &[1.0, 2.0])],
        };
        assert!(matches!(rollup(&unknown), Err(Error::UnknownComponent { .. })));

        let wrong_category = SecondaryBundle {
            category: Deduction::Rdm,
            components: vec![bn("HUMAN_HEALTH_LOSS", &[1.0, 2.0])],
        };
        assert!(rollup(&wrong_category).is_err());
    }

    #[test]
    fn components_parse_by_label() {
        assert_eq!(
            "Loss of human health".parse::<SecondaryComponent>(),
            Ok(SecondaryComponent::HumanHealthLoss)
        );
        assert_eq!(SecondaryComponent::of(Deduction::Rdm).count(), 6);
        assert_eq!(SecondaryComponent::of(Deduction::Epcl).count(), 2);
        assert_eq!(SecondaryComponent::of(Deduction::Epdl).count(), 3);
    }

    #[test]
    fn published_bridges() {
        let b = BridgeModels::published();
        let rdm = bn("RDM", &[0.0, 1000.0]);
        let (epcl, w) = epcl_bridge(&rdm, &b.epcl);
        assert!(w.is_empty());
        assert_eq!(epcl.values()[0], 932.2);
        assert_abs_diff_eq!(epcl.values()[1], 1033.1, epsilon = 1e-9);
        let (epdl, _) = epdl_bridge(&rdm, &b.epdl);
        assert_eq!(epdl.values()[0], 1179.0);
        assert_abs_diff_eq!(epdl.values()[1], 1252.16, epsilon = 1e-9);
    }

    #[test]
    fn negative_bridge_is_clamped() {
        let rdm = bn("RDM", &[10.0, 1000.0]);
        let (out, w) = epdl_bridge(&rdm, &LinearModel::fixed(-1.0, 100.0));
        assert_eq!(out.values(), vec![90.0, 0.0]);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].year, Some(2001));
        assert_eq!(w[0].module, Module::GgdpAccounting);
    }

    #[test]
    fn compute_examples() {
        let acc = compute_ggdp(
            &bn(GDP, &[100.0]),
            &bn("RDM", &[10.0]),
            &bn("EPCL", &[5.0]),
            &bn("EPDL", &[5.0]),
        )
        .unwrap();
        assert_eq!(acc.rows[0].ggdp, 80.0);
        assert!(acc.warnings.is_empty());

        let zero = bn("X", &[0.0]);
        let acc = compute_ggdp(&bn(GDP, &[100.0]), &zero, &zero, &zero).unwrap();
        assert_eq!(acc.rows[0].ggdp, 100.0);

        let acc = compute_ggdp(&bn(GDP, &[100.0]), &bn("RDM", &[150.0]), &zero, &zero).unwrap();
        assert_eq!(acc.rows[0].ggdp, -50.0);
        assert_eq!(acc.warnings[0].code, "negative_ggdp");

        assert!(matches!(
            compute_ggdp(&bn(GDP, &[100.0]), &bn("RDM", &[-1.0]), &zero, &zero),
            Err(Error::NegativeValue { .. })
        ));
    }

    fn base_panel() -> Panel {
        let mut p = Panel::new("t");
        p.insert(bn(GDP, &[5000.0, 5200.0, 5500.0])).unwrap();
        p
    }

    #[test]
    fn fall_through_to_delta_and_bridges() {
        let mut p = base_panel();
        p.insert(bn(GNI, &[4900.0, 5100.0, 5400.0])).unwrap();
        p.insert(s("CHN", DELTA, "percent of GNI", &[2.0, 2.5, 3.0])).unwrap();
        let acc = build_account(&p, "CHN", &AccountStrategy::default()).unwrap();
        for r in &acc.rows {
            assert_eq!(r.methods.rdm, Method::DeltaGni);
            assert_eq!(r.methods.epcl, Method::BridgeEpcl);
            assert_eq!(r.methods.epdl, Method::BridgeEpdl);
            assert_eq!(r.identity_residual(), 0.0);
        }
        assert_abs_diff_eq!(acc.rows[0].rdm, 98.0, epsilon = 1e-12);
        assert_abs_diff_eq!(acc.rows[0].epcl, 0.1009 * 98.0 + 932.2, epsilon = 1e-9);
    }

    #[test]
    fn full_bundles_roll_up() {
        let mut p = base_panel();
        for c in SecondaryComponent::ALL {
            p.insert(bn(c.indicator(), &[1.0, 2.0, 3.0])).unwrap();
        }
        let acc = build_account(&p, "CHN", &AccountStrategy::default()).unwrap();
        for r in &acc.rows {
            assert_eq!(
                (r.methods.rdm, r.methods.epcl, r.methods.epdl),
                (Method::Rollup, Method::Rollup, Method::Rollup)
            );
        }
        assert_eq!(acc.rows[2].rdm, 18.0);
        assert_eq!(acc.rows[2].epcl, 6.0);
        assert_eq!(acc.rows[2].epdl, 9.0);
    }

    #[test]
    fn missing_rdm_inputs_error() {
        let p = base_panel();
        match build_account(&p, "CHN", &AccountStrategy::default()) {
            Err(Error::Unresolvable {
                deduction, year, ..
            }) => {
                assert_eq!(deduction, "RDM");
                assert_eq!(year, 2000);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn measured_wins_and_year_window_applies() {
        let mut p = base_panel();
        p.insert(bn("RDM", &[10.0, 11.0, 12.0])).unwrap();
        p.insert(bn("EPCL", &[1.0, 1.0, 1.0])).unwrap();
        p.insert(bn("EPDL", &[2.0, 2.0, 2.0])).unwrap();
        let strategy = AccountStrategy {
            years: Some((2001, 2002)),
            ..AccountStrategy::default()
        };
        let acc = build_account(&p, "CHN", &strategy).unwrap();
        assert_eq!(acc.rows.len(), 2);
        assert_eq!(acc.rows[0].ggdp, 5200.0 - 11.0 - 1.0 - 2.0);
        assert_eq!(acc.rows[0].methods.epcl, Method::Measured);
    }

    #[test]
    fn invalid_strategy_rejected() {
        let strategy = AccountStrategy {
            epcl: vec![Source::DeltaGni],
            ..AccountStrategy::default()
        };
        assert!(matches!(
            build_account(&base_panel(), "CHN", &strategy),
            Err(Error::InvalidOption(_))
        ));
    }

    #[test]
    fn refit_recovers_line() {
        let mut p = Panel::new("t");
        for (country, offset) in [("CHN", 0.0), ("USA", 50.0)] {
            let rdm: Vec<f64> = (0..4).map(|k| 100.0 + offset + 10.0 * k as f64).collect();
            p.insert(s(country, "RDM", MONEY_UNIT, &rdm)).unwrap();
            p.insert(s(country, "EPCL", MONEY_UNIT, &rdm.iter().map(|x| 0.5 * x + 7.0).collect::<Vec<_>>()))
                .unwrap();
            p.insert(s(country, "EPDL", MONEY_UNIT, &rdm.iter().map(|x| 0.25 * x + 1.0).collect::<Vec<_>>()))
                .unwrap();
        }
        let b = refit_bridges(&p).unwrap();
        assert_abs_diff_eq!(b.epcl.slope, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(b.epcl.intercept, 7.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b.epdl.slope, 0.25, epsilon = 1e-12);
        assert_eq!(b.epcl.fit.unwrap().n_points, 8);
        assert!(refit_bridges(&base_panel()).is_err());
    }
}
