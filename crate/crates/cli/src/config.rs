use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ggdp_core::accounting::{AccountStrategy, Source};
use ggdp_core::gm11::{ShiftPolicy, DEFAULT_HORIZON};
use ggdp_core::panel::CsvLayout;
use ggdp_core::{Error, GapPolicy, GraOptions, Result, TrendMode};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BridgeChoice {
    /// Published coefficients.
    #[default]
    Published,
    /// Pooled least squares on the panel's own observed deductions.
    Refit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub layout: CsvLayout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemoteIndicator {
    /// World Bank indicator code, e.g. `NY.GDP.MKTP.CD`.
    pub id: String,
    /// Unit tag stored with the fetched series.
    pub unit: String,
    /// Multiplier applied to raw values (1e-9 converts US$ to billions).
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FetchConfig {
    /// Local indicator name to remote indicator.
    #[serde(default)]
    pub indicators: BTreeMap<String, RemoteIndicator>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraConfig {
    pub parent: String,
    pub children: Vec<String>,
    pub rho: f64,
    pub normalize: bool,
}

impl Default for GraConfig {
    fn default() -> Self {
        let o = GraOptions::default();
        Self {
            parent: "GGDP".into(),
            children: vec!["GDP".into(), "RDM".into(), "EPCL".into(), "EPDL".into()],
            rho: o.rho,
            normalize: o.normalize,
        }
    }
}

impl GraConfig {
    pub fn options(&self) -> GraOptions {
        GraOptions {
            rho: self.rho,
            normalize: self.normalize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForecastConfig {
    pub indicators: Vec<String>,
    pub horizon: usize,
    pub shift: ShiftPolicy,
    /// Indicator pairs whose trends are correlated.
    pub correlations: Vec<(String, String)>,
    pub correlation_mode: TrendMode,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        Self {
            indicators: vec!["GGDP".into()],
            horizon: DEFAULT_HORIZON,
            shift: ShiftPolicy::default(),
            correlations: Vec::new(),
            correlation_mode: TrendMode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ImpactConfig {
    pub indicators: Vec<String>,
    /// Score GGDP alongside the climate indicators.
    pub include_ggdp: bool,
}

impl Default for ImpactConfig {
    fn default() -> Self {
        Self {
            indicators: Vec::new(),
            include_ggdp: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceOrder {
    pub rdm: Vec<Source>,
    pub epcl: Vec<Source>,
    pub epdl: Vec<Source>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub inputs: Vec<InputSpec>,
    /// Empty means every country with a GDP series.
    pub countries: Vec<String>,
    pub years: Option<(i32, i32)>,
    pub gaps: GapPolicy,
    pub bridge: BridgeChoice,
    pub sources: Option<SourceOrder>,
    pub gra: GraConfig,
    pub forecast: ForecastConfig,
    pub impact: ImpactConfig,
    pub fetch: FetchConfig,
    pub out_dir: PathBuf,
    pub full: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            countries: Vec::new(),
            years: None,
            gaps: GapPolicy::default(),
            bridge: BridgeChoice::default(),
            sources: None,
            gra: GraConfig::default(),
            forecast: ForecastConfig::default(),
            impact: ImpactConfig::default(),
            fetch: FetchConfig::default(),
            out_dir: PathBuf::from("out"),
            full: false,
        }
    }
}

impl RunConfig {
    /// Reads a config file; relative paths inside it resolve against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for input in &mut cfg.inputs {
            if input.path.is_relative() {
                input.path = base.join(&input.path);
            }
        }
        if cfg.out_dir.is_relative() {
            cfg.out_dir = base.join(&cfg.out_dir);
        }
        Ok(cfg)
    }

    pub fn check(&self) -> Result<()> {
        if let Some((lo, hi)) = self.years {
            if lo > hi {
                return Err(Error::InvalidOption(format!("empty year range {lo}..{hi}")));
            }
        }
        self.gra.options().validate()?;
        for c in &self.countries {
            if !ggdp_core::panel::is_country_code(c) {
                return Err(Error::InvalidOption(format!(
                    "country {c:?} is not an ISO alpha-3 code"
                )));
            }
        }
        Ok(())
    }

    pub fn strategy(&self) -> AccountStrategy {
        let mut s = AccountStrategy {
            years: self.years,
            ..AccountStrategy::default()
        };
        if let Some(order) = &self.sources {
            s.rdm = order.rdm.clone();
            s.epcl = order.epcl.clone();
            s.epdl = order.epdl.clone();
        }
        s
    }
}
