use serde::{Deserialize, Serialize};

use super::{IndicatorSeries, Observation, Panel};
use crate::error::{Error, Result};
use crate::numfmt::to_json_string;

pub const PANEL_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PanelDoc {
    schema_version: u32,
    provenance: String,
    year_span: Option<[i32; 2]>,
    series: Vec<SeriesDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesDoc {
    country: String,
    indicator: String,
    unit: String,
    observations: Vec<Observation>,
}

/// Serializes a panel to the versioned JSON document.
pub fn save_panel(panel: &Panel) -> Result<String> {
    let doc = PanelDoc {
        schema_version: PANEL_SCHEMA_VERSION,
        provenance: panel.provenance().to_string(),
        year_span: panel.year_span().map(|(a, b)| [a, b]),
        series: panel
            .series()
            .map(|s| SeriesDoc {
                country: s.country().to_string(),
                indicator: s.indicator().to_string(),
                unit: s.unit().to_string(),
                observations: s.observations().to_vec(),
            })
            .collect(),
    };
    to_json_string(&doc)
}

/// Parses a panel document, enforcing the schema and series invariants.
pub fn load_panel(json: &str) -> Result<Panel> {
    let doc: PanelDoc = serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
    if doc.schema_version != PANEL_SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "unsupported schema_version {} (expected {PANEL_SCHEMA_VERSION})",
            doc.schema_version
        )));
    }
    let mut panel = Panel::new(doc.provenance);
    for s in doc.series {
        let years: Vec<i32> = s.observations.iter().map(|o| o.year).collect();
        if years.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Schema(format!(
                "{}/{}: observations not in strictly increasing year order",
                s.country, s.indicator
            )));
        }
        let series = IndicatorSeries::new(
            s.country,
            s.indicator,
            s.unit,
            s.observations.into_iter().map(|o| (o.year, o.value)),
        )
        .map_err(|e| Error::Schema(e.to_string()))?;
        panel
            .insert(series)
            .map_err(|e| Error::Schema(e.to_string()))?;
    }
    let span = panel.year_span().map(|(a, b)| [a, b]);
    if span != doc.year_span {
        return Err(Error::Schema(format!(
            "year_span {:?} inconsistent with series ({span:?})",
            doc.year_span
        )));
    }
    Ok(panel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_panel_round_trips() {
        let p = Panel::new("nothing");
        let json = save_panel(&p).unwrap();
        assert!(json.contains("\"series\": []"));
        assert_eq!(load_panel(&json).unwrap(), p);
    }

    #[test]
    fn missing_unit_is_a_schema_error() {
        let json = r#"{"schema_version":1,"provenance":"x","year_span":[1990,1990],
            "series":[{"country":"USA","indicator":"GDP","observations":[{"year":1990,"value":1.0}]}]}"#;
        let err = load_panel(json).unwrap_err();
        assert!(matches!(err, Error::Schema(ref m) if m.contains("unit")), "{err}");
    }

    #[test]
    fn wrong_version_and_span_rejected() {
        let p = Panel::new("x");
        let json = save_panel(&p).unwrap().replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(load_panel(&json).is_err());
        let json = r#"{"schema_version":1,"provenance":"x","year_span":[1980,1990],
            "series":[{"country":"USA","indicator":"GDP","unit":"usd_bn","observations":[{"year":1990,"value":1.0}]}]}"#;
        assert!(load_panel(json).is_err());
    }

    fn arb_panel() -> impl Strategy<Value = Panel> {
        let countries = prop::sample::select(vec!["USA", "CHN", "IND", "ESP", "DEU"]);
        let indicators = prop::sample::select(vec!["GDP", "GNI", "CPI", "CO2_EMISSIONS"]);
        let obs = prop::collection::btree_map(1950i32..2050, -1e12f64..1e12, 0..12);
        prop::collection::vec((countries, indicators, obs), 0..8).prop_map(|entries| {
            let mut p = Panel::new("generated");
            for (c, i, o) in entries {
                p.upsert(IndicatorSeries::new(c, i, "usd_bn", o).unwrap());
            }
            p
        })
    }

    proptest! {
        #[test]
        fn save_load_is_identity(p in arb_panel()) {
            let back = load_panel(&save_panel(&p).unwrap()).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
