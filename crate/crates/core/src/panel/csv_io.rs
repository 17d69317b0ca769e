use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{IndicatorSeries, Observation, Panel, SeriesKey};
use crate::error::{Error, Result};
use crate::numfmt::format_g17;

/// On-disk CSV layouts.
///
/// `Long` has the header `country,indicator,unit,year,value` and is the
/// interchange format. `Wide` has one row per series: `country,indicator,unit`
/// followed by one column per year; empty cells are missing observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsvLayout {
    #[default]
    Long,
    Wide,
}

const LONG_COLUMNS: [&str; 5] = ["country", "indicator", "unit", "year", "value"];

struct Pending {
    unit: String,
    obs: BTreeMap<i32, f64>,
}

pub fn load_csv(path: &Path, layout: CsvLayout) -> Result<Panel> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, layout, &path.display().to_string())
}

pub fn read_csv<R: Read>(reader: R, layout: CsvLayout, provenance: &str) -> Result<Panel> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| csv_error(&e))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect::<Vec<_>>();
    if headers.iter().all(|h| h.is_empty()) {
        return Err(Error::EmptyInput(format!("{provenance}: no header")));
    }

    let pending = match layout {
        CsvLayout::Long => read_long(&mut rdr, &headers)?,
        CsvLayout::Wide => read_wide(&mut rdr, &headers)?,
    };
    if pending.is_empty() {
        return Err(Error::EmptyInput(format!("{provenance}: no data rows")));
    }

    let mut panel = Panel::new(provenance);
    for (key, p) in pending {
        let obs = p
            .obs
            .into_iter()
            .map(|(year, value)| Observation { year, value })
            .collect();
        panel.upsert(IndicatorSeries::from_parts_unchecked(
            key.country,
            key.indicator,
            p.unit,
            obs,
        ));
    }
    Ok(panel)
}

fn csv_error(e: &csv::Error) -> Error {
    Error::MalformedRow {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}

fn parse_year(raw: &str, line: u64) -> Result<i32> {
    raw.parse().map_err(|_| Error::UnparseableNumber {
        line,
        field: "year".into(),
        value: raw.to_string(),
    })
}

fn parse_value(raw: &str, line: u64) -> Result<f64> {
    raw.parse().map_err(|_| Error::UnparseableNumber {
        line,
        field: "value".into(),
        value: raw.to_string(),
    })
}

fn add_obs(
    pending: &mut BTreeMap<SeriesKey, Pending>,
    key: SeriesKey,
    unit: &str,
    year: i32,
    value: f64,
    line: u64,
) -> Result<()> {
    let entry = pending.entry(key.clone()).or_insert_with(|| Pending {
        unit: unit.to_string(),
        obs: BTreeMap::new(),
    });
    if entry.unit != unit {
        return Err(Error::MalformedRow {
            line,
            message: format!(
                "unit {unit:?} for {key} differs from earlier {:?}",
                entry.unit
            ),
        });
    }
    if entry.obs.insert(year, value).is_some() {
        return Err(Error::DuplicateKey {
            line,
            country: key.country,
            indicator: key.indicator,
            year,
        });
    }
    Ok(())
}

fn read_long<R: Read>(
    rdr: &mut csv::Reader<R>,
    headers: &[String],
) -> Result<BTreeMap<SeriesKey, Pending>> {
    let mut idx = [0usize; 5];
    for (slot, name) in idx.iter_mut().zip(LONG_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MalformedRow {
                line: 1,
                message: format!("missing column {name:?}"),
            })?;
    }
    let mut pending = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(&e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != headers.len() {
            return Err(Error::MalformedRow {
                line,
                message: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        let field = |i: usize| record.get(idx[i]).unwrap_or("");
        let (country, indicator, unit) = (field(0), field(1), field(2));
        if country.is_empty() || indicator.is_empty() {
            return Err(Error::MalformedRow {
                line,
                message: "empty country or indicator".into(),
            });
        }
        let year = parse_year(field(3), line)?;
        let value = parse_value(field(4), line)?;
        add_obs(
            &mut pending,
            SeriesKey::new(country, indicator),
            unit,
            year,
            value,
            line,
        )?;
    }
    Ok(pending)
}

fn read_wide<R: Read>(
    rdr: &mut csv::Reader<R>,
    headers: &[String],
) -> Result<BTreeMap<SeriesKey, Pending>> {
    if headers.len() < 4 || headers[..3] != ["country", "indicator", "unit"] {
        return Err(Error::MalformedRow {
            line: 1,
            message: "wide layout header must start with country,indicator,unit followed by years"
                .into(),
        });
    }
    let years = headers[3..]
        .iter()
        .map(|h| parse_year(h, 1))
        .collect::<Result<Vec<_>>>()?;

    let mut pending = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(&e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != headers.len() {
            return Err(Error::MalformedRow {
                line,
                message: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        let (country, indicator, unit) = (&record[0], &record[1], &record[2]);
        if country.is_empty() || indicator.is_empty() {
            return Err(Error::MalformedRow {
                line,
                message: "empty country or indicator".into(),
            });
        }
        let key = SeriesKey::new(country, indicator);
        if pending.contains_key(&key) {
            let year = years.first().copied().unwrap_or_default();
            return Err(Error::DuplicateKey {
                line,
                country: key.country,
                indicator: key.indicator,
                year,
            });
        }
        pending.insert(
            key.clone(),
            Pending {
                unit: unit.to_string(),
                obs: BTreeMap::new(),
            },
        );
        for (cell, &year) in record.iter().skip(3).zip(&years) {
            if cell.is_empty() {
                continue;
            }
            let value = parse_value(cell, line)?;
            add_obs(&mut pending, key.clone(), unit, year, value, line)?;
        }
    }
    Ok(pending)
}

/// Writes the panel in long layout, ordered by key then year.
pub fn write_csv_long<W: Write>(panel: &Panel, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let ser = |e: csv::Error| Error::Serialize(e.to_string());
    wtr.write_record(LONG_COLUMNS).map_err(ser)?;
    for series in panel.series() {
        for o in series.observations() {
            wtr.write_record([
                series.country(),
                series.indicator(),
                series.unit(),
                &o.year.to_string(),
                &format_g17(o.value),
            ])
            .map_err(ser)?;
        }
    }
    wtr.flush().map_err(|e| Error::Serialize(e.to_string()))
}
