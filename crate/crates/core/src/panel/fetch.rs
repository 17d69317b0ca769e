//! Client for the World Bank v2 indicators API.
//!
//! Responses are paged arrays of the form `[metadata, observations]`, where
//! `metadata` carries `page`/`pages` and each observation has a `date`
//! (calendar year as a string), a nullable `value`, and an `indicator`
//! object whose `value` is the human-readable indicator name. HTTP is
//! abstracted behind [`Transport`] so tests never touch the network.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::thread;
use std::time::Duration;

use serde_json::Value;

use super::IndicatorSeries;
use crate::error::{Error, Result};

pub const DEFAULT_API_BASE: &str = "https://api.worldbank.org/v2";

/// Raw HTTP response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

/// Blocking HTTP GET.
///
/// `Err` means the request never produced a response (connection refused,
/// timeout, DNS failure); such failures are retried.
pub trait Transport {
    fn get(&self, url: &str) -> std::result::Result<HttpResponse, String>;
}

#[derive(Debug, Clone)]
pub struct FetchOptions {
    pub per_page: u32,
    /// Extra attempts after a transient failure.
    pub retries: u32,
    /// Delay before the first retry; doubles on each further retry.
    pub backoff: Duration,
    pub max_pages: u32,
}

impl Default for FetchOptions {
    fn default() -> Self {
        Self {
            per_page: 1000,
            retries: 2,
            backoff: Duration::from_millis(500),
            max_pages: 100,
        }
    }
}

/// URL of one page of `indicator_id` for `country` over `years`.
pub fn indicator_url(
    api_base: &str,
    country: &str,
    indicator_id: &str,
    years: &RangeInclusive<i32>,
    per_page: u32,
    page: u32,
) -> String {
    format!(
        "{}/country/{}/indicator/{}?format=json&date={}:{}&per_page={}&page={}",
        api_base.trim_end_matches('/'),
        country,
        indicator_id,
        years.start(),
        years.end(),
        per_page,
        page
    )
}

fn is_transient(status: u16) -> bool {
    status == 429 || (500..600).contains(&status)
}

fn get_with_retry<T: Transport + ?Sized>(
    transport: &T,
    url: &str,
    opts: &FetchOptions,
) -> Result<String> {
    let mut delay = opts.backoff;
    let mut attempt = 0;
    loop {
        let failure = match transport.get(url) {
            Ok(resp) if (200..300).contains(&resp.status) => return Ok(resp.body),
            Ok(resp) if is_transient(resp.status) => Error::Http {
                status: resp.status,
                url: url.to_string(),
            },
            Ok(resp) => {
                return Err(Error::Http {
                    status: resp.status,
                    url: url.to_string(),
                })
            }
            Err(message) => Error::Transport {
                url: url.to_string(),
                message,
            },
        };
        if attempt >= opts.retries {
            return Err(failure);
        }
        attempt += 1;
        if !delay.is_zero() {
            thread::sleep(delay);
        }
        delay *= 2;
    }
}

struct Page {
    pages: u32,
    unit: Option<String>,
    rows: Vec<(i32, Option<f64>)>,
}

fn as_u32(v: &Value) -> Option<u32> {
    match v {
        Value::Number(n) => n.as_u64().and_then(|n| u32::try_from(n).ok()),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

fn parse_page(body: &str) -> Result<Page> {
    let malformed = |m: &str| Error::MalformedResponse(m.to_string());
    let doc: Value = serde_json::from_str(body).map_err(|e| malformed(&e.to_string()))?;
    let parts = doc.as_array().ok_or_else(|| malformed("top level is not an array"))?;
    let meta = parts
        .first()
        .and_then(Value::as_object)
        .ok_or_else(|| malformed("missing metadata object"))?;
    if let Some(msg) = meta.get("message") {
        return Err(Error::MalformedResponse(format!("API error: {msg}")));
    }
    let pages = meta
        .get("pages")
        .and_then(as_u32)
        .ok_or_else(|| malformed("metadata lacks `pages`"))?;

    let mut page = Page {
        pages,
        unit: None,
        rows: Vec::new(),
    };
    let items = match parts.get(1) {
        None | Some(Value::Null) => return Ok(page),
        Some(Value::Array(items)) => items,
        Some(_) => return Err(malformed("observation list is not an array")),
    };
    for item in items {
        let date = item
            .get("date")
            .and_then(Value::as_str)
            .ok_or_else(|| malformed("observation without `date`"))?;
        let year: i32 = date
            .parse()
            .map_err(|_| Error::MalformedResponse(format!("non-annual date {date:?}")))?;
        let value = match item.get("value") {
            None | Some(Value::Null) => None,
            Some(Value::Number(n)) => n.as_f64(),
            Some(other) => {
                return Err(Error::MalformedResponse(format!(
                    "non-numeric value {other} for {year}"
                )))
            }
        };
        if page.unit.is_none() {
            page.unit = item
                .get("indicator")
                .and_then(|i| i.get("value"))
                .and_then(Value::as_str)
                .map(str::to_string);
        }
        page.rows.push((year, value));
    }
    Ok(page)
}

/// Downloads one indicator series, following every page.
///
/// Null observations are skipped; the unit tag is the remote indicator
/// name. Transient failures (connection errors, 429, 5xx) are retried
/// `opts.retries` times with exponential backoff.
pub fn fetch_indicator<T: Transport + ?Sized>(
    transport: &T,
    api_base: &str,
    country: &str,
    indicator_id: &str,
    years: RangeInclusive<i32>,
    opts: &FetchOptions,
) -> Result<IndicatorSeries> {
    let country = country.to_ascii_uppercase();
    let mut merged: BTreeMap<i32, f64> = BTreeMap::new();
    let mut unit = None;
    let mut page_no = 1;
    loop {
        let url = indicator_url(api_base, &country, indicator_id, &years, opts.per_page, page_no);
        let page = parse_page(&get_with_retry(transport, &url, opts)?)?;
        unit = unit.or(page.unit);
        for (year, value) in page.rows {
            let Some(value) = value else { continue };
            if merged.insert(year, value).is_some() {
                return Err(Error::MalformedResponse(format!(
                    "year {year} returned twice"
                )));
            }
        }
        if page_no >= page.pages || page_no >= opts.max_pages {
            break;
        }
        page_no += 1;
    }
    if merged.is_empty() {
        return Err(Error::NoObservations {
            country,
            indicator: indicator_id.to_string(),
        });
    }
    let unit = unit.unwrap_or_else(|| indicator_id.to_string());
    IndicatorSeries::new(country, indicator_id, unit, merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::RefCell;

    struct Scripted {
        responses: RefCell<Vec<std::result::Result<HttpResponse, String>>>,
        urls: RefCell<Vec<String>>,
    }

    impl Scripted {
        fn new(mut responses: Vec<std::result::Result<HttpResponse, String>>) -> Self {
            responses.reverse();
            Self {
                responses: RefCell::new(responses),
                urls: RefCell::new(Vec::new()),
            }
        }
    }

    impl Transport for Scripted {
        fn get(&self, url: &str) -> std::result::Result<HttpResponse, String> {
            self.urls.borrow_mut().push(url.to_string());
            self.responses.borrow_mut().pop().expect("unexpected request")
        }
    }

    fn ok(body: &str) -> std::result::Result<HttpResponse, String> {
        Ok(HttpResponse {
            status: 200,
            body: body.to_string(),
        })
    }

    fn quick() -> FetchOptions {
        FetchOptions {
            backoff: Duration::ZERO,
            ..FetchOptions::default()
        }
    }

    const ONE_PAGE: &str = r#"[{"page":1,"pages":1,"per_page":50,"total":3},[
        {"indicator":{"id":"NY.GDP.MKTP.CD","value":"GDP (current US$)"},"countryiso3code":"USA","date":"2020","value":20.9},
        {"indicator":{"id":"NY.GDP.MKTP.CD","value":"GDP (current US$)"},"countryiso3code":"USA","date":"2019","value":null},
        {"indicator":{"id":"NY.GDP.MKTP.CD","value":"GDP (current US$)"},"countryiso3code":"USA","date":"2018","value":20.5}]]"#;

    #[test]
    fn skips_null_values() {
        let t = Scripted::new(vec![ok(ONE_PAGE)]);
        let s = fetch_indicator(&t, DEFAULT_API_BASE, "usa", "NY.GDP.MKTP.CD", 2018..=2020, &quick())
            .unwrap();
        assert_eq!(s.years(), vec![2018, 2020]);
        assert_eq!(s.unit(), "GDP (current US$)");
        assert_eq!(s.country(), "USA");
        let url = &t.urls.borrow()[0];
        assert!(url.contains("format=json"));
        assert!(url.contains("date=2018:2020"));
        assert!(url.contains("per_page=1000"));
    }

    #[test]
    fn surfaces_404_without_retry() {
        let t = Scripted::new(vec![Ok(HttpResponse {
            status: 404,
            body: String::new(),
        })]);
        let err = fetch_indicator(&t, DEFAULT_API_BASE, "USA", "X", 2000..=2001, &quick()).unwrap_err();
        assert!(matches!(err, Error::Http { status: 404, .. }));
        assert_eq!(t.urls.borrow().len(), 1);
    }

    #[test]
    fn retries_transient_failures_twice() {
        let t = Scripted::new(vec![
            Err("connection reset".into()),
            Ok(HttpResponse {
                status: 503,
                body: String::new(),
            }),
            ok(ONE_PAGE),
        ]);
        let s = fetch_indicator(&t, DEFAULT_API_BASE, "USA", "X", 2018..=2020, &quick()).unwrap();
        assert_eq!(s.len(), 2);

        let t = Scripted::new(vec![
            Err("a".into()),
            Err("b".into()),
            Err("c".into()),
        ]);
        let err = fetch_indicator(&t, DEFAULT_API_BASE, "USA", "X", 2018..=2020, &quick()).unwrap_err();
        assert!(matches!(err, Error::Transport { .. }));
        assert_eq!(t.urls.borrow().len(), 3);
    }

    #[test]
    fn malformed_and_empty_responses() {
        let t = Scripted::new(vec![ok("{not json")]);
        assert!(matches!(
            fetch_indicator(&t, DEFAULT_API_BASE, "USA", "X", 2000..=2001, &quick()),
            Err(Error::MalformedResponse(_))
        ));
        let t = Scripted::new(vec![ok(r#"[{"message":[{"id":"120","value":"Invalid value"}]}]"#)]);
        assert!(matches!(
            fetch_indicator(&t, DEFAULT_API_BASE, "USA", "X", 2000..=2001, &quick()),
            Err(Error::MalformedResponse(_))
        ));
        let t = Scripted::new(vec![ok(r#"[{"page":1,"pages":0,"per_page":50,"total":0},null]"#)]);
        assert!(matches!(
            fetch_indicator(&t, DEFAULT_API_BASE, "USA", "X", 2000..=2001, &quick()),
            Err(Error::NoObservations { .. })
        ));
    }
}
