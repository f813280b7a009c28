//! OpenML dataset retrieval.
//!
//! Resolves a dataset id through the public description endpoint, downloads
//! the ARFF payload, converts it to the loader's CSV form and caches the
//! conversion by id. Repeat fetches are served from the cache without
//! touching the network (visible with --verbose). All writes go through a
//! temp file plus rename, so output is never partial.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use cdf_core::dataset::{csv_string, parse_arff_with_label, Dataset};
use cdf_core::error::{CdfError, Result};

const DESCRIPTION_URL: &str = "https://www.openml.org/api/v1/json/data";

/// What a fetch produced.
#[derive(Debug)]
pub struct FetchSummary {
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub label_column: String,
    pub from_cache: bool,
}

/// Cache directory: `CDF_CACHE_DIR`, else `$HOME/.cache/cdf`, else
/// `./.cdf-cache`.
pub fn cache_dir() -> PathBuf {
    if let Ok(dir) = env::var("CDF_CACHE_DIR") {
        return PathBuf::from(dir);
    }
    if let Ok(home) = env::var("HOME") {
        return Path::new(&home).join(".cache").join("cdf");
    }
    PathBuf::from(".cdf-cache")
}

/// Fetch OpenML dataset `id` as CSV at `out`.
pub fn fetch_openml(id: u64, out: &Path) -> Result<FetchSummary> {
    let cache = cache_dir();
    fs::create_dir_all(&cache)?;
    let cached = cache.join(format!("openml_{id}.csv"));

    let from_cache = cached.exists();
    if from_cache {
        log::info!("openml {id}: cache hit at {}, no network call", cached.display());
    } else {
        log::info!("openml {id}: downloading");
        let csv_text = download_as_csv(id)?;
        write_atomic(&cached, csv_text.as_bytes())?;
    }

    let bytes = fs::read(&cached)?;
    write_atomic(out, &bytes)?;

    // summary comes from the converted file so cache hits report it too
    let d: Dataset<f64> = cdf_core::dataset::load_csv(
        out,
        &cdf_core::dataset::LabelColumn::Index(last_column_index(out)?),
        cdf_core::dataset::MissingPolicy::Reject,
    )?;
    let label_column = last_column_name(out)?;
    Ok(FetchSummary {
        n: d.n(),
        p: d.p(),
        k: d.k(),
        label_column,
        from_cache,
    })
}

fn last_column_index(path: &Path) -> Result<usize> {
    let header = first_line(path)?;
    Ok(header.split(',').count() - 1)
}

fn last_column_name(path: &Path) -> Result<String> {
    let header = first_line(path)?;
    Ok(header.rsplit(',').next().unwrap_or("class").trim().to_string())
}

fn first_line(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .next()
        .map(str::to_string)
        .ok_or_else(|| CdfError::Parse("empty CSV".into()))
}

fn download_as_csv(id: u64) -> Result<String> {
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(300))
        .build()
        .map_err(|e| CdfError::Network(e.to_string()))?;

    let desc_url = format!("{DESCRIPTION_URL}/{id}");
    let response = client
        .get(&desc_url)
        .send()
        .map_err(|e| CdfError::Network(format!("{desc_url}: {e}")))?;
    let status = response.status();
    let body = response
        .text()
        .map_err(|e| CdfError::Network(e.to_string()))?;
    if !status.is_success() {
        // the API answers 4xx with a JSON error body for unknown ids
        return Err(CdfError::InvalidData(format!(
            "dataset not found: openml id {id} (HTTP {status})"
        )));
    }
    let desc: serde_json::Value =
        serde_json::from_str(&body).map_err(|e| CdfError::Parse(format!("description: {e}")))?;
    let data_url = desc
        .pointer("/data_set_description/url")
        .and_then(serde_json::Value::as_str)
        .ok_or_else(|| {
            CdfError::Parse("description lacks data_set_description.url".into())
        })?;

    let arff = client
        .get(data_url)
        .send()
        .map_err(|e| CdfError::Network(format!("{data_url}: {e}")))?;
    if !arff.status().is_success() {
        return Err(CdfError::Network(format!(
            "{data_url}: HTTP {}",
            arff.status()
        )));
    }
    let arff_text = arff.text().map_err(|e| CdfError::Network(e.to_string()))?;

    // convert through the canonical CSV form so the cache is byte-stable
    let (dataset, label_attr): (Dataset<f64>, String) = parse_arff_with_label(&arff_text)?;
    Ok(csv_string(&dataset, &label_attr))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
