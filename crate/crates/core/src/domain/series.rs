//! Hourly per-unit renewable profiles and the UHVDC delivery profile.

use std::io::{Read, Write};
use std::path::Path;

use super::ConfigError;

pub const SERIES_HEADER: [&str; 4] = ["t", "wind_pu", "solar_pu", "uhvdc_mw"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeriesBundle {
    pub wind_pu: Vec<f64>,
    pub solar_pu: Vec<f64>,
    pub uhvdc_mw: Vec<f64>,
}

impl TimeSeriesBundle {
    pub fn len(&self) -> usize {
        self.uhvdc_mw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.uhvdc_mw.is_empty()
    }

    pub fn constant(n: usize, wind: f64, solar: f64, load: f64) -> Self {
        Self {
            wind_pu: vec![wind; n],
            solar_pu: vec![solar; n],
            uhvdc_mw: vec![load; n],
        }
    }
}

pub fn load_series(path: &Path) -> Result<TimeSeriesBundle, ConfigError> {
    let file = std::fs::File::open(path).map_err(|e| ConfigError::Io(path.display().to_string(), e))?;
    read_series(file).map_err(|e| match e {
        ConfigError::Series(msg) => ConfigError::Series(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn read_series<R: Read>(reader: R) -> Result<TimeSeriesBundle, ConfigError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| ConfigError::Series(e.to_string()))?.clone();
    let mut cols = [0usize; 4];
    for (k, name) in SERIES_HEADER.iter().enumerate() {
        cols[k] = headers
            .iter()
            .position(|h| h == *name)
            .ok_or_else(|| ConfigError::Series(format!("missing column `{name}`")))?;
    }
    let mut out = TimeSeriesBundle::default();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| ConfigError::Series(e.to_string()))?;
        let field = |k: usize| -> Result<f64, ConfigError> {
            let raw = rec.get(cols[k]).unwrap_or("");
            raw.parse::<f64>().map_err(|_| {
                ConfigError::Series(format!("row {}: column `{}` value `{raw}` is not a number", line + 1, SERIES_HEADER[k]))
            })
        };
        let t = field(0)?;
        if t != line as f64 {
            return Err(ConfigError::Series(format!("row {}: expected t = {line}, found {t}", line + 1)));
        }
        out.wind_pu.push(field(1)?);
        out.solar_pu.push(field(2)?);
        out.uhvdc_mw.push(field(3)?);
    }
    Ok(out)
}

pub fn write_series<W: Write>(writer: W, series: &TimeSeriesBundle) -> Result<(), ConfigError> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| ConfigError::Series(e.to_string());
    w.write_record(SERIES_HEADER).map_err(io)?;
    for t in 0..series.len() {
        w.write_record([
            t.to_string(),
            format!("{:.6}", series.wind_pu[t]),
            format!("{:.6}", series.solar_pu[t]),
            format!("{:.3}", series.uhvdc_mw[t]),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| ConfigError::Series(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = TimeSeriesBundle {
            wind_pu: vec![0.25, 0.5],
            solar_pu: vec![0.0, 0.125],
            uhvdc_mw: vec![8000.0, 7000.5],
        };
        let mut buf = Vec::new();
        write_series(&mut buf, &s).unwrap();
        assert_eq!(read_series(&buf[..]).unwrap(), s);
    }

    #[test]
    fn missing_column_is_named() {
        let err = read_series("t,wind_pu,uhvdc_mw\n0,0.1,5\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("solar_pu"), "{err}");
    }
}
