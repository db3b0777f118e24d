//! Wind-speed series, summary statistics and turbine/farm power conversion.

use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::fleet::{parse_day_table, write_day_table, HORIZON};

/// Hourly wind speeds (m/s) at one site, one row per typical day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindSpeedSeries {
    pub site: String,
    pub day_labels: Vec<String>,
    pub speeds: Vec<Vec<f64>>,
}

impl WindSpeedSeries {
    pub fn new(site: impl Into<String>, day_labels: Vec<String>, speeds: Vec<Vec<f64>>) -> Result<Self, DataError> {
        let s = WindSpeedSeries {
            site: site.into(),
            day_labels,
            speeds,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if self.day_labels.len() != self.speeds.len() {
            return Err(DataError::Invalid(format!(
                "{} day labels for {} rows of speeds",
                self.day_labels.len(),
                self.speeds.len()
            )));
        }
        for (label, row) in self.day_labels.iter().zip(&self.speeds) {
            if row.len() != HORIZON {
                return Err(DataError::Horizon {
                    day: label.clone(),
                    found: row.len(),
                });
            }
            if let Some((h, v)) = row.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
                return Err(DataError::Invalid(format!(
                    "day {label}, hour {h}: wind speed must be finite and non-negative (got {v})"
                )));
            }
        }
        Ok(())
    }

    pub fn day(&self, label: &str) -> Option<&[f64]> {
        self.day_labels
            .iter()
            .position(|l| l == label)
            .map(|k| self.speeds[k].as_slice())
    }

    /// All samples in day-major order.
    pub fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        self.speeds.iter().flatten().copied()
    }
}

pub fn load_wind(path: &Path) -> Result<WindSpeedSeries, DataError> {
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let site = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("site")
        .to_string();
    parse_wind_csv(text.as_bytes(), &path.display().to_string(), site)
}

pub fn parse_wind_csv<R: Read>(reader: R, origin: &str, site: String) -> Result<WindSpeedSeries, DataError> {
    let (labels, speeds): (Vec<_>, Vec<_>) = parse_day_table(reader, origin)?
        .into_iter()
        .map(|(l, v, _)| (l, v))
        .unzip();
    WindSpeedSeries::new(site, labels, speeds)
}

pub fn write_wind_csv(series: &WindSpeedSeries) -> String {
    write_day_table(
        series
            .day_labels
            .iter()
            .zip(&series.speeds)
            .map(|(l, s)| (l.as_str(), s.as_slice())),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindStats {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single sample.
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summarize(samples: &[f64]) -> Option<WindStats> {
    if samples.is_empty() {
        return None;
    }
    let n = samples.len();
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = samples.iter().sum::<f64>() / n as f64;
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let std_dev = if n > 1 {
        (samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Some(WindStats {
        count: n,
        mean,
        median,
        std_dev,
        min: sorted[0],
        max: sorted[n - 1],
    })
}

pub fn summarize_series(series: &WindSpeedSeries) -> Option<WindStats> {
    summarize(&series.samples().collect::<Vec<_>>())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Bins `[0, max]` with a fixed width. Bins are left-closed; the last is closed on both ends.
pub fn histogram(samples: &[f64], bin_width: f64) -> Vec<HistogramBin> {
    assert!(bin_width > 0.0, "bin width must be positive");
    let max = samples.iter().copied().fold(0.0f64, f64::max);
    let nbins = ((max / bin_width).ceil() as usize).max(1);
    let mut bins: Vec<HistogramBin> = (0..nbins)
        .map(|k| HistogramBin {
            lower: k as f64 * bin_width,
            upper: (k + 1) as f64 * bin_width,
            count: 0,
        })
        .collect();
    for &v in samples {
        let k = ((v / bin_width).floor() as usize).min(nbins - 1);
        bins[k].count += 1;
    }
    bins
}

/// Tabulated single-turbine power curve with linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurbinePowerCurve {
    pub rated_power: f64,
    pub cut_in: f64,
    pub cut_out: f64,
    pub points: Vec<(f64, f64)>,
}

impl TurbinePowerCurve {
    pub fn new(rated_power: f64, cut_in: f64, cut_out: f64, points: Vec<(f64, f64)>) -> Result<Self, DataError> {
        let c = TurbinePowerCurve {
            rated_power,
            cut_in,
            cut_out,
            points,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let bad = |m: String| Err(DataError::Invalid(format!("power curve: {m}")));
        if !(self.rated_power > 0.0) || !self.rated_power.is_finite() {
            return bad("rated power must be positive".into());
        }
        if !(self.cut_in >= 0.0 && self.cut_in < self.cut_out) || !self.cut_out.is_finite() {
            return bad("need 0 <= cut_in < cut_out".into());
        }
        if self.points.is_empty() {
            return bad("no points".into());
        }
        for w in self.points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return bad("speeds must be strictly increasing".into());
            }
        }
        let tol = 1e-9 * self.rated_power;
        for &(v, p) in &self.points {
            if !v.is_finite() || !p.is_finite() {
                return bad("points must be finite".into());
            }
            if p < 0.0 || p > self.rated_power + tol {
                return bad(format!("power {p} at {v} m/s outside [0, rated]"));
            }
        }
        Ok(())
    }

    /// Output of one turbine in MW.
    pub fn power(&self, speed: f64) -> f64 {
        if !(speed >= self.cut_in) || speed >= self.cut_out {
            return 0.0;
        }
        let pts = &self.points;
        let k = pts.partition_point(|&(v, _)| v <= speed);
        if k == 0 {
            return pts[0].1;
        }
        if k == pts.len() {
            return pts[k - 1].1;
        }
        let (v0, p0) = pts[k - 1];
        let (v1, p1) = pts[k];
        p0 + (p1 - p0) * (speed - v0) / (v1 - v0)
    }
}

pub fn turbine_power(speed: f64, curve: &TurbinePowerCurve) -> f64 {
    curve.power(speed)
}

/// How installed farm capacity maps onto turbines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurbineCount {
    /// `capacity / rated` turbines, possibly fractional.
    #[default]
    Fractional,
    /// `floor(capacity / rated)` whole turbines.
    Whole,
}

pub fn turbine_count(capacity: f64, curve: &TurbinePowerCurve, mode: TurbineCount) -> f64 {
    let n = capacity / curve.rated_power;
    match mode {
        TurbineCount::Fractional => n,
        TurbineCount::Whole => n.floor(),
    }
}

/// Farm output in MW for each hour.
pub fn farm_power(speeds: &[f64], curve: &TurbinePowerCurve, capacity: f64, mode: TurbineCount) -> Vec<f64> {
    let n = turbine_count(capacity, curve, mode);
    speeds.iter().map(|&v| n * curve.power(v)).collect()
}

/// Reads `speed_ms,power_mw`. A leading `# rated_power_mw=..,cut_in_ms=..,cut_out_ms=..`
/// line supplies the turbine parameters; missing ones default to the last tabulated
/// power, the first tabulated speed and 25 m/s.
pub fn parse_curve_csv<R: Read>(mut reader: R, origin: &str) -> Result<TurbinePowerCurve, DataError> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| DataError::parse(origin, 0, None, e.to_string()))?;
    let mut rated = None;
    let mut cut_in = None;
    let mut cut_out = None;
    for (k, line) in text.lines().enumerate() {
        let Some(body) = line.trim_start().strip_prefix('#') else {
            continue;
        };
        for part in body.split(',') {
            let Some((key, value)) = part.split_once('=') else {
                continue;
            };
            let slot = match key.trim() {
                "rated_power_mw" => &mut rated,
                "cut_in_ms" => &mut cut_in,
                "cut_out_ms" => &mut cut_out,
                _ => continue,
            };
            let v = value.trim().parse::<f64>().map_err(|_| {
                DataError::parse(origin, k as u64 + 1, Some(key.trim().into()), format!("not a number: {:?}", value.trim()))
            })?;
            *slot = Some(v);
        }
    }
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| DataError::parse(origin, 1, None, e.to_string()))?
        .clone();
    let sc = headers.iter().position(|h| h == "speed_ms");
    let pc = headers.iter().position(|h| h == "power_mw");
    let (Some(sc), Some(pc)) = (sc, pc) else {
        return Err(DataError::parse(origin, 1, None, "expected columns speed_ms,power_mw"));
    };
    let mut points = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| DataError::parse(origin, e.position().map_or(0, |p| p.line()), None, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let get = |i: usize, name: &str| -> Result<f64, DataError> {
            let s = record.get(i).unwrap_or("");
            s.parse::<f64>()
                .map_err(|_| DataError::parse(origin, line, Some(name.into()), format!("not a number: {s:?}")))
        };
        points.push((get(sc, "speed_ms")?, get(pc, "power_mw")?));
    }
    if points.is_empty() {
        return Err(DataError::Empty {
            origin: origin.into(),
            message: "no curve points".into(),
        });
    }
    let rated = rated.unwrap_or_else(|| points.iter().map(|p| p.1).fold(0.0, f64::max));
    let cut_in = cut_in.unwrap_or(points[0].0);
    TurbinePowerCurve::new(rated, cut_in, cut_out.unwrap_or(25.0), points)
}

pub fn load_curve(path: &Path) -> Result<TurbinePowerCurve, DataError> {
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_curve_csv(text.as_bytes(), &path.display().to_string())
}

pub fn write_curve_csv(curve: &TurbinePowerCurve) -> String {
    let mut out = format!(
        "# rated_power_mw={},cut_in_ms={},cut_out_ms={}\nspeed_ms,power_mw\n",
        curve.rated_power, curve.cut_in, curve.cut_out
    );
    for (v, p) in &curve.points {
        out.push_str(&format!("{v},{p}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_mw() -> TurbinePowerCurve {
        TurbinePowerCurve::new(
            2.0,
            4.0,
            25.0,
            vec![(4.0, 0.066), (8.0, 0.69), (10.0, 1.296), (13.0, 2.0), (25.0, 2.0)],
        )
        .unwrap()
    }

    #[test]
    fn stats_of_small_sample() {
        let s = summarize(&[0.25, 9.03, 13.45]).unwrap();
        assert_eq!(s.median, 9.03);
        assert_eq!(s.min, 0.25);
        assert_eq!(s.max, 13.45);
        assert!((s.mean - 7.576666666666667).abs() < 1e-12);
        let single = summarize(&[3.0]).unwrap();
        assert_eq!(single.std_dev, 0.0);
        assert!(summarize(&[]).is_none());
    }

    #[test]
    fn even_count_median_averages() {
        assert_eq!(summarize(&[1.0, 4.0, 2.0, 3.0]).unwrap().median, 2.5);
    }

    #[test]
    fn histogram_edges() {
        let bins = histogram(&[0.0, 0.5, 1.0, 2.0], 1.0);
        assert_eq!(bins.len(), 2);
        assert_eq!(bins[0].count, 2);
        assert_eq!(bins[1].count, 2);
        let zero = histogram(&[0.0, 0.0], 1.0);
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[0].count, 2);
    }

    #[test]
    fn curve_regions() {
        let c = two_mw();
        assert_eq!(c.power(3.99), 0.0);
        assert_eq!(c.power(4.0), 0.066);
        assert_eq!(c.power(15.0), 2.0);
        assert_eq!(c.power(10.0), 1.296);
        assert_eq!(c.power(25.0), 0.0);
        assert_eq!(c.power(30.0), 0.0);
        assert!((c.power(9.0) - 0.993).abs() < 1e-12);
    }

    #[test]
    fn farm_of_500_turbines() {
        let c = two_mw();
        let out = farm_power(&[15.0, 3.0], &c, 1000.0, TurbineCount::Fractional);
        assert_eq!(out, vec![1000.0, 0.0]);
        assert_eq!(farm_power(&[15.0], &c, 0.0, TurbineCount::Fractional), vec![0.0]);
    }

    #[test]
    fn whole_turbines_floor() {
        let c = two_mw();
        assert_eq!(turbine_count(505.5, &c, TurbineCount::Fractional), 252.75);
        assert_eq!(turbine_count(505.5, &c, TurbineCount::Whole), 252.0);
    }

    #[test]
    fn curve_csv_round_trip() {
        let c = two_mw();
        let back = parse_curve_csv(write_curve_csv(&c).as_bytes(), "t").unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn curve_rejects_unsorted() {
        assert!(TurbinePowerCurve::new(2.0, 4.0, 25.0, vec![(5.0, 1.0), (4.0, 0.5)]).is_err());
        assert!(TurbinePowerCurve::new(2.0, 4.0, 25.0, vec![(5.0, 3.0)]).is_err());
    }

    #[test]
    fn wind_csv_rejects_negative() {
        let header = format!("day_label,{}\n", crate::fleet::hour_columns().join(","));
        let mut vals: Vec<String> = (0..24).map(|_| "5".to_string()).collect();
        vals[0] = "-1".into();
        let text = format!("{header}a,{}\n", vals.join(","));
        assert!(parse_wind_csv(text.as_bytes(), "t", "s".into()).is_err());
    }

    proptest! {
        #[test]
        fn farm_power_bounds_and_homogeneity(
            speeds in proptest::collection::vec(0.0f64..30.0, 1..48),
            cap in 0.0f64..1000.0,
            k in 0.0f64..5.0,
        ) {
            let c = two_mw();
            let base = farm_power(&speeds, &c, cap, TurbineCount::Fractional);
            let scaled = farm_power(&speeds, &c, k * cap, TurbineCount::Fractional);
            for (a, b) in base.iter().zip(&scaled) {
                prop_assert!(*a >= 0.0 && *a <= cap * (1.0 + 1e-12));
                prop_assert!((b - k * a).abs() <= 1e-9 * (1.0 + b.abs()));
            }
        }

        #[test]
        fn summary_is_ordered(samples in proptest::collection::vec(0.0f64..40.0, 1..200)) {
            let s = summarize(&samples).unwrap();
            prop_assert!(s.min <= s.median && s.median <= s.max);
            prop_assert!(s.min <= s.mean + 1e-9 && s.mean <= s.max + 1e-9);
            prop_assert!(s.std_dev >= 0.0);
        }

        #[test]
        fn histogram_counts_everything(samples in proptest::collection::vec(0.0f64..40.0, 0..200), w in 0.1f64..5.0) {
            let bins = histogram(&samples, w);
            prop_assert_eq!(bins.iter().map(|b| b.count).sum::<usize>(), samples.len());
        }
    }
}
