//! `start:stop:steps` grids with symbolic pi, e.g. `0:pi:64`, `0:2pi:16`,
//! `pi/4:3pi/4:9`. A bare value is a one-point grid.

use std::f64::consts::PI;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl GridSpec {
    /// `steps` evenly spaced points with both ends included.
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * (i as f64 / last)
                }
            })
            .collect()
    }
}

/// A real number, optionally written as a multiple or fraction of pi:
/// `1.5`, `pi`, `-pi/2`, `3pi/4`, `2*pi`, `0.5pi`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || format!("cannot read {s:?} as a number or multiple of pi");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(pos) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let coef = t[..pos].trim().trim_end_matches('*').trim();
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = t[pos + 2..].trim();
    let den = if rest.is_empty() {
        1.0
    } else {
        let d = rest.strip_prefix('/').ok_or_else(bad)?;
        d.trim().parse::<f64>().map_err(|_| bad())?
    };
    if den == 0.0 {
        return Err(bad());
    }
    Ok(coef * PI / den)
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => {
                let v = parse_angle(v)?;
                Ok(Self { start: v, stop: v, steps: 1 })
            }
            [a, b, n] => {
                let steps: usize = n
                    .trim()
                    .parse()
                    .map_err(|_| format!("grid step count {n:?} is not a positive integer"))?;
                if steps == 0 {
                    return Err("grid needs at least one point".into());
                }
                Ok(Self {
                    start: parse_angle(a)?,
                    stop: parse_angle(b)?,
                    steps,
                })
            }
            _ => Err(format!("grid {s:?} is not of the form start:stop:steps")),
        }
    }
}
