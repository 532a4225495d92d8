use rbfsmooth_core::approx::GridSpec;
use rbfsmooth_core::study::Region;

use super::{Error, Result};

fn split_reals(part: &str, what: &str) -> Result<Vec<f64>> {
    part.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Format(format!("{what}: `{v}` is not a number")))
        })
        .collect()
}

fn three_parts(text: &str) -> Result<[&str; 3]> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts[..] {
        [a, b, n] => Ok([a, b, n]),
        _ => Err(Error::Format(format!(
            "grid `{text}` must have the form a1,..,ad:b1,..,bd:n1,..,nd"
        ))),
    }
}

/// Parses `a1,..,ad:b1,..,bd:n1,..,nd`.
pub fn parse_grid(text: &str) -> Result<GridSpec> {
    let [a, b, n] = three_parts(text)?;
    let lower = split_reals(a, "grid lower corner")?;
    let upper = split_reals(b, "grid upper corner")?;
    let counts = n
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::Format(format!("grid count `{v}` is not a non-negative integer")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridSpec::new(lower, upper, counts)?)
}

/// Parses a box `a1,..,ad:b1,..,bd`.
pub fn parse_region(text: &str) -> Result<Region> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| Error::Format(format!("region `{text}` must have the form a1,..,ad:b1,..,bd")))?;
    Ok(Region::new(
        split_reals(a, "region lower corner")?,
        split_reals(b, "region upper corner")?,
    )?)
}
