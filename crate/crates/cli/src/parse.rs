use betagrowth::numberfield::parse_rational;
use betagrowth::{BetaSystem, FieldElement};

/// Inclusive integer range `a..b`, optionally with a step `a..b:s`, or a
/// comma-separated list.
pub fn parse_levels(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    if let Some((range, step)) = s.split_once(':') {
        let step: usize = step.trim().parse().map_err(|_| format!("bad step in {s:?}"))?;
        if step == 0 {
            return Err("step must be positive".into());
        }
        let (a, b) = parse_bounds(range)?;
        return Ok((a..=b).step_by(step).collect());
    }
    if s.contains("..") {
        let (a, b) = parse_bounds(s)?;
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad level {t:?}"))).collect()
}

fn parse_bounds(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad bound {a:?}"))?;
    let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| format!("bad bound {b:?}"))?;
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok((a, b))
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?}"))).collect()
}

pub fn parse_u32_list(s: &str) -> Result<Vec<u32>, String> {
    s.split(',').map(|t| t.trim().parse::<u32>().map_err(|_| format!("bad integer {t:?}"))).collect()
}

/// A point given as a rational literal.
pub fn parse_point(sys: &BetaSystem, s: &str) -> betagrowth::Result<FieldElement> {
    Ok(sys.rational(parse_rational(s)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_forms() {
        assert_eq!(parse_levels("12..18").unwrap(), vec![12, 13, 14, 15, 16, 17, 18]);
        assert_eq!(parse_levels("10..16:3").unwrap(), vec![10, 13, 16]);
        assert_eq!(parse_levels("3, 5,9").unwrap(), vec![3, 5, 9]);
        assert_eq!(parse_levels("3..=4").unwrap(), vec![3, 4]);
        assert!(parse_levels("5..3").is_err());
        assert!(parse_levels("1..4:0").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_f64_list("-1,0,2.5").unwrap(), vec![-1.0, 0.0, 2.5]);
        assert_eq!(parse_u32_list("1,2,3").unwrap(), vec![1, 2, 3]);
        assert!(parse_u32_list("1,x").is_err());
    }
}
