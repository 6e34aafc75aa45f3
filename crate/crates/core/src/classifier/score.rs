use std::cmp::Ordering;
use std::fmt;

/// Exact mean of clamped distances, kept as `total / count` and compared by
/// cross-multiplication so ties are never decided by rounding.
#[derive(Debug, Clone, Copy)]
pub struct MeanDistance {
    total: u64,
    count: u64,
}

impl MeanDistance {
    /// # Panics
    /// If `count` is zero.
    pub fn new(total: u64, count: u64) -> Self {
        assert!(count > 0, "mean of zero distances");
        MeanDistance { total, count }
    }

    pub fn whole(value: u64) -> Self {
        MeanDistance::new(value, 1)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn as_f64(&self) -> f64 {
        self.total as f64 / self.count as f64
    }

    pub fn is_integer(&self) -> bool {
        self.total.is_multiple_of(self.count)
    }

    /// Decimal rendering with at most `places` fractional digits, rounded
    /// half-up, trailing zeros dropped: `3`, `3.5`, `3.3333`.
    pub fn to_decimal(&self, places: u32) -> String {
        let scale = 10u128.pow(places);
        let scaled = (u128::from(self.total) * scale * 2 + u128::from(self.count))
            / (2 * u128::from(self.count));
        let int = scaled / scale;
        let frac = scaled % scale;
        if frac == 0 {
            return int.to_string();
        }
        let digits = format!("{frac:0width$}", width = places as usize);
        format!("{int}.{}", digits.trim_end_matches('0'))
    }

    /// `total/count` exactly as stored.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.total, self.count)
    }

    pub fn parse_fraction(raw: &str) -> Option<Self> {
        let (total, count) = raw.split_once('/')?;
        let total = total.parse().ok()?;
        let count: u64 = count.parse().ok()?;
        (count > 0).then(|| MeanDistance::new(total, count))
    }
}

impl PartialEq for MeanDistance {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for MeanDistance {}

impl PartialOrd for MeanDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MeanDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = u128::from(self.total) * u128::from(other.count);
        let rhs = u128::from(other.total) * u128::from(self.count);
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for MeanDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(4))
    }
}
