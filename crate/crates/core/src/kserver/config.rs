use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

/// Server positions as a sorted multiset of point indices.
///
/// Sorting makes the representation canonical: two configurations are equal
/// iff they hold the same multiset, and `Ord` is lexicographic over the
/// sorted positions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(SmallVec<[usize; 4]>);

impl Configuration {
    pub fn new(positions: impl IntoIterator<Item = usize>) -> Self {
        let mut v: SmallVec<[usize; 4]> = positions.into_iter().collect();
        v.sort_unstable();
        Self(v)
    }

    /// Number of servers.
    #[inline]
    pub fn k(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn positions(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn contains(&self, point: usize) -> bool {
        self.0.contains(&point)
    }

    /// Moves one server from `from` to `to`. Returns `None` when no server
    /// sits at `from`.
    pub fn replace(&self, from: usize, to: usize) -> Option<Self> {
        let i = self.0.iter().position(|&p| p == from)?;
        let mut v = self.0.clone();
        v[i] = to;
        v.sort_unstable();
        Some(Self(v))
    }

    /// Distinct positions in ascending order.
    pub fn distinct(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|&(i, p)| i == 0 || self.0[i - 1] != *p).map(|(_, &p)| p)
    }

    /// First (smallest) position.
    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// `;`-separated positions, e.g. `0;4`.
impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for Configuration {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(';').map(|p| p.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>().map(Self::new)
    }
}

impl From<Vec<usize>> for Configuration {
    fn from(v: Vec<usize>) -> Self {
        Self::new(v)
    }
}

impl<const N: usize> From<[usize; N]> for Configuration {
    fn from(v: [usize; N]) -> Self {
        Self::new(v)
    }
}
