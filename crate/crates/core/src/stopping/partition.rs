use crate::error::{Error, Result};

/// Disjoint, covering split of parameter indices `0..dim` into nonempty groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    dim: usize,
    groups: Vec<Vec<usize>>,
    names: Vec<String>,
}

impl Partition {
    pub fn new(dim: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        let names = (0..groups.len()).map(|i| format!("g{i}")).collect();
        Self::named(dim, groups, names)
    }

    pub fn named(dim: usize, mut groups: Vec<Vec<usize>>, names: Vec<String>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidPartition("no groups".into()));
        }
        if names.len() != groups.len() {
            return Err(Error::InvalidPartition(format!(
                "{} names for {} groups",
                names.len(),
                groups.len()
            )));
        }
        let mut seen = vec![false; dim];
        for (gi, group) in groups.iter_mut().enumerate() {
            if group.is_empty() {
                return Err(Error::InvalidPartition(format!("group {gi} is empty")));
            }
            group.sort_unstable();
            for &k in group.iter() {
                if k >= dim {
                    return Err(Error::InvalidPartition(format!(
                        "index {k} in group {gi} is out of range for dimension {dim}"
                    )));
                }
                if std::mem::replace(&mut seen[k], true) {
                    return Err(Error::InvalidPartition(format!(
                        "index {k} appears more than once"
                    )));
                }
            }
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("index {k} is not covered")));
        }
        Ok(Partition { dim, groups, names })
    }

    /// One group holding every index.
    pub fn whole(dim: usize) -> Result<Self> {
        Self::named(dim, vec![(0..dim).collect()], vec!["all".into()])
    }

    /// Consecutive blocks of the given sizes.
    pub fn contiguous(sizes: &[usize], names: Vec<String>) -> Result<Self> {
        let mut start = 0;
        let groups = sizes
            .iter()
            .map(|&s| {
                let g: Vec<usize> = (start..start + s).collect();
                start += s;
                g
            })
            .collect();
        Self::named(start, groups, names)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} indices but vector has {dim}",
                self.dim
            )));
        }
        Ok(())
    }
}
