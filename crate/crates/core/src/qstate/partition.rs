use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One mesostate: a label and the sorted basis indices lumped under it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub label: String,
    pub members: Vec<usize>,
}

/// Labeled partition of the basis `{0..dim-1}` into disjoint, non-empty
/// mesostates. Block order is fixed at construction and used for every
/// enumeration in the crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MesostatePartition {
    dim: usize,
    blocks: Vec<Block>,
    owner: Vec<usize>,
}

impl MesostatePartition {
    pub fn new<S: Into<String>>(dim: usize, blocks: Vec<(S, Vec<usize>)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPartition("dimension must be positive".into()));
        }
        let mut owner = vec![usize::MAX; dim];
        let mut out: Vec<Block> = Vec::with_capacity(blocks.len());
        for (b, (label, mut members)) in blocks.into_iter().enumerate() {
            let label = label.into();
            if label.is_empty() || label.contains([':', ';', ',']) {
                return Err(Error::InvalidPartition(format!("bad label `{label}`")));
            }
            if out.iter().any(|blk| blk.label == label) {
                return Err(Error::InvalidPartition(format!("duplicate label `{label}`")));
            }
            if members.is_empty() {
                return Err(Error::InvalidPartition(format!("block `{label}` is empty")));
            }
            members.sort_unstable();
            for &m in &members {
                if m >= dim {
                    return Err(Error::InvalidPartition(format!(
                        "index {m} in block `{label}` exceeds dimension {dim}"
                    )));
                }
                if owner[m] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "index {m} appears in more than one block"
                    )));
                }
                owner[m] = b;
            }
            out.push(Block { label, members });
        }
        if let Some(missing) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "index {missing} is not covered by any block"
            )));
        }
        Ok(Self {
            dim,
            blocks: out,
            owner,
        })
    }

    /// Finest partition: block `i` is `{i}`, labeled `"i"`.
    pub fn singletons(dim: usize) -> Self {
        Self::new(dim, (0..dim).map(|i| (i.to_string(), vec![i])).collect())
            .expect("singletons always form a partition")
    }

    /// Even sites under `A`, odd sites under `B`.
    pub fn parity(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidPartition("parity partition needs dim >= 2".into()));
        }
        Self::new(
            dim,
            vec![
                ("A", (0..dim).step_by(2).collect()),
                ("B", (1..dim).step_by(2).collect()),
            ],
        )
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn members(&self, block: usize) -> &[usize] {
        &self.blocks[block].members
    }

    pub fn label(&self, block: usize) -> &str {
        &self.blocks[block].label
    }

    pub fn labels(&self) -> Vec<String> {
        self.blocks.iter().map(|b| b.label.clone()).collect()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.blocks
            .iter()
            .position(|b| b.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Block containing basis index `site`.
    pub fn block_of(&self, site: usize) -> Result<usize> {
        self.owner
            .get(site)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index: site,
                dim: self.dim,
            })
    }

    pub fn is_singletons(&self) -> bool {
        self.blocks.len() == self.dim
    }
}

/// Parses `label:i,j,k;label2:m,n`. The dimension is one past the largest
/// index, so the blocks must cover `0..dim` exactly.
impl FromStr for MesostatePartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for chunk in s.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let (label, list) = chunk
                .split_once(':')
                .ok_or_else(|| Error::InvalidPartition(format!("missing `:` in `{chunk}`")))?;
            let members = list
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidPartition(format!("bad index `{t}` in `{chunk}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push((label.trim().to_string(), members));
        }
        let dim = blocks
            .iter()
            .flat_map(|(_, m)| m.iter())
            .max()
            .map(|&m| m + 1)
            .ok_or_else(|| Error::InvalidPartition("no blocks given".into()))?;
        Self::new(dim, blocks)
    }
}

impl fmt::Display for MesostatePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, block) in self.blocks.iter().enumerate() {
            if b > 0 {
                f.write_str(";")?;
            }
            write!(f, "{}:", block.label)?;
            for (k, m) in block.members.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_literal() {
        let p: MesostatePartition = "A:0,2,4;B:1,3,5".parse().unwrap();
        assert_eq!(p.dim(), 6);
        assert_eq!(p.members(1), &[1, 3, 5]);
        assert_eq!(p.block_of(4).unwrap(), 0);
        assert_eq!(p, MesostatePartition::parity(6).unwrap());
        assert_eq!(p.to_string(), "A:0,2,4;B:1,3,5");
    }

    #[test]
    fn rejects_overlap_gap_and_duplicates() {
        assert!("A:0,1;B:1,2".parse::<MesostatePartition>().is_err());
        assert!("A:0;B:2".parse::<MesostatePartition>().is_err());
        assert!("A:0;A:1".parse::<MesostatePartition>().is_err());
        assert!("A:0,x".parse::<MesostatePartition>().is_err());
        assert!(MesostatePartition::new(2, vec![("A", vec![0, 1]), ("B", vec![])]).is_err());
    }

    #[test]
    fn unknown_label() {
        let p = MesostatePartition::parity(4).unwrap();
        assert_eq!(p.index_of("C"), Err(Error::UnknownLabel("C".into())));
        assert!(p.block_of(4).is_err());
    }

    #[test]
    fn members_are_sorted() {
        let p: MesostatePartition = "X:3,1;Y:2,0".parse().unwrap();
        assert_eq!(p.members(0), &[1, 3]);
        assert_eq!(p.label(1), "Y");
    }
}
