use crate::error::{Error, Result};
use crate::matrix::{Column, VarId};

/// Columns of height `n` over `k` variables as base-`k` integers, row 0 most
/// significant.
#[derive(Debug, Clone)]
pub(crate) struct Packer {
    n: usize,
    k: usize,
}

impl Packer {
    pub(crate) fn new(n: usize, k: usize) -> Result<Packer> {
        if k > 64 {
            return Err(Error::ResourceLimit {
                what: "target variables".into(),
                limit: 64,
            });
        }
        let fits = (0..n).try_fold(1u64, |acc, _| acc.checked_mul(k as u64));
        match fits {
            Some(size) if size < 1 << 63 => Ok(Packer { n, k }),
            _ => Err(Error::ResourceLimit {
                what: format!("column universe {k}^{n}"),
                limit: 1 << 63,
            }),
        }
    }

    pub(crate) fn rows(&self) -> usize {
        self.n
    }

    pub(crate) fn base(&self) -> usize {
        self.k
    }

    pub(crate) fn pack(&self, digits: &[u8]) -> u64 {
        digits
            .iter()
            .fold(0u64, |acc, &d| acc * self.k as u64 + d as u64)
    }

    pub(crate) fn unpack(&self, mut c: u64) -> Vec<u8> {
        let mut digits = vec![0u8; self.n];
        for d in digits.iter_mut().rev() {
            *d = (c % self.k as u64) as u8;
            c /= self.k as u64;
        }
        digits
    }

    pub(crate) fn pack_column(&self, col: &Column) -> u64 {
        let digits: Vec<u8> = col.entries().iter().map(|v| v.offset() as u8).collect();
        self.pack(&digits)
    }

    pub(crate) fn column(&self, c: u64) -> Column {
        Column(
            self.unpack(c)
                .into_iter()
                .map(|d| VarId::from_offset(d as usize))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_roundtrip() {
        let p = Packer::new(4, 3).unwrap();
        for c in 0..81 {
            assert_eq!(p.pack(&p.unpack(c)), c);
        }
        assert_eq!(p.pack(&[1, 0, 0, 0]), 27);
    }

    #[test]
    fn rejects_huge_universe() {
        assert!(Packer::new(40, 8).is_err());
        assert!(Packer::new(3, 65).is_err());
    }
}
