//! Finite groups given by multiplication tables.

use crate::error::{Error, Result};

/// A finite group on the elements `0..order`, stored as a dense table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates a multiplication table (`table[a][b] = a·b`) against the
    /// group axioms. The error carries the first failing witness.
    pub fn from_table(table: &[Vec<usize>]) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Structural("group table is empty".into()));
        }
        let mut mul = Vec::with_capacity(n * n);
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Structural(format!(
                    "row {a} has length {} instead of {n}",
                    row.len()
                )));
            }
            for (b, &c) in row.iter().enumerate() {
                if c >= n {
                    return Err(Error::NotAGroup {
                        axiom: "closure",
                        witness: vec![a, b],
                    });
                }
                mul.push(c);
            }
        }
        let at = |a: usize, b: usize| mul[a * n + b];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if at(at(a, b), c) != at(a, at(b, c)) {
                        return Err(Error::NotAGroup {
                            axiom: "associativity",
                            witness: vec![a, b, c],
                        });
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| at(e, a) == a && at(a, e) == a))
            .ok_or(Error::NotAGroup {
                axiom: "identity",
                witness: vec![],
            })?;
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| at(a, b) == identity && at(b, a) == identity)
                .ok_or(Error::NotAGroup {
                    axiom: "inverse",
                    witness: vec![a],
                })?;
            inverse.push(inv);
        }
        Ok(FiniteGroup {
            order: n,
            mul,
            identity,
            inverse,
        })
    }

    /// Builds the group generated by a closed set of permutations. Element `i`
    /// is `perms[i]`; composition is `(a·b)(x) = a(b(x))`.
    pub fn from_permutations(perms: &[Vec<usize>]) -> Result<Self> {
        let index: std::collections::HashMap<&[usize], usize> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_slice(), i))
            .collect();
        if index.len() != perms.len() {
            return Err(Error::Structural("duplicate permutation".into()));
        }
        let mut table = vec![vec![0; perms.len()]; perms.len()];
        for (a, pa) in perms.iter().enumerate() {
            for (b, pb) in perms.iter().enumerate() {
                let prod: Vec<usize> = pb.iter().map(|&x| pa[x]).collect();
                table[a][b] = *index.get(prod.as_slice()).ok_or(Error::NotAGroup {
                    axiom: "closure",
                    witness: vec![a, b],
                })?;
            }
        }
        Self::from_table(&table)
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group of order 0");
        let table: Vec<Vec<usize>> = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Self::from_table(&table).expect("cyclic table is a group")
    }

    /// Direct product; element `(a, b)` is numbered `a * |other| + b`.
    pub fn direct_product(&self, other: &FiniteGroup) -> Self {
        let m = other.order;
        let n = self.order * m;
        let table: Vec<Vec<usize>> = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m))
                    .collect()
            })
            .collect();
        Self::from_table(&table).expect("product of groups is a group")
    }

    /// The symmetric group on `k` letters, elements in lexicographic order of
    /// their one-line notation.
    pub fn symmetric(k: usize) -> Self {
        let mut perms = Vec::new();
        let mut current: Vec<usize> = (0..k).collect();
        permutations(&mut current, 0, &mut perms);
        perms.sort();
        Self::from_permutations(&perms).expect("symmetric group is closed")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    /// First non-commuting pair, if any.
    pub fn commutator_witness(&self) -> Option<(usize, usize)> {
        (0..self.order)
            .flat_map(|a| (a + 1..self.order).map(move |b| (a, b)))
            .find(|&(a, b)| self.mul(a, b) != self.mul(b, a))
    }

    pub fn is_abelian(&self) -> bool {
        self.commutator_witness().is_none()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn conjugate(&self, h: usize, g: usize) -> usize {
        self.mul(self.mul(h, g), self.inv(h))
    }
}

fn permutations(current: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
    if i == current.len() {
        out.push(current.clone());
        return;
    }
    for j in i..current.len() {
        current.swap(i, j);
        permutations(current, i + 1, out);
        current.swap(i, j);
    }
}
