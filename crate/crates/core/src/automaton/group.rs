use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite group given by its operation table; element 0 is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
}

impl FiniteGroup {
    /// Builds a group from a table and checks the group axioms.
    pub fn from_table(name: impl Into<String>, order: usize, table: Vec<u32>) -> Result<Self> {
        if order == 0 || table.len() != order * order || table.iter().any(|&e| e as usize >= order) {
            return Err(Error::Schema("operation table has the wrong shape".into()));
        }
        let mut inverse = vec![u32::MAX; order];
        for a in 0..order {
            if let Some(b) = (0..order).find(|&b| table[a * order + b] == 0) {
                inverse[a] = b as u32;
            }
        }
        let g = FiniteGroup { name: name.into(), order, table, inverse };
        g.check_axioms()?;
        Ok(g)
    }

    /// The cyclic group `Z_m`.
    pub fn cyclic(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("cyclic group order must be positive".into()));
        }
        let table = (0..m * m).map(|i| ((i / m + i % m) % m) as u32).collect();
        let name = if m == 2 { "Z2".to_string() } else { format!("Zm:{m}") };
        FiniteGroup::from_table(name, m, table)
    }

    /// Direct product; element `(e_1, …, e_k)` is encoded in mixed radix
    /// with the last factor varying fastest.
    pub fn product(factors: &[FiniteGroup]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument("product of no groups".into()));
        }
        let order: usize = factors.iter().map(|g| g.order).product();
        let decode = |mut e: usize| -> Vec<usize> {
            let mut out = vec![0; factors.len()];
            for (k, g) in factors.iter().enumerate().rev() {
                out[k] = e % g.order;
                e /= g.order;
            }
            out
        };
        let encode = |parts: &[usize]| parts.iter().zip(factors).fold(0, |acc, (&p, g)| acc * g.order + p);
        let mut table = Vec::with_capacity(order * order);
        for a in 0..order {
            let da = decode(a);
            for b in 0..order {
                let db = decode(b);
                let sum: Vec<usize> =
                    factors.iter().enumerate().map(|(k, g)| g.op(da[k] as u32, db[k] as u32) as usize).collect();
                table.push(encode(&sum) as u32);
            }
        }
        let name = format!("product:[{}]", factors.iter().map(|g| g.name.as_str()).collect::<Vec<_>>().join(","));
        FiniteGroup::from_table(name, order, table)
    }

    fn check_axioms(&self) -> Result<()> {
        let n = self.order as u32;
        let bad = |what: &str| Err(Error::Schema(format!("table is not a group: {what} fails")));
        for a in 0..n {
            if self.op(0, a) != a || self.op(a, 0) != a {
                return bad("identity");
            }
            if self.inverse[a as usize] == u32::MAX || self.op(self.inverse[a as usize], a) != 0 {
                return bad("inverse");
            }
            for b in 0..n {
                for c in 0..n {
                    if self.op(self.op(a, b), c) != self.op(a, self.op(b, c)) {
                        return bad("associativity");
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn op(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    /// `a − b`, i.e. `a + (−b)`.
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.op(a, self.inv(b))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order as u32).all(|a| (0..self.order as u32).all(|b| self.op(a, b) == self.op(b, a)))
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FromStr for FiniteGroup {
    type Err = Error;

    /// Parses `Z2`, `Zm:<m>`, and `product:[G,H,…]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Z2" {
            return FiniteGroup::cyclic(2);
        }
        if let Some(m) = s.strip_prefix("Zm:") {
            let m: usize = m.parse().map_err(|_| Error::InvalidArgument(format!("bad group order in `{s}`")))?;
            return FiniteGroup::cyclic(m);
        }
        if let Some(inner) = s.strip_prefix("product:[").and_then(|r| r.strip_suffix(']')) {
            let factors = split_top_level(inner).into_iter().map(str::parse).collect::<Result<Vec<FiniteGroup>>>()?;
            return FiniteGroup::product(&factors);
        }
        Err(Error::InvalidArgument(format!("unknown group `{s}`")))
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}
