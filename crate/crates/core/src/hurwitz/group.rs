//! Finite groups given by explicit elements: a multiplication table, or
//! invertible matrices over a small field multiplied on demand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::gf::GaloisField;
use crate::arith::primes::FieldParameter;
use crate::error::{Error, Result};
use crate::torsion::gl_order;

/// Default cap on the number of elements of an explicit group.
pub const DEFAULT_GROUP_CAP: u64 = 100_000;
/// Groups up to this order get a full multiplication table.
const TABLE_LIMIT: usize = 2048;

#[derive(Clone, Debug)]
pub struct GroupClass {
    pub label: String,
    pub size: usize,
    pub element_order: u32,
    pub rep: u32,
}

#[derive(Clone, Debug)]
struct MatrixData {
    field: GaloisField,
    n: usize,
    entries: Vec<u8>,
    index_of_code: Vec<u32>,
}

impl MatrixData {
    fn matrix(&self, x: u32) -> &[u8] {
        let s = self.n * self.n;
        &self.entries[x as usize * s..(x as usize + 1) * s]
    }

    fn code(&self, m: &[u8]) -> usize {
        let q = self.field.q as usize;
        m.iter().rev().fold(0, |acc, &c| acc * q + c as usize)
    }

    fn mul(&self, x: u32, y: u32) -> u32 {
        let mut out = [0u8; 64];
        let s = self.n * self.n;
        self.field.mat_mul_into(self.matrix(x), self.matrix(y), self.n, &mut out[..s]);
        self.index_of_code[self.code(&out[..s])]
    }
}

#[derive(Clone, Debug)]
enum Multiplier {
    Table(Vec<u32>),
    Matrix(MatrixData),
}

#[derive(Clone, Debug)]
pub struct ExplicitGroup {
    pub name: String,
    order: usize,
    identity: u32,
    mul: Multiplier,
    inverse: Vec<u32>,
    element_order: Vec<u32>,
    class_of: Vec<u32>,
    classes: Vec<GroupClass>,
}

impl ExplicitGroup {
    /// A group from its Cayley table `table[x * order + y] = xy`. Every row
    /// and column must be a permutation and some element must act as the
    /// identity; associativity is the caller's responsibility.
    pub fn from_table(name: &str, order: usize, table: Vec<u32>) -> Result<Self> {
        if order == 0 || table.len() != order * order {
            return Err(Error::DomainError(format!("table of length {} for order {order}", table.len())));
        }
        let latin = |get: &dyn Fn(usize) -> usize| {
            let mut seen = vec![false; order];
            (0..order).all(|y| {
                let v = get(y);
                v < order && !std::mem::replace(&mut seen[v], true)
            })
        };
        for x in 0..order {
            if !latin(&|y| table[x * order + y] as usize) || !latin(&|y| table[y * order + x] as usize) {
                return Err(Error::DomainError(format!("table is not a Latin square at {x}")));
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|y| table[e * order + y] as usize == y))
            .ok_or_else(|| Error::DomainError("no identity element".into()))? as u32;
        Self::finish(name, order, identity, Multiplier::Table(table))
    }

    pub fn cyclic(m: usize) -> Result<Self> {
        let table = (0..m * m).map(|i| ((i / m + i % m) % m) as u32).collect();
        Self::from_table(&format!("C{m}"), m, table)
    }

    /// The symmetric group on `k <= 6` points.
    pub fn symmetric(k: usize) -> Result<Self> {
        if k == 0 || k > 6 {
            return Err(Error::DomainError(format!("symmetric group degree {k} outside 1..=6")));
        }
        let mut perms: Vec<Vec<u8>> = Vec::new();
        let mut cur: Vec<u8> = (0..k as u8).collect();
        permutations(&mut cur, 0, &mut perms);
        perms.sort();
        let order = perms.len();
        let index = |p: &[u8]| perms.binary_search_by(|x| x.as_slice().cmp(p)).unwrap() as u32;
        let mut table = vec![0u32; order * order];
        for (i, x) in perms.iter().enumerate() {
            for (j, y) in perms.iter().enumerate() {
                // (xy)(t) = x(y(t))
                let prod: Vec<u8> = (0..k).map(|t| x[y[t] as usize]).collect();
                table[i * order + j] = index(&prod);
            }
        }
        Self::from_table(&format!("S{k}"), order, table)
    }

    /// `GL_n(q)` as explicit matrices, subject to `cap` elements.
    pub fn general_linear(n: usize, q: u64, cap: u64) -> Result<Self> {
        let field = FieldParameter::new(q)?;
        if n == 0 || n * n > 64 {
            return Err(Error::DomainError(format!("matrix size {n} outside 1..=8")));
        }
        let order = gl_order(n as u64, q);
        if order > cap.into() {
            return Err(Error::CapExceeded { what: "group order", size: order.to_string(), cap: cap.to_string() });
        }
        let gf = GaloisField::new(field)?;
        let s = n * n;
        let total = (q as usize).pow(s as u32);
        let mut entries = Vec::new();
        let mut index_of_code = vec![u32::MAX; total];
        let mut m = vec![0u8; s];
        for code in 0..total {
            let mut c = code;
            for e in m.iter_mut() {
                *e = (c % q as usize) as u8;
                c /= q as usize;
            }
            if gf.det(&m, n) != 0 {
                index_of_code[code] = (entries.len() / s) as u32;
                entries.extend_from_slice(&m);
            }
        }
        let data = MatrixData { field: gf, n, entries, index_of_code };
        let identity = data.index_of_code[data.code(&GaloisField::identity(n))];
        let count = data.entries.len() / s;
        Self::finish(&format!("GL({n},{q})"), count, identity, Multiplier::Matrix(data))
    }

    fn finish(name: &str, order: usize, identity: u32, mul: Multiplier) -> Result<Self> {
        let mut g = ExplicitGroup {
            name: name.to_string(),
            order,
            identity,
            mul,
            inverse: Vec::new(),
            element_order: Vec::new(),
            class_of: Vec::new(),
            classes: Vec::new(),
        };
        if let Multiplier::Matrix(data) = &g.mul {
            if order <= TABLE_LIMIT {
                let mut table = vec![0u32; order * order];
                for x in 0..order {
                    for y in 0..order {
                        table[x * order + y] = data.mul(x as u32, y as u32);
                    }
                }
                g.mul = Multiplier::Table(table);
            }
        }
        g.element_order = vec![0; order];
        g.inverse = vec![0; order];
        for x in 0..order as u32 {
            let mut acc = x;
            let mut prev = identity;
            let mut k = 1;
            while acc != identity {
                prev = acc;
                acc = g.mul(acc, x);
                k += 1;
            }
            g.element_order[x as usize] = k;
            g.inverse[x as usize] = if x == identity { identity } else { prev };
        }
        g.compute_classes();
        Ok(g)
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        match &self.mul {
            Multiplier::Table(t) => t[x as usize * self.order + y as usize],
            Multiplier::Matrix(d) => d.mul(x, y),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    #[inline]
    pub fn inverse(&self, x: u32) -> u32 {
        self.inverse[x as usize]
    }

    #[inline]
    pub fn element_order(&self, x: u32) -> u32 {
        self.element_order[x as usize]
    }

    #[inline]
    pub fn class_of(&self, x: u32) -> usize {
        self.class_of[x as usize] as usize
    }

    pub fn classes(&self) -> &[GroupClass] {
        &self.classes
    }

    pub fn pow(&self, x: u32, k: u64) -> u32 {
        let mut acc = self.identity;
        for _ in 0..k % self.element_order(x) as u64 {
            acc = self.mul(acc, x);
        }
        acc
    }

    /// `power_map[c][l]`: class of `rep_c^l` for `l < element_order(c)`.
    pub fn power_maps(&self) -> Vec<Vec<usize>> {
        self.classes
            .iter()
            .map(|c| {
                let mut acc = self.identity;
                (0..c.element_order)
                    .map(|_| {
                        let k = self.class_of(acc);
                        acc = self.mul(acc, c.rep);
                        k
                    })
                    .collect()
            })
            .collect()
    }

    /// Lcm of element orders.
    pub fn exponent(&self) -> u64 {
        self.classes.iter().fold(1, |acc, c| crate::arith::lcm(acc, c.element_order as u64))
    }

    /// Subgroup generated by `gens`, as a membership mask.
    fn closure(&self, gens: &[u32]) -> Vec<bool> {
        let mut inside = vec![false; self.order];
        inside[self.identity as usize] = true;
        let mut stack = vec![self.identity];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !inside[y as usize] {
                    inside[y as usize] = true;
                    stack.push(y);
                }
            }
        }
        inside
    }

    /// A small generating set found by seeded random search.
    pub fn generators(&self) -> Vec<u32> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6c61_7474);
        let mut gens = Vec::new();
        let mut inside = self.closure(&gens);
        while inside.iter().any(|&b| !b) {
            let x = rng.gen_range(0..self.order as u32);
            if !inside[x as usize] {
                gens.push(x);
                inside = self.closure(&gens);
            }
        }
        gens
    }

    fn compute_classes(&mut self) {
        let gens = self.generators();
        let mut class_of = vec![u32::MAX; self.order];
        let mut raw: Vec<(u32, usize, u32)> = Vec::new();
        for x in 0..self.order as u32 {
            if class_of[x as usize] != u32::MAX {
                continue;
            }
            let id = raw.len() as u32;
            class_of[x as usize] = id;
            let mut stack = vec![x];
            let mut size = 0;
            while let Some(y) = stack.pop() {
                size += 1;
                for &g in &gens {
                    let z = self.mul(self.mul(g, y), self.inverse(g));
                    if class_of[z as usize] == u32::MAX {
                        class_of[z as usize] = id;
                        stack.push(z);
                    }
                }
            }
            raw.push((self.element_order(x), size, x));
        }
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by_key(|&i| (raw[i].0, raw[i].1, raw[i].2));
        let mut relabel = vec![0u32; raw.len()];
        let mut classes = Vec::with_capacity(raw.len());
        let mut letter = 0u8;
        for (new, &old) in order.iter().enumerate() {
            let (ord, size, rep) = raw[old];
            if new > 0 && classes.last().is_some_and(|c: &GroupClass| c.element_order == ord) {
                letter += 1;
            } else {
                letter = 0;
            }
            relabel[old] = new as u32;
            classes.push(GroupClass { label: class_label(ord, letter), size, element_order: ord, rep });
        }
        self.class_of = class_of.into_iter().map(|c| relabel[c as usize]).collect();
        self.classes = classes;
    }
}

fn class_label(order: u32, letter: u8) -> String {
    let mut suffix = String::new();
    let mut k = letter as u32;
    loop {
        suffix.insert(0, (b'a' + (k % 26) as u8) as char);
        if k < 26 {
            break;
        }
        k = k / 26 - 1;
    }
    format!("{order}{suffix}")
}

fn permutations(cur: &mut Vec<u8>, i: usize, out: &mut Vec<Vec<u8>>) {
    if i == cur.len() {
        out.push(cur.clone());
        return;
    }
    for j in i..cur.len() {
        cur.swap(i, j);
        permutations(cur, i + 1, out);
        cur.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(g: &ExplicitGroup) -> Vec<(u32, usize)> {
        g.classes().iter().map(|c| (c.element_order, c.size)).collect()
    }

    #[test]
    fn symmetric_three() {
        let g = ExplicitGroup::symmetric(3).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(shape(&g), vec![(1, 1), (2, 3), (3, 2)]);
        assert_eq!(g.classes()[1].label, "2a");
    }

    #[test]
    fn general_linear_groups() {
        let g = ExplicitGroup::general_linear(2, 2, DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(shape(&g), vec![(1, 1), (2, 3), (3, 2)]);
        let g = ExplicitGroup::general_linear(2, 3, DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(g.order(), 48);
        assert_eq!(g.classes().len(), 8);
        let g = ExplicitGroup::general_linear(3, 2, DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(shape(&g), vec![(1, 1), (2, 21), (3, 56), (4, 42), (7, 24), (7, 24)]);
        assert_eq!(g.exponent(), 84);
        let g = ExplicitGroup::general_linear(2, 4, DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(g.order(), 180);
        assert!(ExplicitGroup::general_linear(4, 3, DEFAULT_GROUP_CAP).is_err());
    }

    #[test]
    fn on_demand_multiplication_agrees() {
        let g = ExplicitGroup::general_linear(2, 7, DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(g.order(), 2016);
        let big = ExplicitGroup::general_linear(3, 3, DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(big.order(), 11232);
        assert_eq!(big.classes().len(), 24);
        for x in [1u32, 17, 500, 9000] {
            assert_eq!(big.mul(x, big.inverse(x)), big.identity());
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(ExplicitGroup::from_table("bad", 2, vec![0, 0, 1, 1]).is_err());
        assert!(ExplicitGroup::cyclic(5).unwrap().classes().iter().all(|c| c.size == 1));
    }
}
