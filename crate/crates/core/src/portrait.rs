//! Explicit automorphisms of the depth-`n` binary tree.
//!
//! A [`Portrait`] stores one swap flag per internal node in depth-first
//! preorder: the root, then the whole 0-subtree, then the whole 1-subtree.
//! Level-`j` vertices are words `b_1 ... b_j`, indexed by `Σ b_i 2^(j-i)`
//! (first letter most significant).
//!
//! Automorphisms act on the right: `(v)compose(p, q) = ((v)p)q`.

use std::fmt;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Error, Result};

/// Largest supported depth.
pub const MAX_DEPTH: u32 = 26;

const MAGIC: &[u8; 4] = b"TPRT";
const FORMAT_VERSION: u8 = 1;

pub fn check_depth(n: u32) -> Result<()> {
    if n > MAX_DEPTH {
        Err(Error::DepthTooLarge(n))
    } else {
        Ok(())
    }
}

#[inline]
fn tree_size(depth: u32) -> usize {
    (1usize << depth) - 1
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Portrait {
    depth: u32,
    bits: Vec<bool>,
}

/// Complete conjugacy invariant in `Ω_n`: equal keys iff conjugate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cycle {
    pub representative: u32,
    pub length: u32,
    pub members: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleTable {
    pub level: u32,
    pub cycles: Vec<Cycle>,
}

impl CycleTable {
    /// Number of cycles of each length, sorted by length.
    pub fn length_counts(&self) -> Vec<(u32, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for c in &self.cycles {
            *counts.entry(c.length).or_insert(0usize) += 1;
        }
        counts.into_iter().collect()
    }
}

impl Portrait {
    /// # Panics
    /// If `depth > MAX_DEPTH`.
    pub fn identity(depth: u32) -> Portrait {
        assert!(depth <= MAX_DEPTH, "depth {depth} exceeds {MAX_DEPTH}");
        Portrait {
            depth,
            bits: vec![false; tree_size(depth)],
        }
    }

    /// The root transposition `σ = (id, id)σ` truncated to `depth ≥ 1`.
    pub fn sigma(depth: u32) -> Result<Portrait> {
        check_depth(depth)?;
        if depth == 0 {
            return Err(Error::Precondition("sigma needs depth at least 1".into()));
        }
        let mut p = Portrait::identity(depth);
        p.bits[0] = true;
        Ok(p)
    }

    pub fn from_bits(depth: u32, bits: Vec<bool>) -> Result<Portrait> {
        check_depth(depth)?;
        if bits.len() != tree_size(depth) {
            return Err(Error::Codec(format!(
                "depth {depth} needs {} bits, got {}",
                tree_size(depth),
                bits.len()
            )));
        }
        Ok(Portrait { depth, bits })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn is_identity(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    /// Root flag: whether the element swaps the two first-level vertices.
    pub fn root_swap(&self) -> bool {
        self.depth > 0 && self.bits[0]
    }

    /// `γ^t` where `γ = (γ, id)σ`, with `t` taken mod `2^depth`.
    pub fn gamma_power(depth: u32, t: u64) -> Portrait {
        let mut p = Portrait::identity(depth);
        fill_gamma_power(&mut p.bits, depth, t);
        p
    }

    pub fn gamma(depth: u32) -> Portrait {
        Portrait::gamma_power(depth, 1)
    }

    fn same_depth(&self, other: &Portrait) -> Result<()> {
        if self.depth != other.depth {
            Err(Error::DepthMismatch(self.depth, other.depth))
        } else {
            Ok(())
        }
    }

    /// Product applying `self` first, then `other`.
    pub fn compose(&self, other: &Portrait) -> Result<Portrait> {
        self.same_depth(other)?;
        Ok(self.then(other))
    }

    /// [`Portrait::compose`] without the depth check.
    pub(crate) fn then(&self, other: &Portrait) -> Portrait {
        let mut out = Vec::with_capacity(self.bits.len());
        compose_into(&self.bits, &other.bits, self.depth, &mut out);
        Portrait {
            depth: self.depth,
            bits: out,
        }
    }

    pub fn inverse(&self) -> Portrait {
        let mut out = Vec::with_capacity(self.bits.len());
        inverse_into(&self.bits, self.depth, &mut out);
        Portrait {
            depth: self.depth,
            bits: out,
        }
    }

    /// Non-negative power by repeated squaring.
    pub fn pow(&self, mut e: u64) -> Portrait {
        let mut base = self.clone();
        let mut acc = Portrait::identity(self.depth);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.then(&base);
            }
        }
        acc
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow_signed(&self, e: i64) -> Portrait {
        if e < 0 {
            self.inverse().pow(e.unsigned_abs())
        } else {
            self.pow(e as u64)
        }
    }

    /// `g^-1 p g`, i.e. `self` conjugated so that `(v)g` maps along `self`.
    pub fn conjugate_by(&self, g: &Portrait) -> Result<Portrait> {
        self.same_depth(g)?;
        Ok(g.inverse().then(self).then(g))
    }

    /// The wreath recursion `(p_0, p_1)τ`.
    pub fn sections(&self) -> Result<(Portrait, Portrait, bool)> {
        if self.depth == 0 {
            return Err(Error::Level { level: 1, depth: 0 });
        }
        let half = tree_size(self.depth - 1);
        let left = self.bits[1..1 + half].to_vec();
        let right = self.bits[1 + half..].to_vec();
        let d = self.depth - 1;
        Ok((
            Portrait {
                depth: d,
                bits: left,
            },
            Portrait {
                depth: d,
                bits: right,
            },
            self.bits[0],
        ))
    }

    pub fn assemble(left: &Portrait, right: &Portrait, swap: bool) -> Result<Portrait> {
        left.same_depth(right)?;
        check_depth(left.depth + 1)?;
        let mut bits = Vec::with_capacity(2 * left.bits.len() + 1);
        bits.push(swap);
        bits.extend_from_slice(&left.bits);
        bits.extend_from_slice(&right.bits);
        Ok(Portrait {
            depth: left.depth + 1,
            bits,
        })
    }

    /// Section at a vertex of level `level`, as a portrait of depth `depth - level`.
    pub fn section_at(&self, vertex: u32, level: u32) -> Result<Portrait> {
        self.check_level(level)?;
        let (idx, d) = self.node_index(vertex, level);
        Ok(Portrait {
            depth: d,
            bits: self.bits[idx..idx + tree_size(d)].to_vec(),
        })
    }

    // Preorder index of the subtree rooted at `vertex` of `level`, and its depth.
    fn node_index(&self, vertex: u32, level: u32) -> (usize, u32) {
        let mut idx = 0usize;
        let mut d = self.depth;
        for i in (0..level).rev() {
            let b = (vertex >> i) & 1;
            idx += 1 + if b == 1 { tree_size(d - 1) } else { 0 };
            d -= 1;
        }
        (idx, d)
    }

    /// Action on `T_m`: keeps the bits of nodes at depth `< m`.
    pub fn restrict(&self, m: u32) -> Result<Portrait> {
        if m > self.depth {
            return Err(Error::Level {
                level: m,
                depth: self.depth,
            });
        }
        let mut out = Vec::with_capacity(tree_size(m));
        restrict_into(&self.bits, self.depth, m, &mut out);
        Ok(Portrait {
            depth: m,
            bits: out,
        })
    }

    fn check_level(&self, j: u32) -> Result<()> {
        if j > self.depth {
            Err(Error::Level {
                level: j,
                depth: self.depth,
            })
        } else {
            Ok(())
        }
    }

    /// Image of a level-`level` vertex.
    pub fn apply(&self, vertex: u32, level: u32) -> Result<u32> {
        self.check_level(level)?;
        if level < 32 && vertex >> level != 0 {
            return Err(Error::Precondition(format!(
                "vertex {vertex} does not exist on level {level}"
            )));
        }
        let mut idx = 0usize;
        let mut d = self.depth;
        let mut out = 0u32;
        for i in (0..level).rev() {
            let b = (vertex >> i) & 1 == 1;
            out = (out << 1) | (b ^ self.bits[idx]) as u32;
            idx += 1 + if b { tree_size(d - 1) } else { 0 };
            d -= 1;
        }
        Ok(out)
    }

    /// Sign of the permutation induced on level `j`: the parity of the
    /// number of swapping nodes at depth `j - 1`.
    pub fn sign_at(&self, j: u32) -> Result<i8> {
        if j == 0 || j > self.depth {
            return Err(Error::Level {
                level: j,
                depth: self.depth,
            });
        }
        let mut parity = false;
        count_level(&self.bits, self.depth, j - 1, &mut parity);
        Ok(if parity { -1 } else { 1 })
    }

    /// Signs at levels `1..=depth`.
    pub fn signs(&self) -> Vec<i8> {
        let mut parities = vec![false; self.depth as usize];
        level_parities(&self.bits, self.depth, 0, &mut parities);
        parities
            .into_iter()
            .map(|p| if p { -1 } else { 1 })
            .collect()
    }

    /// Whether the element acts as a single `2^j`-cycle on every level.
    pub fn is_odometer(&self) -> bool {
        self.signs().iter().all(|&s| s == -1)
    }

    /// The map `v ↦ (v)p` on level `j` as an array.
    pub fn level_permutation(&self, j: u32) -> Result<Vec<u32>> {
        self.check_level(j)?;
        let mut out = vec![0u32; 1usize << j];
        level_perm_into(&self.bits, self.depth, j, &mut out);
        Ok(out)
    }

    pub fn cycle_structure(&self, j: u32) -> Result<CycleTable> {
        let perm = self.level_permutation(j)?;
        Ok(CycleTable {
            level: j,
            cycles: cycles_of(&perm),
        })
    }

    /// Least `e ≥ 1` with `p^e = id`; a power of two.
    pub fn order(&self) -> u64 {
        let mut e = 1u64;
        let mut q = self.clone();
        while !q.is_identity() {
            q = q.then(&q);
            e *= 2;
        }
        e
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        CanonicalKey(key_of(&self.bits, self.depth))
    }

    pub fn conjugate_in_level(&self, other: &Portrait) -> Result<bool> {
        self.same_depth(other)?;
        Ok(self.canonical_key() == other.canonical_key())
    }

    /// If `self = γ^t` on its depth, returns `t mod 2^depth`.
    pub fn gamma_exponent_recover(&self) -> Option<u64> {
        let n = self.depth;
        if n == 0 {
            return Some(0);
        }
        let image = self.apply(0, n).ok()?;
        // γ acts on the least-significant-first reading as x ↦ x - 1.
        let lsb_first = image.reverse_bits() >> (32 - n);
        let modulus = 1u64 << n;
        let t = (modulus - lsb_first as u64) % modulus;
        if *self == Portrait::gamma_power(n, t) {
            Some(t)
        } else {
            None
        }
    }

    pub fn random<R: Rng + ?Sized>(depth: u32, rng: &mut R) -> Portrait {
        assert!(depth <= MAX_DEPTH);
        let bits = (0..tree_size(depth)).map(|_| rng.gen::<bool>()).collect();
        Portrait { depth, bits }
    }

    /// Binary dump: magic, version, depth, then preorder bits packed
    /// most-significant bit first.
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(6 + self.bits.len() / 8 + 1);
        out.extend_from_slice(MAGIC);
        out.push(FORMAT_VERSION);
        out.push(self.depth as u8);
        for chunk in self.bits.chunks(8) {
            let mut byte = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                if b {
                    byte |= 0x80 >> i;
                }
            }
            out.push(byte);
        }
        out
    }

    pub fn from_binary(data: &[u8]) -> Result<Portrait> {
        if data.len() < 6 || &data[..4] != MAGIC {
            return Err(Error::Codec("bad magic".into()));
        }
        if data[4] != FORMAT_VERSION {
            return Err(Error::Codec(format!("unsupported version {}", data[4])));
        }
        let depth = data[5] as u32;
        check_depth(depth)?;
        let n = tree_size(depth);
        let body = &data[6..];
        if body.len() != n.div_ceil(8) {
            return Err(Error::Codec(format!(
                "expected {} payload bytes, got {}",
                n.div_ceil(8),
                body.len()
            )));
        }
        let bits = (0..n)
            .map(|i| body[i / 8] & (0x80 >> (i % 8)) != 0)
            .collect();
        Ok(Portrait { depth, bits })
    }

    /// JSON dump `{"version":1,"depth":n,"tree":{swap,left,right}}`; the
    /// tree is `null` at depth 0 and the children of bottom nodes are `null`.
    pub fn to_json(&self) -> Value {
        json!({
            "version": FORMAT_VERSION,
            "depth": self.depth,
            "tree": json_node(&self.bits, self.depth),
        })
    }

    pub fn from_json(value: &Value) -> Result<Portrait> {
        let version = value.get("version").and_then(Value::as_u64);
        if version != Some(FORMAT_VERSION as u64) {
            return Err(Error::Codec(format!("unsupported version {version:?}")));
        }
        let depth = value
            .get("depth")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Codec("missing depth".into()))? as u32;
        check_depth(depth)?;
        let mut bits = Vec::with_capacity(tree_size(depth));
        parse_json_node(value.get("tree").unwrap_or(&Value::Null), depth, &mut bits)?;
        Ok(Portrait { depth, bits })
    }
}

impl fmt::Debug for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Portrait(depth={}, ", self.depth)?;
        if self.bits.len() <= 64 {
            for &b in &self.bits {
                f.write_str(if b { "1" } else { "0" })?;
            }
        } else {
            write!(f, "{} bits", self.bits.len())?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for Portrait {
    /// Preorder bits as `0`/`1` characters.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub(crate) fn fill_gamma_power(out: &mut [bool], depth: u32, t: u64) {
    if depth == 0 {
        return;
    }
    let t = t & ((1u64 << depth) - 1);
    let half = tree_size(depth - 1);
    out[0] = t & 1 == 1;
    let (l, r) = out[1..].split_at_mut(half);
    if t & 1 == 0 {
        fill_gamma_power(l, depth - 1, t >> 1);
        r.copy_from_slice(l);
    } else {
        fill_gamma_power(l, depth - 1, (t >> 1) + 1);
        fill_gamma_power(r, depth - 1, t >> 1);
    }
}

fn compose_into(p: &[bool], q: &[bool], depth: u32, out: &mut Vec<bool>) {
    if depth == 0 {
        return;
    }
    if depth == 1 {
        out.push(p[0] ^ q[0]);
        return;
    }
    let half = tree_size(depth - 1);
    let swap = p[0];
    out.push(swap ^ q[0]);
    let (p0, p1) = (&p[1..1 + half], &p[1 + half..]);
    let (q0, q1) = (&q[1..1 + half], &q[1 + half..]);
    // (p0,p1)s · (q0,q1)t = (p0 q_{(0)s}, p1 q_{(1)s}) st
    if swap {
        compose_into(p0, q1, depth - 1, out);
        compose_into(p1, q0, depth - 1, out);
    } else {
        compose_into(p0, q0, depth - 1, out);
        compose_into(p1, q1, depth - 1, out);
    }
}

fn inverse_into(p: &[bool], depth: u32, out: &mut Vec<bool>) {
    if depth == 0 {
        return;
    }
    let half = tree_size(depth - 1);
    let swap = p[0];
    out.push(swap);
    let (p0, p1) = (&p[1..1 + half], &p[1 + half..]);
    // ((p0,p1)s)^-1 = (p_{(0)s}^-1, p_{(1)s}^-1) s
    if swap {
        inverse_into(p1, depth - 1, out);
        inverse_into(p0, depth - 1, out);
    } else {
        inverse_into(p0, depth - 1, out);
        inverse_into(p1, depth - 1, out);
    }
}

fn restrict_into(p: &[bool], depth: u32, m: u32, out: &mut Vec<bool>) {
    if m == 0 {
        return;
    }
    let half = tree_size(depth - 1);
    out.push(p[0]);
    restrict_into(&p[1..1 + half], depth - 1, m - 1, out);
    restrict_into(&p[1 + half..], depth - 1, m - 1, out);
}

fn count_level(p: &[bool], depth: u32, target: u32, parity: &mut bool) {
    if target == 0 {
        *parity ^= p[0];
        return;
    }
    let half = tree_size(depth - 1);
    count_level(&p[1..1 + half], depth - 1, target - 1, parity);
    count_level(&p[1 + half..], depth - 1, target - 1, parity);
}

fn level_parities(p: &[bool], depth: u32, at: usize, parities: &mut [bool]) {
    if depth == 0 {
        return;
    }
    parities[at] ^= p[0];
    let half = tree_size(depth - 1);
    level_parities(&p[1..1 + half], depth - 1, at + 1, parities);
    level_parities(&p[1 + half..], depth - 1, at + 1, parities);
}

fn level_perm_into(p: &[bool], depth: u32, j: u32, out: &mut [u32]) {
    if j == 0 {
        out[0] = 0;
        return;
    }
    let half = tree_size(depth - 1);
    let n = out.len() / 2;
    let (l, r) = out.split_at_mut(n);
    level_perm_into(&p[1..1 + half], depth - 1, j - 1, l);
    level_perm_into(&p[1 + half..], depth - 1, j - 1, r);
    let top = n as u32;
    if p[0] {
        l.iter_mut().for_each(|x| *x += top);
    } else {
        r.iter_mut().for_each(|x| *x += top);
    }
}

pub(crate) fn cycles_of(perm: &[u32]) -> Vec<Cycle> {
    let mut seen = vec![false; perm.len()];
    let mut cycles = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut members = Vec::new();
        let mut v = start;
        while !seen[v] {
            seen[v] = true;
            members.push(v as u32);
            v = perm[v] as usize;
        }
        cycles.push(Cycle {
            representative: start as u32,
            length: members.len() as u32,
            members,
        });
    }
    cycles
}

fn key_of(p: &[bool], depth: u32) -> Vec<u8> {
    if depth == 0 {
        return Vec::new();
    }
    let half = tree_size(depth - 1);
    let (p0, p1) = (&p[1..1 + half], &p[1 + half..]);
    if p[0] {
        // (p0, p1)σ is conjugate to (p0 p1, id)σ.
        let mut prod = Vec::with_capacity(half);
        compose_into(p0, p1, depth - 1, &mut prod);
        let mut key = vec![1u8];
        key.extend(key_of(&prod, depth - 1));
        key
    } else {
        let k0 = key_of(p0, depth - 1);
        let k1 = key_of(p1, depth - 1);
        let (a, b) = if k0 <= k1 { (k0, k1) } else { (k1, k0) };
        let mut key = Vec::with_capacity(1 + a.len() + b.len());
        key.push(0u8);
        key.extend(a);
        key.extend(b);
        key
    }
}

fn json_node(p: &[bool], depth: u32) -> Value {
    if depth == 0 {
        return Value::Null;
    }
    let half = tree_size(depth - 1);
    json!({
        "swap": p[0],
        "left": json_node(&p[1..1 + half], depth - 1),
        "right": json_node(&p[1 + half..], depth - 1),
    })
}

fn parse_json_node(v: &Value, depth: u32, out: &mut Vec<bool>) -> Result<()> {
    if depth == 0 {
        return if v.is_null() {
            Ok(())
        } else {
            Err(Error::Codec("tree deeper than declared depth".into()))
        };
    }
    let swap = v
        .get("swap")
        .and_then(Value::as_bool)
        .ok_or_else(|| Error::Codec("node without boolean swap".into()))?;
    out.push(swap);
    parse_json_node(v.get("left").unwrap_or(&Value::Null), depth - 1, out)?;
    parse_json_node(v.get("right").unwrap_or(&Value::Null), depth - 1, out)
}
