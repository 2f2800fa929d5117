use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Bits needed to write `v` in binary (0 for 0).
pub fn bit_length(v: u64) -> u32 {
    u64::BITS - v.leading_zeros()
}

/// `x = k·π/2ⁿ` as a sign bit followed by `m` magnitude bits, most
/// significant first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedPointEncoding {
    pub k: i64,
    pub n: u32,
    pub m: u32,
}

impl FixedPointEncoding {
    pub fn new(k: i64, n: u32, m: u32) -> Result<Self> {
        if bit_length(k.unsigned_abs()) > m {
            return Err(Error::InvalidCircuit(format!("|k| = {} does not fit in {m} bits", k.abs())));
        }
        Ok(FixedPointEncoding { k, n, m })
    }

    pub fn sign_bit(&self) -> bool {
        self.k < 0
    }

    pub fn magnitude(&self) -> u64 {
        self.k.unsigned_abs()
    }

    /// `b_i`.
    pub fn bit(&self, i: u32) -> bool {
        i < self.m && (self.magnitude() >> i) & 1 == 1
    }

    /// `[b_sign, b_{m−1}, …, b_0]`.
    pub fn bits(&self) -> Vec<bool> {
        std::iter::once(self.sign_bit())
            .chain((0..self.m).rev().map(|i| self.bit(i)))
            .collect()
    }

    pub fn value(&self) -> f64 {
        self.k as f64 * PI / 2f64.powi(self.n as i32)
    }
}

impl fmt::Display for FixedPointEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Recover `k` from a real input at scale `n`.
pub fn multiple_of(x: f64, n: u32) -> Result<i64> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    let unit = PI / 2f64.powi(n as i32);
    let k = (x / unit).round();
    if (x - k * unit).abs() > 1e-9 || k.abs() > (1u64 << 52) as f64 {
        return Err(Error::NotRepresentable(x, n));
    }
    Ok(k as i64)
}

/// Encode a single input with `m = max(bit_length(|k|), n)`.
pub fn encode_input(x: f64, n: u32) -> Result<FixedPointEncoding> {
    let k = multiple_of(x, n)?;
    FixedPointEncoding::new(k, n, bit_length(k.unsigned_abs()).max(n))
}

/// Sign-magnitude bits of an integer in `width` bits (sign first).
pub fn sign_magnitude_bits(v: i64, width: u32) -> Result<u64> {
    if width == 0 || bit_length(v.unsigned_abs()) > width - 1 {
        return Err(Error::InvalidCircuit(format!("{v} does not fit in {width} sign-magnitude bits")));
    }
    Ok(((v < 0) as u64) << (width - 1) | v.unsigned_abs())
}

pub fn decode_sign_magnitude(bits: u64, width: u32) -> i64 {
    let mag = (bits & ((1u64 << (width - 1)) - 1)) as i64;
    if (bits >> (width - 1)) & 1 == 1 {
        -mag
    } else {
        mag
    }
}

/// One training pair `x = k·π/2ⁿ`, integer target `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QRow {
    pub k: i64,
    pub n: u32,
    pub y: i64,
}

impl QRow {
    pub fn x(&self) -> f64 {
        self.k as f64 * PI / 2f64.powi(self.n as i32)
    }

    /// Same value with the smallest possible scale.
    fn reduced(&self) -> (i64, u32) {
        let (mut k, mut n) = (self.k, self.n);
        while n > 0 && k % 2 == 0 {
            k /= 2;
            n -= 1;
        }
        (k, n)
    }
}

/// Dataset whose inputs are exact multiples of π/2ⁿ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QDataset {
    pub rows: Vec<QRow>,
}

/// Scale and magnitude width shared by every input of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputCodec {
    pub n: u32,
    pub m: u32,
}

impl InputCodec {
    pub fn encode(&self, row: &QRow) -> Result<FixedPointEncoding> {
        let (k, rn) = row.reduced();
        if rn > self.n {
            return Err(Error::NotRepresentable(row.x(), self.n));
        }
        FixedPointEncoding::new(k << (self.n - rn), self.n, self.m)
    }

    /// Qubits of one input register (sign plus magnitude).
    pub fn register_width(&self) -> usize {
        1 + self.m as usize
    }
}

impl QDataset {
    /// `(−3π/2, 2), (−π/2, −2), (π/2, 2), (3π/2, −2)`.
    pub fn toy() -> Self {
        let row = |k, y| QRow { k, n: 1, y };
        QDataset {
            rows: vec![row(-3, 2), row(-1, -2), row(1, 2), row(3, -2)],
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Common scale: the smallest `n ≥ 1` making every input a multiple of
    /// π/2ⁿ; magnitude width `m = max(bit_length(|k|max), n)`.
    pub fn codec(&self) -> InputCodec {
        let n = self.rows.iter().map(|r| r.reduced().1).max().unwrap_or(0).max(1);
        let kmax = self
            .rows
            .iter()
            .map(|r| {
                let (k, rn) = r.reduced();
                k.unsigned_abs() << (n - rn)
            })
            .max()
            .unwrap_or(0);
        InputCodec {
            n,
            m: bit_length(kmax).max(n),
        }
    }

    pub fn max_abs_target(&self) -> u64 {
        self.rows.iter().map(|r| r.y.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn classical_pairs(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.x(), r.y as f64)).collect()
    }

    /// Parse lines `k, n, y`; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::InvalidDataset(format!("line {}: {what}", ln + 1));
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(bad("expected `k, n, y`"));
            }
            let k = fields[0].parse::<i64>().map_err(|_| bad("k is not an integer"))?;
            let n = fields[1].parse::<u32>().map_err(|_| bad("n is not a natural number"))?;
            let y = fields[2].parse::<i64>().map_err(|_| bad("y is not an integer"))?;
            if n > 30 || k.unsigned_abs() > 1 << 30 {
                return Err(bad("value out of range"));
            }
            rows.push(QRow { k, n, y });
        }
        Ok(QDataset { rows })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        self.rows.iter().map(|r| format!("{}, {}, {}\n", r.k, r.n, r.y)).collect()
    }
}
