//! Binary coefficient cache.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "KPJC" | version u32 | sha256(spec body) [32] | k u32 | d u32 | L u32 | N u64
//! N records: coords u32, then per coordinate
//!            num_len u32, num (signed two's complement), den_len u32, den (unsigned)
//! ```

use std::io::{Read, Write};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use sha2::{Digest, Sha256};

use kproj_core::Scalar;

use crate::CliError;

pub const MAGIC: &[u8; 4] = b"KPJC";
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheHeader {
    pub spec_hash: [u8; 32],
    pub k: u32,
    pub d: u32,
    pub field_order: u32,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientCache {
    pub header: CacheHeader,
    pub values: Vec<Scalar>,
}

pub fn spec_hash(body: &[u8]) -> [u8; 32] {
    Sha256::digest(body).into()
}

fn corrupt(msg: impl Into<String>) -> CliError {
    CliError::Schema(format!("corrupt cache: {}", msg.into()))
}

fn put_bytes(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
    out.extend_from_slice(bytes);
}

impl CoefficientCache {
    pub fn new(spec_hash: [u8; 32], k: u32, d: u32, field_order: u32, values: Vec<Scalar>) -> Self {
        let header = CacheHeader {
            spec_hash,
            k,
            d,
            field_order,
            count: values.len() as u64,
        };
        CoefficientCache { header, values }
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let h = &self.header;
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        out.extend_from_slice(&h.spec_hash);
        for x in [h.k, h.d, h.field_order] {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out.extend_from_slice(&h.count.to_le_bytes());
        for v in &self.values {
            let coords = v
                .coords_in(h.field_order)
                .map_err(kproj_core::Error::from)?;
            out.extend_from_slice(&(coords.len() as u32).to_le_bytes());
            for c in coords {
                put_bytes(&mut out, &c.numer().to_signed_bytes_le());
                put_bytes(&mut out, &c.denom().magnitude().to_bytes_le());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CliError> {
        let mut r = Reader(bytes);
        if r.take(4)? != MAGIC {
            return Err(corrupt("bad magic"));
        }
        if r.u32()? != CACHE_VERSION {
            return Err(corrupt("unknown version"));
        }
        let spec_hash: [u8; 32] = r.take(32)?.try_into().expect("32 bytes");
        let (k, d, field_order) = (r.u32()?, r.u32()?, r.u32()?);
        let count = u64::from_le_bytes(r.take(8)?.try_into().expect("8 bytes"));
        let mut values = Vec::new();
        for _ in 0..count {
            let n = r.u32()?;
            let mut coords = Vec::with_capacity(n as usize);
            for _ in 0..n {
                let len = r.u32()? as usize;
                let num = BigInt::from_signed_bytes_le(r.take(len)?);
                let len = r.u32()? as usize;
                let den = BigUint::from_bytes_le(r.take(len)?);
                if den == BigUint::from(0u32) {
                    return Err(corrupt("zero denominator"));
                }
                coords.push(BigRational::new(num, BigInt::from_biguint(Sign::Plus, den)));
            }
            values.push(
                Scalar::from_coords(field_order, coords).map_err(|e| corrupt(e.to_string()))?,
            );
        }
        if !r.0.is_empty() {
            return Err(corrupt("trailing bytes"));
        }
        let header = CacheHeader {
            spec_hash,
            k,
            d,
            field_order,
            count,
        };
        Ok(CoefficientCache { header, values })
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<(), CliError> {
        w.write_all(&self.to_bytes()?).map_err(CliError::io)
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self, CliError> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes).map_err(CliError::io)?;
        Self::from_bytes(&bytes)
    }
}

struct Reader<'a>(&'a [u8]);

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CliError> {
        if self.0.len() < n {
            return Err(corrupt("truncated"));
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32, CliError> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }
}
