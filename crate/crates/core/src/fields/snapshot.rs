//! Binary snapshot layout.
//!
//! ```text
//! offset  size  field
//! 0       8     magic "KKWSNAP1"
//! 8       4     K            (u32 LE)
//! 12      4     J            (u32 LE, nodes are j = 0..=J)
//! 16      4     n_components (u32 LE)
//! 20      4     flags        (u32 LE, bit 0: is_real)
//! 24      8     dr           (f64 LE)
//! 32      8     t            (f64 LE)
//! 40      ...   for each component, for [W, ∂_tW], for k = -K..=K, for j = 0..=J:
//!               re, im       (f64 LE each)
//! ```

use std::io::{Read, Write};

use num_complex::Complex;

use super::{ModeField, RadialGrid};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAGIC: &[u8; 8] = b"KKWSNAP1";

/// One time level of every component, as written to disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub t: T,
    pub w: Vec<ModeField<T>>,
    pub dw: Vec<ModeField<T>>,
}

impl<T: Real> Snapshot<T> {
    pub fn write_to(&self, out: &mut impl Write) -> Result<()> {
        let first = self.w.first().ok_or_else(|| Error::Domain("snapshot without components".into()))?;
        let grid = first.grid();
        out.write_all(MAGIC)?;
        out.write_all(&(first.k_max() as u32).to_le_bytes())?;
        out.write_all(&(grid.jmax as u32).to_le_bytes())?;
        out.write_all(&(self.w.len() as u32).to_le_bytes())?;
        out.write_all(&u32::from(first.is_real()).to_le_bytes())?;
        out.write_all(&grid.dr.to_f64_().to_le_bytes())?;
        out.write_all(&self.t.to_f64_().to_le_bytes())?;
        let mut buf = Vec::with_capacity(16 * first.raw().len());
        for (w, dw) in self.w.iter().zip(&self.dw) {
            for f in [w, dw] {
                buf.clear();
                for v in f.raw() {
                    buf.extend_from_slice(&v.re.to_f64_().to_le_bytes());
                    buf.extend_from_slice(&v.im.to_f64_().to_le_bytes());
                }
                out.write_all(&buf)?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut v = Vec::new();
        self.write_to(&mut v)?;
        Ok(v)
    }

    pub fn read_from(input: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Io("not a snapshot file (bad magic)".into()));
        }
        let mut u = [0u8; 4];
        let mut next_u32 = |input: &mut dyn Read| -> Result<u32> {
            input.read_exact(&mut u)?;
            Ok(u32::from_le_bytes(u))
        };
        let k_max = next_u32(input)? as usize;
        let jmax = next_u32(input)? as usize;
        let n = next_u32(input)? as usize;
        let is_real = next_u32(input)? & 1 == 1;
        let mut f = [0u8; 8];
        let mut next_f64 = |input: &mut dyn Read| -> Result<f64> {
            input.read_exact(&mut f)?;
            Ok(f64::from_le_bytes(f))
        };
        let dr = T::lit(next_f64(input)?);
        let t = T::lit(next_f64(input)?);
        let grid = RadialGrid::new(dr, jmax);
        let mut w = Vec::with_capacity(n);
        let mut dw = Vec::with_capacity(n);
        for _ in 0..n {
            for dst in [&mut w, &mut dw] {
                let mut field = ModeField::zeros(k_max, grid, is_real);
                for v in field.raw_mut() {
                    let re = next_f64(input)?;
                    let im = next_f64(input)?;
                    *v = Complex::new(T::lit(re), T::lit(im));
                }
                dst.push(field);
            }
        }
        Ok(Snapshot { t, w, dw })
    }

    pub fn from_bytes(mut bytes: &[u8]) -> Result<Self> {
        Self::read_from(&mut bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn roundtrip_is_bitwise(k in 1usize..4, j in 4usize..20, seed in any::<u64>(), t in 2.0f64..100.0) {
            let g = RadialGrid::new(0.125, j);
            let mk = |salt: u64| ModeField::from_fn(k, g, false, |kk, r| {
                let h = (seed ^ salt).wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(kk as u64) as f64;
                Complex::new((h * 1e-19 + r).sin(), (h * 1e-19 - r).cos())
            });
            let s = Snapshot { t, w: vec![mk(1), mk(2)], dw: vec![mk(3), mk(4)] };
            let back = Snapshot::<f64>::from_bytes(&s.to_bytes().unwrap()).unwrap();
            prop_assert_eq!(back, s);
        }
    }

    #[test]
    fn header_layout() {
        let g = RadialGrid::new(0.5, 4);
        let f = ModeField::from_fn(1, g, true, |k, r| Complex::new(k as f64 + r, 0.0));
        let s = Snapshot { t: 2.0, w: vec![f.clone()], dw: vec![f] };
        let b = s.to_bytes().unwrap();
        assert_eq!(&b[..8], b"KKWSNAP1");
        assert_eq!(u32::from_le_bytes(b[8..12].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(b[12..16].try_into().unwrap()), 4);
        assert_eq!(u32::from_le_bytes(b[20..24].try_into().unwrap()), 1);
        assert_eq!(f64::from_le_bytes(b[24..32].try_into().unwrap()), 0.5);
        assert_eq!(b.len(), 40 + 2 * 3 * 5 * 16);
        // first value: k = -1, j = 0, re
        assert_eq!(f64::from_le_bytes(b[40..48].try_into().unwrap()), -1.0);
    }

    #[test]
    fn bad_magic() {
        assert!(Snapshot::<f64>::from_bytes(b"NOTASNAPxxxxxxxxxxxxxxx").is_err());
    }
}
