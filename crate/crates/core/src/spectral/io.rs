//! Plain-text field snapshots.
//!
//! ```text
//! # nsvlab field snapshot v1
//! resolution_n 32
//! dealias_cutoff 10
//! role velocity2d
//! alpha 0.5
//! # component k1 k2 re im
//! 0 0 1 0 -0.5
//! 0 0 -1 0 0.5
//! ```
//!
//! Header keys may appear in any order before the first data row; `#`
//! lines are comments. One row per stored nonzero coefficient, covering
//! both `k` and `-k`. Floats are written in Rust's shortest round-trip
//! form, so a write/read cycle is bit-exact.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::{FieldRole, SpectralField, SpectralGrid, WaveVector};
use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: &str = "# nsvlab field snapshot v1";

pub fn write_snapshot<W: Write>(mut w: W, field: &SpectralField, alpha: f64) -> Result<()> {
    let grid = field.grid();
    writeln!(w, "{SNAPSHOT_MAGIC}")?;
    writeln!(w, "resolution_n {}", grid.resolution())?;
    writeln!(w, "dealias_cutoff {}", grid.cutoff())?;
    writeln!(w, "role {}", field.role().as_str())?;
    writeln!(w, "alpha {alpha:?}")?;
    writeln!(w, "# component k1 k2 re im")?;
    for c in 0..field.components() {
        for k in grid.modes() {
            let z = field.coeff(c, k);
            if z.re != 0.0 || z.im != 0.0 {
                writeln!(w, "{c} {} {} {:?} {:?}", k.k1, k.k2, z.re, z.im)?;
            }
        }
    }
    Ok(())
}

pub fn snapshot_to_string(field: &SpectralField, alpha: f64) -> String {
    let mut buf = Vec::new();
    write_snapshot(&mut buf, field, alpha).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("snapshot is ASCII")
}

/// Parses a snapshot, returning the field and the recorded `alpha`.
pub fn read_snapshot<R: BufRead>(r: R) -> Result<(SpectralField, f64)> {
    let mut resolution = None;
    let mut cutoff = None;
    let mut role = None;
    let mut alpha = None;
    let mut field: Option<SpectralField> = None;

    let bad = |line: usize, reason: String| Error::Snapshot { line, reason };

    for (i, line) in r.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if field.is_none() {
            match toks.as_slice() {
                ["resolution_n", v] => {
                    resolution = Some(v.parse::<usize>().map_err(|e| bad(lineno, e.to_string()))?);
                    continue;
                }
                ["dealias_cutoff", v] => {
                    cutoff = Some(v.parse::<usize>().map_err(|e| bad(lineno, e.to_string()))?);
                    continue;
                }
                ["role", v] => {
                    role = Some(
                        FieldRole::parse(v).ok_or_else(|| bad(lineno, format!("unknown role `{v}`")))?,
                    );
                    continue;
                }
                ["alpha", v] => {
                    alpha = Some(v.parse::<f64>().map_err(|e| bad(lineno, e.to_string()))?);
                    continue;
                }
                _ => {
                    let (Some(n), Some(role)) = (resolution, role) else {
                        return Err(bad(lineno, "data row before resolution_n/role header".into()));
                    };
                    let grid = match cutoff {
                        Some(c) => SpectralGrid::new(n, c),
                        None => SpectralGrid::with_resolution(n),
                    }
                    .map_err(|e| bad(lineno, e.to_string()))?;
                    field = Some(SpectralField::zeros(grid, role));
                }
            }
        }
        let f = field.as_mut().expect("initialised above");
        let [c, k1, k2, re, im] = toks.as_slice() else {
            return Err(bad(lineno, format!("expected 5 columns, found {}", toks.len())));
        };
        let c: usize = c.parse().map_err(|_| bad(lineno, format!("bad component `{c}`")))?;
        let k = WaveVector::new(
            k1.parse().map_err(|_| bad(lineno, format!("bad k1 `{k1}`")))?,
            k2.parse().map_err(|_| bad(lineno, format!("bad k2 `{k2}`")))?,
        );
        let z = Complex64::new(
            re.parse().map_err(|_| bad(lineno, format!("bad re `{re}`")))?,
            im.parse().map_err(|_| bad(lineno, format!("bad im `{im}`")))?,
        );
        if c >= f.components() {
            return Err(bad(lineno, format!("component {c} out of range")));
        }
        if !f.grid().retains(k) {
            return Err(bad(lineno, format!("mode {k} outside the band")));
        }
        let idx = f.grid().index(k);
        f.component_mut(c)[idx] = z;
    }

    let f = match field {
        Some(f) => f,
        None => {
            // header-only file: the zero field
            let (Some(n), Some(role)) = (resolution, role) else {
                return Err(bad(0, "missing resolution_n or role".into()));
            };
            let grid = match cutoff {
                Some(c) => SpectralGrid::new(n, c),
                None => SpectralGrid::with_resolution(n),
            }
            .map_err(|e| bad(0, e.to_string()))?;
            SpectralField::zeros(grid, role)
        }
    };
    if f.reality_defect() > 1e-12 * f.max_abs_coeff().max(1e-300) {
        return Err(bad(0, "coefficients are not conjugate-symmetric".into()));
    }
    Ok((f, alpha.unwrap_or(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn write_read_is_bit_exact(seed in 0u64..1000, decay in 0.5f64..4.0, alpha in 0.0f64..10.0) {
            let g = SpectralGrid::with_resolution(16).unwrap();
            let role = if seed % 2 == 0 { FieldRole::Velocity } else { FieldRole::Vorticity };
            let f = SpectralField::random(g, role, seed, decay);
            let text = snapshot_to_string(&f, alpha);
            let (back, a) = read_snapshot(text.as_bytes()).unwrap();
            prop_assert_eq!(back, f);
            prop_assert_eq!(a, alpha);
        }
    }

    #[test]
    fn rejects_asymmetric_and_out_of_band() {
        let text = "resolution_n 16\nrole vorticity2d\n0 1 0 1.0 0.0\n";
        assert!(read_snapshot(text.as_bytes()).is_err());
        let text = "resolution_n 16\nrole vorticity2d\n0 9 0 1.0 0.0\n";
        assert!(read_snapshot(text.as_bytes()).is_err());
        let text = "0 1 0 1.0 0.0\n";
        assert!(read_snapshot(text.as_bytes()).is_err());
    }
}
