//! Sampled values of the `omega` family and its two tangent lines.

use std::io::{self, Write};
use std::path::Path;

use cslab::constructions::omega_sum;
use cslab::numeric::{format_decimal, rat, sqrt_bounds};
use cslab::Rational;

pub const MAX_NU: u32 = 16;
pub const MAX_SAMPLES: u64 = 1_000_000;

/// Writes rows `x, sum_omega, tangent_pos, tangent_neg` for
/// `x = i / samples`, `i` in `-samples..=samples`, at 12 decimals.
pub fn write_omega_csv(out: &mut impl Write, nu_max: u32, samples: u64) -> io::Result<()> {
    // slope of both tangents is sqrt(1/8)
    let slope = sqrt_bounds(&rat(1, 8), 60).midpoint();
    writeln!(out, "x,sum_omega,tangent_pos,tangent_neg")?;
    let s = samples as i64;
    for i in -s..=s {
        let x = Rational::new(i.into(), s.into());
        let y = omega_sum(&x, Some(nu_max)).midpoint();
        let t = &slope * &x;
        writeln!(
            out,
            "{},{},{},{}",
            format_decimal(&x, 12),
            format_decimal(&y, 12),
            format_decimal(&t, 12),
            format_decimal(&-t.clone(), 12)
        )?;
    }
    Ok(())
}

pub fn emit_omega_csv(nu_max: u32, samples: u64, path: &Path) -> io::Result<()> {
    let mut file = io::BufWriter::new(std::fs::File::create(path)?);
    write_omega_csv(&mut file, nu_max, samples)?;
    file.flush()
}
