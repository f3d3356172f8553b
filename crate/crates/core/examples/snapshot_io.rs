//! Writes a random velocity field and its vorticity in the text snapshot
//! format and reads them back.
//!
//! ```bash
//! cargo run --release --example snapshot_io
//! ```

use nsvlab::spectral::{io, ops, FieldRole, SpectralField, SpectralGrid};

fn main() -> nsvlab::Result<()> {
    let grid = SpectralGrid::with_resolution(8)?;
    let u = SpectralField::random(grid, FieldRole::Velocity, 4, 2.0);
    let w = ops::rot(&u)?;
    let text = io::snapshot_to_string(&w, 0.5);
    println!("{}", text.lines().take(6).collect::<Vec<_>>().join("\n"));
    println!("... ({} lines)", text.lines().count());

    let (back, alpha) = io::read_snapshot(text.as_bytes())?;
    assert_eq!(back, w);
    let u_back = ops::curl_and_stream(&back)?;
    let mut diff = u_back;
    diff.axpy(-1.0, &u);
    println!("alpha = {alpha}, |u - curl^-1 rot u| = {:.2e}", diff.l2_norm_sq().sqrt());
    Ok(())
}
