//! Bit-stable CSV snapshots of the solution fields.

use crate::error::Result;
use crate::grid::Grid2D;
use std::io::Write;
use std::path::Path;

/// Format with 17 significant digits so f64 values survive a read back
/// exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write the interior cells as CSV: a `# t= nx= ny=` header, a column
/// header, then one row per cell in row-major order (x fastest). 1-D grids
/// write y = 0 for every row.
pub fn write_snapshot(grid: &Grid2D, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!(
        "# t={} nx={} ny={}\n",
        fmt_f64(grid.time),
        grid.nx,
        grid.ny
    ));
    out.push_str("x,y,h,v1,v2,P11,P12,P22\n");
    for k in 0..grid.ny as isize {
        for j in 0..grid.nx as isize {
            let u = grid.cell(j, k);
            let y = if grid.is_one_dimensional() {
                0.0
            } else {
                grid.cell_y(k)
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                fmt_f64(grid.cell_x(j)),
                fmt_f64(y),
                fmt_f64(u.h),
                fmt_f64(u.v1()),
                fmt_f64(u.v2()),
                fmt_f64(u.p11()),
                fmt_f64(u.p12()),
                fmt_f64(u.p22()),
            ));
        }
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}
