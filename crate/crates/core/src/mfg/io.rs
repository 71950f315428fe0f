use std::io::Write;

use super::{SolverGrid, Surface};

/// Writes a surface as `t,q,value` rows, time-major, values in shortest
/// round-trip form.
pub fn write_surface_csv<W: Write>(
    mut out: W,
    surface: &Surface,
    grid: &SolverGrid,
) -> std::io::Result<()> {
    writeln!(out, "t,q,value")?;
    for j in 0..surface.n_t() {
        let t = grid.t(j);
        for (i, v) in surface.row(j).iter().enumerate() {
            writeln!(out, "{t:?},{:?},{v:?}", grid.q(i))?;
        }
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_round_trip_through_text() {
        let grid = SolverGrid::new(3, 3).unwrap();
        let mut s = Surface::zeros(3, 3);
        s[(1, 2)] = 0.1 + 0.2;
        s[(2, 0)] = -4.0 * std::f64::consts::E;
        let mut buf = Vec::new();
        write_surface_csv(&mut buf, &s, &grid).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,q,value"));
        let parsed: Vec<f64> = lines
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(parsed, s.as_slice());
    }
}
