//! CSV writers (and one reader) for the CLI outputs.
//!
//! Floats are written with Rust's shortest round-trip formatting and a '.'
//! decimal separator, so files parse back to the exact same bits.

use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::drag::DragCurve;
use crate::error::{Error, Result};
use crate::fokker_planck::{DistributionState, MomentumGrid};
use crate::langevin::TrajectoryStats;
use crate::stats::Histogram;

/// One row of a temperature sweep.
#[derive(Copy, Clone, Debug)]
pub struct SweepRow {
    pub temperature: f64,
    pub gamma: f64,
    pub diffusion: f64,
    pub einstein_residual: f64,
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "T,gamma,D,einstein_residual")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.temperature, r.gamma, r.diffusion, r.einstein_residual
        )?;
    }
    Ok(())
}

pub fn write_dragcurve_csv(path: &Path, curve: &DragCurve) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "v,F_parallel,quadrature_error")?;
    for i in 0..curve.speeds.len() {
        writeln!(
            w,
            "{},{},{}",
            curve.speeds[i], curve.forces[i], curve.quadrature_errors[i]
        )?;
    }
    Ok(())
}

pub fn write_moments_csv(path: &Path, stats: &TrajectoryStats) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        w,
        "t,mean_px,mean_py,mean_pz,var_px,var_py,var_pz,mean_p_squared"
    )?;
    for k in 0..stats.times.len() {
        let m = stats.mean_momentum[k];
        let v = stats.variance[k];
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            stats.times[k], m[0], m[1], m[2], v[0], v[1], v[2], stats.mean_p_squared[k]
        )?;
    }
    Ok(())
}

/// One file holding the per-component final-momentum histograms.
pub fn write_histograms_csv(path: &Path, histograms: &[Histogram]) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "component,bin_lo,bin_hi,count")?;
    for (c, h) in histograms.iter().enumerate() {
        let width = h.bin_width();
        for (i, &count) in h.counts.iter().enumerate() {
            let lo = h.lo + i as f64 * width;
            writeln!(w, "{},{},{},{}", c, lo, lo + width, count)?;
        }
    }
    Ok(())
}

/// JSON header carried on the first line of a distribution snapshot.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub t: f64,
    pub gamma: f64,
    pub diffusion: f64,
    pub grid: MomentumGrid,
}

/// Snapshot CSV: `# {json header}` then `p,pi` rows.
pub fn write_snapshot_csv(
    path: &Path,
    state: &DistributionState,
    gamma: f64,
    diffusion: f64,
) -> Result<()> {
    let header = SnapshotHeader {
        t: state.time,
        gamma,
        diffusion,
        grid: state.grid,
    };
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "# {}", serde_json::to_string(&header)?)?;
    writeln!(w, "p,pi")?;
    for (i, &v) in state.values.iter().enumerate() {
        writeln!(w, "{},{}", state.grid.node(i), v)?;
    }
    Ok(())
}

pub fn read_snapshot_csv(path: &Path) -> Result<(SnapshotHeader, DistributionState)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::Numerical("empty snapshot file".into()))?;
    let header: SnapshotHeader = serde_json::from_str(
        header_line
            .strip_prefix("# ")
            .ok_or_else(|| Error::Numerical("snapshot missing '# {json}' header".into()))?,
    )?;
    let mut values = Vec::with_capacity(header.grid.n_points);
    for line in lines.skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let (_, pi) = line
            .split_once(',')
            .ok_or_else(|| Error::Numerical(format!("malformed snapshot row: {line}")))?;
        values.push(
            pi.parse::<f64>()
                .map_err(|e| Error::Numerical(format!("bad density value {pi}: {e}")))?,
        );
    }
    if values.len() != header.grid.n_points {
        return Err(Error::Numerical(format!(
            "snapshot row count {} does not match grid n_points {}",
            values.len(),
            header.grid.n_points
        )));
    }
    Ok((
        header.clone(),
        DistributionState {
            grid: header.grid,
            values,
            time: header.t,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fokker_planck::DistributionState;

    #[test]
    fn snapshot_round_trips_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.csv");
        let grid = MomentumGrid::new(-3.0, 3.0, 61).unwrap();
        let state = DistributionState::gaussian(grid, 0.1, 0.7).unwrap();
        write_snapshot_csv(&path, &state, 1.25, 0.75).unwrap();
        let (header, back) = read_snapshot_csv(&path).unwrap();
        assert_eq!(header.gamma, 1.25);
        assert_eq!(header.diffusion, 0.75);
        assert_eq!(back.values, state.values);
        assert_eq!(back.grid, state.grid);
    }

    #[test]
    fn sweep_csv_has_expected_shape() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.csv");
        write_sweep_csv(
            &path,
            &[SweepRow {
                temperature: 1.0,
                gamma: 0.5,
                diffusion: 0.5,
                einstein_residual: 0.0,
            }],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "T,gamma,D,einstein_residual\n1,0.5,0.5,0\n");
    }
}
