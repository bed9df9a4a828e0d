use super::branch::project_with;
use super::{Branch, DiracParams, Potential, Spectral, SpinorField, SplitOperator};
use crate::{Error, Grid, Result};

/// Largest ∫min(ρ₊, ρ₋)dx for which the branches count as spatially separated.
pub const SEPARATION_OVERLAP_MAX: f64 = 1e-3;

/// Snapshot of a run. Densities are normalized to integrate to one.
#[derive(Clone, Debug)]
pub struct Frame {
    pub time: f64,
    pub density: Vec<f64>,
    pub density_plus: Vec<f64>,
    pub density_minus: Vec<f64>,
    pub mean_x: f64,
    pub mean_p: f64,
    pub mean_sigma_x: f64,
    pub positive_population: f64,
    pub energy: f64,
    pub state: SpinorField,
}

impl Frame {
    pub fn capture(state: &SpinorField, params: &DiracParams, op: &SplitOperator) -> Self {
        Self::capture_with(state, params, op.spectral())
    }

    pub fn capture_with(state: &SpinorField, params: &DiracParams, fft: &Spectral) -> Self {
        let norm = state.norm_sqr();
        let scale = 1.0 / norm;
        let plus = project_with(state, params, Branch::Positive, fft);
        let minus = project_with(state, params, Branch::Negative, fft);
        let dens = |s: &SpinorField| {
            s.density()
                .into_iter()
                .map(|r| r * scale)
                .collect::<Vec<_>>()
        };
        Self {
            time: state.time,
            density: dens(state),
            density_plus: dens(&plus),
            density_minus: dens(&minus),
            mean_x: state.mean_x(),
            mean_p: state.mean_p(fft),
            mean_sigma_x: state.mean_sigma_x(),
            positive_population: plus.norm_sqr() / norm,
            energy: state.energy(params, fft),
            state: state.clone(),
        }
    }

    pub fn negative_population(&self) -> f64 {
        let dx = self.state.grid.dx();
        self.density_minus.iter().sum::<f64>() * dx
    }

    /// ∫min(ρ₊, ρ₋)dx.
    pub fn branch_overlap(&self) -> f64 {
        let dx = self.state.grid.dx();
        self.density_plus
            .iter()
            .zip(&self.density_minus)
            .map(|(a, b)| a.min(*b))
            .sum::<f64>()
            * dx
    }
}

#[derive(Clone, Debug)]
pub struct FrameSeries {
    pub params: DiracParams,
    pub frames: Vec<Frame>,
}

impl FrameSeries {
    pub fn first(&self) -> &Frame {
        &self.frames[0]
    }

    pub fn last(&self) -> &Frame {
        self.frames.last().expect("series has at least one frame")
    }

    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.time).collect()
    }
}

/// Runs the propagator in chunks of `frame_stride` steps, capturing the initial
/// state, every chunk boundary and the final state.
pub fn record_frames(
    state: &SpinorField,
    params: &DiracParams,
    dt: f64,
    n_steps: usize,
    frame_stride: usize,
) -> Result<FrameSeries> {
    if frame_stride == 0 {
        return Err(Error::InvalidParams("frame_stride must be > 0".into()));
    }
    let op = SplitOperator::new(&state.grid, params, dt)?;
    let mut current = state.clone();
    let mut frames = vec![Frame::capture(&current, params, &op)];
    let mut done = 0;
    while done < n_steps {
        let chunk = frame_stride.min(n_steps - done);
        op.advance(&mut current, chunk, done)?;
        done += chunk;
        frames.push(Frame::capture(&current, params, &op));
    }
    Ok(FrameSeries {
        params: *params,
        frames,
    })
}

/// Tunneling probability as the negative-branch population of the final frame.
/// Requires the reflected and transmitted parts to have separated.
pub fn tunnel_probability(series: &FrameSeries) -> Result<f64> {
    let last = series.last();
    let overlap = last.branch_overlap();
    if overlap > SEPARATION_OVERLAP_MAX {
        return Err(Error::NotSeparated { overlap });
    }
    Ok(last.negative_population().clamp(0.0, 1.0))
}

/// Alternative estimate: probability found beyond the classical turning point
/// of a particle with the initial mean momentum, at the final frame.
pub fn tunnel_probability_position(series: &FrameSeries) -> f64 {
    let first = series.first();
    let last = series.last();
    turning_point_tail(
        &series.params,
        first.mean_x,
        first.mean_p,
        &last.density,
        &last.state.grid,
    )
}

/// Weight of `density` beyond the classical turning point of a particle
/// starting at `x0` with momentum `p0`.
pub fn turning_point_tail(
    params: &DiracParams,
    x0: f64,
    p0: f64,
    density: &[f64],
    grid: &Grid,
) -> f64 {
    let kinetic = params.energy(p0) - params.mc2;
    let dx = grid.dx();
    let beyond = |pred: &dyn Fn(f64) -> bool| -> f64 {
        density
            .iter()
            .enumerate()
            .filter(|(j, _)| pred(grid.x(*j)))
            .map(|(_, r)| r)
            .sum::<f64>()
            * dx
    };
    match params.potential {
        Potential::None => 0.0,
        Potential::Linear { g } if g > 0.0 => {
            let turning = x0 + kinetic / g;
            beyond(&|x| x > turning)
        }
        Potential::Linear { .. } => 0.0,
        Potential::Quadratic { q } if q > 0.0 => {
            let base = params.potential.at(x0);
            let reach = ((kinetic + base) / q).sqrt();
            beyond(&|x| x.abs() > reach)
        }
        Potential::Quadratic { .. } => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::make_gaussian_spinor;
    use crate::C64;

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn single_chunk_gives_two_frames() {
        let g = Grid::new(512, -32.0, 32.0).unwrap();
        let s = make_gaussian_spinor(&g, 0.0, 3.5, 1.0, [one(), one()]).unwrap();
        let p = DiracParams::new(0.0097, 0.008, Potential::None).unwrap();
        let series = record_frames(&s, &p, 1.0, 50, 50).unwrap();
        assert_eq!(series.frames.len(), 2);
        assert_eq!(series.times(), vec![0.0, 50.0]);
        let series = record_frames(&s, &p, 1.0, 50, 20).unwrap();
        assert_eq!(series.times(), vec![0.0, 20.0, 40.0, 50.0]);
    }

    #[test]
    fn free_momentum_conserved_across_frames() {
        let g = Grid::default_scattering();
        let s = make_gaussian_spinor(&g, 0.0, 3.5, 1.0, [one(), one()]).unwrap();
        let p = DiracParams::new(0.0097, 0.008168, Potential::None).unwrap();
        let series = record_frames(&s, &p, 1.0, 500, 100).unwrap();
        let p0 = series.first().mean_p;
        for f in &series.frames {
            assert!((f.mean_p - p0).abs() < 1e-6);
            let dx = g.dx();
            let total: f64 = f.density.iter().sum::<f64>() * dx;
            let split: f64 = f.density_plus.iter().chain(&f.density_minus).sum::<f64>() * dx;
            assert!((total - 1.0).abs() < 1e-6);
            assert!((split - total).abs() < 1e-6);
        }
    }

    #[test]
    fn overlapping_branches_are_not_separated() {
        let g = Grid::default_scattering();
        // Internal state (1, 0) at rest is an even split of the branches once
        // c p ≫ mc²; with mc² = 0 it is exactly half/half at every point.
        let s = make_gaussian_spinor(&g, 0.0, 0.0, 1.0, [one(), C64::default()]).unwrap();
        let p = DiracParams::new(0.0097, 0.0, Potential::Linear { g: 0.01 }).unwrap();
        let series = record_frames(&s, &p, 1.0, 1, 1).unwrap();
        assert!(matches!(
            tunnel_probability(&series),
            Err(Error::NotSeparated { .. })
        ));
    }
}
