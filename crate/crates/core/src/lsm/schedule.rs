use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulation::TimeGrid;

/// Grid indices at which early exercise is allowed. Always ends at maturity
/// and never contains index 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExerciseSchedule {
    grid: TimeGrid,
    indices: Vec<usize>,
}

impl ExerciseSchedule {
    pub fn new(grid: TimeGrid, indices: Vec<usize>) -> Result<Self> {
        let m = grid.steps();
        if indices.is_empty() {
            return Err(Error::Schedule("no exercise dates".into()));
        }
        if indices[0] == 0 {
            return Err(Error::Schedule("exercise at t = 0 is not allowed".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Schedule("indices must be strictly increasing".into()));
        }
        if *indices.last().unwrap() != m {
            return Err(Error::Schedule(format!("last exercise index must be maturity {m}")));
        }
        Ok(Self { grid, indices })
    }

    /// Exercise at maturity only (a European put).
    pub fn maturity_only(grid: TimeGrid) -> Self {
        Self {
            indices: vec![grid.steps()],
            grid,
        }
    }

    /// Exercise at every grid point after t = 0.
    pub fn american(grid: TimeGrid) -> Self {
        Self {
            indices: (1..=grid.steps()).collect(),
            grid,
        }
    }

    /// `dates` equally spaced dates; the step count must be a multiple of `dates`.
    pub fn bermudan(grid: TimeGrid, dates: usize) -> Result<Self> {
        let m = grid.steps();
        check_dates(m, dates)?;
        if !m.is_multiple_of(dates) {
            return Err(Error::Schedule(format!(
                "{m} steps is not a multiple of {dates} exercise dates"
            )));
        }
        let stride = m / dates;
        Ok(Self {
            indices: (1..=dates).map(|k| k * stride).collect(),
            grid,
        })
    }

    /// `dates` equally spaced dates, each mapped to the nearest grid index.
    pub fn bermudan_nearest(grid: TimeGrid, dates: usize) -> Result<Self> {
        let m = grid.steps();
        check_dates(m, dates)?;
        let indices = (1..=dates)
            .map(|k| ((k * m) as f64 / dates as f64).round() as usize)
            .collect();
        Self::new(grid, indices)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

fn check_dates(m: usize, dates: usize) -> Result<()> {
    if dates == 0 {
        return Err(Error::Schedule("at least one exercise date is required".into()));
    }
    if dates > m {
        return Err(Error::Schedule(format!(
            "{dates} exercise dates need at least as many time steps, got {m}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(m: usize) -> TimeGrid {
        TimeGrid::new(0.25, m).unwrap()
    }

    #[test]
    fn bermudan_equal_spacing() {
        let s = ExerciseSchedule::bermudan(grid(40), 20).unwrap();
        assert_eq!(s.len(), 20);
        assert_eq!(s.indices()[0], 2);
        assert_eq!(*s.indices().last().unwrap(), 40);
        assert!(ExerciseSchedule::bermudan(grid(30), 20).is_err());
        assert!(ExerciseSchedule::bermudan(grid(10), 20).is_err());
    }

    #[test]
    fn nearest_mapping_for_non_divisible_grid() {
        let s = ExerciseSchedule::bermudan_nearest(grid(750), 26).unwrap();
        assert_eq!(s.len(), 26);
        assert_eq!(s.indices()[0], 29); // 750 / 26 = 28.85
        assert_eq!(s.indices()[12], 375);
        assert_eq!(*s.indices().last().unwrap(), 750);
    }

    #[test]
    fn explicit_indices_are_checked() {
        let g = grid(4);
        assert!(ExerciseSchedule::new(g, vec![0, 4]).is_err());
        assert!(ExerciseSchedule::new(g, vec![2, 2, 4]).is_err());
        assert!(ExerciseSchedule::new(g, vec![1, 3]).is_err());
        assert!(ExerciseSchedule::new(g, vec![]).is_err());
        assert_eq!(ExerciseSchedule::new(g, vec![1, 3, 4]).unwrap().len(), 3);
        assert_eq!(ExerciseSchedule::american(g).indices(), &[1, 2, 3, 4]);
        assert_eq!(ExerciseSchedule::maturity_only(g).indices(), &[4]);
    }
}
