//! Streamline tracing through the cross field, separatrix extraction and the
//! partition of separatrices into curves that cut the domain.

mod partition;
mod segindex;
mod separatrices;
mod streamline;

pub use partition::{partition, Curve, CurveEnd, CurveKind, PartitionResult, TJunction};
pub use segindex::SegmentIndex;
pub use separatrices::{
    singular_targets, trace_separatrices, LimitCycle, Separatrix, SeparatrixSet, SingularRef, SnapTarget,
};
pub use streamline::{rk4_step, trace_streamline, Streamline, Termination};

use crate::mesh::TriMesh;
use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceParams<T> {
    /// RK4 step length.
    pub step: T,
    /// Snap radius as a multiple of the local edge length.
    pub snap_factor: T,
    /// Hard cap on the arc length of one streamline.
    pub max_length: T,
    /// Minimum arc length before a return counts as a closed orbit.
    pub min_cycle_length: T,
    /// Largest direction mismatch on return for a closed orbit.
    pub cycle_angle: T,
}

impl<T: Real> TraceParams<T> {
    /// Step of a quarter mean edge length; cycles need an arc of a tenth of the
    /// domain diameter.
    pub fn for_mesh(mesh: &TriMesh<T>) -> Self {
        let d = mesh.diameter();
        Self {
            step: mesh.mean_edge_length() * T::lit(0.25),
            snap_factor: T::lit(1.5),
            max_length: d * T::lit(40.0),
            min_cycle_length: d * T::lit(0.1),
            cycle_angle: T::PI() / T::lit(8.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > T::zero()) || !(self.snap_factor > T::zero()) || !(self.max_length > self.step) {
            return Err(Error::InvalidParameter("trace step, snap factor and length must be positive".into()));
        }
        Ok(())
    }
}
