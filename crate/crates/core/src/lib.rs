pub mod apcms;
pub mod classify;
pub mod error;
pub mod exterior;
pub mod g2;
pub mod io;
pub mod liealg;
pub mod presets;
pub mod report;
pub mod scalar;
pub mod symbolic;

pub use error::{Error, Result};
pub use apcms::{Apcms, AxiomAudit, FTensor};
pub use classify::{ClassReport, Combo, Granularity};
pub use exterior::{KForm, Matrix, Metric, Tensor3, Vector};
pub use g2::{G2Bundle, Mode};
pub use io::{emit_spec, parse_spec, ProblemSpec};
pub use liealg::{Connection, LieAlgebra};
pub use report::{render_text, run, Command, Report, RunOptions};
pub use scalar::{Field, QuadExt, Ring};
pub use symbolic::{deduction_chain, Poly, Scenario};
