pub mod criteria;
pub mod report;
pub mod simulate;
pub mod verify;

pub use criteria::{cmd_criteria, membership_exit_code};
pub use report::{cmd_report, run_matrix, MatrixSettings, ReportRow};
pub use simulate::{cmd_simulate, SimulateArgs};
pub use verify::{cmd_verify, Suite, VerifySettings};
