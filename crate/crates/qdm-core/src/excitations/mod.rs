//! Quasiparticles: string operators and confinement, W operators, fusion
//! tables and condensation.

pub mod condense;
pub mod fusion;
pub mod intertwiner;
pub mod strings;

pub use condense::{condense, domain_wall, CondensationReport, DomainWall};
pub use fusion::{compare_with_printed, detect_nonabelian, fusion_table, Discrepancy, FusionTable};
pub use intertwiner::{
    solve_vertex_intertwiners, solve_w, two_vertex_space, verify_w, vertex_intertwiner_family, WOperator, WResidual,
};
pub use strings::{
    apply_string, confinement_csv, confinement_scan, straight_electric, straight_magnetic, string_operator,
    ConfinementRow, StringKind, StringOp,
};
