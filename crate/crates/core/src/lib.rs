pub mod acceptance;
pub mod algebra_core;
pub mod brace_calculus;
pub mod cohomology;
pub mod exactlin;
pub mod homotopy_structures;
pub mod instances;
pub mod io;
pub mod linf_deformation;
pub mod operad_forest;
