pub mod analyze;
pub mod correlate;
pub mod generate;
pub mod guidance;
pub mod revise;
pub mod score;
