pub mod evaluate;
pub mod forecast;
pub mod generate;
pub mod prepare;
pub mod report;
pub mod train;
