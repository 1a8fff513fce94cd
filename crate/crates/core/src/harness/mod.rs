pub mod commands;
pub mod config;
pub mod expr;
pub mod nodes;
