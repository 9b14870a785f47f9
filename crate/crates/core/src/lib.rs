pub mod cli;
pub mod construct;
pub mod field;
pub mod identities;
pub mod intmath;
pub mod inverse;
pub mod par;
pub mod poly;
pub mod record;
pub mod redei;
pub mod selftest;
