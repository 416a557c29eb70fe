pub mod bench;
pub mod snl;
pub mod solve;
pub mod trace2d;
