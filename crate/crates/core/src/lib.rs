pub mod exact;
pub mod freerot;
pub mod pcp;
pub mod reduction;
pub mod resourcegraph;
