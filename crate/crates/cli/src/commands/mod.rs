pub mod compose;
pub mod search;
pub mod spectrum;
pub mod tables;
pub mod trade;
pub mod verify;
