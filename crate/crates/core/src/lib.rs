pub mod algorithms;
pub mod analysis;
pub mod experiment;
pub mod linalg;
pub mod oracle;
pub mod random;
pub mod verify;
