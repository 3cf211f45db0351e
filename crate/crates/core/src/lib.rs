pub mod bounds;
pub mod codec;
pub mod dist;
pub mod ring;
pub mod games;
pub mod lab;
pub mod gaussian;
pub mod ntru;
pub mod ringsig;
pub mod rpsf;
pub mod random_oracle;
pub mod sigma;
pub mod stats;
