pub mod ddpg;
pub mod es;
pub mod harness;
pub mod sim;
pub mod supervisor;
pub mod tensor;
