pub mod assets;
pub mod scene;
pub mod kinematics;
pub mod codegen;
pub mod frames;
pub mod llm;
pub mod metrics;
pub mod render;
pub mod pipeline;
pub mod synthesis;
