//! Print the prompt sent to the language model for a description.
//!
//! cargo run --example prompt_template -- "A basketball free falls in the air" [dsl|script]

use motionforge::assets::AssetCatalog;
use motionforge::codegen::FunctionManifest;
use motionforge::llm::{build_prompt, PromptMode, PromptTemplate, WorldInfo};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let text = args.next().unwrap_or_else(|| "A basketball free falls in the air".into());
    let mode = match args.next().as_deref() {
        Some("script") => PromptMode::Script,
        _ => PromptMode::Dsl,
    };
    let template = PromptTemplate::new(mode, &FunctionManifest::builtin(), &AssetCatalog::builtin(), &WorldInfo::default());
    print!("{}", build_prompt(&text, &template)?);
    Ok(())
}
