#![allow(dead_code)]

pub mod laws;
pub mod soundness;
pub mod taint;
