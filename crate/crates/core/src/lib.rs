//! Truncated-Fock-space simulator of the trapped-ion SWAP test.
//!
//! The space is `qubit ⊗ A ⊗ B ⊗ C` with the qubit slowest-varying. All
//! numerics are generic over the real scalar; `f64` and `f32` aliases are
//! exported at the crate root.
//!
//! ```
//! use swaptest::{prepare_registers, swap_test, ModeLayout, PrepRecipe64};
//!
//! let layout = ModeLayout::for_swap_test(6).unwrap();
//! let input = prepare_registers(layout, &PrepRecipe64::Fock { n: 1 }, &PrepRecipe64::Fock { n: 1 }).unwrap();
//! let r = swap_test(&input, None, 0).unwrap();
//! assert!((r.overlap_from_pg - 1.0).abs() < 1e-12);
//! ```

// `!(x > 0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bosonic;
pub mod error;
pub mod fitting;
pub mod gates;
pub mod hilbert;
pub mod linalg;
pub mod noise;
pub mod oracles;
pub mod protocols;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use fitting::{bootstrap_errors, fit, BootstrapResult, Bound, FitModel, FitModelKind, FitResult};
pub use gates::{apply, GateKind, GateOp, PulseEnvelope};
pub use hilbert::{
    overlap_exact, partial_trace, qubit_ground_probability, Ensemble, Factor, ModeLayout, PureState, Qubit,
    ReducedDensity,
};
pub use noise::{noisy_swap_test, ContrastModel, NoiseConfig};
pub use protocols::{prepare, prepare_registers, swap_test, PrepRecipe, SwapTest, SwapTestResult};
pub use scalar::{Cplx, Real};

pub type Complex64 = Cplx<f64>;
pub type PureState64 = PureState<f64>;
pub type Ensemble64 = Ensemble<f64>;
pub type ReducedDensity64 = ReducedDensity<f64>;
pub type GateOp64 = GateOp<f64>;
pub type PrepRecipe64 = PrepRecipe<f64>;
pub type SwapTestResult64 = SwapTestResult<f64>;
pub type FitResult64 = FitResult<f64>;

pub type Complex32 = Cplx<f32>;
pub type PureState32 = PureState<f32>;
pub type Ensemble32 = Ensemble<f32>;
pub type ReducedDensity32 = ReducedDensity<f32>;
pub type GateOp32 = GateOp<f32>;
pub type PrepRecipe32 = PrepRecipe<f32>;
pub type SwapTestResult32 = SwapTestResult<f32>;
pub type FitResult32 = FitResult<f32>;
