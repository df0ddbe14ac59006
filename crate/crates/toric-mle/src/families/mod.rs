//! Model families with closed-form structure.
//!
//! Constructors for rational normal scrolls, Veronese and Segre embeddings,
//! and hierarchical log-linear models, plus the exact computations the
//! families admit: ML degrees by distinct-root counting, discriminant
//! membership for toric hypersurfaces, and the principal-minor test for
//! quadratic Veronese embeddings. Everything that decides "is zero" runs in
//! exact rational arithmetic.

pub mod hierarchical;
pub mod hypersurface;
pub mod scroll;
pub mod segre;
pub mod veronese;

pub use hierarchical::hierarchical_model;
pub use hypersurface::{
    hypersurface_generator, hypersurface_kernel, hypersurface_sigma_test, KernelVector, SigmaTest,
};
pub use scroll::{
    binomial_scroll_scaling, hirzebruch_mldegree, scroll_closed_form_start, scroll_mldegree,
    scroll_model, ScrollSpec,
};
pub use segre::{segre_model, segre_rank1_mle, segre_rank1_test};
pub use veronese::{
    ver2_sigma_test, veronese_exponents, veronese_model, veronese_rank1_mle,
    veronese_rank1_scaling, Ver2Sigma,
};
