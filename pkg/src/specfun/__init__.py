from specfun.gaussian import (
    norm_cdf,
    norm_cdf_inv,
    norm_pdf,
    psi_fn,
    segment_integrals,
    w_fn,
)

__all__ = [
    "norm_cdf",
    "norm_cdf_inv",
    "norm_pdf",
    "psi_fn",
    "segment_integrals",
    "w_fn",
]
