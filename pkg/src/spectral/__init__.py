# Spectral module - eigendecomposition, frequency responses, integral-Lipschitz constants

from .response import (
    LipschitzEstimate,
    frequency_response,
    integral_lipschitz_constant,
    log_ratio_factor,
    lipschitz_over_spectrum,
    spectrum_domain,
    sup_abs_on_interval,
)
from .decomposition import (
    SpectralDecomposition,
    decompose,
    spectral_extremes,
    circulant_eigenvalues,
)
