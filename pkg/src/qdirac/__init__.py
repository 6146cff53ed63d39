"""q-deformed Dirac oscillator: spectra, Zitterbewegung and q-coherent states."""
from .errors import (
    ConfigError,
    DivergentSeries,
    IncommensurateGrid,
    ParameterError,
    QDiracError,
    TruncationTooSmall,
    UndefinedStatistic,
)
from .qalgebra import DeformationParam, annihilation, creation, q_factorial, q_number
from .states import CoherentParam, coherent_state, mandel_Q, mandel_Qq, q_exponential, suggest_dim
from .oscillator import (
    AjcParams,
    build_ajc_q,
    build_dirac_q,
    build_jc_q,
    energy,
    equivalence_map,
    spectrum_analytic,
)
from .dynamics import evolve, fig2_trace, zitter_coherent_closed, zitter_number_closed
from .gridrep import GridConfig
from .verification import verify_all

__version__ = "0.1.0"
