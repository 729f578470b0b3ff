# Homodyne tomography uncertainty checks
__version__ = "0.1.0"

from homodyne_uncertainty.state_models import (  # noqa: E402
    FockStateSpec,
    GaussianStateSpec,
    coherent,
    fock,
    squeezed_vacuum,
    thermal,
    vacuum,
)
from homodyne_uncertainty.tomogram_model import (  # noqa: E402
    OpticalTomogramGrid,
    QuadratureSampleSet,
    SymplecticPoint,
    histogram_tomogram,
    validate,
)
from homodyne_uncertainty.uncertainty import CheckConfig, UncertaintyReport, f_scan  # noqa: E402
from homodyne_uncertainty.radon import WignerGrid, forward_radon, inverse_radon  # noqa: E402
from homodyne_uncertainty.sampler import AcquisitionPlan, acquire  # noqa: E402
