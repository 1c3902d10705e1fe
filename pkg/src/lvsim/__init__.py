"""RSS location verification: detector, theoretical rates, threshold tuning,
and a Monte Carlo validation harness."""

__version__ = "0.1.0"

from .config import ConfigError, ScenarioConfig, default_config, emit_config, parse_config
from .fisher import (
    Covariance,
    DecisionEllipse,
    FisherInfo,
    SingularInformationError,
    covariance,
    decision_ellipse,
    fim,
    mahalanobis_sq,
    verdict,
)
from .geometry import ChannelParams, Deployment, Hypothesis, Position, Rect, bearing, euclidean_distance, mean_rss
from .infotheory import (
    DegenerateBaseRateError,
    DetectorOperatingPoint,
    IdcCurve,
    NoInformativeThresholdError,
    conditional_entropy,
    idc,
    input_entropy,
    optimize_threshold,
)
from .localization import AllStartsFailedError, EstimationResult, MleEstimator, mle_estimate
from .observation import (
    AttackerMode,
    AttackerSpec,
    MeanRssVector,
    RssSnapshot,
    legitimate_mean_vector,
    malicious_mean_vector,
    optimal_boost,
    sample_legitimate,
    sample_malicious,
    spoofed_mean_vector,
)
from .rates import (
    EllipseMassProfile,
    PosteriorGrid,
    RateTriple,
    detection_rate,
    false_positive_closed,
    false_positive_integral,
    log_likelihood,
    posterior_grid,
)
from .simulate import CurveTable, TheoryEngine, TrialRecord, run_sigma_sweep, run_threshold_sweep, run_trial

__all__ = [name for name in dir() if not name.startswith("_")]
