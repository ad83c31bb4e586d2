"""Kinetic indicators for limit order books: layers, mean free paths and Knudsen numbers."""

from .book import (Action, BestPrices, BookState, MarketSpec, OrderBook, OrderEvent, Side,
                   Transaction, apply_event, best_and_mid, replay)
from .errors import *  # noqa: F401,F403
from .kinetics import (Indicators, KineticParams, detect_regimes, fit_kappa, fit_mean_free_path,
                       indicators, inner_series, joint_threshold_quantile, knudsen)
from .layers import collect_layers, corr_curve, find_gamma_c, layer_delta, layer_profile
from .series import (coarse_grain, power_spectrum, rolling_mean, spectral_exponent, velocity,
                     weak_stationarity_report)
from .synth import SynthConfig, generate, generate_flash_crash, generate_known_slope

__version__ = "0.1.0"
