"""Wavelet momentum encoding and forecasting of tennis matches"""

from tmsquared.encoding import MomentumEncoder
from tmsquared.forecast import ModelConfig, forecast_next, init_model
from tmsquared.ingest import ingest_csv
from tmsquared.llsa import ChangePointConfig, reconstruct
from tmsquared.modwt import modwt_forward, modwt_inverse
from tmsquared.outcome import decide, simulate_match
from tmsquared.training import TrainConfig, train
