"""Discrete-time quantum walks with growing random step sizes.

Simulation and analysis suite for the hyperballistic walk whose shift
magnitude at step t is uniform on {1-t, ..., 1+t}, next to the standard
unit-step walk and the classical memory (elephant) random walk, plus the
momentum-space channel treatment of the step-size average.
"""

__version__ = "0.1.0"

from .state import (CoinBlochState, CoinDensity, GaussianPacketSpec,
                    PositionDistribution, WalkState, make_gaussian_packet,
                    make_localized, position_distribution, reduced_coin_density)
from .engine import (INTERVAL, UNIT, CoinParams, ConditionalTables,
                     EnsembleResult, StepSizeRule, TrajectoryRecord,
                     apply_coin, apply_shift, conditional_step_distribution,
                     run_ensemble, run_trajectory, sample_coin_noise,
                     sample_step_size, step_elephant, step_standard,
                     trajectory_stream)
from .classical import (ConditionalCheck, ErwMoments, ErwParams,
                        erw_conditional_check, erw_ensemble_moments,
                        next_step_probability, run_erw_trajectory)
from .analysis import (GaussianityReport, PowerLawFit, TraceDistanceSeries,
                       fit_power_law, gaussianity_check, moments,
                       trace_distance, trace_distance_experiment)
from .spectral import (AliasingGuardError, ChannelResult, EigenExpansion,
                       StepMatrix, TwoPointState, averaged_step_matrix,
                       build_step_matrix, eigenvalues,
                       evolve_two_point_channel, position_coin_blocks,
                       predict_variance_law, small_k_expansion,
                       two_point_from_state)
