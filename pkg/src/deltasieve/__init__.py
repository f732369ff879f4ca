"""Δ-series sieving: dials, observation decks, steady states, zones and factoring."""

from .equilibrium import (EquilibriumAnchor, EquilibriumRow, GecStats, equilibrium_anchor,
                          equilibrium_table, gec_growth, jump_factor)
from .errors import (CodecError, ConfigurationError, DeltaSieveError, DomainError,
                     InvalidKeyError, MessageTooLargeError, NoClosedFormError, SteppingError,
                     UnsupportedDeltaError)
from .factorizer import (FactorResult, NeighborRange, ReflectionMark, factor_scan, factor_zone0,
                         inter_delta_verify, neighbor_ranges, od6_search, od_connect_step,
                         quadratic_factor, reflection_scan)
from .series import (BASE_DIALS_4K, BASE_DIALS_4K2, DialPair, SeriesRow, SeriesSpec, compute_row,
                     deck_values, generate, integer_sqrt_floor, iter_rows, resolve_dials)
from .steady_state import (DEFAULT_REGISTRY, SsvQuery, SteadyStateForm, first_p_at_ssv,
                           invert_ssv, ssv_closed_form, verify_ssv_empirically)
from .trapdoor import (Ciphertext, TrapdoorParams, TrapdoorPrivateKey, decode_message, decrypt,
                       encode_message, encrypt, sum_series_factor_pair)
from .zones import (ZoneCriterion, ZoneReport, SwitchoverMark, coverage_report, detect_zones,
                    find_switchover_points, zone_shift_scan)

__version__ = "0.1.0"
