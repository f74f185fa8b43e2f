"""Monte Carlo ISAC link simulator (Python bindings)."""

import json as _json

from ._isacsim import (  # noqa: F401
    ConfigError,
    audit_power,
    cfar_multiplier,
    codebook_angle,
    comm_gain,
    csv_header,
    default_config,
    glrt_map,
    monte_carlo,
    normalize_config,
    radar_gain,
    run,
    simulate,
    steering_vector,
    version,
)

__version__ = version()


def config_json(config=None, **overrides):
    """Returns JSON text for a config given as None, a dict, or JSON text, with top-level overrides."""
    if config is None:
        data = {}
    elif isinstance(config, str):
        data = _json.loads(config) if config.strip() else {}
    else:
        data = dict(config)
    data.update(overrides)
    return _json.dumps(data)
