"""
Application configuration and environment variables.
"""
import os
from dotenv import load_dotenv

from app.core.exceptions import ConfigurationError

load_dotenv()


def _float_env(name: str, default: str) -> float:
    raw = os.getenv(name, default)
    try:
        return float(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be a number", details={"value": raw})


def _int_env(name: str, default: str) -> int:
    raw = os.getenv(name, default)
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer", details={"value": raw})


# Logging Configuration
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
LOG_JSON = os.getenv("LOG_JSON", "false").lower() == "true"

# Application Configuration
APP_NAME = os.getenv("APP_NAME", "yamabe-towers")
APP_VERSION = os.getenv("APP_VERSION", "0.1.0")
OUTPUT_DIR = os.getenv("OUTPUT_DIR", "./reports")
MANIFOLD_CATALOG = os.getenv(
    "MANIFOLD_CATALOG",
    os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))), "data", "manifolds.json"),
)

# Quadrature Configuration
QUAD_REL_TOL = _float_env("QUAD_REL_TOL", "1e-10")
SWEEP_REL_TOL = _float_env("SWEEP_REL_TOL", "1e-8")
QUAD_MAX_PANELS = _int_env("QUAD_MAX_PANELS", "4000")
if not (0.0 < QUAD_REL_TOL < 1.0 and 0.0 < SWEEP_REL_TOL < 1.0):
    raise ConfigurationError("QUAD_REL_TOL and SWEEP_REL_TOL must lie in (0, 1)")
if QUAD_MAX_PANELS < 1:
    raise ConfigurationError("QUAD_MAX_PANELS must be positive")

# Geometry Configuration
FD_TOLERANCE = _float_env("FD_TOLERANCE", "1e-7")
WEYL_ZERO_THRESHOLD = _float_env("WEYL_ZERO_THRESHOLD", "1e-6")
WEYL_NONZERO_THRESHOLD = _float_env("WEYL_NONZERO_THRESHOLD", "1e-3")
if WEYL_ZERO_THRESHOLD >= WEYL_NONZERO_THRESHOLD:
    raise ConfigurationError("WEYL_ZERO_THRESHOLD must be below WEYL_NONZERO_THRESHOLD")

# Tower Configuration
V_ENVELOPE_CONSTANT = _float_env("V_ENVELOPE_CONSTANT", "1.0")
CUTOFF_RADIUS = _float_env("CUTOFF_RADIUS", "1.0")
CUTOFF_PROFILE = os.getenv("CUTOFF_PROFILE", "smoothstep_quintic")
if CUTOFF_PROFILE not in ("smoothstep_quintic", "exp_bump"):
    raise ConfigurationError(
        f"Unsupported cutoff profile: {CUTOFF_PROFILE}",
        details={"supported_profiles": ["smoothstep_quintic", "exp_bump"]},
    )

# Sweep workers (0 means one per CPU)
TOWER_THREADS = _int_env("TOWER_THREADS", "0")
