import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

from kj_logger import get_logger

from .errors import InputError

logger = get_logger(__name__)


class SleConfig:
    """
    Configuration of the eigenvalue backends and the reductions built on them.

    Defaults live on the class. An instance may override any of them, either
    by keyword or from a JSON file, and may carry a working directory that the
    CLI uses for report output.
    """

    package_name = "kj_sle"

    defaults: Dict[str, Any] = {
        "backend": "classical",
        "c_disc": 20.0,  # discretization constant in C_disc * (k+1)^-2 <= eta/2
        "guard_bits": 2,  # extra phase bits on top of log2(8 pi / eta)
        "chernoff_c": 8.0,  # r >= chernoff_c * ln(1/delta) + 1
        "k_cap": 2 ** 24 - 1,  # largest grid for the dense backend
        "spectral_k_cap": 2 ** 30 - 1,  # largest grid for the spectral backend
        "dense_qubit_cap": 24,
        "bump_alpha": 3.0,  # profile h(x) = (x(1-x))^alpha
        "log_base": "e",
        "residual_constant": 2.0,  # C_res in |excess - 2c I(f)| <= C_res (cM)^2
        "residual_safety_factor": 0.5,
        "grid_check_points": 4096,
        "mean_bound_slack": 50.0,  # bound_M = ||h''|| (1 + slack/N)
        "spectral_sturm_k_max": 4095,
        "spectral_residual_tol": 1e-12,
        "spectral_window": 4096,
        "spectral_full_enum_bits": 16,
        "classical_k_start": 255,
        "classical_k_max": 2 ** 22 - 1,
        "threads": 1,
        "dimacs_strict": True,
    }

    backends = ("classical", "spectral", "dense")
    log_bases = ("e", "2", "10")

    def __init__(self, working_directory: Optional[Union[str, Path]] = None, **settings: Any) -> None:
        """
        Initializes the configuration.

        Parameters:
            working_directory (Optional[str]): Directory for reports. Nothing is created when omitted.
            **settings: Overrides of the class defaults.

        Raises:
            InputError: On unknown keys or invalid values.
        """
        unknown = sorted(set(settings) - set(self.defaults))
        if unknown:
            raise InputError(f"Unknown configuration keys: {unknown}")

        for key, value in self.defaults.items():
            setattr(self, key, settings.get(key, value))
        self._validate()

        self.working_directory: Optional[Path] = None
        if working_directory is not None:
            self.set_working_directory(working_directory)
        logger.info(f"{self} initialized! Code: 001")

    def __repr__(self) -> str:
        changed = {k: getattr(self, k) for k in self.defaults if getattr(self, k) != self.defaults[k]}
        return f"<SleConfig {changed}>" if changed else "<SleConfig defaults>"

    def _validate(self) -> None:
        if self.backend not in self.backends:
            raise InputError(f"Unknown backend '{self.backend}', expected one of {self.backends}")
        if str(self.log_base) not in self.log_bases:
            raise InputError(f"Unknown log_base '{self.log_base}', expected one of {self.log_bases}")
        self.log_base = str(self.log_base)
        if self.bump_alpha <= 2:
            raise InputError(f"bump_alpha must exceed 2 for a C2 profile, got {self.bump_alpha}")
        for key in ("c_disc", "chernoff_c", "residual_constant", "residual_safety_factor",
                    "spectral_residual_tol", "mean_bound_slack"):
            if getattr(self, key) <= 0:
                raise InputError(f"{key} must be positive, got {getattr(self, key)}")
        for key in ("guard_bits", "k_cap", "spectral_k_cap", "dense_qubit_cap", "grid_check_points",
                    "spectral_sturm_k_max", "spectral_window", "spectral_full_enum_bits", "classical_k_start",
                    "classical_k_max", "threads"):
            value = getattr(self, key)
            if int(value) != value or value < (0 if key == "guard_bits" else 1):
                raise InputError(f"{key} must be a positive integer, got {value}")
            setattr(self, key, int(value))
        if self.classical_k_start > self.classical_k_max:
            raise InputError("classical_k_start must not exceed classical_k_max")

    @classmethod
    def from_file(cls, path: Union[str, Path], working_directory: Optional[Union[str, Path]] = None) -> "SleConfig":
        """Loads overrides from a JSON object file."""
        path = Path(path)
        try:
            settings = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError as e:
            raise InputError(f"Config file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise InputError(f"Config file {path} is not valid JSON: {e}") from e
        if not isinstance(settings, dict):
            raise InputError(f"Config file {path} must hold a JSON object")
        logger.debug(f"Loaded {len(settings)} settings from {path}")
        return cls(working_directory=working_directory, **settings)

    def replace(self, **changes: Any) -> "SleConfig":
        """Returns a copy with some settings changed."""
        settings = self.to_dict()
        settings.update(changes)
        return SleConfig(working_directory=self.working_directory, **settings)

    def to_dict(self) -> Dict[str, Any]:
        return {key: getattr(self, key) for key in self.defaults}

    @property
    def report_directory(self) -> Optional[Path]:
        if self.working_directory is None:
            return None
        return self.working_directory / "reports"

    def set_working_directory(self, directory: Union[str, Path]) -> None:
        """
        Sets the working directory, creating it when missing.

        Parameters:
            directory (Path): The directory path to set as the working directory.
        """
        directory = Path(directory)
        try:
            if not directory.exists():
                directory.mkdir(parents=True)
                logger.info(f"The directory {directory} was successfully created.")
            self.working_directory = directory
            logger.info(f"Working directory set to {directory}!")
        except OSError as e:
            logger.error(f"Error while setting the working directory: {e}")
            raise InputError(f"Cannot use working directory {directory}: {e}") from e


_default_config: Optional[SleConfig] = None


def get_config(config: Optional[SleConfig] = None) -> SleConfig:
    """Returns `config`, or the shared default instance when None."""
    global _default_config
    if config is not None:
        return config
    if _default_config is None:
        _default_config = SleConfig()
    return _default_config
